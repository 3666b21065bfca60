"""Finding and certifying noninterference violations.

A program leaks when two runs that start low-equivalent both terminate in
states that are not. Such a pair is turned into an under-approximate
certificate: the singleton post-relation ``S_w`` holding only at the two final
states is satisfiable, implies ``not L``, and ``<L> c, c <S_w>`` is valid.
Finding nothing only means no violation exists within the search bound.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from . import assertions as A
from . import imp
from .assertions import Implication, Relation, pair_relation
from .domain import SearchDomain
from .imp import Command, State, Terminated
from .oracle import Verdict, relational_valid

REPORT_SCHEMA = "urel.hunt/1"


@dataclass(frozen=True)
class SecurityPolicy:
    low: tuple[str, ...] = ("low",)

    def __post_init__(self) -> None:
        names = tuple(sorted(set(self.low)))
        if not names or not all(n.isidentifier() for n in names):
            raise ValueError("a policy needs at least one low variable name")
        object.__setattr__(self, "low", names)


def low_equiv(policy: SecurityPolicy) -> Relation:
    """``L``: both states agree on every low variable."""
    return A.conj(*(A.eq(A.var1(v), A.var2(v)) for v in policy.low))


def _agree(policy: SecurityPolicy, s: Mapping[str, int], t: Mapping[str, int]) -> bool:
    return all(s[v] == t[v] for v in policy.low)


@dataclass(frozen=True)
class ViolationWitness:
    s: State
    s2: State
    t: State
    t2: State
    fuel_used: tuple[int, int]
    names: tuple[str, ...] = ()

    @property
    def post(self) -> Relation:
        """``S_w``, the singleton post-relation."""
        return pair_relation(self.t, self.t2, self.names)

    def to_json(self) -> dict:
        keys = self.names
        return {
            "s": self.s.as_dict(keys), "s2": self.s2.as_dict(keys),
            "t": self.t.as_dict(keys), "t2": self.t2.as_dict(keys),
            "fuel_used": list(self.fuel_used),
        }


def _finals(c: Command, states: Sequence[State], fuel: int) -> list[Optional[Terminated]]:
    out: list[Optional[Terminated]] = []
    for s in states:
        try:
            r = imp.exec_command(c, s, fuel)
        except imp.ImpOverflowError:
            r = None
        out.append(r if isinstance(r, Terminated) else None)
    return out


def _scan(c: Command, policy: SecurityPolicy, states: Sequence[State],
          finals: Sequence[Optional[Terminated]], first: range) -> Optional[tuple[int, int]]:
    for i in first:
        a = finals[i]
        if a is None:
            continue
        for j, b in enumerate(finals):
            if b is None or not _agree(policy, states[i], states[j]):
                continue
            if not _agree(policy, a.state, b.state):
                return i, j
    return None


def _scan_job(args) -> Optional[tuple[int, int]]:
    c, policy, states, fuel, first = args
    return _scan(c, policy, states, _finals(c, states, fuel), first)


def find_violation(c: Command, policy: SecurityPolicy, dom: SearchDomain, *,
                   jobs: int = 1) -> Optional[ViolationWitness]:
    """The first violating start pair in canonical order, or ``None``.

    Starts whose run exhausts the fuel are skipped, so only pairs of
    terminating runs count. The result does not depend on ``jobs``.
    """
    states = dom.states()
    names = tuple(sorted(set(dom.variables) | imp.command_vars(c) | set(policy.low)))
    if jobs > 1 and len(states) > 1:
        step = -(-len(states) // jobs)
        chunks = [range(k, min(k + step, len(states))) for k in range(0, len(states), step)]
        with ProcessPoolExecutor(jobs) as pool:
            hits = list(pool.map(_scan_job, [(c, policy, states, dom.fuel, r) for r in chunks]))
        hit = next((h for h in hits if h is not None), None)
        if hit is None:
            return None
        finals = _finals(c, [states[hit[0]], states[hit[1]]], dom.fuel)
        a, b = finals
        i, j = hit
    else:
        finals = _finals(c, states, dom.fuel)
        hit = _scan(c, policy, states, finals, range(len(states)))
        if hit is None:
            return None
        i, j = hit
        a, b = finals[i], finals[j]
    return ViolationWitness(states[i], states[j], a.state, b.state, (a.fuel_used, b.fuel_used), names)


@dataclass
class Certificate:
    witness: ViolationWitness
    domain: SearchDomain
    satisfiable: Optional[tuple[State, State]]
    implies_not_low: Implication
    validity: Optional[Verdict] = None
    reproduced: Optional[bool] = None
    direct: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        third = self.reproduced if self.direct else (self.validity is not None and self.validity.valid)
        return self.satisfiable is not None and bool(self.implies_not_low) and bool(third)

    def checks(self) -> dict:
        out = {
            "satisfiable": {"ok": self.satisfiable is not None},
            "implies_not_low": {
                "ok": bool(self.implies_not_low),
                "counterexample": None if self.implies_not_low.counterexample is None
                else [s.as_dict() for s in self.implies_not_low.counterexample],
            },
        }
        if self.direct:
            out["reexecution"] = {"ok": bool(self.reproduced)}
        else:
            v = self.validity
            out["valid"] = {"ok": bool(v and v.valid), "status": v.status if v else None,
                            "detail": None if v is None or v.valid else str(v)}
        return out


def certify(c: Command, w: ViolationWitness, policy: SecurityPolicy,
            dom: SearchDomain) -> Certificate:
    """Check that ``w`` proves ``c`` insecure.

    The three checks run on ``dom`` widened by the witness's own values, so
    that ``S_w`` can be satisfied there.
    """
    big = dom.extended(w.s, w.s2, w.t, w.t2)
    post = w.post
    sat = A.satisfiable_on(post, big)
    neg = A.implies_on(post, A.Neg(low_equiv(policy)), big)
    verdict = relational_valid(low_equiv(policy), c, c, post, big)
    cert = Certificate(w, big, sat, neg, verdict)
    if big != dom:
        cert.notes.append("domain widened with the witness values")
    return cert


def certify_direct(c: Command, s: Mapping[str, int], s2: Mapping[str, int],
                   policy: SecurityPolicy, fuel: int = 10**8) -> Certificate:
    """Certify a given start pair by running both executions once.

    Used where enumerating a domain is out of reach: validity of
    ``<L> c, c <S_w>`` then follows from the two reproduced runs, since
    ``S_w`` holds at a single pair.
    """
    s, s2 = State(s), State(s2)
    if not _agree(policy, s, s2):
        raise ValueError("start states are not low-equivalent")
    runs = [imp.exec_command(c, x, fuel) for x in (s, s2)]
    if not all(isinstance(r, Terminated) for r in runs):
        raise ValueError(f"a run did not terminate within fuel {fuel}")
    a, b = runs
    names = tuple(sorted(set(s) | set(s2) | set(a.state) | set(b.state) | set(policy.low)))
    w = ViolationWitness(s, s2, a.state, b.state, (a.fuel_used, b.fuel_used), names)
    post = w.post
    # S_w pins both states, so a domain holding just the witness values suffices
    small = SearchDomain({v: {a.state[v]} | {b.state[v]} for v in names}, fuel=0)
    sat = A.satisfiable_on(post, small)
    neg = A.implies_on(post, A.Neg(low_equiv(policy)), small)
    again = [imp.exec_command(c, x, fuel) for x in (s, s2)]
    reproduced = (isinstance(again[0], Terminated) and again[0].state == a.state
                  and isinstance(again[1], Terminated) and again[1].state == b.state
                  and not _agree(policy, a.state, b.state))
    return Certificate(w, small, sat, neg, None, reproduced, direct=True)


def program_hash(c: Command) -> str:
    return hashlib.sha256(imp.format_command(c).encode()).hexdigest()


def hunt_report(c: Command, policy: SecurityPolicy, dom: SearchDomain,
                cert: Optional[Certificate]) -> dict:
    """JSON-ready summary of a hunt."""
    report = {
        "schema": REPORT_SCHEMA,
        "program": imp.format_command(c),
        "program_sha256": program_hash(c),
        "policy": {"low": list(policy.low)},
        "domain": dom.describe(),
        "found": cert is not None,
    }
    if cert is None:
        report["message"] = "no violation found at this bound"
        return report
    report["witness"] = cert.witness.to_json()
    report["post"] = str(cert.witness.post)
    report["certificate_domain"] = cert.domain.describe()
    report["mode"] = "direct" if cert.direct else "enumeration"
    report["checks"] = cert.checks()
    report["certified"] = cert.ok
    report["notes"] = cert.notes
    return report


def format_report(report: dict) -> str:
    lines = [f"program sha256 {report['program_sha256'][:16]}",
             f"policy low = {', '.join(report['policy']['low'])}"]
    if not report["found"]:
        lines.append(report["message"])
        return "\n".join(lines)
    w = report["witness"]
    lines += [
        f"s  = {json.dumps(w['s'])}",
        f"s' = {json.dumps(w['s2'])}",
        f"t  = {json.dumps(w['t'])}",
        f"t' = {json.dumps(w['t2'])}",
        f"loop iterations {w['fuel_used'][0]} and {w['fuel_used'][1]}",
    ]
    for name, check in report["checks"].items():
        status = "pass" if check["ok"] else "FAIL"
        extra = f" ({check['detail']})" if check.get("detail") else ""
        lines.append(f"{status} {name}{extra}")
    lines.append("certified violation" if report["certified"] else "witness NOT certified")
    return "\n".join(lines)
