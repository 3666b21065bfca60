"""Command-line front end: ``urel run|oracle|check|decomp|hunt``.

Exit status: 0 when the answer is positive (terminated, valid, accepted,
equivalences hold, violation certified), 1 when it is negative (invalid,
rejected, equivalence broken, no violation at this bound), 2 for unknown
verdicts and errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Iterable, Optional

from . import imp
from .assertions import relations_vars
from .decomp import check_lemma_decomp, check_skip_bridge, check_theorem_decomp, decomp
from .domain import DomainTooLarge, SearchDomain
from .insecurity import (SecurityPolicy, certify, certify_direct, find_violation,
                         format_report, hunt_report)
from .kernel import check_derivation
from .oracle import relational_valid
from .parse import ParseError, parse_command, parse_relation
from .script import load_script, parse_range, script_vars

OK, NEGATIVE, UNKNOWN = 0, 1, 2
DEFAULT_RANGE = [0, 1, 2]


class UsageError(Exception):
    pass


def _program(arg: str) -> imp.Command:
    """A path to an ``.imp`` file, or program text given inline."""
    path = Path(arg)
    if path.suffix == ".imp" or path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc.strerror}") from exc
        return parse_command(text)
    return parse_command(arg)


def _state(text: Optional[str]) -> imp.State:
    if not text:
        return imp.State()
    values = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep or not name.strip().isidentifier():
            raise UsageError(f"bad state binding {item!r}; expected NAME=INT")
        try:
            values[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"bad value in {item!r}") from None
    return imp.State(values)


def _ranges(items: Iterable[str]) -> tuple[dict[str, list[int]], Optional[list[int]]]:
    per_var: dict[str, list[int]] = {}
    default = None
    for item in items:
        try:
            var, values = parse_range(item)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if var is None:
            default = values
        else:
            per_var[var] = values
    return per_var, default


def _domain(args, names: Iterable[str], base: Optional[dict] = None) -> SearchDomain:
    """Domain from ``--range`` flags over ``names``; ``base`` holds defaults."""
    per_var, default = _ranges(args.range or [])
    base = base or {}
    values = dict(base.get("values", {}))
    for name in names:
        if name in per_var:
            values[name] = per_var[name]
        elif default is not None and name not in values:
            values[name] = default
        elif name not in values:
            values[name] = DEFAULT_RANGE
    values.update(per_var)
    fuel = args.fuel if args.fuel is not None else base.get("fuel", 8)
    n_max = getattr(args, "nmax", None)
    n_max = n_max if n_max is not None else base.get("n_max", 3)
    return SearchDomain(values, fuel=fuel, n_max=n_max,
                        quantifier_values=base.get("quantifier_values"))


def _emit(args, report: dict, text: str, started: float) -> None:
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(text)
    if args.timings:
        print(f"time {time.perf_counter() - started:.3f}s")


def _domain_line(dom: SearchDomain) -> str:
    ranges = ", ".join(f"{n} in {{{', '.join(map(str, vs))}}}" for n, vs in dom.values)
    return f"domain: {ranges}; fuel {dom.fuel}; n_max {dom.n_max}"


# -- subcommands ------------------------------------------------------------

def cmd_run(args) -> int:
    started = time.perf_counter()
    c = _program(args.program)
    s = _state(args.state)
    fuel = args.fuel if args.fuel is not None else 10**6
    try:
        r = imp.exec_command(c, s, fuel)
    except imp.ImpOverflowError as exc:
        raise UsageError(f"arithmetic overflow: {exc}") from None
    if isinstance(r, imp.FuelExhausted):
        report = {"schema": "urel.run/1", "status": "fuel_exhausted", "fuel": fuel}
        _emit(args, report, f"fuel exhausted after {fuel} loop iterations", started)
        return UNKNOWN
    report = {"schema": "urel.run/1", "status": "terminated", "state": r.state.as_dict(),
              "iterations": r.fuel_used}
    text = f"final state {json.dumps(r.state.as_dict())} after {r.fuel_used} loop iterations"
    _emit(args, report, text, started)
    return OK


def cmd_oracle(args) -> int:
    started = time.perf_counter()
    left = _program(args.left)
    right = _program(args.right) if args.right else left
    pre = parse_relation(args.pre)
    post = parse_relation(args.post)
    names = imp.command_vars(left) | imp.command_vars(right) | relations_vars([pre, post])
    dom = _domain(args, names)
    v = relational_valid(pre, left, right, post, dom)
    report = {"schema": "urel.oracle/1", "domain": dom.describe(), "status": v.status,
              "pair": None if v.pair is None else [s.as_dict(dom.variables) for s in v.pair],
              "start": None if v.start is None else v.start.as_dict(dom.variables),
              "reason": v.reason}
    lines = [_domain_line(dom), v.status]
    if v.invalid:
        t, t2 = v.pair
        lines.append(f"counterexample: post pair {json.dumps(t.as_dict(dom.variables))} / "
                     f"{json.dumps(t2.as_dict(dom.variables))} has no pre-image")
    elif v.unknown:
        lines.append(v.reason)
    _emit(args, report, "\n".join(lines), started)
    return {"valid": OK, "invalid": NEGATIVE}.get(v.status, UNKNOWN)


def cmd_check(args) -> int:
    started = time.perf_counter()
    script = load_script(args.proof)
    dom = _domain(args, script_vars(script), script.domain)
    report = check_derivation(script.derivation, dom, extensional=args.extensional)
    out = {"schema": "urel.check/1", **report.to_json()}
    _emit(args, out, _domain_line(dom) + "\n" + report.summary(), started)
    return OK if report.accepted else NEGATIVE


def cmd_decomp(args) -> int:
    started = time.perf_counter()
    left = _program(args.left)
    right = _program(args.right) if args.right else left
    pre = parse_relation(args.pre)
    post = parse_relation(args.post)
    names = imp.command_vars(left) | imp.command_vars(right) | relations_vars([pre, post])
    dom = _domain(args, names)
    d = decomp(pre, left, right, post, dom)
    lemma = check_lemma_decomp(pre, left, right, post, dom, d)
    bridge = check_skip_bridge(pre, right, post, dom)
    theorem = check_theorem_decomp(pre, left, right, post, dom, d)
    results = [lemma, bridge, theorem.theorem]
    report = {
        "schema": "urel.decomp/1",
        "domain": dom.describe(),
        "decomp_pairs": sorted([[t.as_dict(dom.variables), s.as_dict(dom.variables)] for t, s in d.pairs],
                               key=json.dumps),
        "checks": {r.name: {"holds": r.holds, "parts": r.parts, "skipped": r.skipped} for r in results},
        "composition": theorem.composition,
    }
    lines = [_domain_line(dom), f"decomp holds at {len(d.pairs)} pair(s)"]
    lines += [str(r) for r in results]
    if theorem.composition is not None:
        lines.append("theorem agrees with lemma plus skip bridge: " + ("yes" if theorem.composition else "NO"))
    _emit(args, report, "\n".join(lines), started)
    if any(r.holds is None for r in results):
        return UNKNOWN
    return OK if all(r.holds for r in results) and theorem.composition else NEGATIVE


def cmd_hunt(args) -> int:
    started = time.perf_counter()
    c = _program(args.program)
    policy = SecurityPolicy(tuple(args.low or ["low"]))
    if args.pair:
        cert = certify_direct(c, _state(args.pair[0]), _state(args.pair[1]), policy,
                              args.fuel if args.fuel is not None else 10**8)
        dom = cert.domain
    else:
        dom = _domain(args, imp.command_vars(c) | set(policy.low))
        w = find_violation(c, policy, dom, jobs=args.jobs)
        cert = None if w is None else certify(c, w, policy, dom)
    report = hunt_report(c, policy, dom, cert)
    text = format_report(report) if args.pair else _domain_line(dom) + "\n" + format_report(report)
    _emit(args, report, text, started)
    if cert is None:
        return NEGATIVE
    return OK if cert.ok else UNKNOWN


# -- argument parsing -------------------------------------------------------

def _common(p: argparse.ArgumentParser, domain: bool = True) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true", help="append wall-clock time (text mode)")
    p.add_argument("--fuel", type=int, help="loop iteration bound per execution")
    if domain:
        p.add_argument("--range", action="append", metavar="[VAR=]LO..HI",
                       help="value range for VAR, or for every variable (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urel", description="Under-approximate relational reasoning for IMP.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a program from one initial state")
    p.add_argument("program", help=".imp file or inline program text")
    p.add_argument("--state", help="initial bindings, e.g. x=1,low=0 (others are 0)")
    _common(p, domain=False)
    p.set_defaults(func=cmd_run)

    for name, func, help_text in (("oracle", cmd_oracle, "decide <PRE> LEFT, RIGHT <POST> by enumeration"),
                                  ("decomp", cmd_decomp, "check the decomposition equivalences on one instance")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("left", help=".imp file or inline program text")
        p.add_argument("right", nargs="?", help="second program (defaults to LEFT)")
        p.add_argument("--pre", required=True, help="pre-relation, e.g. 'low<1> == low<2>'")
        p.add_argument("--post", required=True, help="post-relation")
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("check", help="check a .proof derivation script")
    p.add_argument("proof")
    p.add_argument("--nmax", type=int, help="largest family index checked")
    p.add_argument("--extensional", action="store_true",
                   help="accept schema positions equal on the domain, flagging them")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("hunt", help="find and certify a noninterference violation")
    p.add_argument("program")
    p.add_argument("--low", action="append", help="public variable (repeatable; default low)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the pair search")
    p.add_argument("--pair", nargs=2, metavar=("S", "S2"),
                   help="certify this start pair by direct execution instead of searching")
    _common(p)
    p.set_defaults(func=cmd_hunt)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"urel: parse error, {exc}", file=sys.stderr)
    except (UsageError, DomainTooLarge, ValueError, OSError) as exc:
        print(f"urel: {exc}", file=sys.stderr)
    return UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
