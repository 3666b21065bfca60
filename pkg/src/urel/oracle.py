"""Brute-force validity of under-approximate triples on a bounded domain.

A relational triple ``<R> c, c' <S>`` is valid when every ``S``-pair of final
states is reached by running ``c`` and ``c'`` from some ``R``-pair. The
one-program version is the under-approximate Hoare triple. Both are decided
here by enumeration over a :class:`~urel.domain.SearchDomain`.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .assertions import Relation, RelationLike, as_predicate, sides_used
from .domain import SearchDomain
from .imp import Command, FuelExhausted, ImpOverflowError, State, exec_command

VALID = "valid"
INVALID = "invalid"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a bounded validity check.

    ``pair`` is the lexicographically least unreachable post-pair for
    ``invalid`` (a single state for Hoare triples); ``start`` is a start state
    whose run was cut off for ``unknown``.
    """
    status: str
    pair: Optional[tuple[State, ...]] = None
    start: Optional[State] = None
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def invalid(self) -> bool:
        return self.status == INVALID

    @property
    def unknown(self) -> bool:
        return self.status == UNKNOWN

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        if self.invalid:
            return f"invalid: no pre-image for {self.pair}"
        return f"unknown: {self.reason}"


@dataclass
class Runs:
    """Outcomes of one command from every state of a domain."""
    finals: dict[State, Optional[State]]   # None marks a run cut off
    preimages: dict[State, list[State]]
    stuck: list[State]

    @property
    def exhausted(self) -> bool:
        return bool(self.stuck)


def run_all(c: Command, dom: SearchDomain) -> Runs:
    """Execute ``c`` from every state of ``dom``, memoizing by start state."""
    finals: dict[State, Optional[State]] = {}
    pre: dict[State, list[State]] = defaultdict(list)
    stuck: list[State] = []
    for s in dom.states():
        try:
            r = exec_command(c, s, dom.fuel)
        except ImpOverflowError:
            r = FuelExhausted(dom.fuel)
        if isinstance(r, FuelExhausted):
            finals[s] = None
            stuck.append(s)
        else:
            finals[s] = r.state
            pre[r.state].append(s)
    return Runs(finals, dict(pre), stuck)


def reachable_finals(c: Command, dom: SearchDomain) -> tuple[frozenset[State], bool]:
    """Final states reached from ``dom`` and whether any run ran out of fuel."""
    runs = run_all(c, dom)
    return frozenset(t for t in runs.finals.values() if t is not None), runs.exhausted


def relational_valid(r: RelationLike, c: Command, c2: Command, s: RelationLike,
                     dom: SearchDomain, *, runs1: Runs | None = None,
                     runs2: Runs | None = None) -> Verdict:
    """Decide ``<r> c, c2 <s>`` by enumeration over ``dom``."""
    pre = as_predicate(r, dom)
    post = as_predicate(s, dom)
    runs1 = runs1 or run_all(c, dom)
    runs2 = runs2 or run_all(c2, dom)
    empty: list[State] = []
    unknown: Optional[Verdict] = None
    for t, t2 in dom.pairs():
        if not post(t, t2):
            continue
        starts1 = runs1.preimages.get(t, empty)
        starts2 = runs2.preimages.get(t2, empty)
        if any(pre(a, b) for a in starts1 for b in starts2):
            continue
        # a cut-off run could still have produced this pair
        blocker = _possible_blocker(pre, starts1, starts2, runs1.stuck, runs2.stuck)
        if blocker is None:
            return Verdict(INVALID, pair=(t, t2))
        if unknown is None:
            unknown = Verdict(UNKNOWN, pair=(t, t2), start=blocker,
                              reason=f"fuel {dom.fuel} exhausted from {blocker.as_dict()}")
    return unknown or Verdict(VALID)


def _possible_blocker(pre: Callable[[State, State], bool], starts1: list[State],
                      starts2: list[State], stuck1: list[State],
                      stuck2: list[State]) -> Optional[State]:
    for a in stuck1:
        for b in [*starts2, *stuck2]:
            if pre(a, b):
                return a
    for b in stuck2:
        for a in starts1:
            if pre(a, b):
                return b
    return None


OnePredicate = Union[RelationLike, Callable[[State], bool]]


def _one_state(p, dom: SearchDomain) -> Callable[[State], bool]:
    if isinstance(p, Relation):
        if 2 in sides_used(p):
            raise ValueError("one-state predicate mentions side 2")
        f = as_predicate(p, dom)
        return lambda s: f(s, s)
    return p


def hoare_valid_under(p: OnePredicate, c: Command, q: OnePredicate, dom: SearchDomain,
                      *, runs: Runs | None = None) -> Verdict:
    """Decide the under-approximate Hoare triple ``[p] c [q]`` over ``dom``.

    ``p`` and ``q`` are one-state predicates: relations that only read side 1,
    or callables taking a single state.
    """
    pre = _one_state(p, dom)
    post = _one_state(q, dom)
    runs = runs or run_all(c, dom)
    empty: list[State] = []
    unknown: Optional[Verdict] = None
    for t in dom.states():
        if not post(t):
            continue
        if any(pre(s) for s in runs.preimages.get(t, empty)):
            continue
        blocker = next((s for s in runs.stuck if pre(s)), None)
        if blocker is None:
            return Verdict(INVALID, pair=(t,))
        if unknown is None:
            unknown = Verdict(UNKNOWN, pair=(t,), start=blocker,
                              reason=f"fuel {dom.fuel} exhausted from {blocker.as_dict()}")
    return unknown or Verdict(VALID)
