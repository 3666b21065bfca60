"""Decomposing a relational triple into two one-program triples.

``decomp(R, c, c', S)`` relates a final state ``t`` of ``c`` to a start state
``s'`` of ``c'`` when some ``R``-related start ``s`` runs to ``t`` and ``s'``
runs to a ``t'`` with ``S(t, t')``. The functions here check, on a bounded
domain, that

* ``<R> c, c' <S>`` holds iff ``<R> c, skip <decomp>`` and
  ``<decomp> skip, c' <S>`` both hold;
* ``<R> skip, c' <S>`` holds iff ``[R(t, .)] c' [S(t, .)]`` for every ``t``;
* ``<R> c, c' <S>`` holds iff the two families of Hoare triples over ``c``
  and ``c'`` built from ``decomp`` hold.

An instance where some run exhausts its fuel is reported as skipped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .assertions import RelationLike, as_predicate
from .domain import SearchDomain
from .imp import SKIP, Command, State
from .oracle import Runs, Verdict, hoare_valid_under, relational_valid, run_all


@dataclass
class DecompRelation:
    """``decomp(R, c, c', S)`` tabulated over a domain."""
    rel: RelationLike
    c: Command
    c2: Command
    post: RelationLike
    dom: SearchDomain
    pairs: frozenset[tuple[State, State]] = field(init=False)
    exhausted: bool = field(init=False)
    runs1: Runs = field(init=False, repr=False)
    runs2: Runs = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.runs1 = run_all(self.c, self.dom)
        self.runs2 = run_all(self.c2, self.dom)
        self.exhausted = self.runs1.exhausted or self.runs2.exhausted
        pre = as_predicate(self.rel, self.dom)
        post = as_predicate(self.post, self.dom)
        done2 = [(s2, t2) for s2, t2 in self.runs2.finals.items() if t2 is not None]
        found = set()
        for s, t in self.runs1.finals.items():
            if t is None:
                continue
            for s2, t2 in done2:
                if (t, s2) not in found and pre(s, s2) and post(t, t2):
                    found.add((t, s2))
        self.pairs = frozenset(found)

    def __call__(self, t: State, s2: State) -> bool:
        return (t, s2) in self.pairs


def decomp(rel: RelationLike, c: Command, c2: Command, post: RelationLike,
           dom: SearchDomain) -> DecompRelation:
    return DecompRelation(rel, c, c2, post, dom)


def decomp_eval(d: DecompRelation, t: State, s2: State) -> bool:
    return d(t, s2)


@dataclass
class EquivalenceCheck:
    """Both sides of one equivalence on one instance.

    ``holds`` is ``None`` when the instance was skipped.
    """
    name: str
    left: Optional[bool]
    right: Optional[bool]
    parts: dict[str, str]
    skipped: str = ""

    @property
    def holds(self) -> Optional[bool]:
        if self.skipped:
            return None
        return self.left == self.right

    def __str__(self) -> str:
        if self.skipped:
            return f"{self.name}: skipped ({self.skipped})"
        verdict = "holds" if self.holds else "FAILS"
        detail = ", ".join(f"{k}={v}" for k, v in self.parts.items())
        return f"{self.name}: {verdict} ({detail})"


def _skip_reason(verdicts: list[Verdict], *runs: Runs) -> str:
    if any(r.exhausted for r in runs):
        return "a run exhausted its fuel"
    if any(v.unknown for v in verdicts):
        return "a side is unknown"
    return ""


def _all_hoare(triples) -> Verdict:
    """Conjunction of Hoare verdicts: first invalid, else first unknown, else valid."""
    unknown = None
    for v in triples:
        if v.invalid:
            return v
        if v.unknown and unknown is None:
            unknown = v
    return unknown or Verdict("valid")


def check_lemma_decomp(rel: RelationLike, c: Command, c2: Command, post: RelationLike,
                       dom: SearchDomain, d: Optional[DecompRelation] = None) -> EquivalenceCheck:
    """``<R> c, c' <S>`` versus ``<R> c, skip <decomp>`` and ``<decomp> skip, c' <S>``."""
    d = d or decomp(rel, c, c2, post, dom)
    whole = relational_valid(rel, c, c2, post, dom, runs1=d.runs1, runs2=d.runs2)
    first = relational_valid(rel, c, SKIP, d, dom, runs1=d.runs1)
    second = relational_valid(d, SKIP, c2, post, dom, runs2=d.runs2)
    parts = {"whole": whole.status, "first": first.status, "second": second.status}
    return EquivalenceCheck("decomposition lemma", whole.valid, first.valid and second.valid, parts,
                            _skip_reason([whole, first, second], d.runs1, d.runs2))


def _hoare_for_each_left(rel: RelationLike, c2: Command, post: RelationLike,
                         dom: SearchDomain, runs: Runs) -> Verdict:
    pre = as_predicate(rel, dom)
    q = as_predicate(post, dom)
    return _all_hoare(
        hoare_valid_under(lambda s2, t=t: pre(t, s2), c2, lambda t2, t=t: q(t, t2), dom, runs=runs)
        for t in dom.states()
    )


def _hoare_for_each_right(rel: RelationLike, c: Command, post: RelationLike,
                          dom: SearchDomain, runs: Runs) -> Verdict:
    pre = as_predicate(rel, dom)
    q = as_predicate(post, dom)
    return _all_hoare(
        hoare_valid_under(lambda t, u=u: pre(t, u), c, lambda t, u=u: q(t, u), dom, runs=runs)
        for u in dom.states()
    )


def check_skip_bridge(rel: RelationLike, c2: Command, post: RelationLike,
                      dom: SearchDomain) -> EquivalenceCheck:
    """``<R> skip, c' <S>`` versus ``[R(t, .)] c' [S(t, .)]`` for every ``t``."""
    runs2 = run_all(c2, dom)
    whole = relational_valid(rel, SKIP, c2, post, dom, runs2=runs2)
    each = _hoare_for_each_left(rel, c2, post, dom, runs2)
    parts = {"relational": whole.status, "hoare": each.status}
    return EquivalenceCheck("skip bridge", whole.valid, each.valid, parts,
                            _skip_reason([whole, each], runs2))


@dataclass
class TheoremCheck:
    theorem: EquivalenceCheck
    composition: Optional[bool]

    @property
    def holds(self) -> Optional[bool]:
        if self.theorem.holds is None:
            return None
        return self.theorem.holds and bool(self.composition)


def check_theorem_decomp(rel: RelationLike, c: Command, c2: Command, post: RelationLike,
                         dom: SearchDomain, d: Optional[DecompRelation] = None) -> TheoremCheck:
    """``<R> c, c' <S>`` versus the two Hoare-triple families.

    Also reports whether each Hoare family agrees with the matching relational
    conjunct of the decomposition lemma, i.e. whether the theorem is the lemma
    with the skip bridge applied on both sides.
    """
    d = d or decomp(rel, c, c2, post, dom)
    whole = relational_valid(rel, c, c2, post, dom, runs1=d.runs1, runs2=d.runs2)
    over_c = _hoare_for_each_right(rel, c, d, dom, d.runs1)
    over_c2 = _hoare_for_each_left(d, c2, post, dom, d.runs2)
    parts = {"whole": whole.status, "over_c": over_c.status, "over_c2": over_c2.status}
    eq = EquivalenceCheck("decomposition theorem", whole.valid, over_c.valid and over_c2.valid,
                          parts, _skip_reason([whole, over_c, over_c2], d.runs1, d.runs2))
    if eq.skipped:
        return TheoremCheck(eq, None)
    lemma = check_lemma_decomp(rel, c, c2, post, dom, d)
    first = relational_valid(rel, c, SKIP, d, dom, runs1=d.runs1)
    second = relational_valid(d, SKIP, c2, post, dom, runs2=d.runs2)
    agree = first.valid == over_c.valid and second.valid == over_c2.valid and lemma.holds is not None
    return TheoremCheck(eq, agree)
