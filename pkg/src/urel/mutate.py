"""Single-node mutations of derivations.

Used to measure how reliably the kernel notices a damaged proof. A mutant is
*detected* when the kernel rejects it or when its root conclusion differs from
the original's.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

from . import assertions as A
from .domain import SearchDomain
from .kernel import RULES, Derivation, check_derivation


@dataclass(frozen=True)
class Mutant:
    path: str
    kind: str
    derivation: Derivation


def _replace_at(d: Derivation, path: tuple[int, ...], node: Derivation) -> Derivation:
    if not path:
        return node
    i, rest = path[0], path[1:]
    children = list(d.children)
    children[i] = _replace_at(children[i], rest, node)
    return replace(d, children=tuple(children))


def _shift_family(f: A.Family) -> A.Family:
    return A.Family(f.name, A.instantiate(f.body, A.TBin("+", A.N, A.TNum(1))))


def _node_mutations(node: Derivation) -> Iterator[tuple[str, Derivation]]:
    for name in RULES:
        if name != node.rule:
            yield f"rename to {name}", replace(node, rule=name)
    w = node.witness
    if isinstance(w, A.Relation) and not isinstance(w, A.Const):
        yield "negate witness", replace(node, witness=A.Neg(w))
        yield "witness true", replace(node, witness=A.TRUE)
        yield "witness false", replace(node, witness=A.FALSE)
    elif isinstance(w, A.Family):
        yield "shift family index", replace(node, witness=_shift_family(w))
        yield "strengthen family", replace(node, witness=A.Family(w.name, A.Conj((w.body, A.Compare("==", A.N, A.TNum(0))))))
        yield "weaken family", replace(node, witness=A.Family(w.name, A.TRUE))
    t = node.conclusion
    yield "pre true", replace(node, conclusion=replace(t, pre=A.TRUE))
    yield "negate post", replace(node, conclusion=replace(t, post=A.Neg(t.post)))
    yield "post false", replace(node, conclusion=replace(t, post=A.FALSE))
    if node.children:
        yield "drop last premise", replace(node, children=node.children[:-1])
    if len(node.children) == 2:
        yield "swap premises", replace(node, children=node.children[::-1])


def mutants(d: Derivation) -> Iterator[Mutant]:
    """Every mutant from the fixed mutation set, one node at a time."""
    for path, node in d.nodes():
        idx = tuple(int(p) for p in path.split(".")[1:])
        for kind, new in _node_mutations(node):
            yield Mutant(path, kind, _replace_at(d, idx, new))


@dataclass
class MutationScore:
    total: int
    detected: int
    survivors: list[Mutant]

    @property
    def rate(self) -> float:
        return self.detected / self.total if self.total else 1.0


def mutation_score(d: Derivation, dom: SearchDomain) -> MutationScore:
    total = detected = 0
    survivors = []
    for m in mutants(d):
        total += 1
        if m.derivation.conclusion != d.conclusion or not check_derivation(m.derivation, dom).accepted:
            detected += 1
        else:
            survivors.append(m)
    return MutationScore(total, detected, survivors)
