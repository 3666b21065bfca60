"""Finite search domains: the universe for every bounded check."""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .imp import State


class DomainTooLarge(ValueError):
    """The requested enumeration exceeds the domain's size cap."""


@dataclass(frozen=True)
class SearchDomain:
    """Per-variable value sets plus loop fuel and the family-index bound.

    States range over the Cartesian product of ``values`` with every other
    variable at 0. ``exists v.`` quantifiers range over ``quantifier_values``
    (default: the union of all value sets); the hidden old value in an
    assignment post-relation ranges over the assigned variable's own set.
    """

    values: Mapping[str, Iterable[int]] = field(default_factory=dict)
    fuel: int = 8
    n_max: int = 3
    quantifier_values: Iterable[int] | None = None
    max_states: int = 100_000

    def __post_init__(self) -> None:
        items = self.values.items() if isinstance(self.values, Mapping) else self.values
        norm = tuple(sorted((str(k), tuple(sorted(set(int(v) for v in vs)))) for k, vs in items))
        for name, vs in norm:
            if not vs:
                raise ValueError(f"empty value set for {name!r}")
        object.__setattr__(self, "values", norm)
        if self.quantifier_values is not None:
            qv = tuple(sorted(set(int(v) for v in self.quantifier_values)))
            if not qv:
                raise ValueError("empty quantifier range")
            object.__setattr__(self, "quantifier_values", qv)
        if self.fuel < 0 or self.n_max < 0:
            raise ValueError("fuel and n_max must be natural numbers")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.values)

    def value_set(self, name: str) -> tuple[int, ...]:
        for var, vs in self.values:
            if var == name:
                return vs
        return (0,)

    @property
    def quantifier_range(self) -> tuple[int, ...]:
        if self.quantifier_values is not None:
            return self.quantifier_values
        union = sorted({v for _, vs in self.values for v in vs} | {0})
        return tuple(union)

    @property
    def size(self) -> int:
        n = 1
        for _, vs in self.values:
            n *= len(vs)
        return n

    def states(self) -> tuple[State, ...]:
        return enumerate_states(self)

    def pairs(self) -> Iterator[tuple[State, State]]:
        """All state pairs, side-1 state varying slowest."""
        states = self.states()
        return itertools.product(states, states)

    def replace(self, **changes) -> SearchDomain:
        kwargs = dict(values=self.values, fuel=self.fuel, n_max=self.n_max,
                      quantifier_values=self.quantifier_values, max_states=self.max_states)
        kwargs.update(changes)
        return SearchDomain(**kwargs)

    def extended(self, *states: Mapping[str, int]) -> SearchDomain:
        """This domain with each state's values added to the per-variable sets."""
        merged = {name: set(vs) for name, vs in self.values}
        for s in states:
            for name in set(s) | set(merged):
                merged.setdefault(name, {0}).add(s[name] if isinstance(s, State) else s.get(name, 0))
        return self.replace(values=merged)

    def describe(self) -> dict:
        return {
            "values": {name: list(vs) for name, vs in self.values},
            "fuel": self.fuel,
            "n_max": self.n_max,
            "quantifier_values": list(self.quantifier_range),
        }


def domain(fuel: int = 8, n_max: int = 3, **values: Iterable[int]) -> SearchDomain:
    """Shorthand: ``domain(x=range(2), low=(0, 1), fuel=16)``."""
    return SearchDomain(values, fuel=fuel, n_max=n_max)


@functools.lru_cache(maxsize=256)
def enumerate_states(dom: SearchDomain) -> tuple[State, ...]:
    """Every state of ``dom`` in canonical order: variables sorted, values ascending."""
    if dom.size > dom.max_states:
        raise DomainTooLarge(f"domain has {dom.size} states (cap {dom.max_states})")
    names = dom.variables
    sets = [vs for _, vs in dom.values]
    return tuple(State(zip(names, combo)) for combo in itertools.product(*sets))
