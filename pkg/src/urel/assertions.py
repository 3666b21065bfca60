"""Two-state relations, their transformers, and bounded evaluation.

A relation is a formula over a pair of states ``(s, s')``. Variables carry a
side tag (``x<1>`` reads ``s``, ``x<2>`` reads ``s'``). Quantifiers are
evaluated by enumeration over a :class:`~urel.domain.SearchDomain`, so every
verdict here is relative to that domain.

The family parameter is spelled ``n``. Inside a :class:`Family` body and
under :class:`FamilyExists` it is bound; anywhere else it is free and must be
instantiated (see :func:`instantiate`) before evaluation.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from . import imp
from .domain import SearchDomain
from .imp import AExp, BExp, State

# -- tagged arithmetic ------------------------------------------------------


class TExp:
    __slots__ = ()

    def __str__(self) -> str:
        return format_texp(self)


@dataclass(frozen=True)
class TNum(TExp):
    value: int


@dataclass(frozen=True)
class TVar(TExp):
    name: str
    side: int  # 1 or 2


@dataclass(frozen=True)
class Bound(TExp):
    """A value variable bound by ``exists v.``."""
    name: str


@dataclass(frozen=True)
class Param(TExp):
    """The family parameter ``n``."""


@dataclass(frozen=True)
class TBin(TExp):
    op: str
    left: TExp
    right: TExp


# -- relations --------------------------------------------------------------


class Relation:
    __slots__ = ()

    def __str__(self) -> str:
        return format_relation(self)

    def __and__(self, other: Relation) -> Relation:
        return Conj((self, other))

    def __or__(self, other: Relation) -> Relation:
        return Disj((self, other))

    def __invert__(self) -> Relation:
        return Neg(self)


@dataclass(frozen=True)
class Const(Relation):
    value: bool


@dataclass(frozen=True)
class Compare(Relation):
    op: str  # == != < <= > >=
    left: TExp
    right: TExp


@dataclass(frozen=True)
class Lift(Relation):
    """A boolean program expression read on one side (b¹ or b²)."""
    cond: BExp
    side: int


@dataclass(frozen=True)
class Neg(Relation):
    arg: Relation


@dataclass(frozen=True)
class Conj(Relation):
    args: tuple[Relation, ...]


@dataclass(frozen=True)
class Disj(Relation):
    args: tuple[Relation, ...]


@dataclass(frozen=True)
class Implies(Relation):
    left: Relation
    right: Relation


@dataclass(frozen=True)
class ExistsValue(Relation):
    var: str
    body: Relation


@dataclass(frozen=True)
class AssignPost(Relation):
    """``rel[var := expr]`` on the given side: the post-relation of an assignment.

    On side 1 it holds at ``(t, s')`` iff for some old value ``v`` of ``var``,
    ``rel(t(var:=v), s')`` and ``t(var) = expr`` evaluated in ``t(var:=v)``.
    Side 2 is the mirror image.
    """
    rel: Relation
    var: str
    expr: AExp
    side: int = 1


@dataclass(frozen=True)
class Flip(Relation):
    rel: Relation


@dataclass(frozen=True)
class Family:
    """A relation indexed by the natural parameter ``n``."""
    name: str
    body: Relation

    def __call__(self, index: TExp | int) -> FamilyInstance:
        return FamilyInstance(self, TNum(index) if isinstance(index, int) else index)

    def exists(self) -> FamilyExists:
        return FamilyExists(FamilyInstance(self, Param()))


@dataclass(frozen=True)
class FamilyInstance(Relation):
    family: Family
    index: TExp


@dataclass(frozen=True)
class FamilyExists(Relation):
    """``exists n. body`` with ``n`` ranging over ``0..n_max``."""
    body: Relation


TRUE = Const(True)
FALSE = Const(False)
N = Param()


class UnboundName(ValueError):
    pass


# -- builders ---------------------------------------------------------------


def var1(name: str) -> TVar:
    return TVar(name, 1)


def var2(name: str) -> TVar:
    return TVar(name, 2)


def texp(v: TExp | int) -> TExp:
    return TNum(v) if isinstance(v, int) else v


def eq(a: TExp | int, b: TExp | int) -> Compare:
    return Compare("==", texp(a), texp(b))


def conj(*args: Relation) -> Relation:
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else Conj(tuple(args))


def disj(*args: Relation) -> Relation:
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Disj(tuple(args))


def pair_relation(t: State, t2: State, names: Iterable[str] = ()) -> Relation:
    """The relation holding exactly at ``(t, t2)`` over ``names``."""
    parts = []
    for v in sorted(set(names) | set(t) | set(t2)):
        parts.append(eq(var1(v), t[v]))
        parts.append(eq(var2(v), t2[v]))
    return conj(*parts)


def lift(b: BExp, side: int = 1) -> Lift:
    return Lift(b, side)


def assign_post(rel: Relation, var: str, expr: AExp, side: int = 1) -> AssignPost:
    """The relation holding after ``var := expr`` runs on ``side`` from ``rel``."""
    return AssignPost(rel, var, expr, side)


def flip(rel: Relation) -> Relation:
    return Flip(rel)


def tag_aexp(e: AExp, side: int) -> TExp:
    """Read a program expression on one side of the pair."""
    if isinstance(e, imp.Num):
        return TNum(e.value)
    if isinstance(e, imp.Var):
        return TVar(e.name, side)
    return TBin(e.op, tag_aexp(e.left, side), tag_aexp(e.right, side))


# -- structural queries -----------------------------------------------------


def texp_has_param(e: TExp) -> bool:
    if isinstance(e, Param):
        return True
    if isinstance(e, TBin):
        return texp_has_param(e.left) or texp_has_param(e.right)
    return False


def has_free_param(r: Relation) -> bool:
    """Whether ``n`` occurs free (outside family bodies and ``exists n.``)."""
    if isinstance(r, Compare):
        return texp_has_param(r.left) or texp_has_param(r.right)
    if isinstance(r, (Neg, Flip)):
        return has_free_param(r.arg if isinstance(r, Neg) else r.rel)
    if isinstance(r, (Conj, Disj)):
        return any(has_free_param(a) for a in r.args)
    if isinstance(r, Implies):
        return has_free_param(r.left) or has_free_param(r.right)
    if isinstance(r, ExistsValue):
        return has_free_param(r.body)
    if isinstance(r, AssignPost):
        return has_free_param(r.rel)
    if isinstance(r, FamilyInstance):
        return texp_has_param(r.index)
    return False


def _texp_sides(e: TExp) -> set[int]:
    if isinstance(e, TVar):
        return {e.side}
    if isinstance(e, TBin):
        return _texp_sides(e.left) | _texp_sides(e.right)
    return set()


def sides_used(r: Relation) -> set[int]:
    """Which state sides ``r`` can observe."""
    if isinstance(r, Compare):
        return _texp_sides(r.left) | _texp_sides(r.right)
    if isinstance(r, Lift):
        return {r.side}
    if isinstance(r, Neg):
        return sides_used(r.arg)
    if isinstance(r, (Conj, Disj)):
        return set().union(*(sides_used(a) for a in r.args))
    if isinstance(r, Implies):
        return sides_used(r.left) | sides_used(r.right)
    if isinstance(r, ExistsValue):
        return sides_used(r.body)
    if isinstance(r, AssignPost):
        return sides_used(r.rel) | {r.side}
    if isinstance(r, Flip):
        return {3 - k for k in sides_used(r.rel)}
    if isinstance(r, FamilyInstance):
        return sides_used(r.family.body) | _texp_sides(r.index)
    if isinstance(r, FamilyExists):
        return sides_used(r.body)
    return set()


def _subst_texp(e: TExp, k: int | TExp) -> TExp:
    if isinstance(e, Param):
        return TNum(k) if isinstance(k, int) else k
    if isinstance(e, TBin):
        return TBin(e.op, _subst_texp(e.left, k), _subst_texp(e.right, k))
    return e


def instantiate(r: Relation, k: int | TExp) -> Relation:
    """Replace the free family parameter by ``k`` (a literal or a term)."""
    if isinstance(r, Compare):
        return Compare(r.op, _subst_texp(r.left, k), _subst_texp(r.right, k))
    if isinstance(r, Neg):
        return Neg(instantiate(r.arg, k))
    if isinstance(r, Conj):
        return Conj(tuple(instantiate(a, k) for a in r.args))
    if isinstance(r, Disj):
        return Disj(tuple(instantiate(a, k) for a in r.args))
    if isinstance(r, Implies):
        return Implies(instantiate(r.left, k), instantiate(r.right, k))
    if isinstance(r, ExistsValue):
        return ExistsValue(r.var, instantiate(r.body, k))
    if isinstance(r, AssignPost):
        return AssignPost(instantiate(r.rel, k), r.var, r.expr, r.side)
    if isinstance(r, Flip):
        return Flip(instantiate(r.rel, k))
    if isinstance(r, FamilyInstance):
        return FamilyInstance(r.family, _subst_texp(r.index, k))
    return r


# -- normalization ----------------------------------------------------------


def _flip_texp(e: TExp) -> TExp:
    if isinstance(e, TVar):
        return TVar(e.name, 3 - e.side)
    if isinstance(e, TBin):
        return TBin(e.op, _flip_texp(e.left), _flip_texp(e.right))
    return e


def _rank(r: Relation) -> int:
    # cheap, selective conjuncts first: also the evaluation order
    if isinstance(r, (Const, Compare, Lift)):
        return 0
    if isinstance(r, (Neg, Implies)):
        return 1
    if isinstance(r, (Conj, Disj)):
        return 2
    return 3


def _sort_key(r: Relation) -> tuple[int, str]:
    return (_rank(r), format_relation(r))


def _fold_index(e: TExp) -> TExp:
    if isinstance(e, TBin):
        left, right = _fold_index(e.left), _fold_index(e.right)
        if isinstance(left, TNum) and isinstance(right, TNum):
            return TNum(imp.ARITH_OPS[e.op](left.value, right.value))
        if e.op in ("+", "*") and isinstance(left, TNum):
            left, right = right, left
        return TBin(e.op, left, right)
    return e


def normalize(r: Relation) -> Relation:
    """Canonical form used for syntactic rule matching.

    Flips are pushed to the leaves, conjunctions and disjunctions are
    flattened, deduplicated and sorted, double negations vanish, and
    conjuncts of ``exists n.`` that do not mention ``n`` are hoisted out.
    """
    return _norm(r, False)


def _norm(r: Relation, flipped: bool) -> Relation:
    if isinstance(r, Const):
        return r
    if isinstance(r, Compare):
        if flipped:
            return Compare(r.op, _flip_texp(r.left), _flip_texp(r.right))
        return r
    if isinstance(r, Lift):
        return Lift(r.cond, 3 - r.side) if flipped else r
    if isinstance(r, Flip):
        return _norm(r.rel, not flipped)
    if isinstance(r, Neg):
        inner = _norm(r.arg, flipped)
        if isinstance(inner, Neg):
            return inner.arg
        if isinstance(inner, Const):
            return Const(not inner.value)
        if isinstance(inner, Lift):
            cond = inner.cond.arg if isinstance(inner.cond, imp.Not) else imp.Not(inner.cond)
            return Lift(cond, inner.side)
        return Neg(inner)
    if isinstance(r, (Conj, Disj)):
        kind = type(r)
        unit, zero = (True, False) if kind is Conj else (False, True)
        flat: list[Relation] = []
        for a in r.args:
            a = _norm(a, flipped)
            if isinstance(a, kind):
                flat.extend(a.args)
            elif isinstance(a, Const):
                if a.value == zero:
                    return Const(zero)
            else:
                flat.append(a)
        uniq = sorted(set(flat), key=_sort_key)
        if not uniq:
            return Const(unit)
        return uniq[0] if len(uniq) == 1 else kind(tuple(uniq))
    if isinstance(r, Implies):
        return Implies(_norm(r.left, flipped), _norm(r.right, flipped))
    if isinstance(r, ExistsValue):
        return ExistsValue(r.var, _norm(r.body, flipped))
    if isinstance(r, AssignPost):
        side = 3 - r.side if flipped else r.side
        return AssignPost(_norm(r.rel, flipped), r.var, r.expr, side)
    if isinstance(r, FamilyInstance):
        fam = Family(r.family.name, normalize(r.family.body))
        inst = FamilyInstance(fam, _fold_index(r.index))
        return Flip(inst) if flipped else inst
    if isinstance(r, FamilyExists):
        body = _norm(r.body, flipped)
        if isinstance(body, Conj):
            inner = [a for a in body.args if has_free_param(a)]
            outer = [a for a in body.args if not has_free_param(a)]
            if outer and inner:
                return _norm(Conj((FamilyExists(conj(*inner)), *outer)), False)
        if not has_free_param(body):
            return body
        return FamilyExists(body)
    raise TypeError(f"not a relation: {r!r}")


def same_relation(a: Relation, b: Relation) -> bool:
    return normalize(a) == normalize(b)


# -- evaluation -------------------------------------------------------------

_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}

_PARAM = "#n"

Fn = Callable[[dict, dict, dict], bool]


def _compile_texp(e: TExp) -> Callable[[dict, dict, dict], int]:
    if isinstance(e, TNum):
        k = e.value
        return lambda a, b, env: k
    if isinstance(e, TVar):
        name = e.name
        if e.side == 1:
            return lambda a, b, env: a.get(name, 0)
        return lambda a, b, env: b.get(name, 0)
    if isinstance(e, Bound):
        name = e.name

        def bound(a, b, env):
            try:
                return env[name]
            except KeyError:
                raise UnboundName(f"unbound value variable {name!r}") from None

        return bound
    if isinstance(e, Param):
        def param(a, b, env):
            try:
                return env[_PARAM]
            except KeyError:
                raise UnboundName("family parameter n is free; instantiate it first") from None

        return param
    if isinstance(e, TBin):
        op = imp.ARITH_OPS[e.op]
        lf, rf = _compile_texp(e.left), _compile_texp(e.right)
        return lambda a, b, env: imp.checked(op(lf(a, b, env), rf(a, b, env)))
    raise TypeError(f"not a tagged expression: {e!r}")


def _compile_aexp(e: AExp) -> Callable[[dict], int]:
    if isinstance(e, imp.Num):
        k = e.value
        return lambda m: k
    if isinstance(e, imp.Var):
        name = e.name
        return lambda m: m.get(name, 0)
    op = imp.ARITH_OPS[e.op]
    lf, rf = _compile_aexp(e.left), _compile_aexp(e.right)
    return lambda m: imp.checked(op(lf(m), rf(m)))


def _compile_bexp(b: BExp) -> Callable[[dict], bool]:
    if isinstance(b, imp.Bool):
        v = b.value
        return lambda m: v
    if isinstance(b, imp.Cmp):
        op = imp.COMPARISONS[b.op]
        lf, rf = _compile_aexp(b.left), _compile_aexp(b.right)
        return lambda m: op(lf(m), rf(m))
    if isinstance(b, imp.Not):
        f = _compile_bexp(b.arg)
        return lambda m: not f(m)
    lf, rf = _compile_bexp(b.left), _compile_bexp(b.right)
    if isinstance(b, imp.And):
        return lambda m: lf(m) and rf(m)
    return lambda m: lf(m) or rf(m)


def _compile(r: Relation, dom: SearchDomain) -> Fn:
    if isinstance(r, Const):
        v = r.value
        return lambda a, b, env: v
    if isinstance(r, Compare):
        op = _CMP[r.op]
        lf, rf = _compile_texp(r.left), _compile_texp(r.right)
        return lambda a, b, env: op(lf(a, b, env), rf(a, b, env))
    if isinstance(r, Lift):
        f = _compile_bexp(r.cond)
        if r.side == 1:
            return lambda a, b, env: f(a)
        return lambda a, b, env: f(b)
    if isinstance(r, Neg):
        f = _compile(r.arg, dom)
        return lambda a, b, env: not f(a, b, env)
    if isinstance(r, Conj):
        fs = tuple(_compile(x, dom) for x in sorted(r.args, key=_rank))

        def all_of(a, b, env):
            for f in fs:
                if not f(a, b, env):
                    return False
            return True

        return all_of
    if isinstance(r, Disj):
        fs = tuple(_compile(x, dom) for x in sorted(r.args, key=_rank))

        def any_of(a, b, env):
            for f in fs:
                if f(a, b, env):
                    return True
            return False

        return any_of
    if isinstance(r, Implies):
        lf, rf = _compile(r.left, dom), _compile(r.right, dom)
        return lambda a, b, env: (not lf(a, b, env)) or rf(a, b, env)
    if isinstance(r, ExistsValue):
        f = _compile(r.body, dom)
        name, values = r.var, dom.quantifier_range

        def exists_value(a, b, env):
            inner = dict(env)
            for v in values:
                inner[name] = v
                if f(a, b, inner):
                    return True
            return False

        return exists_value
    if isinstance(r, AssignPost):
        f = _compile(r.rel, dom)
        ef = _compile_aexp(r.expr)
        x, olds = r.var, dom.value_set(r.var)
        # the old value of x must keep the pre-state inside the domain
        if r.side == 1:
            def post1(a, b, env):
                cur = a.get(x, 0)
                pre = dict(a)
                for v in olds:
                    pre[x] = v
                    if ef(pre) == cur and f(pre, b, env):
                        return True
                return False

            return post1

        def post2(a, b, env):
            cur = b.get(x, 0)
            pre = dict(b)
            for v in olds:
                pre[x] = v
                if ef(pre) == cur and f(a, pre, env):
                    return True
            return False

        return post2
    if isinstance(r, Flip):
        f = _compile(r.rel, dom)
        return lambda a, b, env: f(b, a, env)
    if isinstance(r, FamilyInstance):
        f = _compile(r.family.body, dom)
        idx = _compile_texp(r.index)

        def instance(a, b, env):
            k = idx(a, b, env)
            return k >= 0 and f(a, b, {_PARAM: k})

        return instance
    if isinstance(r, FamilyExists):
        f = _compile(r.body, dom)
        bound = dom.n_max

        def exists_n(a, b, env):
            inner = dict(env)
            for k in range(bound + 1):
                inner[_PARAM] = k
                if f(a, b, inner):
                    return True
            return False

        return exists_n
    raise TypeError(f"not a relation: {r!r}")


@functools.lru_cache(maxsize=8192)
def _compiled(r: Relation, dom: SearchDomain) -> Fn:
    return _compile(r, dom)


def predicate(r: Relation, dom: SearchDomain) -> Callable[[State, State], bool]:
    """``r`` as a fast two-argument predicate over states of ``dom``."""
    f = _compiled(r, dom)
    return lambda s, t: f(s._values, t._values, {})


def eval_rel(r: Relation, s: State, t: State, dom: SearchDomain) -> bool:
    """Truth of ``r`` at ``(s, t)``, quantifiers bounded by ``dom``."""
    return _compiled(r, dom)(s._values, t._values, {})


# One-state predicates and callables are accepted wherever the checkers
# take a relation.
RelationLike = Union[Relation, Callable[[State, State], bool]]


def as_predicate(r: RelationLike, dom: SearchDomain) -> Callable[[State, State], bool]:
    if isinstance(r, Relation):
        return predicate(r, dom)
    return r


@dataclass(frozen=True)
class Implication:
    """Outcome of an inclusion check; falsy when a counterexample exists."""
    holds: bool
    counterexample: Optional[tuple[State, State]] = None

    def __bool__(self) -> bool:
        return self.holds


def implies_on(r1: RelationLike, r2: RelationLike, dom: SearchDomain) -> Implication:
    """Whether every ``dom`` pair satisfying ``r1`` satisfies ``r2``."""
    p1, p2 = as_predicate(r1, dom), as_predicate(r2, dom)
    for s, t in dom.pairs():
        if p1(s, t) and not p2(s, t):
            return Implication(False, (s, t))
    return Implication(True)


def satisfiable_on(r: RelationLike, dom: SearchDomain) -> Optional[tuple[State, State]]:
    """The first ``dom`` pair satisfying ``r``, or ``None``."""
    p = as_predicate(r, dom)
    for s, t in dom.pairs():
        if p(s, t):
            return (s, t)
    return None


def equivalent_on(r1: RelationLike, r2: RelationLike, dom: SearchDomain) -> Implication:
    p1, p2 = as_predicate(r1, dom), as_predicate(r2, dom)
    for s, t in dom.pairs():
        if p1(s, t) != p2(s, t):
            return Implication(False, (s, t))
    return Implication(True)


# -- printing ---------------------------------------------------------------

_TPREC = {"+": 1, "-": 1, "*": 2}


def _tprec(e: TExp) -> int:
    return _TPREC[e.op] if isinstance(e, TBin) else 3


def format_texp(e: TExp) -> str:
    if isinstance(e, TNum):
        return str(e.value)
    if isinstance(e, TVar):
        return f"{e.name}<{e.side}>"
    if isinstance(e, Bound):
        return e.name
    if isinstance(e, Param):
        return "n"
    p = _TPREC[e.op]
    left, right = format_texp(e.left), format_texp(e.right)
    if _tprec(e.left) < p:
        left = f"({left})"
    if _tprec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _rprec(r: Relation) -> int:
    if isinstance(r, Implies):
        return 1
    if isinstance(r, Disj):
        return 2
    if isinstance(r, Conj):
        return 3
    if isinstance(r, Neg):
        return 4
    if isinstance(r, Compare):
        return 5
    return 6  # postfix-capable atoms


def format_relation(r: Relation) -> str:
    if isinstance(r, Const):
        return "true" if r.value else "false"
    if isinstance(r, Compare):
        return f"{format_texp(r.left)} {r.op} {format_texp(r.right)}"
    if isinstance(r, Lift):
        return f"[{imp.format_bexp(r.cond)}]<{r.side}>"
    if isinstance(r, Neg):
        inner = format_relation(r.arg)
        return f"!{inner}" if _rprec(r.arg) >= 4 else f"!({inner})"
    if isinstance(r, (Conj, Disj)):
        if not r.args:
            return "true" if isinstance(r, Conj) else "false"
        p = _rprec(r)
        sep = " && " if isinstance(r, Conj) else " || "
        return sep.join(format_relation(a) if _rprec(a) > p else f"({format_relation(a)})"
                        for a in r.args)
    if isinstance(r, Implies):
        left = format_relation(r.left)
        if _rprec(r.left) <= 1:
            left = f"({left})"
        return f"{left} => {format_relation(r.right)}"
    if isinstance(r, ExistsValue):
        return f"(exists {r.var}. {format_relation(r.body)})"
    if isinstance(r, AssignPost):
        inner = format_relation(r.rel)
        if _rprec(r.rel) < 6:
            inner = f"({inner})"
        return f"{inner}[{r.var}<{r.side}> := {imp.format_aexp(r.expr)}]"
    if isinstance(r, Flip):
        return f"flip({format_relation(r.rel)})"
    if isinstance(r, FamilyInstance):
        return f"{r.family.name}({format_texp(r.index)})"
    if isinstance(r, FamilyExists):
        return f"(exists n. {format_relation(r.body)})"
    raise TypeError(f"not a relation: {r!r}")


def format_family(f: Family) -> str:
    return f"family {f.name}(n) = {format_relation(f.body)};"


def relation_vars(r: Relation) -> set[str]:
    """Program variable names mentioned anywhere in ``r``."""
    out: set[str] = set()

    def tex(e: TExp) -> None:
        if isinstance(e, TVar):
            out.add(e.name)
        elif isinstance(e, TBin):
            tex(e.left)
            tex(e.right)

    def walk(x: Relation) -> None:
        if isinstance(x, Compare):
            tex(x.left)
            tex(x.right)
        elif isinstance(x, Lift):
            out.update(imp.bexp_vars(x.cond))
        elif isinstance(x, Neg):
            walk(x.arg)
        elif isinstance(x, (Conj, Disj)):
            for a in x.args:
                walk(a)
        elif isinstance(x, Implies):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, ExistsValue):
            walk(x.body)
        elif isinstance(x, AssignPost):
            out.add(x.var)
            out.update(imp.aexp_vars(x.expr))
            walk(x.rel)
        elif isinstance(x, Flip):
            walk(x.rel)
        elif isinstance(x, FamilyInstance):
            walk(x.family.body)
            tex(x.index)
        elif isinstance(x, FamilyExists):
            walk(x.body)

    walk(r)
    return out


def relations_vars(rs: Iterable[Relation]) -> set[str]:
    out: set[str] = set()
    for r in rs:
        out |= relation_vars(r)
    return out
