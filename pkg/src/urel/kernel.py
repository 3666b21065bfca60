"""Derivation checking for the under-approximate relational logic.

A :class:`Derivation` is a tree of rule applications. :func:`check_derivation`
verifies that each node is an instance of its rule's schema and that every
semantic side condition (the premise of ``Skip``, the implications of
``Conseq``) holds on the search domain. Premises quantified over the family
index ``n`` are checked for every ``n`` in ``0..n_max``.

Besides the primitive rules, the kernel knows the derived rules for matched
programs: ``SeqMatched``, ``AssignMatched``, ``BackVarMatched``,
``BackVarMatched2``, the four ``IfMatched*`` branch combinations and
``WhileTrueMatched``/``WhileFalseMatched``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import assertions as A
from . import imp
from .assertions import Family, Relation
from .domain import SearchDomain
from .imp import Command, State
from .oracle import Runs, run_all


@dataclass(frozen=True)
class Triple:
    pre: Relation
    left: Command
    right: Command
    post: Relation

    def __str__(self) -> str:
        return f"< {self.pre} > {self.left} , {self.right} < {self.post} >"

    def instantiate(self, k: int) -> Triple:
        return Triple(A.instantiate(self.pre, k), self.left, self.right, A.instantiate(self.post, k))

    def has_free_param(self) -> bool:
        return A.has_free_param(self.pre) or A.has_free_param(self.post)


Witness = Union[Relation, Family, None]


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Triple
    children: tuple[Derivation, ...] = ()
    witness: Witness = None

    def instantiate(self, k: int) -> Derivation:
        """This subtree with the free family parameter replaced by ``k``."""
        w = A.instantiate(self.witness, k) if isinstance(self.witness, Relation) else self.witness
        return Derivation(self.rule, self.conclusion.instantiate(k),
                          tuple(c.instantiate(k) for c in self.children), w)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def nodes(self, path: str = "root"):
        yield path, self
        for i, c in enumerate(self.children):
            yield from c.nodes(f"{path}.{i}")


@dataclass
class NodeStatus:
    path: str
    rule: str
    ok: bool
    message: str = ""
    counterexample: Optional[tuple[State, State]] = None
    extensional: bool = False

    def describe(self) -> str:
        mark = "ok  " if self.ok else "FAIL"
        line = f"{mark} {self.path} {self.rule}"
        if self.message:
            line += f": {self.message}"
        if self.counterexample:
            s, t = self.counterexample
            line += f" [pair {s.as_dict()} / {t.as_dict()}]"
        if self.extensional:
            line += " (extensional match)"
        return line


@dataclass
class CheckReport:
    accepted: bool
    nodes: list[NodeStatus]
    domain: dict = field(default_factory=dict)

    @property
    def failures(self) -> list[NodeStatus]:
        return [n for n in self.nodes if not n.ok]

    def __bool__(self) -> bool:
        return self.accepted

    def summary(self) -> str:
        head = "accepted" if self.accepted else "rejected"
        n_max = self.domain.get("n_max")
        lines = [f"{head} ({len(self.nodes)} node checks, relative to domain; family index checked up to n={n_max})"]
        lines += [n.describe() for n in self.nodes if not n.ok or n.extensional]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "domain": self.domain,
            "nodes": [
                {
                    "path": n.path,
                    "rule": n.rule,
                    "ok": n.ok,
                    "message": n.message,
                    "counterexample": None if n.counterexample is None
                    else [s.as_dict() for s in n.counterexample],
                    "extensional": n.extensional,
                }
                for n in self.nodes
            ],
        }


class RuleMismatch(Exception):
    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class _Checker:
    def __init__(self, dom: SearchDomain, extensional: bool):
        self.dom = dom
        self.extensional = extensional
        self.nodes: list[NodeStatus] = []
        self._stack: list[NodeStatus] = []

    def runs(self, c: Command) -> Runs:
        return _runs(c, self.dom)

    def check(self, d: Derivation, path: str) -> None:
        name = canonical_rule(d.rule)
        status = NodeStatus(path, d.rule, True)
        self.nodes.append(status)
        self._stack.append(status)
        try:
            if name is None:
                raise RuleMismatch(f"unknown rule {d.rule!r}")
            if d.conclusion.has_free_param():
                raise RuleMismatch("family parameter n is free outside a schema premise")
            RULES[name](self, d, path)
        except RuleMismatch as exc:
            status.ok = False
            status.message = str(exc)
            status.counterexample = exc.counterexample
        except A.UnboundName as exc:
            status.ok = False
            status.message = str(exc)
        finally:
            self._stack.pop()

    def child(self, d: Derivation, i: int, path: str) -> None:
        self.check(d.children[i], f"{path}.{i}")

    def schema_child(self, d: Derivation, i: int, path: str, expected: Triple) -> None:
        """Check premise ``i`` for every family index up to ``n_max``."""
        child = d.children[i]
        for k in range(self.dom.n_max + 1):
            inst = child.instantiate(k)
            sub = f"{path}.{i}[n={k}]"
            self.check(inst, sub)
            try:
                self.match_triple(inst.conclusion, expected.instantiate(k), f"premise {i} at n={k}")
            except RuleMismatch as exc:
                self.nodes.append(NodeStatus(sub, "schema", False, str(exc), exc.counterexample))

    # -- matching helpers --

    def same(self, actual: Relation, expected: Relation, what: str) -> None:
        if A.same_relation(actual, expected):
            return
        if self.extensional:
            eqv = A.equivalent_on(actual, expected, self.dom)
            if eqv:
                self._stack[-1].extensional = True
                return
            raise RuleMismatch(f"{what}: {actual} differs from expected {expected}",
                               eqv.counterexample)
        raise RuleMismatch(f"{what}: {actual} is not syntactically {expected}")

    def same_cmd(self, actual: Command, expected: Command, what: str) -> None:
        if actual != expected:
            raise RuleMismatch(f"{what}: {actual} is not {expected}")

    def match_triple(self, actual: Triple, expected: Triple, what: str) -> None:
        self.same_cmd(actual.left, expected.left, f"{what} left command")
        self.same_cmd(actual.right, expected.right, f"{what} right command")
        self.same(actual.pre, expected.pre, f"{what} pre")
        self.same(actual.post, expected.post, f"{what} post")

    def arity(self, d: Derivation, n: int) -> None:
        if len(d.children) != n:
            raise RuleMismatch(f"expects {n} premise(s), got {len(d.children)}")

    def shape(self, c: Command, kind: type, what: str):
        if not isinstance(c, kind):
            raise RuleMismatch(f"{what} must be a {kind.__name__.lower()} command, got {c}")
        return c

    def family(self, d: Derivation) -> Family:
        if not isinstance(d.witness, Family):
            raise RuleMismatch("needs a relation family as witness")
        return d.witness


Checker = Callable[[_Checker, Derivation, str], None]

# Side conditions are pure functions of their arguments; caching them makes
# re-checking many similar trees (mutants, generated suites) cheap.


@functools.lru_cache(maxsize=256)
def _runs(c: Command, dom: SearchDomain) -> Runs:
    return run_all(c, dom)


@functools.lru_cache(maxsize=8192)
def _implies(r1: Relation, r2: Relation, dom: SearchDomain) -> A.Implication:
    return A.implies_on(r1, r2, dom)


@functools.lru_cache(maxsize=8192)
def _skip_gap(pre: Relation, right: Command, post: Relation,
              dom: SearchDomain) -> Optional[tuple[State, State]]:
    """First post pair without a pre-image through ``right``, if any."""
    p = A.predicate(pre, dom)
    q = A.predicate(post, dom)
    runs = _runs(right, dom)
    empty: list[State] = []
    for s, s2 in dom.pairs():
        if q(s, s2) and not any(p(s, a) for a in runs.preimages.get(s2, empty)):
            return (s, s2)
    return None


def _skip(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 0)
    t = d.conclusion
    k.shape(t.left, imp.Skip, "left")
    gap = _skip_gap(t.pre, t.right, t.post, k.dom)
    if gap is not None:
        note = " (some runs of the right command ran out of fuel)" if k.runs(t.right).stuck else ""
        raise RuleMismatch(f"post pair has no pre-image through the right command{note}", gap)


def _seq1(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 2)
    t = d.conclusion
    c = k.shape(t.left, imp.Seq, "left")
    first, second = d.children[0].conclusion, d.children[1].conclusion
    mid = first.post
    if isinstance(d.witness, Relation):
        k.same(d.witness, mid, "witness")
    k.match_triple(first, Triple(t.pre, c.first, t.right, mid), "premise 0")
    k.match_triple(second, Triple(mid, c.second, imp.SKIP, t.post), "premise 1")
    k.child(d, 0, path)
    k.child(d, 1, path)


def _assign(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.Assign, "left")
    expected = Triple(A.AssignPost(t.pre, c.var, c.expr, 1), imp.SKIP, t.right, t.post)
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


def _branch(then: bool) -> Checker:
    def rule(k: _Checker, d: Derivation, path: str) -> None:
        k.arity(d, 1)
        t = d.conclusion
        c = k.shape(t.left, imp.If, "left")
        cond = c.cond if then else imp.Not(c.cond)
        body = c.then if then else c.orelse
        expected = Triple(A.Conj((t.pre, A.Lift(cond, 1))), body, t.right, t.post)
        k.match_triple(d.children[0].conclusion, expected, "premise")
        k.child(d, 0, path)

    return rule


def _while_true(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    expected = Triple(A.Conj((t.pre, A.Lift(c.cond, 1))), imp.Seq(c.body, c), t.right, t.post)
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


def _while_false(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    expected = Triple(A.Conj((t.pre, A.Lift(imp.Not(c.cond), 1))), imp.SKIP, t.right, t.post)
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


def _back_var(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 2)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    fam = k.family(d)
    k.same(t.pre, fam(0), "pre")
    step = Triple(A.Conj((fam(A.N), A.Lift(c.cond, 1))), c.body, imp.SKIP,
                  fam(A.TBin("+", A.N, A.TNum(1))))
    k.schema_child(d, 0, path, step)
    k.match_triple(d.children[1].conclusion, Triple(fam.exists(), c, t.right, t.post), "premise 1")
    k.child(d, 1, path)


def _conseq(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    inner = d.children[0].conclusion
    k.same_cmd(inner.left, t.left, "premise left command")
    k.same_cmd(inner.right, t.right, "premise right command")
    pre_ok = _implies(inner.pre, t.pre, k.dom)
    if not pre_ok:
        raise RuleMismatch("premise pre does not imply conclusion pre", pre_ok.counterexample)
    post_ok = _implies(t.post, inner.post, k.dom)
    if not post_ok:
        raise RuleMismatch("conclusion post does not imply premise post", post_ok.counterexample)
    k.child(d, 0, path)


def _disj(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 2)
    t = d.conclusion
    a, b = d.children[0].conclusion, d.children[1].conclusion
    for i, x in enumerate((a, b)):
        k.same_cmd(x.left, t.left, f"premise {i} left command")
        k.same_cmd(x.right, t.right, f"premise {i} right command")
    k.same(t.pre, A.Disj((a.pre, b.pre)), "pre")
    k.same(t.post, A.Disj((a.post, b.post)), "post")
    k.child(d, 0, path)
    k.child(d, 1, path)


def _sym(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    expected = Triple(A.Flip(t.pre), t.right, t.left, A.Flip(t.post))
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


# -- derived rules for matched programs --

def _seq_matched(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 2)
    t = d.conclusion
    c = k.shape(t.left, imp.Seq, "left")
    c2 = k.shape(t.right, imp.Seq, "right")
    mid = d.children[0].conclusion.post
    if isinstance(d.witness, Relation):
        k.same(d.witness, mid, "witness")
    k.match_triple(d.children[0].conclusion, Triple(t.pre, c.first, c2.first, mid), "premise 0")
    k.match_triple(d.children[1].conclusion, Triple(mid, c.second, c2.second, t.post), "premise 1")
    k.child(d, 0, path)
    k.child(d, 1, path)


def _assign_matched(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 0)
    t = d.conclusion
    c = k.shape(t.left, imp.Assign, "left")
    c2 = k.shape(t.right, imp.Assign, "right")
    k.same(t.post, matched_assign_post(t.pre, c, c2), "post")


def matched_assign_post(pre: Relation, c: imp.Assign, c2: imp.Assign) -> Relation:
    return A.AssignPost(A.AssignPost(pre, c.var, c.expr, 1), c2.var, c2.expr, 2)


def _guards(c: imp.While, c2: imp.While, taken: bool) -> tuple[Relation, Relation]:
    if taken:
        return A.Lift(c.cond, 1), A.Lift(c2.cond, 2)
    return A.Lift(imp.Not(c.cond), 1), A.Lift(imp.Not(c2.cond), 2)


def _matched_step(fam: Family, c: imp.While, c2: imp.While) -> Triple:
    g1, g2 = _guards(c, c2, True)
    return Triple(A.Conj((fam(A.N), g1, g2)), c.body, c2.body, fam(A.TBin("+", A.N, A.TNum(1))))


def _back_var_matched(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 2)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    c2 = k.shape(t.right, imp.While, "right")
    fam = k.family(d)
    k.same(t.pre, fam(0), "pre")
    k.schema_child(d, 0, path, _matched_step(fam, c, c2))
    k.match_triple(d.children[1].conclusion, Triple(fam.exists(), c, c2, t.post), "premise 1")
    k.child(d, 1, path)


def back_var_matched2_post(fam: Family, c: imp.While, c2: imp.While) -> Relation:
    g1, g2 = _guards(c, c2, False)
    return A.FamilyExists(A.Conj((fam(A.N), g1, g2)))


def _back_var_matched2(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    c2 = k.shape(t.right, imp.While, "right")
    fam = k.family(d)
    k.same(t.pre, fam(0), "pre")
    k.same(t.post, back_var_matched2_post(fam, c, c2), "post")
    k.schema_child(d, 0, path, _matched_step(fam, c, c2))


def _if_matched(first: bool, second: bool) -> Checker:
    def rule(k: _Checker, d: Derivation, path: str) -> None:
        k.arity(d, 1)
        t = d.conclusion
        c = k.shape(t.left, imp.If, "left")
        c2 = k.shape(t.right, imp.If, "right")
        g1 = A.Lift(c.cond if first else imp.Not(c.cond), 1)
        g2 = A.Lift(c2.cond if second else imp.Not(c2.cond), 2)
        body1 = c.then if first else c.orelse
        body2 = c2.then if second else c2.orelse
        expected = Triple(A.Conj((t.pre, g1, g2)), body1, body2, t.post)
        k.match_triple(d.children[0].conclusion, expected, "premise")
        k.child(d, 0, path)

    return rule


def _while_true_matched(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    c2 = k.shape(t.right, imp.While, "right")
    g1, g2 = _guards(c, c2, True)
    expected = Triple(A.Conj((t.pre, g1, g2)), imp.Seq(c.body, c), imp.Seq(c2.body, c2), t.post)
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


def _while_false_matched(k: _Checker, d: Derivation, path: str) -> None:
    k.arity(d, 1)
    t = d.conclusion
    c = k.shape(t.left, imp.While, "left")
    c2 = k.shape(t.right, imp.While, "right")
    g1, g2 = _guards(c, c2, False)
    expected = Triple(A.Conj((t.pre, g1, g2)), imp.SKIP, imp.SKIP, t.post)
    k.match_triple(d.children[0].conclusion, expected, "premise")
    k.child(d, 0, path)


PRIMITIVE_RULES: dict[str, Checker] = {
    "Skip": _skip,
    "Seq1": _seq1,
    "Assign": _assign,
    "IfTrue": _branch(True),
    "IfFalse": _branch(False),
    "WhileTrue": _while_true,
    "WhileFalse": _while_false,
    "BackVar": _back_var,
    "Conseq": _conseq,
    "Disj": _disj,
    "Sym": _sym,
}

DERIVED_RULES: dict[str, Checker] = {
    "SeqMatched": _seq_matched,
    "AssignMatched": _assign_matched,
    "BackVarMatched": _back_var_matched,
    "BackVarMatched2": _back_var_matched2,
    "IfMatchedTT": _if_matched(True, True),
    "IfMatchedTF": _if_matched(True, False),
    "IfMatchedFT": _if_matched(False, True),
    "IfMatchedFF": _if_matched(False, False),
    "WhileTrueMatched": _while_true_matched,
    "WhileFalseMatched": _while_false_matched,
}

RULES: dict[str, Checker] = {**PRIMITIVE_RULES, **DERIVED_RULES}

_ALIASES = {name.lower(): name for name in RULES}


def canonical_rule(name: str) -> Optional[str]:
    """Resolve ``Back-Var``, ``seq-matched`` and similar spellings."""
    return _ALIASES.get(name.replace("-", "").replace("_", "").lower())


def check_derivation(d: Derivation, dom: SearchDomain, *, extensional: bool = False) -> CheckReport:
    """Check every node of ``d`` against its rule on ``dom``.

    With ``extensional=True`` a relation that fails the syntactic schema match
    is still accepted when it agrees with the expected one on every pair of
    ``dom``; such nodes are flagged in the report.
    """
    k = _Checker(dom, extensional)
    k.check(d, "root")
    return CheckReport(all(n.ok for n in k.nodes), k.nodes, dom.describe())


# -- builders: compute conclusions from premises --------------------------

def skip(pre: Relation, right: Command, post: Relation) -> Derivation:
    return Derivation("Skip", Triple(pre, imp.SKIP, right, post))


def seq1(first: Derivation, second: Derivation) -> Derivation:
    a, b = first.conclusion, second.conclusion
    return Derivation("Seq1", Triple(a.pre, imp.Seq(a.left, b.left), a.right, b.post), (first, second))


def assign(pre: Relation, c: imp.Assign, premise: Derivation) -> Derivation:
    t = premise.conclusion
    return Derivation("Assign", Triple(pre, c, t.right, t.post), (premise,))


def if_branch(pre: Relation, c: imp.If, then: bool, premise: Derivation) -> Derivation:
    t = premise.conclusion
    return Derivation("IfTrue" if then else "IfFalse", Triple(pre, c, t.right, t.post), (premise,))


def while_unfold(pre: Relation, c: imp.While, taken: bool, premise: Derivation) -> Derivation:
    t = premise.conclusion
    return Derivation("WhileTrue" if taken else "WhileFalse", Triple(pre, c, t.right, t.post), (premise,))


def back_var(fam: Family, c: imp.While, step: Derivation, rest: Derivation) -> Derivation:
    t = rest.conclusion
    return Derivation("BackVar", Triple(fam(0), c, t.right, t.post), (step, rest), fam)


def conseq(pre: Relation, post: Relation, premise: Derivation) -> Derivation:
    t = premise.conclusion
    return Derivation("Conseq", Triple(pre, t.left, t.right, post), (premise,))


def disj(a: Derivation, b: Derivation) -> Derivation:
    x, y = a.conclusion, b.conclusion
    return Derivation("Disj", Triple(A.Disj((x.pre, y.pre)), x.left, x.right,
                                     A.Disj((x.post, y.post))), (a, b))


def sym(premise: Derivation) -> Derivation:
    t = premise.conclusion
    return Derivation("Sym", Triple(A.Flip(t.pre), t.right, t.left, A.Flip(t.post)), (premise,))


def seq_matched(first: Derivation, second: Derivation) -> Derivation:
    a, b = first.conclusion, second.conclusion
    return Derivation("SeqMatched", Triple(a.pre, imp.Seq(a.left, b.left), imp.Seq(a.right, b.right),
                                           b.post), (first, second))


def assign_matched(pre: Relation, c: imp.Assign, c2: imp.Assign) -> Derivation:
    return Derivation("AssignMatched", Triple(pre, c, c2, matched_assign_post(pre, c, c2)))


def if_matched(pre: Relation, c: imp.If, c2: imp.If, first: bool, second: bool,
               premise: Derivation) -> Derivation:
    name = "IfMatched" + ("T" if first else "F") + ("T" if second else "F")
    return Derivation(name, Triple(pre, c, c2, premise.conclusion.post), (premise,))


def while_matched(pre: Relation, c: imp.While, c2: imp.While, taken: bool,
                  premise: Derivation) -> Derivation:
    name = "WhileTrueMatched" if taken else "WhileFalseMatched"
    return Derivation(name, Triple(pre, c, c2, premise.conclusion.post), (premise,))


def back_var_matched(fam: Family, c: imp.While, c2: imp.While, step: Derivation,
                     rest: Derivation) -> Derivation:
    return Derivation("BackVarMatched", Triple(fam(0), c, c2, rest.conclusion.post), (step, rest), fam)


def back_var_matched2(fam: Family, c: imp.While, c2: imp.While, step: Derivation) -> Derivation:
    return Derivation("BackVarMatched2", Triple(fam(0), c, c2, back_var_matched2_post(fam, c, c2)),
                      (step,), fam)
