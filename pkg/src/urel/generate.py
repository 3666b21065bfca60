"""Seeded random programs, relations and accepted derivations.

Everything takes a :class:`random.Random`, so a seed reproduces a run. The
derivation builders work forwards: they pick a rule, build premises for it and
compute the conclusion, so the result is meant to be kernel-accepted (callers
still check it; a builder may occasionally produce a rejected tree, e.g. when
a backwards variant does not fit the domain).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from . import assertions as A
from . import imp
from . import kernel as K
from .assertions import Relation
from .domain import SearchDomain
from .imp import AExp, BExp, Command
from .kernel import Derivation
from .oracle import run_all

VARS = ("x", "y", "z")


def small_domain(rng: random.Random, names=VARS, fuel: int = 8) -> SearchDomain:
    """Up to three variables with values ``{0, 1, 2}``."""
    k = rng.randint(1, len(names))
    return SearchDomain({v: (0, 1, 2) for v in names[:k]}, fuel=fuel, n_max=2)


# -- programs ---------------------------------------------------------------

def aexp(rng: random.Random, names, depth: int = 1) -> AExp:
    roll = rng.random()
    if depth <= 0 or roll < 0.4:
        return imp.Var(rng.choice(names)) if rng.random() < 0.6 else imp.Num(rng.randint(-1, 2))
    op = rng.choice(("+", "+", "-", "*"))
    return imp.BinOp(op, aexp(rng, names, depth - 1), aexp(rng, names, depth - 1))


def bexp(rng: random.Random, names, depth: int = 1) -> BExp:
    roll = rng.random()
    if depth <= 0 or roll < 0.6:
        if rng.random() < 0.05:
            return imp.Bool(rng.random() < 0.5)
        op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
        return imp.Cmp(op, imp.Var(rng.choice(names)), aexp(rng, names, 0))
    if roll < 0.75:
        return imp.Not(bexp(rng, names, depth - 1))
    if roll < 0.9:
        return imp.And(bexp(rng, names, depth - 1), bexp(rng, names, depth - 1))
    return imp.Or(bexp(rng, names, depth - 1), bexp(rng, names, depth - 1))


def assignment(rng: random.Random, names) -> imp.Assign:
    return imp.Assign(rng.choice(names), aexp(rng, names, 1))


def counting_loop(rng: random.Random, names, body: Command) -> imp.While:
    """``while v < k do { body; v := v + 1 }`` with ``body`` not writing ``v``."""
    v = rng.choice(names)
    return imp.While(imp.Cmp("<", imp.Var(v), imp.Num(rng.randint(0, 3))),
                     imp.Seq(body, imp.Assign(v, imp.BinOp("+", imp.Var(v), imp.Num(1)))))


def command(rng: random.Random, names, depth: int = 2) -> Command:
    """A small command; loops mostly count up so they terminate quickly."""
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        return assignment(rng, names) if rng.random() < 0.85 else imp.SKIP
    if roll < 0.6:
        return imp.Seq(command(rng, names, depth - 1), command(rng, names, depth - 1))
    if roll < 0.85:
        return imp.If(bexp(rng, names), command(rng, names, depth - 1), command(rng, names, depth - 1))
    if rng.random() < 0.8:
        v = rng.choice(names)
        others = [n for n in names if n != v] or [v]
        body = command(rng, others, depth - 2) if len(others) > 1 or others[0] != v else imp.SKIP
        if v in imp.command_vars(body):
            body = imp.SKIP
        return counting_loop(rng, [v], body)
    return imp.While(bexp(rng, names), command(rng, names, depth - 1))


# -- relations --------------------------------------------------------------

def texp(rng: random.Random, names, avoid=frozenset()) -> A.TExp:
    choices = [(v, s) for v in names for s in (1, 2) if (v, s) not in avoid]
    if not choices or rng.random() < 0.3:
        return A.TNum(rng.randint(0, 2))
    v, s = rng.choice(choices)
    e: A.TExp = A.TVar(v, s)
    if rng.random() < 0.15:
        e = A.TBin(rng.choice("+-"), e, A.TNum(rng.randint(0, 1)))
    return e


def atom(rng: random.Random, names, avoid=frozenset()) -> Relation:
    roll = rng.random()
    if roll < 0.7:
        op = rng.choice(("==", "==", "!=", "<", "<="))
        return A.Compare(op, texp(rng, names, avoid), texp(rng, names, avoid))
    usable = [v for v in names if (v, 1) not in avoid or (v, 2) not in avoid]
    if roll < 0.95 and usable:
        v = rng.choice(usable)
        side = 2 if (v, 1) in avoid else 1 if (v, 2) in avoid else rng.choice((1, 2))
        return A.Lift(imp.Cmp(rng.choice(("=", "<", ">=")), imp.Var(v), imp.Num(rng.randint(0, 2))), side)
    return A.TRUE


def relation(rng: random.Random, names, depth: int = 2, avoid=frozenset(), rich: bool = True) -> Relation:
    """A random relation; ``avoid`` lists ``(var, side)`` slots it must not read.

    ``rich`` allows quantifiers, assignment posts and flips.
    """
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        return atom(rng, names, avoid)
    if roll < 0.6:
        return A.Conj((relation(rng, names, depth - 1, avoid, rich), relation(rng, names, depth - 1, avoid, rich)))
    if roll < 0.75:
        return A.Disj((relation(rng, names, depth - 1, avoid, rich), relation(rng, names, depth - 1, avoid, rich)))
    if roll < 0.82:
        return A.Neg(relation(rng, names, depth - 1, avoid, rich))
    if not rich or avoid:
        return A.Implies(relation(rng, names, depth - 1, avoid, rich), relation(rng, names, depth - 1, avoid, rich))
    if roll < 0.88:
        body = A.Compare("==", A.TVar(rng.choice(names), rng.choice((1, 2))), A.Bound("v"))
        return A.ExistsValue("v", A.Conj((body, relation(rng, names, depth - 1))))
    if roll < 0.95:
        return A.AssignPost(relation(rng, names, depth - 1), rng.choice(names),
                            aexp(rng, names, 1), rng.choice((1, 2)))
    return A.Flip(relation(rng, names, depth - 1))


# -- accepted derivations ---------------------------------------------------

@dataclass
class Builder:
    """Forward construction of derivations over a fixed variable set."""
    rng: random.Random
    names: tuple[str, ...]
    dom: Optional[SearchDomain] = None
    tries: int = 4

    def extra(self, base: Optional[Relation] = None) -> Relation:
        """A random conjunct, preferring one that keeps ``base`` satisfiable."""
        x = relation(self.rng, self.names, 1, rich=False)
        for _ in range(self.tries if base is not None and self.dom is not None else 0):
            if A.satisfiable_on(A.Conj((base, x)), self.dom) is not None:
                break
            x = relation(self.rng, self.names, 1, rich=False)
        return x

    def guard(self, base: Optional[Relation] = None, side: int = 1) -> BExp:
        b = bexp(self.rng, self.names, 0)
        for _ in range(self.tries if base is not None and self.dom is not None else 0):
            if A.satisfiable_on(A.Conj((base, A.Lift(b, side))), self.dom) is not None:
                break
            b = bexp(self.rng, self.names, 0)
        return b

    # leaves: Skip whose right command is skip or one assignment, or AssignMatched

    def skip_leaf(self, pre: Relation, right_skip: bool) -> Derivation:
        if right_skip or self.rng.random() < 0.4:
            right: Command = imp.SKIP
            post = pre
        else:
            right = assignment(self.rng, self.names)
            post = A.AssignPost(pre, right.var, right.expr, 2)
        if self.rng.random() < 0.5:
            post = A.Conj((post, self.extra(post)))
        return K.skip(pre, right, post)

    def derive(self, pre: Relation, depth: int, left_skip: bool = False,
               right_skip: bool = False, rule: Optional[str] = None,
               top: bool = False) -> Derivation:
        """An accepted derivation whose conclusion pre is ``pre`` (up to normalization).

        With ``top`` a backwards-variant rule may sit at the root, whose pre is
        then the family at 0 rather than ``pre``.
        """
        rng = self.rng
        options = ["Skip", "Conseq", "Sym"]
        if depth > 0 and not left_skip:
            options += ["Assign", "IfTrue", "IfFalse", "WhileFalse", "WhileTrue", "Seq1", "BackVar"]
            if not right_skip:
                options += ["AssignMatched", "SeqMatched", "IfMatched", "WhileTrueMatched",
                            "WhileFalseMatched", "BackVarMatched", "BackVarMatched2"]
        if depth <= 0:
            options = ["Skip", "AssignMatched"] if not (left_skip or right_skip) else ["Skip"]
        if rule is None or rule not in options:
            rule = rng.choice(options)
        d = depth - 1
        if rule == "Skip":
            if left_skip or right_skip or rng.random() < 0.7:
                return self.skip_leaf(pre, right_skip)
        if rule == "AssignMatched" or (rule == "Skip"):
            c1, c2 = assignment(rng, self.names), assignment(rng, self.names)
            return K.assign_matched(pre, c1, c2)
        if rule == "Conseq":
            inner = self.derive(A.Conj((pre, self.extra(pre))), d, left_skip, right_skip)
            post = inner.conclusion.post
            if rng.random() < 0.6:
                post = A.Conj((post, self.extra(post)))
            return K.conseq(pre, post, inner)
        if rule == "Sym":
            inner = self.derive(A.Flip(pre), d, right_skip, left_skip)
            return K.sym(inner)
        if rule == "Assign":
            c = assignment(rng, self.names)
            inner = self.derive(A.AssignPost(pre, c.var, c.expr, 1), d, True, right_skip)
            return K.assign(pre, c, inner)
        if rule in ("IfTrue", "IfFalse"):
            b = self.guard(pre)
            taken = rule == "IfTrue"
            inner = self.derive(A.Conj((pre, A.Lift(b if taken else imp.Not(b), 1))), d, False, right_skip)
            other = command(rng, self.names, 1)
            c = imp.If(b, inner.conclusion.left, other) if taken else imp.If(b, other, inner.conclusion.left)
            return K.if_branch(pre, c, taken, inner)
        if rule == "WhileFalse":
            b = self.guard(pre)
            inner = self.derive(A.Conj((pre, A.Lift(imp.Not(b), 1))), d, True, right_skip)
            return K.while_unfold(pre, imp.While(b, command(rng, self.names, 1)), False, inner)
        if rule == "WhileTrue":
            b = self.guard(pre)
            first = self.derive(A.Conj((pre, A.Lift(b, 1))), d, False, right_skip)
            loop = imp.While(b, first.conclusion.left)
            mid = first.conclusion.post
            exit_ = K.while_unfold(mid, loop, False, self.skip_leaf(A.Conj((mid, A.Lift(imp.Not(b), 1))), True))
            return K.while_unfold(pre, loop, True, K.seq1(first, exit_))
        if rule == "Seq1":
            first = self.derive(pre, d, False, right_skip)
            second = self.derive(first.conclusion.post, d, False, True)
            return K.seq1(first, second)
        if rule == "SeqMatched":
            first = self.derive(pre, d)
            second = self.derive(first.conclusion.post, d)
            return K.seq_matched(first, second)
        if rule == "IfMatched":
            b1, b2 = self.guard(pre), self.guard(pre, 2)
            t1, t2 = rng.random() < 0.5, rng.random() < 0.5
            g1 = A.Lift(b1 if t1 else imp.Not(b1), 1)
            g2 = A.Lift(b2 if t2 else imp.Not(b2), 2)
            inner = self.derive(A.Conj((pre, g1, g2)), d)
            t = inner.conclusion
            o1, o2 = command(rng, self.names, 1), command(rng, self.names, 1)
            c1 = imp.If(b1, t.left, o1) if t1 else imp.If(b1, o1, t.left)
            c2 = imp.If(b2, t.right, o2) if t2 else imp.If(b2, o2, t.right)
            return K.if_matched(pre, c1, c2, t1, t2, inner)
        if rule == "WhileFalseMatched":
            b1, b2 = self.guard(pre), self.guard(pre, 2)
            leaf_pre = A.Conj((pre, A.Lift(imp.Not(b1), 1), A.Lift(imp.Not(b2), 2)))
            w1 = imp.While(b1, command(rng, self.names, 1))
            w2 = imp.While(b2, command(rng, self.names, 1))
            return K.while_matched(pre, w1, w2, False, self.skip_leaf(leaf_pre, True))
        if rule == "WhileTrueMatched":
            b1, b2 = self.guard(pre), self.guard(pre, 2)
            first = self.derive(A.Conj((pre, A.Lift(b1, 1), A.Lift(b2, 2))), d)
            w1, w2 = imp.While(b1, first.conclusion.left), imp.While(b2, first.conclusion.right)
            mid = first.conclusion.post
            leaf = self.skip_leaf(A.Conj((mid, A.Lift(imp.Not(b1), 1), A.Lift(imp.Not(b2), 2))), True)
            exit_ = K.while_matched(mid, w1, w2, False, leaf)
            return K.while_matched(pre, w1, w2, True, K.seq_matched(first, exit_))
        if rule in ("BackVar", "BackVarMatched", "BackVarMatched2"):
            free = [v for v in self.names if v not in A.relation_vars(pre)]
            if not free and not top:
                return self.derive(pre, depth, left_skip, right_skip, "Skip")
            v = rng.choice(free) if free else rng.choice(self.names)
            frame = pre if free else relation(rng, self.names, 1, avoid={(v, 1), (v, 2)}, rich=False)
            if rule == "BackVar":
                d = self.back_var(v, frame, right_skip)
            else:
                d = self.back_var_matched(v, frame, rule == "BackVarMatched2")
            return d if top else K.conseq(pre, d.conclusion.post, d)
        raise AssertionError(rule)

    def _counter(self, v: str):
        bound = self.rng.randint(1, 3)
        cond = imp.Cmp("<", imp.Var(v), imp.Num(bound))
        body = imp.Assign(v, imp.BinOp("+", imp.Var(v), imp.Num(1)))
        return v, bound, cond, body

    def _step(self, fam: A.Family, cond: BExp, body: imp.Assign) -> Derivation:
        """``<F(n) && b> v := v + 1, skip <F(n+1)>`` via Assign, Skip and Conseq."""
        pre = A.Conj((fam(A.N), A.Lift(cond, 1)))
        moved = A.AssignPost(pre, body.var, body.expr, 1)
        inner = K.assign(pre, body, K.skip(moved, imp.SKIP, moved))
        return K.conseq(pre, fam(A.TBin("+", A.N, A.TNum(1))), inner)

    def back_var(self, v: str, frame: Relation, right_skip: bool) -> Derivation:
        """Backwards variant over a loop counting ``v`` up.

        The family is ``v<1> == n && v<1> <= bound && frame``; ``frame`` must
        not read ``v<1>``.
        """
        v, bound, cond, body = self._counter(v)
        fam = A.Family("F", A.Conj((A.Compare("==", A.TVar(v, 1), A.N),
                                    A.Compare("<=", A.TVar(v, 1), A.TNum(bound)), frame)))
        loop = imp.While(cond, body)
        leaf = self.skip_leaf(A.Conj((fam.exists(), A.Lift(imp.Not(cond), 1))), right_skip)
        rest = K.while_unfold(fam.exists(), loop, False, leaf)
        return K.back_var(fam, loop, self._step(fam, cond, body), rest)

    def back_var_matched(self, v: str, frame: Relation, second: bool) -> Derivation:
        v, bound, cond, step_var = self._counter(v)
        fam = A.Family("G", A.Conj((
            A.Compare("==", A.TVar(v, 1), A.N), A.Compare("==", A.TVar(v, 2), A.N),
            A.Compare("<=", A.TVar(v, 1), A.TNum(bound)), frame)))
        loop = imp.While(cond, step_var)
        pre_step = A.Conj((fam(A.N), A.Lift(cond, 1), A.Lift(cond, 2)))
        matched = K.assign_matched(pre_step, step_var, step_var)
        step = K.conseq(pre_step, fam(A.TBin("+", A.N, A.TNum(1))), matched)
        if second:
            return K.back_var_matched2(fam, loop, loop, step)
        exit_pre = A.Conj((fam.exists(), A.Lift(imp.Not(cond), 1), A.Lift(imp.Not(cond), 2)))
        rest = K.while_matched(fam.exists(), loop, loop, False, self.skip_leaf(exit_pre, True))
        return K.back_var_matched(fam, loop, loop, step, rest)


TOP_RULES = ("Skip", "Seq1", "Assign", "IfTrue", "IfFalse", "WhileTrue", "WhileFalse", "BackVar",
             "Conseq", "Disj", "Sym", "SeqMatched", "AssignMatched", "BackVarMatched",
             "BackVarMatched2", "IfMatched", "WhileTrueMatched", "WhileFalseMatched")


def derivation(rng: random.Random, names, rule: str, depth: int = 2,
               dom: Optional[SearchDomain] = None, attempts: int = 12) -> Derivation:
    """A derivation whose root applies ``rule`` (``IfMatched`` picks a branch pair).

    Given ``dom``, up to ``attempts`` candidates are drawn and the first whose
    post is satisfiable on ``dom`` is returned, so few conclusions are vacuous.
    """
    b = Builder(rng, tuple(names), dom)
    d = None
    for _ in range(attempts if dom is not None else 1):
        d = _one(b, rule, depth)
        if dom is None or A.satisfiable_on(d.conclusion.post, dom) is not None:
            break
    return d


def _one(b: Builder, rule: str, depth: int) -> Derivation:
    pre = relation(b.rng, b.names, 1, rich=False)
    if rule == "Disj":
        d = b.derive(pre, depth - 1)
        t = d.conclusion
        other = K.conseq(A.Disj((t.pre, b.extra())), A.Conj((t.post, b.extra(t.post))), d)
        pair = (d, other) if b.rng.random() < 0.5 else (other, d)
        return K.disj(*pair)
    return b.derive(pre, depth, rule=rule, top=True)


# -- relational instances ---------------------------------------------------

def instance(rng: random.Random, names, depth: int = 2) -> tuple[Relation, Command, Command, Relation]:
    """A random ``(R, c, c', S)``, valid or not.

    ``c'`` is often ``c`` itself or ``skip`` so that both verdicts show up.
    """
    c = command(rng, names, depth)
    roll = rng.random()
    c2 = c if roll < 0.3 else imp.SKIP if roll < 0.45 else command(rng, names, depth)
    return relation(rng, names, depth), c, c2, relation(rng, names, depth)


def reachable_post(rng: random.Random, pre: Relation, c: Command, c2: Command,
                   dom: SearchDomain, k: int = 3) -> Relation:
    """A post valid for ``<pre> c, c2 <_>`` by construction.

    It is a disjunction of up to ``k`` final pairs jointly reached from
    ``pre``; ``FALSE`` when nothing is reached.
    """
    runs1, runs2 = run_all(c, dom), run_all(c2, dom)
    holds = A.predicate(pre, dom)
    reached = list(dict.fromkeys(
        (runs1.finals[s], runs2.finals[s2]) for s, s2 in dom.pairs()
        if runs1.finals[s] is not None and runs2.finals[s2] is not None and holds(s, s2)))
    picked = rng.sample(reached, min(k, len(reached)))
    return A.disj(*(A.pair_relation(t, t2, dom.variables) for t, t2 in picked))
