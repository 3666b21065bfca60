import random

import pytest

from urel import assertions as A
from urel import imp
from urel.domain import SearchDomain
from urel.generate import VARS, aexp, relation
from urel.imp import State
from urel.parse import ParseError, Scope, parse_aexp, parse_relation

L = parse_relation("low<1> == low<2>")
X3 = SearchDomain({"x": (0, 1, 2), "y": (0, 1, 2)})


def rel(text, **families):
    return parse_relation(text, Scope({}, families, {}))


class TestEval:
    def test_low_equivalence(self):
        dom = SearchDomain({"low": (0, 1)})
        assert A.eval_rel(L, State(low=1), State(low=1), dom)
        assert not A.eval_rel(L, State(low=1), State(), dom)

    def test_flip_swaps_arguments(self):
        r = rel("x<1> < x<2>")
        s, t = State(x=0), State(x=1)
        assert A.eval_rel(A.flip(r), s, t, X3) == A.eval_rel(r, t, s, X3)
        assert not A.eval_rel(A.flip(r), s, t, X3)

    def test_lift_reads_one_side(self):
        r = rel("[x > 0]<1>")
        assert A.eval_rel(r, State(x=1), State(x=-7), X3)
        assert not A.eval_rel(rel("[x > 0]<2>"), State(x=1), State(), X3)

    def test_exists_value(self):
        r = rel("exists v. x<1> == v && x<2> == v + 1")
        assert A.eval_rel(r, State(x=1), State(x=2), X3)
        assert not A.eval_rel(r, State(x=1), State(x=1), X3)

    def test_material_implication(self):
        r = rel("x<1> == 1 => x<2> == 1")
        assert A.eval_rel(r, State(x=0), State(x=5), X3)
        assert not A.eval_rel(r, State(x=1), State(x=0), X3)

    def test_family_exists_is_bounded_by_n_max(self):
        fam = A.Family("R", rel("x<1> == n"))
        r = fam.exists()
        dom = SearchDomain({"x": range(5)}, n_max=2)
        assert [A.eval_rel(r, State(x=k), State(), dom) for k in range(5)] == [True, True, True, False, False]

    def test_family_instance_arithmetic(self):
        fam = A.Family("R", rel("x<1> == n"))
        r = rel("R(n + 1)", R=fam)
        assert A.eval_rel(A.instantiate(r, 1), State(x=2), State(), X3)

    def test_negative_family_index_is_false(self):
        fam = A.Family("R", A.TRUE)
        assert not A.eval_rel(fam(-1), State(), State(), X3)

    def test_free_parameter_cannot_be_evaluated(self):
        with pytest.raises(A.UnboundName):
            A.eval_rel(rel("x<1> == n"), State(), State(), X3)


class TestAssignPost:
    def test_increment_from_zero(self):
        r = A.assign_post(rel("x<1> == 0"), "x", parse_aexp("x + 1"))
        for s, t in X3.pairs():
            assert A.eval_rel(r, s, t, X3) == (s["x"] == 1)

    def test_constant_assignment(self):
        dom = SearchDomain({"x": range(6)})
        r = A.assign_post(A.TRUE, "x", imp.Num(5))
        for s, t in dom.pairs():
            assert A.eval_rel(r, s, t, dom) == (s["x"] == 5)

    def test_second_side(self):
        r = A.assign_post(rel("x<1> == x<2>"), "x", parse_aexp("x + 1"), side=2)
        assert A.eval_rel(r, State(x=1), State(x=2), X3)
        assert not A.eval_rel(r, State(x=1), State(x=1), X3)

    def test_concrete_syntax(self):
        assert rel("(x<1> == 0)[x<1> := x + 1]") == A.AssignPost(rel("x<1> == 0"), "x", parse_aexp("x + 1"), 1)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_brute_force_strongest_post(self, seed):
        rng = random.Random(seed)
        for _ in range(30):
            names = VARS[: rng.randint(1, 3)]
            dom = SearchDomain({v: (0, 1, 2) for v in names})
            r = relation(rng, names, 2)
            x = rng.choice(names)
            e = aexp(rng, names, 1)
            side = rng.choice((1, 2))
            post = A.predicate(A.assign_post(r, x, e, side), dom)
            pre = A.predicate(r, dom)
            reach = set()
            for s, s2 in dom.pairs():
                if pre(s, s2):
                    moved = (s if side == 1 else s2).assign(x, imp.eval_aexp(e, s if side == 1 else s2))
                    reach.add((moved, s2) if side == 1 else (s, moved))
            for s, s2 in dom.pairs():
                assert post(s, s2) == ((s, s2) in reach)


class TestChecks:
    def test_implication_basics(self):
        dom = SearchDomain({"low": (0, 1)})
        assert A.implies_on(L, L, dom)
        assert A.implies_on(A.FALSE, rel("low<1> == 7"), dom)
        result = A.implies_on(L, rel("low<1> != low<2>"), dom)
        assert not result
        assert result.counterexample == (State(), State())

    def test_satisfiable(self):
        dom = SearchDomain({"low": (0, 1)})
        assert A.satisfiable_on(A.TRUE, dom) == (State(), State())
        assert A.satisfiable_on(rel("low<1> != low<2>"), dom) == (State(), State(low=1))
        assert A.satisfiable_on(rel("x<1> == 0 && x<1> == 1"), X3) is None

    def test_equivalence(self):
        assert A.equivalent_on(rel("!(x<1> < x<2>)"), rel("x<2> <= x<1>"), X3)
        assert not A.equivalent_on(rel("x<1> < x<2>"), rel("x<1> <= x<2>"), X3)


class TestLaws:
    @pytest.mark.parametrize("seed", range(3))
    def test_flip_involution_and_lifted_connectives(self, seed):
        rng = random.Random(100 + seed)
        for _ in range(25):
            r, s = relation(rng, VARS[:2], 2), relation(rng, VARS[:2], 2)
            dom = SearchDomain({"x": (0, 1, 2), "y": (0, 1)})
            pr, ps = A.predicate(r, dom), A.predicate(s, dom)
            ff = A.predicate(A.flip(A.flip(r)), dom)
            both = A.predicate(A.Conj((r, s)), dom)
            either = A.predicate(A.Disj((r, s)), dom)
            for a, b in dom.pairs():
                assert ff(a, b) == pr(a, b)
                assert both(a, b) == (pr(a, b) and ps(a, b))
                assert either(a, b) == (pr(a, b) or ps(a, b))

    @pytest.mark.parametrize("seed", range(3))
    def test_normalize_preserves_meaning(self, seed):
        rng = random.Random(200 + seed)
        for _ in range(40):
            r = relation(rng, VARS, 3)
            assert A.equivalent_on(r, A.normalize(r), X3.replace(values={"x": (0, 1, 2), "y": (0, 1, 2), "z": (0, 1)}))


class TestNormalize:
    def test_conjunction_order_and_duplicates(self):
        assert A.same_relation(rel("a<1> == 1 && b<2> == 2"), rel("b<2> == 2 && (a<1> == 1 && b<2> == 2)"))

    def test_flip_pushed_to_leaves(self):
        assert A.same_relation(A.flip(rel("x<1> < y<2> && [x > 0]<2>")), rel("x<2> < y<1> && [x > 0]<1>"))
        assert A.same_relation(A.flip(A.flip(L)), L)

    def test_double_negation(self):
        assert A.same_relation(rel("!!(x<1> == 1)"), rel("x<1> == 1"))

    def test_family_index_folding(self):
        fam = A.Family("R", rel("x<1> == n"))
        assert A.same_relation(rel("R(1 + n)", R=fam), rel("R(n + 1)", R=fam))
        assert A.same_relation(rel("R(0 + 1)", R=fam), fam(1))

    def test_different_relations_stay_different(self):
        assert not A.same_relation(rel("x<1> == 1"), rel("x<2> == 1"))


class TestSyntax:
    @pytest.mark.parametrize("seed", range(3))
    def test_print_parse_round_trip(self, seed):
        rng = random.Random(300 + seed)
        for _ in range(100):
            r = relation(rng, VARS, 3)
            assert parse_relation(A.format_relation(r)) == r

    def test_unknown_name(self):
        with pytest.raises(ParseError):
            parse_relation("x<1> == k")

    def test_family_needs_declaration(self):
        with pytest.raises(ParseError):
            parse_relation("R(0)")

    def test_sides_used(self):
        assert A.sides_used(rel("[x > 0]<1> && y<1> == 2")) == {1}
        assert A.sides_used(A.flip(rel("x<1> == 0"))) == {2}
