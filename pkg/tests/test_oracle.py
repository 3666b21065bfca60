import itertools
import random

import pytest

from urel import assertions as A
from urel import imp
from urel.domain import SearchDomain
from urel.generate import instance, reachable_post, small_domain
from urel.imp import SKIP, State
from urel.oracle import hoare_valid_under, reachable_finals, relational_valid, run_all
from urel.parse import parse_command, parse_relation

L = parse_relation("low<1> == low<2>")


def brute_force_valid(pre, c, c2, post, dom):
    """Definition-level check: every post pair has an R-related pre-image."""
    p, q = A.predicate(pre, dom), A.predicate(post, dom)
    reached = set()
    for s, s2 in dom.pairs():
        if p(s, s2):
            a, b = imp.exec_command(c, s, dom.fuel), imp.exec_command(c2, s2, dom.fuel)
            reached.add((a.state, b.state))
    return [pair for pair in dom.pairs() if q(*pair) and pair not in reached]


class TestRelational:
    def test_skip_skip_true(self):
        assert relational_valid(A.TRUE, SKIP, SKIP, A.TRUE, SearchDomain({"x": (0, 1)})).valid

    def test_left_program_reaches_a_leaking_pair(self, left, left_dom):
        post = parse_relation("low<1> == 1 && low<2> == 0 && x<1> == 1 && x<2> == 0")
        assert relational_valid(L, left, left, post, left_dom).valid

    def test_left_program_leak_without_pinning_x(self, left, left_dom):
        # final low = 1 forces x > 0 on that side, so x = 0 there is unreachable
        post = parse_relation("low<1> == 1 && low<2> == 0")
        v = relational_valid(L, left, left, post, left_dom)
        assert v.invalid
        missing = brute_force_valid(L, left, left, post, left_dom)
        assert v.pair == missing[0] == (State(low=1), State())

    def test_assignment_cannot_reach_other_values(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        v = relational_valid(A.TRUE, parse_command("x := 1"), SKIP, parse_relation("x<1> == 2"), dom)
        assert v.invalid
        assert v.pair[0]["x"] == 2

    def test_least_failing_pair(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        v = relational_valid(A.TRUE, parse_command("x := 1"), SKIP, A.TRUE, dom)
        assert v.pair == (State(), State())

    def test_unknown_reports_start(self):
        dom = SearchDomain({"x": (0, 1)}, fuel=3)
        loop = parse_command("while x = 1 do skip")
        v = relational_valid(A.TRUE, loop, SKIP, parse_relation("x<1> == 1"), dom)
        assert v.unknown
        assert v.start == State(x=1)
        assert "fuel 3" in v.reason

    def test_unknown_is_not_needed_when_a_witness_exists(self):
        dom = SearchDomain({"x": (0, 1)}, fuel=3)
        loop = parse_command("while x = 1 do skip")
        assert relational_valid(A.TRUE, loop, SKIP, parse_relation("x<1> == 0"), dom).valid

    def test_overflow_counts_as_unknown(self):
        dom = SearchDomain({"x": (0, 1, 2 ** 62)})
        c = parse_command("if x > 0 then x := x * 4 else x := 1")
        v = relational_valid(A.TRUE, c, SKIP, parse_relation("x<1> == " + str(2 ** 62)), dom)
        assert v.unknown
        assert v.start == State(x=2 ** 62)

    @pytest.mark.parametrize("seed", range(3))
    def test_agrees_with_definition(self, seed):
        rng = random.Random(seed)
        for _ in range(60):
            dom = small_domain(rng)
            r, c, c2, s = instance(rng, dom.variables)
            if run_all(c, dom).exhausted or run_all(c2, dom).exhausted:
                continue
            v = relational_valid(r, c, c2, s, dom)
            missing = brute_force_valid(r, c, c2, s, dom)
            assert v.valid == (not missing)
            if v.invalid:
                assert v.pair == missing[0]


class TestHoare:
    def test_skip(self):
        assert hoare_valid_under(A.TRUE, SKIP, A.TRUE, SearchDomain({"x": (0, 1)})).valid

    def test_increment(self):
        dom = SearchDomain({"x": (0, 1)})
        inc = parse_command("x := x + 1")
        assert hoare_valid_under(lambda s: s["x"] == 0, inc, lambda s: s["x"] == 1, dom).valid
        v = hoare_valid_under(lambda s: s["x"] == 0, inc, lambda s: s["x"] == 0, dom)
        assert v.invalid and v.pair == (State(),)

    def test_side_one_relations_as_predicates(self):
        dom = SearchDomain({"x": (0, 1)})
        inc = parse_command("x := x + 1")
        assert hoare_valid_under(parse_relation("x<1> == 0"), inc, parse_relation("x<1> == 1"), dom).valid
        with pytest.raises(ValueError):
            hoare_valid_under(parse_relation("x<2> == 0"), inc, A.TRUE, dom)


class TestReachable:
    def test_skip_reaches_everything(self):
        dom = SearchDomain({"x": (0, 1), "y": (0, 2)})
        finals, cut = reachable_finals(SKIP, dom)
        assert finals == set(dom.states()) and not cut

    def test_constant_assignment(self):
        finals, _ = reachable_finals(parse_command("x := 1"), SearchDomain({"x": (0, 1, 2)}))
        assert finals == {State(x=1)}

    def test_left_program(self, left, left_dom):
        finals, _ = reachable_finals(left, left_dom)
        assert finals == {State(), State(x=1, low=1)}
        assert all(t["low"] == (t["x"] > 0) for t in finals)

    def test_cut_off_flag(self):
        _, cut = reachable_finals(parse_command("while true do skip"), SearchDomain({"x": (0,)}))
        assert cut

    def test_runs_are_memoized_per_start(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        runs = run_all(parse_command("x := x + 1"), dom)
        assert runs.finals == {s: State(x=s["x"] + 1) for s in dom.states()}
        assert runs.preimages[State(x=1)] == [State()]


class TestRuleContent:
    @pytest.mark.parametrize("seed", range(3))
    def test_sym(self, seed):
        rng = random.Random(10 + seed)
        for _ in range(60):
            dom = small_domain(rng)
            r, c, c2, s = instance(rng, dom.variables)
            v = relational_valid(r, c, c2, s, dom)
            w = relational_valid(A.flip(r), c2, c, A.flip(s), dom)
            assert v.status == w.status

    @pytest.mark.parametrize("seed", range(3))
    def test_disj(self, seed):
        rng = random.Random(20 + seed)
        checked = 0
        for _ in range(60):
            dom = small_domain(rng)
            r1, c, c2, _ = instance(rng, dom.variables)
            r2 = instance(rng, dom.variables)[0]
            s1 = reachable_post(rng, r1, c, c2, dom)
            s2 = reachable_post(rng, r2, c, c2, dom)
            if not (relational_valid(r1, c, c2, s1, dom).valid and relational_valid(r2, c, c2, s2, dom).valid):
                continue
            checked += 1
            assert relational_valid(A.Disj((r1, r2)), c, c2, A.Disj((s1, s2)), dom).valid
        assert checked > 30

    def test_conj_is_not_closed(self):
        # unlike disjunction, a conjunction of valid triples need not be valid
        dom = SearchDomain({"x": (0, 1)})
        r1, r2 = parse_relation("x<1> == 0"), parse_relation("x<1> == 1")
        s = parse_relation("x<1> == x<1>")
        assert relational_valid(r1, SKIP, SKIP, parse_relation("x<1> == 0"), dom).valid
        assert relational_valid(r2, SKIP, SKIP, parse_relation("x<1> == 1"), dom).valid
        assert not relational_valid(A.Conj((r1, r2)), SKIP, SKIP, s, dom).valid

    def test_enlarging_domain_keeps_invalidity_of_small_pairs(self):
        c = parse_command("x := 1")
        post = parse_relation("x<1> == 2")
        for values in itertools.accumulate([(0, 1, 2), (3,), (4,)]):
            assert relational_valid(A.TRUE, c, SKIP, post, SearchDomain({"x": values})).invalid
