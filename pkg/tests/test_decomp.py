import random

import pytest

from urel import assertions as A
from urel import imp
from urel.decomp import (check_lemma_decomp, check_skip_bridge, check_theorem_decomp, decomp,
                         decomp_eval)
from urel.domain import SearchDomain
from urel.generate import instance, small_domain
from urel.imp import SKIP, State
from urel.parse import parse_command, parse_relation

L = parse_relation("low<1> == low<2>")


def by_definition(rel, c, c2, post, dom):
    p, q = A.predicate(rel, dom), A.predicate(post, dom)
    out = set()
    for s, s2 in dom.pairs():
        if p(s, s2):
            t = imp.exec_command(c, s, dom.fuel).state
            t2 = imp.exec_command(c2, s2, dom.fuel).state
            if q(t, t2):
                out.add((t, s2))
    return out


class TestRelation:
    def test_skip_true_everywhere(self):
        dom = SearchDomain({"x": (0, 1)})
        d = decomp(A.TRUE, SKIP, SKIP, A.TRUE, dom)
        assert all(decomp_eval(d, t, s2) for t, s2 in dom.pairs())

    def test_unsatisfiable_post(self):
        dom = SearchDomain({"x": (0, 1)})
        assert not decomp(A.TRUE, SKIP, SKIP, A.FALSE, dom).pairs

    def test_left_program(self, left, left_dom):
        post = parse_relation("low<1> == 1 && low<2> == 0")
        d = decomp(L, left, left, post, left_dom)
        assert d.pairs == by_definition(L, left, left, post, left_dom)
        assert d.pairs == {(State(x=1, low=1), State()), (State(x=1, low=1), State(low=1))}

    def test_generated_match_definition(self):
        rng = random.Random(3)
        for _ in range(40):
            dom = small_domain(rng)
            r, c, c2, s = instance(rng, dom.variables)
            d = decomp(r, c, c2, s, dom)
            if not d.exhausted:
                assert d.pairs == by_definition(r, c, c2, s, dom)


class TestLemma:
    def test_skip(self):
        dom = SearchDomain({"x": (0, 1)})
        chk = check_lemma_decomp(A.TRUE, SKIP, SKIP, A.TRUE, dom)
        assert chk.holds and chk.left and chk.right

    def test_invalid_whole_breaks_a_conjunct(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        chk = check_lemma_decomp(A.TRUE, parse_command("x := 1"), SKIP, parse_relation("x<1> == 2"), dom)
        assert chk.holds
        assert chk.left is False and chk.right is False
        assert "invalid" in chk.parts.values()

    def test_skipped_on_fuel(self):
        dom = SearchDomain({"x": (0, 1)}, fuel=2)
        chk = check_lemma_decomp(A.TRUE, parse_command("while x = 1 do skip"), SKIP, A.TRUE, dom)
        assert chk.holds is None
        assert "skipped" in str(chk)

    @pytest.mark.parametrize("seed", range(2))
    def test_generated(self, seed):
        rng = random.Random(30 + seed)
        for _ in range(40):
            dom = small_domain(rng)
            chk = check_lemma_decomp(*instance(rng, dom.variables), dom)
            assert chk.holds in (True, None), str(chk)


class TestSkipBridge:
    def test_skip_right(self):
        dom = SearchDomain({"x": (0, 1)})
        r = parse_relation("x<1> == x<2>")
        chk = check_skip_bridge(r, SKIP, r, dom)
        assert chk.holds and chk.left

    def test_unreachable_final(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        chk = check_skip_bridge(A.TRUE, parse_command("x := 1"), parse_relation("x<2> == 2"), dom)
        assert chk.holds
        assert chk.left is False and chk.right is False

    @pytest.mark.parametrize("seed", range(2))
    def test_generated(self, seed):
        rng = random.Random(40 + seed)
        for _ in range(40):
            dom = small_domain(rng)
            r, _, c2, s = instance(rng, dom.variables)
            assert check_skip_bridge(r, c2, s, dom).holds in (True, None)


class TestTheorem:
    def test_skip(self):
        dom = SearchDomain({"x": (0, 1)})
        chk = check_theorem_decomp(A.TRUE, SKIP, SKIP, A.TRUE, dom)
        assert chk.holds and chk.composition

    def test_invalid_instance(self):
        dom = SearchDomain({"x": (0, 1, 2)})
        chk = check_theorem_decomp(A.TRUE, parse_command("x := 1"), SKIP, parse_relation("x<1> == 2"), dom)
        assert chk.holds
        assert chk.theorem.left is False

    def test_left_program(self, left, left_dom):
        post = parse_relation("low<1> == 1 && low<2> == 0 && x<1> == 1 && x<2> == 0")
        chk = check_theorem_decomp(L, left, left, post, left_dom)
        assert chk.holds and chk.theorem.left

    @pytest.mark.parametrize("seed", range(2))
    def test_generated(self, seed):
        rng = random.Random(50 + seed)
        for _ in range(40):
            dom = small_domain(rng)
            chk = check_theorem_decomp(*instance(rng, dom.variables), dom)
            assert chk.holds in (True, None), str(chk.theorem)
