import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urel import imp
from urel.domain import SearchDomain, enumerate_states, DomainTooLarge
from urel.imp import (Assign, BinOp, Cmp, FuelExhausted, If, Not, Num, Seq, State, Terminated, Var,
                      While, eval_aexp, eval_bexp, exec_command, exec_reference, format_command)
from urel.parse import ParseError, parse_aexp, parse_bexp, parse_command

from .strategies import bexps, commands, states


class TestParse:
    def test_skip(self):
        assert parse_command("skip") == imp.SKIP

    def test_left_program(self):
        c = parse_command("if x > 0 then low := 1 else low := 0")
        assert c == If(Cmp(">", Var("x"), Num(0)), Assign("low", Num(1)), Assign("low", Num(0)))

    def test_sequence_with_loop(self):
        text = "x := 0; while x < 4 do { x := x + 1 }"
        c = parse_command(text)
        assert isinstance(c, Seq)
        assert isinstance(c.first, Assign) and isinstance(c.second, While)
        assert parse_command(format_command(c)) == c

    def test_sequence_is_right_nested(self):
        c = parse_command("a := 1; b := 2; c := 3")
        assert c == Seq(Assign("a", Num(1)), Seq(Assign("b", Num(2)), Assign("c", Num(3))))

    def test_precedence(self):
        assert parse_aexp("1 + 2 * x") == BinOp("+", Num(1), BinOp("*", Num(2), Var("x")))
        assert parse_aexp("1 - 2 - 3") == BinOp("-", BinOp("-", Num(1), Num(2)), Num(3))
        assert parse_bexp("!(x = 1) && y <= 2") == imp.And(Not(Cmp("=", Var("x"), Num(1))),
                                                          Cmp("<=", Var("y"), Num(2)))

    def test_comments_and_whitespace(self):
        c = parse_command("// a comment\nx := 1; // trailing\n  skip")
        assert c == Seq(Assign("x", Num(1)), imp.SKIP)

    def test_else_defaults_to_skip(self):
        assert parse_command("if x = 1 then y := 2") == If(Cmp("=", Var("x"), Num(1)), Assign("y", Num(2)), imp.SKIP)

    def test_error_position_and_expected(self):
        with pytest.raises(ParseError) as info:
            parse_command("x := 1;\nwhile x < do skip")
        err = info.value
        assert (err.line, err.col) == (2, 11)
        assert err.expected

    def test_error_on_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_command("skip skip")

    def test_multiline_printer_round_trips(self, middle, right):
        for c in (middle, right):
            assert parse_command(format_command(c, indent=2)) == c

    @settings(max_examples=300, deadline=None)
    @given(commands)
    def test_round_trip(self, c):
        assert parse_command(format_command(c)) == c


class TestEval:
    def test_arith(self):
        assert eval_aexp(parse_aexp("x + 1"), State(x=1)) == 2
        assert eval_aexp(parse_aexp("x + n"), State(x=0, n=2)) == 2
        assert eval_aexp(Num(5), State(y=9)) == 5

    def test_bool(self):
        assert eval_bexp(parse_bexp("x > 0"), State(x=1))
        assert eval_bexp(parse_bexp("x = 2000000"), State(x=2000000))
        assert eval_bexp(parse_bexp("!(n > 0)"), State(n=0))

    def test_unmapped_reads_zero(self):
        assert eval_aexp(Var("nowhere"), State()) == 0

    def test_overflow_is_an_error(self):
        big = State(x=imp.INT_MAX)
        with pytest.raises(imp.ImpOverflowError):
            eval_aexp(parse_aexp("x + 1"), big)
        with pytest.raises(imp.ImpOverflowError):
            exec_command(parse_command("x := x * 2"), big, 0)


class TestState:
    def test_total_with_default(self):
        s = State(x=1)
        assert s["x"] == 1 and s["y"] == 0

    def test_zero_bindings_are_canonical(self):
        assert State(x=0, y=1) == State(y=1)
        assert hash(State(x=0, y=1)) == hash(State(y=1))

    def test_update_changes_only_target(self):
        s = State(x=1, y=2)
        t = s.assign("x", 5)
        assert t["x"] == 5 and t["y"] == 2 and s["x"] == 1


class TestExec:
    def test_skip_is_identity(self):
        s = State(x=3)
        assert exec_command(imp.SKIP, s, 0) == Terminated(s, 0)

    def test_left_then_branch(self, left):
        r = exec_command(left, State(x=1, low=0), 10)
        assert isinstance(r, Terminated) and r.state == State(x=1, low=1)

    def test_divergence_exhausts_fuel(self):
        assert isinstance(exec_command(parse_command("while true do skip"), State(), 100), FuelExhausted)

    def test_fuel_counts_iterations(self):
        c = parse_command("x := 0; while x < 4 do x := x + 1")
        assert exec_command(c, State(), 4) == Terminated(State(x=4), 4)
        assert isinstance(exec_command(c, State(), 3), FuelExhausted)

    def test_fuel_is_shared_across_loops(self):
        c = parse_command("while x < 2 do x := x + 1; while y < 2 do y := y + 1")
        assert isinstance(exec_command(c, State(), 3), FuelExhausted)
        assert isinstance(exec_command(c, State(), 4), Terminated)

    def test_deeply_nested_loops_use_fallback(self):
        c = imp.SKIP
        for _ in range(20):
            c = While(Cmp("<", Var("x"), Num(0)), c)
        assert exec_command(c, State(), 5) == exec_reference(c, State(), 5)

    @settings(max_examples=300, deadline=None)
    @given(commands, states, st.integers(0, 6))
    def test_compiled_matches_reference(self, c, s, fuel):
        def run(f):
            try:
                return f(c, s, fuel)
            except imp.ImpOverflowError:
                return "overflow"
        assert run(exec_command) == run(exec_reference)

    @settings(max_examples=200, deadline=None)
    @given(commands, states, st.integers(0, 5), st.integers(0, 5))
    def test_fuel_monotone(self, c, s, fuel, extra):
        try:
            r = exec_command(c, s, fuel)
        except imp.ImpOverflowError:
            return
        if isinstance(r, Terminated):
            assert exec_command(c, s, fuel + extra) == r

    @settings(max_examples=200, deadline=None)
    @given(commands, commands, states)
    def test_seq_composes(self, c, d, s):
        try:
            whole = exec_command(Seq(c, d), s, 50)
            first = exec_command(c, s, 50)
            rest = exec_command(d, first.state, 50) if isinstance(first, Terminated) else None
        except imp.ImpOverflowError:
            return
        if isinstance(whole, Terminated):
            assert isinstance(first, Terminated) and rest.state == whole.state

    @settings(max_examples=200, deadline=None)
    @given(bexps, commands, commands, states)
    def test_if_selects_branch(self, b, c, d, s):
        try:
            chosen = c if eval_bexp(b, s) else d
            assert exec_command(If(b, c, d), s, 20) == exec_command(chosen, s, 20)
        except imp.ImpOverflowError:
            pass


class TestEnumerate:
    def test_sizes(self):
        assert len(enumerate_states(SearchDomain({"x": (0, 1)}))) == 2
        assert len(enumerate_states(SearchDomain({"x": (0, 1), "low": (0, 1)}))) == 4
        assert enumerate_states(SearchDomain({})) == (State(),)

    def test_order_and_uniqueness(self):
        states = enumerate_states(SearchDomain({"x": (1, 0), "a": (0, 2)}))
        assert [s.as_dict(("a", "x")) for s in states] == [
            {"a": 0, "x": 0}, {"a": 0, "x": 1}, {"a": 2, "x": 0}, {"a": 2, "x": 1}]
        assert len(set(states)) == len(states)

    def test_cap(self):
        dom = SearchDomain({v: range(10) for v in "abcde"}, max_states=1000)
        with pytest.raises(DomainTooLarge):
            dom.states()

    def test_empty_value_set_rejected(self):
        with pytest.raises(ValueError):
            SearchDomain({"x": ()})
