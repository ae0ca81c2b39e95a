import pytest
from hypothesis import given, settings, strategies as st

from lassocause.eol import (
    TOP, AfterLike, And, Between, BudgetTooSmall, EolSyntaxError, Event, Infinite, Not, OrderedAnd,
    StratificationError, UnfoldBudget, UntilLike, count_ordered_events, default_budget, eval_gcomplex,
    eval_icomplex, eval_infinite, eval_simple, formula_of_trace, from_json, head_unfolds_used,
    parse_eol, stratum, subset_rel, to_json, witness, GCOMPLEX, INFINITE,
)
from lassocause.model import Lasso, Segment
from lassocause.oracle import OracleConfig, naive_eol_eval
from lassocause.search import TraceUniverse, partition
from lassocause.ltl import parse_ltl

from conftest import words
from strategies import gcomplex_eol, infinite_eol, lassos, positive_chains

XI = "a1 .^w (a2 . a3)"
XI1 = "a1 . a3 .^w (a3 . a2)"
XI2 = "a1 . a3 . a2 . a3 . a2 .^w (a2 . a3 . a2 . a2 . a2)"
CAUSE = "(B2 .[ !E2) .^w (!E2)"


def seg_of(text, end=None):
    s = words("", text)
    return Segment(s, 0, len(text.split()) if end is None else end)


# -- syntax ---------------------------------------------------------------

def test_parse_running_example():
    assert parse_eol(XI) == Infinite(Event("a1"), OrderedAnd(Event("a2"), Event("a3")))


def test_parse_cause():
    f = parse_eol(CAUSE)
    assert f == Infinite(AfterLike(Event("B2"), Not(Event("E2"))), Not(Event("E2")))
    assert str(f) == CAUSE


def test_parse_interval_and_until():
    f = parse_eol("!x .] a .<!b.> c")
    assert f == UntilLike(Not(Event("x")), Between(Event("a"), Not(Event("b")), Event("c")))
    assert stratum(f) == GCOMPLEX


def test_top_and_precedence():
    assert parse_eol("T .^w (T)") == Infinite(TOP, TOP)
    assert parse_eol("a & b . c") == And(Event("a"), OrderedAnd(Event("b"), Event("c")))


@pytest.mark.parametrize("text", [
    "(a .^w b) .^w c", "a .^w b .^w c", "!(a . b)", "a .<b . c.> d", "a .^w (b .] c)",
    "(a .[ !b) . c", "(a .[ !b) & c",
])
def test_stratification_errors(text):
    with pytest.raises(StratificationError):
        parse_eol(text)


@pytest.mark.parametrize("text", ["a .", "(a", "a b", "a .< b", "a # b", ""])
def test_syntax_errors(text):
    with pytest.raises(EolSyntaxError):
        parse_eol(text)


@settings(max_examples=200, deadline=None)
@given(infinite_eol() | gcomplex_eol())
def test_print_parse_roundtrip(f):
    assert parse_eol(str(f)) == f


@given(infinite_eol())
def test_json_roundtrip(f):
    assert from_json(to_json(f)) == f
    assert stratum(f) == INFINITE


# -- segment semantics ----------------------------------------------------

def test_simple_examples(abc_lasso):
    assert eval_simple(Event("a1"), Segment(abc_lasso, 0, 1))
    assert eval_simple(Not(Event("a2")), Segment(abc_lasso, 0, 1))
    assert eval_simple(And(Event("a1"), Event("a2")), Segment(abc_lasso, 0, 3))
    assert eval_simple(Not(Event("a1")), Segment(abc_lasso, 1, 1))
    assert not eval_simple(Event("a1"), Segment(abc_lasso, 0, 0))


def test_simple_rejects_complex(abc_lasso):
    with pytest.raises(StratificationError):
        eval_simple(parse_eol("a1 . a2"), Segment(abc_lasso, 0, 3))


def test_icomplex_examples(abc_lasso):
    seg = Segment(abc_lasso, 0, 3)
    assert eval_icomplex(parse_eol("a2 . a3"), seg)
    assert not eval_icomplex(parse_eol("a3 . a2"), seg)
    assert eval_icomplex(parse_eol("a3 . a2"), Segment(abc_lasso, 0, 5))
    loop = seg_of("B1 E1 E2 B0 E0")
    assert not eval_icomplex(parse_eol("B1 . E1 .<!E2.> B0 . E0"), loop)
    assert eval_icomplex(parse_eol("B1 . E1 .<!E2.> B0 . E0"), seg_of("B1 E1 B0 E0"))


def test_ordered_and_needs_distinct_steps():
    assert not eval_icomplex(parse_eol("a . a"), seg_of("a"))
    assert eval_icomplex(parse_eol("a . a"), seg_of("a a"))


def test_interval_guard_sees_only_the_gap():
    f = parse_eol("x .<!g.> y")
    assert eval_icomplex(f, seg_of("x y g"))
    assert eval_icomplex(f, seg_of("g x y"))
    assert not eval_icomplex(f, seg_of("x g y"))


def test_gcomplex_examples():
    theta = parse_eol("E0 . B2 .[ !E2")
    assert eval_gcomplex(theta, seg_of("E0 B2"))
    assert not eval_gcomplex(theta, seg_of("E0 B2 E2"))
    assert eval_gcomplex(theta, seg_of("E0 B2 B1 E1"))


def test_until_like_guard_before_body():
    f = parse_eol("!g .] x")
    assert eval_gcomplex(f, seg_of("a x g"))
    assert not eval_gcomplex(f, seg_of("g x"))


# -- omega semantics ------------------------------------------------------

@pytest.mark.parametrize("text,i,j,head", [(XI, 1, 1, 0), (XI1, 3, 2, 1), (XI2, 6, 4, 3)])
def test_unfolding_witnesses(abc_lasso, text, i, j, head):
    xi = parse_eol(text)
    assert eval_infinite(xi, abc_lasso)
    assert witness(xi, abc_lasso) == (i, j)
    assert head_unfolds_used(abc_lasso, i) == head


def test_stem_event_cannot_recur(abc_lasso):
    assert not eval_infinite(parse_eol("a1 .^w (a1)"), abc_lasso)
    assert not eval_infinite(parse_eol("a1 .^w (a1)"), abc_lasso, UnfoldBudget(9, 9))


def test_default_budget():
    xi = parse_eol(XI2)
    assert count_ordered_events(xi.head) == 5
    assert default_budget(xi) == UnfoldBudget(6, 6)
    assert default_budget(xi, 2) == UnfoldBudget(2, 2)
    assert count_ordered_events(parse_eol("x .<!y.> z")) == 2


def test_budget_too_small(abc_lasso):
    with pytest.raises(BudgetTooSmall):
        eval_infinite(parse_eol(XI2), abc_lasso, UnfoldBudget(1, 1))
    with pytest.raises(ValueError):
        UnfoldBudget(0, 1)


def test_formula_of_trace():
    s = words("E0 B2", "B1 E1 B0 E0")
    assert str(formula_of_trace(s)) == "(E0 . B2) .^w (B1 . E1 . B0 . E0)"
    assert formula_of_trace(words("", "a")) == Infinite(TOP, Event("a"))


def test_cause_on_elevator_traces():
    xi = parse_eol(CAUSE)
    assert eval_infinite(xi, words("E0 B2", "B1 E1 B0 E0"))
    assert not eval_infinite(xi, words("E0 B2", "B1 E1 E2 B0 E0"))


@settings(max_examples=150, deadline=None)
@given(lassos())
def test_trace_satisfies_own_formula(lasso):
    assert eval_infinite(formula_of_trace(lasso), lasso)


@settings(max_examples=300, deadline=None)
@given(infinite_eol(), lassos())
def test_matches_oracle(xi, lasso):
    assert eval_infinite(xi, lasso) == naive_eol_eval(xi, lasso, OracleConfig(max_unroll=1))


@settings(max_examples=150, deadline=None)
@given(positive_chains(), lassos(), st.integers(0, 3))
def test_monotone_in_budget(xi, lasso, extra):
    b = default_budget(xi)
    if eval_infinite(xi, lasso, b):
        assert eval_infinite(xi, lasso, UnfoldBudget(b.head_unfolds + extra, b.cycle_unfolds + extra))


# -- subset relation ------------------------------------------------------

def _universe(lassos):
    return TraceUniverse(None, parse_ltl("true"), tuple(lassos), (True,) * len(lassos))


def test_subset_example():
    xi1 = parse_eol("E0 . B1 . E1 .^w (T)")
    xi2 = parse_eol("E0 . B1 . B2 . E1 .^w (T)")
    u = _universe([words("E0 B1 E1", "x"), words("E0 B1 B2 E1", "x"), words("E0", "x")])
    assert subset_rel(xi1, xi2, u)
    assert not subset_rel(xi2, xi1, u)


def test_subset_disjoint_alphabet():
    u = _universe([words("a", "x"), words("b c", "x")])
    assert not subset_rel(parse_eol("a .^w (T)"), parse_eol("b . c .^w (T)"), u)


@settings(max_examples=60, deadline=None)
@given(st.lists(positive_chains(), min_size=3, max_size=3))
def test_subset_is_preorder(elevator_universe, xs):
    u = elevator_universe
    a, b, c = xs
    assert subset_rel(a, a, u)
    if subset_rel(a, b, u) and subset_rel(b, c, u):
        assert subset_rel(a, c, u)
