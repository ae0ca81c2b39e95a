import pytest
from hypothesis import given, reject, settings, strategies as st

from lassocause.causality import compute_causes
from lassocause.eol import BudgetTooSmall, UnfoldBudget, eval_infinite, parse_eol
from lassocause.ltl import eval_ltl, parse_ltl
from lassocause.model import LAMBDA, format_model, parse_model
from lassocause.oracle import (
    OracleCapExceeded, OracleConfig, naive_eol_eval, naive_lassos, naive_ltl, random_model,
    random_properties, verify,
)
from lassocause.search import enumerate_lassos, partition

from conftest import desk_corpus
from strategies import infinite_eol, lassos, ltl_formulas

SEED0 = """\
state s0;
state s1;
state s2;
state s3;
state s4;
state s5;
init s0;
s0 -xc-> s1;
s0 -xd-> s0;
s0 -xe-> s1;
s1 -xb-> s4;
s1 -xc-> s3;
s1 -xd-> s2;
s2 -xc-> s4;
s2 -xd-> s5;
s2 -xe-> s5;
s3 -xe-> s5;
s4 -xb-> s4;
s4 -xe-> s4;
s5 -xb-> s3;
"""


def test_seed_zero_is_frozen():
    ts = random_model(0)
    assert format_model(ts) == SEED0
    assert random_properties(ts, 0) == ["G (xc -> F xe)", "F xb", "G !xb", "xe U xc", "G F xe"]


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_random_models_are_deterministic_and_small(seed):
    a, b = random_model(seed), random_model(seed)
    assert a == b
    assert random_properties(a, seed) == random_properties(b, seed)
    assert 3 <= len([x for x in a.states if LAMBDA not in x]) <= 8
    assert a.initials == ("s0",)
    assert not a.terminal_states()


def test_enough_corpus_pairs_have_bad_lassos():
    pairs = 0
    for seed in range(100):
        ts = random_model(seed)
        for prop in random_properties(ts, seed):
            pairs += bool(partition(ts, parse_ltl(prop)).bad)
    assert pairs >= 30


def test_config_limits():
    with pytest.raises(ValueError):
        OracleConfig(max_states=11)
    big = parse_model(" ".join(f"s{i} -a-> s{i + 1};" for i in range(12)) + " s12 -a-> s0; init s0;")
    with pytest.raises(OracleCapExceeded):
        naive_lassos(big)


def test_elevator_is_beyond_the_oracle(elevator_ts):
    with pytest.raises(OracleCapExceeded, match="at most 10"):
        naive_lassos(elevator_ts, OracleConfig(max_states=10))


@given(st.integers(0, 60))
@settings(max_examples=30, deadline=None)
def test_lasso_enumerations_agree(seed):
    ts = random_model(seed)
    assert naive_lassos(ts) == set(enumerate_lassos(ts))


@given(ltl_formulas(), lassos())
@settings(max_examples=300, deadline=None)
def test_ltl_evaluators_agree(phi, lasso):
    assert naive_ltl(phi, lasso) == eval_ltl(phi, lasso)


@given(infinite_eol(), lassos())
@settings(max_examples=300, deadline=None)
def test_eol_evaluators_agree(xi, lasso):
    assert naive_eol_eval(xi, lasso, OracleConfig(max_unroll=4)) == eval_infinite(xi, lasso)


@given(infinite_eol(), lassos(), st.integers(1, 4))
@settings(max_examples=150, deadline=None)
def test_eol_evaluators_agree_under_override(xi, lasso, k):
    b = UnfoldBudget(k, k)
    try:
        expected = eval_infinite(xi, lasso, b)
    except BudgetTooSmall:
        reject()
    assert naive_eol_eval(xi, lasso, budget=b) == expected


def test_naive_eol_on_running_example(abc_lasso):
    xi = parse_eol("(a1 . a2 . a3 . a2 . a3 . a2 . a3) .^w (a2 . a3 . a2 . a3)")
    assert naive_eol_eval(xi, abc_lasso)


@pytest.mark.parametrize("seed, ts, prop", list(desk_corpus(models=6)))
def test_verify_on_small_corpus(seed, ts, prop):
    rep = verify(ts, parse_ltl(prop))
    assert rep.ok, rep.problems


def test_verify_reuses_explanation(elevator_ts):
    ts = parse_model("init s; s -a-> s; s -b-> t; t -c-> t;")
    phi = parse_ltl("G !c")
    ex = compute_causes(ts, phi)
    rep = verify(ts, phi, explanation=ex)
    assert rep.ok and rep.lassos == 2 and rep.eol_pairs == len(ex.universe._sat_cache)


def test_verify_flags_a_wrong_explanation():
    ts = parse_model("init s; s -a-> s; s -b-> t; t -c-> t;")
    phi = parse_ltl("G !c")
    ex = compute_causes(ts, phi)
    ex.classes.clear()
    rep = verify(ts, phi, explanation=ex)
    assert not rep.ok and "in no class" in rep.problems[0]
