import pytest
from hypothesis import given, settings

from lassocause.ltl import (
    And, Atom, Eventually, Globally, LtlSyntaxError, Next, Not, Or, TrueF, UnresolvedAtom, Until,
    atoms, check_model, depth, eval_ltl, iff, implies, is_syntactic_safety, parse_ltl, subformulas,
)
from lassocause.model import Lasso, parse_model
from lassocause.oracle import naive_ltl

from conftest import LIVENESS, words
from strategies import lassos, ltl_formulas


def test_parse_precedence():
    f = parse_ltl("G (B2 -> F E2)")
    assert f == Globally(Or(Not(Atom("B2")), Eventually(Atom("E2"))))
    assert parse_ltl("a & b | c") == Or(And(Atom("a"), Atom("b")), Atom("c"))
    assert parse_ltl("a U b U c") == Until(Atom("a"), Until(Atom("b"), Atom("c")))
    assert parse_ltl("a -> b -> c") == implies(Atom("a"), implies(Atom("b"), Atom("c")))
    assert parse_ltl("X !a") == Next(Not(Atom("a")))


def test_iff_is_biconditional():
    assert parse_ltl("a <-> b") == iff(Atom("a"), Atom("b"))
    s = words("a", "b")
    assert eval_ltl(parse_ltl("X a <-> X a"), s)
    assert not eval_ltl(parse_ltl("X a <-> X b"), s)


def test_constants():
    assert parse_ltl("true") == TrueF()
    assert parse_ltl("false") == Not(TrueF())


@pytest.mark.parametrize("text,pos", [("a &", 3), ("(a", 2), ("a b", 2), ("a $ b", 2), ("U a", 0)])
def test_syntax_errors(text, pos):
    with pytest.raises(LtlSyntaxError) as e:
        parse_ltl(text)
    assert e.value.pos == pos


def test_printing_reparses():
    for text in ["G (B2 -> F E2)", "a U (b & X c)", "!G F a", "true"]:
        f = parse_ltl(text)
        assert parse_ltl(str(f)) == f


def test_helpers():
    f = parse_ltl("a U X b")
    assert atoms(f) == {"a", "b"}
    assert depth(f) == 2
    assert list(subformulas(f))[-1] == f


def test_action_atoms_refer_to_incoming_step(abc_lasso):
    assert not eval_ltl(Atom("a1"), abc_lasso)
    assert eval_ltl(parse_ltl("X a1"), abc_lasso)
    assert eval_ltl(parse_ltl("G F a2"), abc_lasso)
    assert not eval_ltl(parse_ltl("F G a2"), abc_lasso)
    assert eval_ltl(parse_ltl("X X G !a1"), abc_lasso)


def test_labels_and_unresolved():
    ts = parse_model("state p {hot}; state q; init p; p -x-> q; q -y-> q;")
    s = Lasso(("p", "q"), ("x", "y"), 1)
    assert eval_ltl(parse_ltl("hot & X G !hot"), s, ts)
    with pytest.raises(UnresolvedAtom):
        eval_ltl(parse_ltl("cold"), s, ts)


def test_loop_closing_action_is_seen():
    # the action re-entering the loop start must be visible at the re-entry
    s = words("a", "b c")
    assert eval_ltl(parse_ltl("G F c"), s)
    assert eval_ltl(parse_ltl("G (c -> X b)"), s)


def test_elevator_traces():
    assert not eval_ltl(parse_ltl(LIVENESS), words("E0 B2", "B1 E1 B0 E0"))
    assert eval_ltl(parse_ltl(LIVENESS), words("E0 B2", "B1 E1 E2 B0 E0"))


def test_check_model(elevator_ts):
    v = check_model(elevator_ts, parse_ltl(LIVENESS))
    assert not v.holds and v.witness is not None
    assert not eval_ltl(parse_ltl(LIVENESS), v.witness, elevator_ts)
    assert check_model(elevator_ts, parse_ltl("true")).holds


@settings(max_examples=300, deadline=None)
@given(ltl_formulas(), lassos())
def test_matches_oracle(phi, lasso):
    assert eval_ltl(phi, lasso) == naive_ltl(phi, lasso)


@given(ltl_formulas(), lassos())
def test_duality(phi, lasso):
    assert eval_ltl(Globally(phi), lasso) == (not eval_ltl(Eventually(Not(phi)), lasso))
    assert eval_ltl(Not(phi), lasso) != eval_ltl(phi, lasso)


@given(ltl_formulas(), lassos())
def test_until_expansion(phi, lasso):
    psi = Atom("b")
    lhs = eval_ltl(Until(phi, psi), lasso)
    rhs = eval_ltl(Or(psi, And(phi, Next(Until(phi, psi)))), lasso)
    assert lhs == rhs


@pytest.mark.parametrize("text, safe", [
    ("G !a", True), ("G (a -> X b)", True), ("!(a U b)", True), ("!F a", True), ("a & X a", True),
    ("F a", False), ("G F a", False), ("G (a -> F b)", False), ("a U b", False), ("!G a", False),
])
def test_syntactic_safety(text, safe):
    assert is_syntactic_safety(parse_ltl(text)) is safe
