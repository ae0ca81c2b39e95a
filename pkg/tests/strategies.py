"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from lassocause import eol as E
from lassocause import ltl as L
from lassocause.model import Lasso

ACTIONS = ("a", "b", "c")


def lassos(actions=ACTIONS, max_stem=3, max_loop=3):
    return st.builds(
        lambda stem, loop: Lasso.from_words(stem, loop),
        st.lists(st.sampled_from(actions), max_size=max_stem),
        st.lists(st.sampled_from(actions), min_size=1, max_size=max_loop),
    )


def ltl_formulas(actions=ACTIONS):
    atoms = st.sampled_from(actions).map(L.Atom) | st.just(L.TrueF())
    return st.recursive(
        atoms,
        lambda sub: st.one_of(
            sub.map(L.Not), sub.map(L.Next), sub.map(L.Eventually), sub.map(L.Globally),
            st.builds(L.And, sub, sub), st.builds(L.Or, sub, sub), st.builds(L.Until, sub, sub),
        ),
        max_leaves=6,
    )


def _events(actions):
    return st.sampled_from(actions).map(E.Event)


def simple_eol(actions=ACTIONS):
    return st.recursive(
        _events(actions) | st.just(E.TOP),
        lambda sub: st.one_of(sub.map(E.Not), st.builds(E.And, sub, sub), st.builds(E.Or, sub, sub)),
        max_leaves=3,
    )


def icomplex_eol(actions=ACTIONS):
    return st.recursive(
        simple_eol(actions),
        lambda sub: st.one_of(
            st.builds(E.OrderedAnd, sub, sub),
            st.builds(E.Between, sub, simple_eol(actions), sub),
            st.builds(E.And, sub, sub),
            st.builds(E.Or, sub, sub),
        ),
        max_leaves=4,
    )


def gcomplex_eol(actions=ACTIONS):
    return st.recursive(
        icomplex_eol(actions),
        lambda sub: st.one_of(
            st.builds(E.UntilLike, simple_eol(actions), sub),
            st.builds(E.AfterLike, sub, simple_eol(actions)),
        ),
        max_leaves=3,
    )


def infinite_eol(actions=ACTIONS):
    return st.builds(E.Infinite, gcomplex_eol(actions), icomplex_eol(actions))


def positive_chains(actions=ACTIONS):
    """Negation-free ordered chains, used where monotonicity is claimed."""
    chain = st.lists(st.sampled_from(actions), max_size=3).map(lambda xs: E.ordered(*xs))
    return st.builds(E.Infinite, chain, chain)
