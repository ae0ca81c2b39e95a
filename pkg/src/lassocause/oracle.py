"""Brute-force reference implementations for differential testing.

Nothing here shares evaluation code with the primary modules: lassos come
from breadth-first path search, LTL from forward suffix search, EOL from
literal split-point loops.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import eol as E
from . import ltl as L
from .model import LAMBDA, Lasso, TransitionSystem, complete_terminal_states


@dataclass(frozen=True)
class OracleConfig:
    max_states: int = 8
    max_unroll: int = 10  # loop passes appended to the stem
    seed: int = 0
    max_lassos: int = 20_000

    def __post_init__(self):
        if not 1 <= self.max_states <= 10:
            raise ValueError("oracle models are limited to 10 states")


class OracleCapExceeded(RuntimeError):
    pass


def naive_lassos(ts: TransitionSystem, cfg: OracleConfig = OracleConfig()) -> set[Lasso]:
    """Breadth-first over simple paths; a step onto the path closes a lasso."""
    if len(ts.states) > cfg.max_states + 1:  # room for the sink state
        raise OracleCapExceeded(
            f"model has {len(ts.states)} states; the reference oracle handles at most {cfg.max_states}")
    found: set[Lasso] = set()
    queue = deque(((s,), ()) for s in ts.initials)
    while queue:
        states, actions = queue.popleft()
        for src, act, dst in ts.transitions:
            if src != states[-1]:
                continue
            if dst in states:
                found.add(Lasso(states, actions + (act,), states.index(dst)))
                if len(found) > cfg.max_lassos:
                    raise OracleCapExceeded("too many lassos")
            else:
                queue.append((states + (dst,), actions + (act,)))
    return found


# -- LTL ----------------------------------------------------------------

def naive_ltl(phi: L.Ltl, lasso: Lasso, ts: TransitionSystem | None = None) -> bool:
    """Forward search over positions of the infinite word."""
    l, n = lasso.loop_start, len(lasso.states)
    m = n - l
    actions = set(ts.actions) if ts is not None else None

    def canon(p):
        # (state, incoming action) repeats with period m from position l+1
        return p if p <= n else l + 1 + (p - l - 1) % m

    def atom(name, p):
        if actions is None or name in actions:
            return p >= 1 and lasso.action_at(p) == name
        if name in ts.propositions:
            return name in ts.label(lasso.state_at(p))
        raise L.UnresolvedAtom(name)

    horizon = n + 1 + m

    @lru_cache(maxsize=None)
    def holds(f, p):
        if isinstance(f, L.TrueF):
            return True
        if isinstance(f, L.Atom):
            return atom(f.name, p)
        if isinstance(f, L.Not):
            return not holds(f.arg, p)
        if isinstance(f, L.And):
            return holds(f.left, p) and holds(f.right, p)
        if isinstance(f, L.Or):
            return holds(f.left, p) or holds(f.right, p)
        if isinstance(f, L.Next):
            return holds(f.arg, canon(p + 1))
        if isinstance(f, L.Eventually):
            return until(L.TrueF(), f.arg, p)
        if isinstance(f, L.Globally):
            return not until(L.TrueF(), L.Not(f.arg), p)
        if isinstance(f, L.Until):
            return until(f.left, f.right, p)
        raise TypeError(f)

    def until(left, right, p):
        # after `horizon` steps every reachable position has been seen
        q = p
        for _ in range(horizon + 1):
            if holds(right, q):
                return True
            if not holds(left, q):
                return False
            q = canon(q + 1)
        return False

    return holds(phi, 0)


# -- EOL ----------------------------------------------------------------

class NaiveEol:
    """Definition-by-definition EOL evaluation with exhaustive split points.

    One instance per lasso; the memo table is shared by every formula checked.
    """

    def __init__(self, lasso: Lasso, passes: int):
        self.lasso = lasso
        self.passes = passes
        self.word = lasso.word(lasso.stem_length + passes * lasso.loop_length)
        self.sat = lru_cache(maxsize=None)(self._sat)
        self.reach = lru_cache(maxsize=None)(self._reach)

    def _sat(self, f, a, b):
        sat, word = self.sat, self.word
        if isinstance(f, E.Top):
            return True
        if isinstance(f, E.Event):
            return any(word[t - 1] == f.name for t in range(a + 1, b + 1))
        if isinstance(f, E.Not):
            return not sat(f.arg, a, b)
        if isinstance(f, E.And):
            return sat(f.left, a, b) and sat(f.right, a, b)
        if isinstance(f, E.Or):
            return sat(f.left, a, b) or sat(f.right, a, b)
        if isinstance(f, E.OrderedAnd):
            return any(sat(f.left, a, j) and self.reach(f.right, None, j, b) for j in range(a + 1, b))
        if isinstance(f, E.Between):
            return any(self.first(f.left, a, j) and self.reach(f.right, f.guard, j, b) for j in range(a + 1, b))
        if isinstance(f, E.UntilLike):
            return self.reach(f.body, f.guard, a, b)
        if isinstance(f, E.AfterLike):
            return any(self.first(f.body, a, j) and self.guard(f.guard, j, b) for j in range(a + 1, b + 1))
        raise TypeError(f)

    def _reach(self, f, g, k, b):
        """Some ``k' in [k, b)`` with ``g`` on every step of ``(k..k']`` and ``f`` holding on ``[k'..b]``.

        With ``g=None`` no guard applies and ``f`` only needs to hold; otherwise
        ``f`` must also start at ``k'``.
        """
        if k >= b:
            return False
        here = self.sat(f, k, b) if g is None else self.start(f, k, b)
        if here:
            return True
        if g is not None and not self.sat(g, k, k + 1):
            return False
        return self.reach(f, g, k + 1, b)

    def first(self, f, a, j):
        """``f`` becomes true on ``[a..j]`` exactly at ``j``."""
        return self.sat(f, a, j) and not self.sat(f, a, j - 1)

    def start(self, f, k, b):
        """``f`` holds on ``[k..b]`` with a window that needs step ``k+1``."""
        return self.sat(f, k, b) and any(self.sat(f, k, q) and not self.sat(f, k + 1, q)
                                         for q in range(k + 1, b + 1))

    def guard(self, g, j, k):
        return all(self.sat(g, t - 1, t) for t in range(j + 1, k + 1))

    def infinite(self, xi: E.Infinite, budget: E.UnfoldBudget) -> bool:
        l, m = self.lasso.stem_length, self.lasso.loop_length
        if max(budget.head_unfolds, budget.cycle_unfolds) > self.passes:
            raise ValueError("unroll shorter than the budget")
        head_ok = any(self.sat(xi.head, 0, i) for i in range(l, l + budget.head_unfolds * m + 1))
        return head_ok and any(self.sat(xi.cycle, l, l + j * m)
                               for j in range(1, budget.cycle_unfolds + 1))


def naive_eol_eval(xi: E.Infinite, lasso: Lasso, cfg: OracleConfig = OracleConfig(),
                   budget: E.UnfoldBudget | None = None) -> bool:
    budget = budget or E.default_budget(xi)
    passes = max(cfg.max_unroll, budget.head_unfolds, budget.cycle_unfolds)
    return NaiveEol(lasso, passes).infinite(xi, budget)


# -- random corpus ------------------------------------------------------

TEMPLATES = ("G ({a} -> F {b})", "F {a}", "G !{a}", "{a} U {b}", "G F {a}")
ALPHABET = "abcde"


def random_model(seed: int, cfg: OracleConfig = OracleConfig()) -> TransitionSystem:
    """Seeded deterministic LTS with one initial state, completed with the sink."""
    rng = random.Random(seed)
    n = rng.randint(3, min(8, cfg.max_states))
    k = rng.randint(2, 5)
    density = rng.uniform(0.3, 0.7)
    states = [f"s{i}" for i in range(n)]
    acts = [f"x{c}" for c in ALPHABET[:k]]
    out: dict[tuple[str, str], str] = {}
    # spanning tree first so every state is reachable from s0
    for i in range(1, n):
        free = [(src, a) for src in states[:i] for a in acts if (src, a) not in out]
        if free:
            out[rng.choice(free)] = states[i]
    for src in states:
        for a in acts:
            if (src, a) not in out and rng.random() < density:
                out[(src, a)] = rng.choice(states)
    trans = [(src, a, dst) for (src, a), dst in out.items()]
    ts = TransitionSystem.build(trans, ["s0"], states=states)
    return complete_terminal_states(ts)


def random_properties(ts: TransitionSystem, seed: int) -> list[str]:
    """One instance of every template over actions of ``ts``."""
    rng = random.Random(seed * 7919 + 1)
    acts = [a for a in ts.actions if a != LAMBDA] or [LAMBDA]
    out = []
    for tpl in TEMPLATES:
        a = rng.choice(acts)
        b = rng.choice([x for x in acts if x != a] or acts)
        out.append(tpl.format(a=a, b=b))
    return out


def corpus(seeds=range(20), cfg: OracleConfig = OracleConfig()):
    """``(seed, model, property text)`` triples."""
    for seed in seeds:
        ts = random_model(seed, cfg)
        for prop in random_properties(ts, seed):
            yield seed, ts, prop


# -- differential verification ------------------------------------------

@dataclass
class VerifyReport:
    lassos: int = 0
    eol_pairs: int = 0
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def verify(ts: TransitionSystem, phi: L.Ltl, cfg: OracleConfig = OracleConfig(),
           budget: int | None = None, explanation=None) -> VerifyReport:
    """Cross-check every stage of the pipeline on one model and property."""
    from .causality import compute_causes
    from .search import enumerate_lassos

    rep = VerifyReport()
    primary = enumerate_lassos(ts, cfg.max_lassos)
    reference = naive_lassos(ts, cfg)
    rep.lassos = len(primary)
    if set(primary) != reference or len(primary) != len(reference):
        rep.problems.append(f"lasso sets differ: {len(primary)} vs {len(reference)}")
    for s in primary:
        if L.eval_ltl(phi, s, ts) != naive_ltl(phi, s, ts):
            rep.problems.append(f"LTL disagreement on {s}")

    ex = explanation or compute_causes(ts, phi, cfg.max_lassos, budget)
    u = ex.universe
    pairs = sorted(u._sat_cache.items(), key=lambda kv: (kv[0][1], str(kv[0][0])))
    naive: dict[int, NaiveEol] = {}
    for (xi, i), value in pairs:
        rep.eol_pairs += 1
        b = E.default_budget(xi, budget)
        need = max(cfg.max_unroll, b.head_unfolds, b.cycle_unfolds)
        if i not in naive or naive[i].passes < need:
            naive = {i: NaiveEol(u.lassos[i], need)}  # pairs are grouped by lasso
        if naive[i].infinite(xi, b) != value:
            rep.problems.append(f"EOL disagreement: {xi} on {u.lassos[i]}")
    covered = set()
    for c in ex.classes:
        for i in c.members:
            covered.add(i)
            s = u.lassos[i]
            if L.eval_ltl(phi, s, ts) or naive_ltl(phi, s, ts):
                rep.problems.append(f"member {s} of {c.cause} satisfies the property")
    for i in u.bad_indices:
        if i not in covered:
            rep.problems.append(f"bad lasso {u.lassos[i]} is in no class")
    return rep
