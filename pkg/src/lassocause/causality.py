"""Causes of LTL violations as EOL formulae.

The pipeline starts from the formula of a bad lasso, strengthens it with
non-occurrence guards until no good lasso satisfies it, then weakens it
greedily while it still separates bad from good behaviour.

Formulae produced here are *chains*: the head is an ordered sequence of events
with optional guards before the first event, between neighbours and after the
last event; the cycle is an ordered sequence with guards between neighbours and
a global guard over the whole loop.  :class:`Chain` is that normal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

from .eol import (TOP, AfterLike, And, Between, Eol, Event, Infinite, Not, OrderedAnd, Top,
                  UntilLike, conjunctive, default_budget, eval_infinite, forbid, subset_rel)
from .ltl import Ltl, is_syntactic_safety
from .model import Lasso, TransitionSystem
from .search import DEFAULT_MAX_LASSOS, TraceUniverse, partition


class PreconditionViolated(ValueError):
    pass


class CannotSeparate(ValueError):
    pass


def valuation(lasso: Lasso, universe) -> frozenset[str]:
    """Actions of ``universe`` occurring anywhere in the lasso."""
    return lasso.action_set() & frozenset(universe)


# -- chain normal form --------------------------------------------------

_EMPTY: frozenset = frozenset()


@dataclass(frozen=True)
class Head:
    events: tuple[str, ...] = ()
    gaps: tuple[frozenset, ...] = ()
    before: frozenset = _EMPTY
    after: frozenset = _EMPTY

    def __post_init__(self):
        if len(self.gaps) != max(0, len(self.events) - 1):
            raise ValueError("one gap per pair of neighbouring events")
        if not self.events and self.after:
            # without events the two outer guards mean the same thing
            object.__setattr__(self, "before", self.before | self.after)
            object.__setattr__(self, "after", _EMPTY)

    def to_eol(self) -> Eol:
        if not self.events:
            return forbid(self.before)
        f = _chain(self.events, self.gaps)
        if self.after:
            f = AfterLike(f, forbid(self.after))
        if self.before:
            f = UntilLike(forbid(self.before), f)
        return f


@dataclass(frozen=True)
class Cycle:
    events: tuple[str, ...] = ()
    gaps: tuple[frozenset, ...] = ()
    glob: frozenset = _EMPTY

    def __post_init__(self):
        if len(self.gaps) != max(0, len(self.events) - 1):
            raise ValueError("one gap per pair of neighbouring events")

    def to_eol(self) -> Eol:
        if not self.events:
            return forbid(self.glob)
        f = _chain(self.events, self.gaps)
        return And(f, forbid(self.glob)) if self.glob else f


@dataclass(frozen=True)
class Chain:
    head: Head
    cycle: Cycle

    def to_eol(self) -> Infinite:
        return Infinite(self.head.to_eol(), self.cycle.to_eol())

    def __str__(self):
        return str(self.to_eol())

    @classmethod
    def of_trace(cls, lasso: Lasso) -> "Chain":
        l, m = lasso.stem_length, lasso.loop_length
        return cls(Head(lasso.stem_actions, (_EMPTY,) * max(0, l - 1)),
                   Cycle(lasso.loop_actions, (_EMPTY,) * (m - 1)))

    def slots(self):
        """Guard slots as ``(part, key)`` in a fixed order."""
        out = [("head", "before")]
        out += [("head", i) for i in range(len(self.head.gaps))]
        if self.head.events:
            out.append(("head", "after"))
        out += [("cycle", i) for i in range(len(self.cycle.gaps))]
        out.append(("cycle", "glob"))
        return out

    def guard(self, slot) -> frozenset:
        part, key = slot
        obj = getattr(self, part)
        return obj.gaps[key] if isinstance(key, int) else getattr(obj, key)

    def with_guard(self, slot, names) -> "Chain":
        part, key = slot
        obj = getattr(self, part)
        names = frozenset(names)
        if isinstance(key, int):
            gaps = list(obj.gaps)
            gaps[key] = names
            obj = replace(obj, gaps=tuple(gaps))
        else:
            obj = replace(obj, **{key: names})
        return replace(self, **{part: obj})

    def add_guards(self, placements) -> "Chain":
        c = self
        for slot, name in placements:
            c = c.with_guard(slot, c.guard(slot) | {name})
        return c


def _chain(events, gaps) -> Eol:
    f: Eol = Event(events[0])
    for e, g in zip(events[1:], gaps):
        f = Between(f, forbid(g), Event(e)) if g else OrderedAnd(f, Event(e))
    return f


def _forbidden_names(f: Eol):
    """Names of a conjunction of negated events, ``None`` for anything else."""
    if isinstance(f, Top):
        return set()
    if isinstance(f, Not) and isinstance(f.arg, Event):
        return {f.arg.name}
    if isinstance(f, And):
        left, right = _forbidden_names(f.left), _forbidden_names(f.right)
        if left is not None and right is not None:
            return left | right
    return None


def _unchain(f: Eol):
    if isinstance(f, Event):
        return [f.name], []
    if isinstance(f, (OrderedAnd, Between)) and isinstance(f.right, Event):
        inner = _unchain(f.left)
        if inner is None:
            return None
        gap = _forbidden_names(f.guard) if isinstance(f, Between) else set()
        if gap is None:
            return None
        return inner[0] + [f.right.name], inner[1] + [frozenset(gap)]
    return None


def from_eol(xi: Infinite) -> Chain | None:
    """Recover the chain form of ``xi``; ``None`` if it is not chain-shaped."""
    if not isinstance(xi, Infinite):
        return None
    h = xi.head
    before = after = set()
    if isinstance(h, UntilLike):
        before = _forbidden_names(h.guard)
        h = h.body
    if isinstance(h, AfterLike):
        after = _forbidden_names(h.guard)
        h = h.body
    if before is None or after is None:
        return None
    names = _forbidden_names(h)
    if names is not None and not after:
        head = Head(before=frozenset(before | names))
    else:
        parts = _unchain(h)
        if parts is None:
            return None
        head = Head(tuple(parts[0]), tuple(parts[1]), frozenset(before), frozenset(after))

    c = xi.cycle
    names = _forbidden_names(c)
    if names is not None:
        cycle = Cycle(glob=frozenset(names))
    else:
        glob = set()
        if isinstance(c, And):
            glob = _forbidden_names(c.right)
            c = c.left
        parts = _unchain(c) if glob is not None else None
        if parts is None:
            return None
        cycle = Cycle(tuple(parts[0]), tuple(parts[1]), frozenset(glob))
    return Chain(head, cycle)


# -- evaluation helpers -------------------------------------------------

def _sat(xi: Infinite, lasso: Lasso, override: int | None = None) -> bool:
    return eval_infinite(xi, lasso, default_budget(xi, override))


def _first_steps(word, events, start, stop):
    """Greedy leftmost positions of ``events`` in ``word`` within steps (start, stop]."""
    pos, t = [], start
    for e in events:
        t += 1
        while t <= stop and word[t - 1] != e:
            t += 1
        if t > stop:
            return None
        pos.append(t)
    return pos


def _placements(chain: Chain, good: Lasso, forbidden, unfold: int):
    """Guard slots at which forbidden actions of ``good`` occur, relative to the chain."""
    l, m = good.stem_length, good.loop_length
    n = l + unfold * m
    word = good.word(n)
    out = []
    hpos = _first_steps(word, chain.head.events, 0, n) or []
    limit = max([l] + hpos[-1:])
    for t in range(1, limit + 1):
        a = word[t - 1]
        if a not in forbidden:
            continue
        if not hpos or t < hpos[0]:
            out.append((("head", "before"), a))
        elif t > hpos[-1]:
            out.append((("head", "after"), a))
        else:
            for i in range(len(hpos) - 1):
                if hpos[i] < t < hpos[i + 1]:
                    out.append((("head", i), a))
    cpos = _first_steps(word, chain.cycle.events, l, n) or []
    end = max([l + m] + cpos[-1:])
    for t in range(l + 1, end + 1):
        a = word[t - 1]
        if a not in forbidden:
            continue
        slot = ("cycle", "glob")
        for i in range(len(cpos) - 1):
            if cpos[i] < t < cpos[i + 1]:
                slot = ("cycle", i)
        out.append((slot, a))
    return list(dict.fromkeys(out))


def refine_with_negations(chain: Chain, bad: Lasso, good: Lasso, forbidden=None,
                          actions=None, override: int | None = None, sat=None) -> Chain:
    """Add non-occurrence guards so that ``good`` no longer satisfies the chain.

    Guards are placed where the forbidden actions occur in ``good``.  If that
    does not separate the two lassos, progressively coarser placements are
    tried; the result is always still satisfied by ``bad``.
    """
    if forbidden is None:
        forbidden = good.action_set() - bad.action_set()
    forbidden = frozenset(forbidden)
    actions = sorted(actions if actions is not None else good.action_set() | bad.action_set())
    sat = sat or (lambda xi, lasso: _sat(xi, lasso, override))

    def ok(c: Chain) -> bool:
        xi = c.to_eol()
        return sat(xi, bad) and not sat(xi, good)

    def attempts(c: Chain):
        unfold = max(default_budget(c.to_eol(), override).head_unfolds,
                     default_budget(c.to_eol(), override).cycle_unfolds)
        if forbidden:
            yield c.add_guards(_placements(c, good, forbidden, unfold))
            yield c.add_guards((s, a) for s in c.slots() for a in sorted(forbidden))
        singles = [(s, a) for s in c.slots() for a in actions if a not in c.guard(s)]
        kept = []
        for p in singles:
            cand = c.add_guards([p])
            yield cand
            if sat(cand.to_eol(), bad):
                kept.append(p)
        if kept:
            yield c.add_guards(kept)

    current = chain
    for _ in range(3):
        for cand in attempts(current):
            if cand != chain and ok(cand):
                return cand
        # demand one more pass of the bad loop inside the head
        head = current.head
        events = head.events + bad.loop_actions
        gaps = head.gaps + ((head.after,) if head.events else ()) + (_EMPTY,) * (len(bad.loop_actions) - 1)
        current = replace(current, head=Head(events, gaps, head.before))
        if ok(current):
            return current
    raise CannotSeparate(f"no EOL guard separates {bad} from {good}")


def non_occurrence_set(index: int, universe: TraceUniverse) -> frozenset[str]:
    """Smallest set of absent actions whose absence excludes the offending good lassos.

    Offending lassos are good ones that satisfy the trace formula and agree
    with the bad lasso on the actions it mentions.  Ties between sets of equal
    size go to the lexicographically smallest.
    """
    sigma = universe.lassos[index]
    xi = Chain.of_trace(sigma).to_eol()
    if universe.verdicts[index] or not universe.satisfies(xi, index):
        raise PreconditionViolated("the lasso is not a bad trace satisfying its own formula")
    if universe.good and not any(not universe.satisfies(xi, g) for g in universe.good_indices):
        raise PreconditionViolated("every good lasso satisfies the trace formula")
    z = sigma.action_set()
    w = sorted(set(universe.ts.actions) - z)
    hits = []
    for g in universe.models(xi, universe.good_indices):
        other = universe.lassos[g]
        if valuation(other, z) == valuation(sigma, z):
            v = valuation(other, w)
            if v:
                hits.append(v)
    for size in range(len(w) + 1):
        for q in combinations(w, size):
            if all(v & set(q) for v in hits):
                return frozenset(q)
    return frozenset(w)


# -- generalization -----------------------------------------------------

def _delete_head_event(h: Head, i: int) -> Head:
    ev, gaps = list(h.events), list(h.gaps)
    n = len(ev)
    before, after = h.before, h.after
    if n == 1:
        return Head(before=before | after)
    if i == 0:
        before = before | gaps.pop(0)
    elif i == n - 1:
        after = gaps.pop() | after
    else:
        gaps[i - 1:i + 1] = [gaps[i - 1] | gaps[i]]
    del ev[i]
    return Head(tuple(ev), tuple(gaps), before, after)


def _delete_cycle_event(c: Cycle, i: int) -> Cycle:
    ev, gaps = list(c.events), list(c.gaps)
    n = len(ev)
    glob = c.glob
    if n > 1:
        if i == 0:
            glob = glob | gaps.pop(0)
        elif i == n - 1:
            glob = glob | gaps.pop()
        else:
            gaps[i - 1:i + 1] = [gaps[i - 1] | gaps[i]]
    del ev[i]
    return Cycle(tuple(ev), tuple(gaps), glob)


def hoist(c: Chain) -> Chain:
    """Require the cycle events once after the head instead of in every loop pass."""
    h, cy = c.head, c.cycle
    joint = (h.after,) if h.events and cy.events else ()
    after = _EMPTY if cy.events else h.after
    head = Head(h.events + cy.events, h.gaps + joint + cy.gaps, h.before, after)
    return Chain(head, Cycle(glob=cy.glob))


def chain_generalizations(c: Chain, prefix_first: bool = False) -> list[Chain]:
    """One-step weakenings in a fixed order, duplicates removed.

    With ``prefix_first`` hoisting is tried before anything else, so causes
    that need their events only once, in a finite prefix, win.
    """
    out = [hoist(c)] if prefix_first and c.cycle.events else []
    out += [replace(c, head=_delete_head_event(c.head, i)) for i in range(len(c.head.events))]
    out += [replace(c, cycle=_delete_cycle_event(c.cycle, i)) for i in range(len(c.cycle.events))]
    for slot in c.slots():
        names = c.guard(slot)
        if names:
            out.append(c.with_guard(slot, _EMPTY))
            if len(names) > 1:
                out += [c.with_guard(slot, names - {a}) for a in sorted(names)]
    if c.cycle.events and not prefix_first:
        out.append(hoist(c))
    out.append(replace(c, head=Head()))
    out.append(replace(c, cycle=Cycle()))
    return [x for x in dict.fromkeys(out) if x != c]


def _ast_weakenings(f: Eol) -> list[Eol]:
    if isinstance(f, (Top, Event)):
        return [] if isinstance(f, Top) else [TOP]
    if isinstance(f, Not):
        return [TOP]
    out: list[Eol] = []
    if isinstance(f, (OrderedAnd, And)):
        out += [f.left, f.right]
        out += [type(f)(x, f.right) for x in _ast_weakenings(f.left)]
        out += [type(f)(f.left, x) for x in _ast_weakenings(f.right)]
    elif isinstance(f, Between):
        out += [OrderedAnd(f.left, f.right), f.left, f.right]
        out += [Between(x, f.guard, f.right) for x in _ast_weakenings(f.left)]
        out += [Between(f.left, f.guard, x) for x in _ast_weakenings(f.right)]
    elif isinstance(f, UntilLike):
        out += [f.body] + [UntilLike(f.guard, x) for x in _ast_weakenings(f.body)]
    elif isinstance(f, AfterLike):
        out += [f.body] + [AfterLike(x, f.guard) for x in _ast_weakenings(f.body)]
    else:
        # disjunctions are left alone: dropping a disjunct strengthens
        out += [TOP]
    return out


def generalize_step(xi: Infinite) -> list[Infinite]:
    """All one-step weakenings of ``xi``.

    Chain-shaped formulae use the chain operations (event deletion merges the
    neighbouring guards); other formulae fall back to structural deletions.
    The caller filters by the subset relation on a universe.
    """
    c = from_eol(xi)
    if c is not None:
        out = [g.to_eol() for g in chain_generalizations(c)]
    else:
        out = [Infinite(h, xi.cycle) for h in _ast_weakenings(xi.head)]
        out += [Infinite(xi.head, y) for y in _ast_weakenings(xi.cycle)]
        out += [Infinite(TOP, xi.cycle), Infinite(xi.head, TOP)]
    return [x for x in dict.fromkeys(out) if x != xi]


# -- AC1..AC3 and OC ----------------------------------------------------

@dataclass
class AcReport:
    ac1: bool
    ac1_witness: int | None
    ac21: bool
    ac21_witness: int | None
    ac22: bool
    ac22_counterwitness: int | None
    ac3: bool
    ac3_smaller: Infinite | None
    oc: bool

    @property
    def all_hold(self) -> bool:
        return self.ac1 and self.ac21 and self.ac22 and self.ac3 and self.oc

    def as_dict(self, universe: TraceUniverse) -> dict:
        def lasso(i):
            return None if i is None else str(universe.lassos[i])

        return {
            "ac1": self.ac1, "ac1Witness": lasso(self.ac1_witness),
            "ac21": self.ac21, "ac21Witness": lasso(self.ac21_witness),
            "ac22": self.ac22, "ac22Counterwitness": lasso(self.ac22_counterwitness),
            "ac3": self.ac3, "ac3Smaller": None if self.ac3_smaller is None else str(self.ac3_smaller),
            "oc": self.oc,
        }


def _ac2(xi: Infinite, universe: TraceUniverse) -> tuple[bool, int | None, bool, int | None]:
    goods = universe.good_indices
    w21 = next((g for g in goods if not universe.satisfies(xi, g)), None)
    ac21 = w21 is not None or not goods
    w22 = next((g for g in goods if universe.satisfies(xi, g)), None)
    return ac21, w21, w22 is None, w22


def _separates(xi: Infinite, universe: TraceUniverse, seed: int | None = None) -> bool:
    if seed is not None and not universe.satisfies(xi, seed):
        return False
    if seed is None and not universe.models(xi, universe.bad_indices):
        return False
    ac21, _, ac22, _ = _ac2(xi, universe)
    return ac21 and ac22


def unordered(xi: Infinite) -> Infinite:
    """The formula with every ordered-and replaced by a plain conjunction."""
    return Infinite(conjunctive(xi.head), conjunctive(xi.cycle))


def check_oc(xi: Infinite, universe: TraceUniverse, witness: int) -> bool:
    """True when the order of events in ``xi`` matters for the violation."""
    loose = unordered(xi)
    if loose == xi:
        return True
    target = universe.lassos[witness].action_set()
    for i in universe.bad_indices:
        other = universe.lassos[i]
        if (other.action_set() == target and not universe.satisfies(xi, i)
                and universe.satisfies(loose, i)):
            return False
    return True


def check_ac(xi: Infinite, universe: TraceUniverse) -> AcReport:
    ac1_w = next(iter(universe.models(xi, universe.bad_indices)), None)
    ac21, w21, ac22, w22 = _ac2(xi, universe)
    smaller = None
    if ac1_w is not None:
        for cand in generalize_step(xi):
            if (subset_rel(cand, xi, universe) and not subset_rel(xi, cand, universe)
                    and _separates(cand, universe)):
                smaller = cand
                break
    oc = check_oc(xi, universe, ac1_w) if ac1_w is not None else False
    return AcReport(ac1_w is not None, ac1_w, ac21, w21, ac22, w22, smaller is None, smaller, oc)


# -- pipeline -----------------------------------------------------------

@dataclass
class CausalityClass:
    cause: Infinite
    members: tuple[int, ...]
    report: AcReport
    seed: int
    non_occurrence: frozenset = _EMPTY
    ordered: Infinite | None = None
    overlapping: bool = False


@dataclass
class Explanation:
    universe: TraceUniverse
    classes: list[CausalityClass]
    stats: dict = field(default_factory=dict)
    unseparable: list[int] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.universe.bad_indices


def _universe_sat(universe: TraceUniverse):
    index = {s: i for i, s in enumerate(universe.lassos)}

    def sat(xi, lasso):
        i = index.get(lasso)
        return _sat(xi, lasso, universe.budget) if i is None else universe.satisfies(xi, i)
    return sat


def explain_lasso(index: int, universe: TraceUniverse, stats: dict | None = None) -> Chain:
    """Refine then generalize the trace formula of one bad lasso."""
    stats = stats if stats is not None else {}
    sigma = universe.lassos[index]
    chain = Chain.of_trace(sigma)
    actions = universe.ts.actions
    cap = len(universe.good_indices) * (len(actions) + 1) + 8
    for _ in range(cap):
        xi = chain.to_eol()
        offender = next(iter(universe.models(xi, universe.good_indices)), None)
        if offender is None:
            break
        chain = refine_with_negations(chain, sigma, universe.lassos[offender], actions=actions,
                                      override=universe.budget, sat=_universe_sat(universe))
        stats["refinements"] = stats.get("refinements", 0) + 1
    else:
        raise CannotSeparate(f"refinement did not converge for {sigma}")

    # safety violations have finite bad prefixes; keep their causes there too
    prefix_first = is_syntactic_safety(universe.phi)
    changed = True
    while changed:
        changed = False
        xi = chain.to_eol()
        for cand in chain_generalizations(chain, prefix_first):
            cx = cand.to_eol()
            if subset_rel(cx, xi, universe) and _separates(cx, universe, index):
                chain = cand
                changed = True
                stats["generalizations"] = stats.get("generalizations", 0) + 1
                break
    return chain


def compute_causes(ts: TransitionSystem, phi: Ltl, max_lassos: int = DEFAULT_MAX_LASSOS,
                   budget: int | None = None, universe: TraceUniverse | None = None) -> Explanation:
    if universe is None:
        universe = partition(ts, phi, max_lassos, budget)
    stats = {"lassos": len(universe.lassos), "bad": len(universe.bad_indices),
             "good": len(universe.good_indices), "refinements": 0, "generalizations": 0}
    found: dict[str, CausalityClass] = {}
    unseparable = []
    for idx in universe.bad_indices:
        try:
            chain = explain_lasso(idx, universe, stats)
        except CannotSeparate:
            unseparable.append(idx)
            continue
        xi = chain.to_eol()
        key = str(xi)
        if key in found:
            continue
        report = check_ac(xi, universe)
        try:
            q = non_occurrence_set(idx, universe)
        except PreconditionViolated:
            q = _EMPTY
        ordered = None
        if not report.oc and _separates(unordered(xi), universe, idx):
            # order is not what makes these lassos bad: report the weaker form
            ordered, xi = xi, unordered(xi)
        members = tuple(universe.models(xi))
        found[key] = CausalityClass(xi, members, report, idx, q, ordered)
    classes = list(found.values())
    by_members: dict[tuple, list[CausalityClass]] = {}
    for c in classes:
        by_members.setdefault(c.members, []).append(c)
    for group in by_members.values():
        if len(group) > 1:
            for c in group:
                c.overlapping = True
    stats["classes"] = len(classes)
    return Explanation(universe, classes, stats, unseparable)
