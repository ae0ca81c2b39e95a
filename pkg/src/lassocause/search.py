"""Enumeration of elementary lassos and the good/bad trace universe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .ltl import Ltl, eval_ltl
from .model import Lasso, TransitionSystem

DEFAULT_MAX_LASSOS = 100_000


class LassoCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"more than {cap} elementary lassos; raise the cap or shrink the model")


def iter_lassos(ts: TransitionSystem, max_lassos: int = DEFAULT_MAX_LASSOS) -> Iterator[Lasso]:
    """Yield every elementary lasso, ordered by (initial state, action sequence).

    Paths keep pairwise distinct states; the first transition back onto the
    current path closes the loop.
    """
    index = {s: i for i, s in enumerate(ts.states)}
    count = 0
    for init in sorted(ts.initials):
        path_states = [init]
        path_actions: list[str] = []
        on_path = 1 << index[init]
        # explicit stack of successor iterators
        stack = [iter(ts.successors(init))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                if path_actions:
                    path_actions.pop()
                on_path &= ~(1 << index[path_states.pop()])
                continue
            action, target = nxt
            bit = 1 << index[target]
            if on_path & bit:
                count += 1
                if count > max_lassos:
                    raise LassoCapExceeded(max_lassos)
                yield Lasso(tuple(path_states), tuple(path_actions) + (action,),
                            path_states.index(target))
            else:
                path_states.append(target)
                path_actions.append(action)
                on_path |= bit
                stack.append(iter(ts.successors(target)))


def enumerate_lassos(ts: TransitionSystem, max_lassos: int = DEFAULT_MAX_LASSOS) -> list[Lasso]:
    return list(iter_lassos(ts, max_lassos))


@dataclass
class TraceUniverse:
    """All elementary lassos of a system, split by the property."""

    ts: TransitionSystem
    phi: Ltl
    lassos: tuple[Lasso, ...]
    verdicts: tuple[bool, ...]
    budget: int | None = None
    _sat_cache: dict = field(default_factory=dict, repr=False)
    _evaluators: dict = field(default_factory=dict, repr=False)

    @property
    def bad(self) -> tuple[Lasso, ...]:
        return tuple(s for s, ok in zip(self.lassos, self.verdicts) if not ok)

    @property
    def good(self) -> tuple[Lasso, ...]:
        return tuple(s for s, ok in zip(self.lassos, self.verdicts) if ok)

    @property
    def bad_indices(self) -> list[int]:
        return [i for i, ok in enumerate(self.verdicts) if not ok]

    @property
    def good_indices(self) -> list[int]:
        return [i for i, ok in enumerate(self.verdicts) if ok]

    def satisfies(self, xi, index: int) -> bool:
        """Cached ``lassos[index] |=e xi``."""
        key = (xi, index)
        hit = self._sat_cache.get(key)
        if hit is None:
            from .eol import WordEvaluator, default_budget, eval_infinite

            lasso = self.lassos[index]
            budget = default_budget(xi, self.budget)
            steps = lasso.stem_length + max(budget.head_unfolds, budget.cycle_unfolds) * lasso.loop_length
            ev = self._evaluators.get(index)
            if ev is None or ev.n < steps:
                # one memo table per lasso, shared by every formula checked on it
                ev = WordEvaluator(lasso.word(max(steps, 2 * ev.n if ev else steps)))
                self._evaluators[index] = ev
            hit = eval_infinite(xi, lasso, budget, ev)
            self._sat_cache[key] = hit
        return hit

    def models(self, xi, indices=None) -> list[int]:
        """Indices of lassos satisfying ``xi`` (optionally restricted)."""
        rng = range(len(self.lassos)) if indices is None else indices
        return [i for i in rng if self.satisfies(xi, i)]


def partition(ts: TransitionSystem, phi: Ltl, max_lassos: int = DEFAULT_MAX_LASSOS,
              budget: int | None = None) -> TraceUniverse:
    lassos = tuple(iter_lassos(ts, max_lassos))
    verdicts = tuple(eval_ltl(phi, s, ts) for s in lassos)
    return TraceUniverse(ts, phi, lassos, verdicts, budget)
