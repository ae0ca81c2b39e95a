"""Event Order Logic with the infinite (omega) operator.

Formulae are stratified:

* simple:    ``T``, events, ``!``, ``&``, ``|``
* I-complex: simple, ordered-and ``a . b``, interval ``a .<phi.> b``, ``&``, ``|``
* G-complex: I-complex, until-like ``phi .] theta``, after-like ``theta .[ phi``
* infinite:  ``theta .^w psi`` (only at the top, ``psi`` I-complex)

Satisfaction is defined on segments ``[a..b]`` of an action word, where step
``t`` (``a < t <= b``) belongs to the segment.  Guards of the interval,
until-like and after-like operators cover exactly the steps between the
witnesses they separate: the left witness is the first point at which the left
operand becomes true on its prefix, the right witness is a window whose first
step is the right operand's first step.  Without that anchoring a guard could
always be made vacuous by choosing empty gaps.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from .model import Lasso, Segment


class EolSyntaxError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} at position {pos}")


class StratificationError(EolSyntaxError):
    pass


class BudgetTooSmall(ValueError):
    pass


class _Node:
    """Shared behaviour: cached hashing and printing."""

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_h", h)
        return h

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Top(_Node):
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Event(_Node):
    name: str
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Not(_Node):
    arg: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class And(_Node):
    left: "Eol"
    right: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Or(_Node):
    left: "Eol"
    right: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class OrderedAnd(_Node):
    left: "Eol"
    right: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Between(_Node):
    """``left .<guard.> right``: guard holds on every step strictly between."""

    left: "Eol"
    guard: "Eol"
    right: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class UntilLike(_Node):
    """``guard .] body``: guard holds on every step before ``body`` starts."""

    guard: "Eol"
    body: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class AfterLike(_Node):
    """``body .[ guard``: guard holds on every step after ``body`` completes."""

    body: "Eol"
    guard: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


@dataclass(frozen=True, eq=True)
class Infinite(_Node):
    head: "Eol"
    cycle: "Eol"
    __hash__ = _Node.__hash__
    __str__ = _Node.__str__


Eol = Union[Top, Event, Not, And, Or, OrderedAnd, Between, UntilLike, AfterLike, Infinite]

TOP = Top()


def children(f: Eol) -> tuple[Eol, ...]:
    return tuple(getattr(f, n) for n in f.__dataclass_fields__ if n != "name")


def walk(f: Eol) -> Iterator[Eol]:
    yield f
    for c in children(f):
        yield from walk(c)


def events(f: Eol) -> set[str]:
    return {g.name for g in walk(f) if isinstance(g, Event)}


def ordered(*names: str) -> Eol:
    """Left-associated ordered conjunction of events (``T`` when empty)."""
    if not names:
        return TOP
    f: Eol = Event(names[0])
    for n in names[1:]:
        f = OrderedAnd(f, Event(n))
    return f


def conj(parts: list[Eol]) -> Eol:
    if not parts:
        return TOP
    f = parts[0]
    for p in parts[1:]:
        f = And(f, p)
    return f


def forbid(names) -> Eol:
    """Simple formula ``!a & !b & ...`` (``T`` for no names)."""
    return conj([Not(Event(n)) for n in sorted(names)])


# -- stratification -----------------------------------------------------

SIMPLE, ICOMPLEX, GCOMPLEX, INFINITE = 0, 1, 2, 3
_STRATUM_NAMES = {SIMPLE: "simple", ICOMPLEX: "I-complex", GCOMPLEX: "G-complex", INFINITE: "infinite"}


def stratum(f: Eol, top: bool = True) -> int:
    """Lowest stratum containing ``f``; raises StratificationError if none."""
    if isinstance(f, (Top, Event)):
        return SIMPLE
    if isinstance(f, Not):
        if stratum(f.arg, False) != SIMPLE:
            raise StratificationError("negation applied outside a simple formula")
        return SIMPLE
    if isinstance(f, (And, Or)):
        s = max(stratum(f.left, False), stratum(f.right, False))
        if s > ICOMPLEX:
            raise StratificationError("conjunction/disjunction of G-complex formulae")
        return s
    if isinstance(f, (OrderedAnd, Between)):
        if max(stratum(f.left, False), stratum(f.right, False)) > ICOMPLEX:
            raise StratificationError("ordered operands must be I-complex")
        if isinstance(f, Between) and stratum(f.guard, False) != SIMPLE:
            raise StratificationError("interval guard must be simple")
        return ICOMPLEX
    if isinstance(f, (UntilLike, AfterLike)):
        if stratum(f.guard, False) != SIMPLE:
            raise StratificationError("until/after guard must be simple")
        if stratum(f.body, False) > GCOMPLEX:
            raise StratificationError("omega below top")
        return GCOMPLEX
    if isinstance(f, Infinite):
        if not top:
            raise StratificationError("omega below top")
        if stratum(f.head, False) > GCOMPLEX:
            raise StratificationError("omega below top")
        if stratum(f.cycle, False) > ICOMPLEX:
            raise StratificationError("cycle of an omega formula must be I-complex")
        return INFINITE
    raise TypeError(f"not an EOL formula: {f!r}")


def is_simple(f: Eol) -> bool:
    return _safe_stratum(f) == SIMPLE


def is_icomplex(f: Eol) -> bool:
    return _safe_stratum(f) in (SIMPLE, ICOMPLEX)


def is_gcomplex(f: Eol) -> bool:
    return _safe_stratum(f) in (SIMPLE, ICOMPLEX, GCOMPLEX)


def _safe_stratum(f):
    try:
        return stratum(f, False)
    except StratificationError:
        return None


# -- concrete syntax ----------------------------------------------------

_TOKEN = re.compile(r"\s*(\.\^w|\.<|\.>|\.\]|\.\[|\.|[!&|()]|\w+)")


def _tokenize(text):
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            at = len(text) - len(text[pos:].lstrip())
            raise EolSyntaxError(f"unexpected character {text[at]!r}", at)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.end = len(text)

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected and tok != expected):
            raise EolSyntaxError(f"expected {expected or 'a formula'!r}", self.pos())
        self.i += 1
        return tok

    def top(self):
        head = self.gcomplex()
        if self.peek() == ".^w":
            self.take()
            cycle = self.gcomplex()
            if self.peek() == ".^w":
                raise StratificationError("nested omega operator", self.pos())
            return Infinite(head, cycle)
        return head

    def gcomplex(self):
        left = self.disj()
        if self.peek() == ".]":
            self.take()
            return UntilLike(left, self.gcomplex())
        while self.peek() == ".[":
            self.take()
            left = AfterLike(left, self.disj())
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.seq()
        while self.peek() == "&":
            self.take()
            f = And(f, self.seq())
        return f

    def seq(self):
        f = self.unary()
        while self.peek() in (".", ".<"):
            if self.take() == ".":
                f = OrderedAnd(f, self.unary())
            else:
                guard = self.disj()
                self.take(".>")
                f = Between(f, guard, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.top()
            self.take(")")
            return f
        if tok is None or not re.fullmatch(r"\w+", tok):
            raise EolSyntaxError(f"unexpected {tok!r}" if tok else "unexpected end", self.pos())
        self.take()
        return TOP if tok == "T" else Event(tok)


def parse_eol(text: str) -> Eol:
    """Parse concrete EOL syntax; the result is infinite or G-complex."""
    p = _Parser(text)
    f = p.top()
    if p.peek() is not None:
        raise EolSyntaxError(f"unexpected {p.peek()!r}", p.pos())
    stratum(f)
    return f


_LEVEL = {Infinite: 0, UntilLike: 1, AfterLike: 1, Or: 2, And: 3, OrderedAnd: 4, Between: 4,
          Not: 5, Event: 6, Top: 6}


def to_text(f: Eol, level: int = 0) -> str:
    """Print ``f`` in the concrete syntax accepted by :func:`parse_eol`."""
    own = _LEVEL[type(f)]
    if isinstance(f, Top):
        s = "T"
    elif isinstance(f, Event):
        s = f.name
    elif isinstance(f, Not):
        s = "!" + to_text(f.arg, 5)
    elif isinstance(f, OrderedAnd):
        s = f"{to_text(f.left, 4)} . {to_text(f.right, 5)}"
    elif isinstance(f, Between):
        s = f"{to_text(f.left, 4)} .<{to_text(f.guard, 2)}.> {to_text(f.right, 5)}"
    elif isinstance(f, And):
        s = f"{to_text(f.left, 3)} & {to_text(f.right, 4)}"
    elif isinstance(f, Or):
        s = f"{to_text(f.left, 2)} | {to_text(f.right, 3)}"
    elif isinstance(f, UntilLike):
        s = f"{to_text(f.guard, 2)} .] {to_text(f.body, 1)}"
    elif isinstance(f, AfterLike):
        body = to_text(f.body, 1)
        if isinstance(f.body, UntilLike):
            body = f"({body})"
        s = f"{body} .[ {to_text(f.guard, 2)}"
    elif isinstance(f, Infinite):
        head = to_text(f.head, 6)
        s = f"{head} .^w ({to_text(f.cycle)})"
    else:
        raise TypeError(f"not an EOL formula: {f!r}")
    return f"({s})" if own < level else s


def to_json(f: Eol) -> dict:
    """JSON-ready AST."""
    if isinstance(f, Top):
        return {"op": "top"}
    if isinstance(f, Event):
        return {"op": "event", "name": f.name}
    op = {Not: "not", And: "and", Or: "or", OrderedAnd: "ordered_and", Between: "between",
          UntilLike: "until_like", AfterLike: "after_like", Infinite: "omega"}[type(f)]
    return {"op": op, **{n: to_json(getattr(f, n)) for n in f.__dataclass_fields__}}


def from_json(d: dict) -> Eol:
    op = d["op"]
    if op == "top":
        return TOP
    if op == "event":
        return Event(d["name"])
    cls = {"not": Not, "and": And, "or": Or, "ordered_and": OrderedAnd, "between": Between,
           "until_like": UntilLike, "after_like": AfterLike, "omega": Infinite}[op]
    return cls(**{n: from_json(d[n]) for n in cls.__dataclass_fields__})


# -- semantics ----------------------------------------------------------

def count_ordered_events(f: Eol) -> int:
    """Positive event leaves, i.e. events that need a step of their own."""
    if isinstance(f, Event):
        return 1
    if isinstance(f, (Top, Not)):
        return 0
    if isinstance(f, Between):
        return count_ordered_events(f.left) + count_ordered_events(f.right)
    if isinstance(f, (UntilLike, AfterLike)):
        return count_ordered_events(f.body)
    return sum(count_ordered_events(c) for c in children(f))


@dataclass(frozen=True)
class UnfoldBudget:
    head_unfolds: int
    cycle_unfolds: int

    def __post_init__(self):
        if self.head_unfolds < 1 or self.cycle_unfolds < 1:
            raise ValueError("unfold budgets must be >= 1")


def default_budget(xi: Infinite, override: int | None = None) -> UnfoldBudget:
    if override is not None:
        return UnfoldBudget(override, override)
    return UnfoldBudget(count_ordered_events(xi.head) + 1, count_ordered_events(xi.cycle) + 1)


class WordEvaluator:
    """Segment satisfaction over one finite action word, memoized.

    ``word[t-1]`` is the action of step ``t``.
    """

    def __init__(self, word):
        self.word = tuple(word)
        self.n = len(self.word)
        occ: dict[str, list[int]] = {}
        for t, a in enumerate(self.word, 1):
            occ.setdefault(a, []).append(t)
        self.occ = occ
        self._sat: dict = {}
        self._start: dict = {}
        self._unit: dict = {}
        self._first: dict = {}

    def occurs(self, name: str, a: int, b: int) -> bool:
        steps = self.occ.get(name)
        if not steps:
            return False
        i = bisect.bisect_right(steps, a)
        return i < len(steps) and steps[i] <= b

    def unit_ok(self, guard: Eol, t: int) -> bool:
        key = (guard, t)
        v = self._unit.get(key)
        if v is None:
            v = self._unit[key] = self.sat(guard, t - 1, t)
        return v

    def sat(self, f: Eol, a: int, b: int) -> bool:
        if isinstance(f, Event):
            return self.occurs(f.name, a, b)
        if isinstance(f, Top):
            return True
        if isinstance(f, Not):
            return not self.sat(f.arg, a, b)
        key = (f, a, b)
        v = self._sat.get(key)
        if v is None:
            v = self._sat[key] = self._compute(f, a, b)
        return v

    def first_end(self, f: Eol, a: int) -> int | None:
        """Least ``j`` with ``[a..j]`` satisfying ``f``, for ``f`` monotone in the end."""
        key = (f, a)
        if key in self._first:
            return self._first[key]
        lo, hi = a, self.n
        if not self.sat(f, a, hi):
            found = None
        else:
            while lo < hi:
                mid = (lo + hi) // 2
                if self.sat(f, a, mid):
                    hi = mid
                else:
                    lo = mid + 1
            found = lo
        self._first[key] = found
        return found

    def ends_at(self, f: Eol, a: int, j: int) -> bool:
        """``f`` holds on ``[a..j]`` but not yet on ``[a..j-1]``."""
        if isinstance(f, Event):
            return self.word[j - 1] == f.name and not self.occurs(f.name, a, j - 1)
        if monotone(f):
            return self.first_end(f, a) == j
        return self.sat(f, a, j) and not self.sat(f, a, j - 1)

    def starts_at(self, f: Eol, k: int, b: int) -> bool:
        """Some ``[k..r]`` with ``r <= b`` satisfies ``f`` while ``[k+1..r]`` does not."""
        if isinstance(f, Event):
            return k < b and self.word[k] == f.name
        key = (f, k)
        found, scanned = self._start.get(key, (None, k))
        if found is None and scanned < b:
            for r in range(scanned + 1, b + 1):
                if self.sat(f, k, r) and not self.sat(f, k + 1, r):
                    found = r
                    break
            self._start[key] = (found, max(scanned, b))
        return found is not None and found <= b

    def _compute(self, f: Eol, a: int, b: int) -> bool:
        if isinstance(f, And):
            return self.sat(f.left, a, b) and self.sat(f.right, a, b)
        if isinstance(f, Or):
            return self.sat(f.left, a, b) or self.sat(f.right, a, b)
        if isinstance(f, OrderedAnd):
            if monotone(f.left):
                j = self.first_end(f.left, a)
                j = j if j is not None and j > a else (a + 1 if j == a else None)
            else:
                j = next((j for j in range(a + 1, b) if self.sat(f.left, a, j)), None)
            if j is None or j >= b:
                return False
            return any(self.sat(f.right, k, b) for k in range(b - 1, j - 1, -1))
        if isinstance(f, Between):
            if monotone(f.left):
                j0 = self.first_end(f.left, a)
                ends = [j0] if j0 is not None and a < j0 < b else []
            else:
                ends = range(a + 1, b)
            for j in ends:
                if not self.ends_at(f.left, a, j):
                    continue
                # nearest admissible start of the right operand
                for k in range(j, b):
                    if self.starts_at(f.right, k, b) and self.sat(f.right, k, b):
                        return True
                    if not self.unit_ok(f.guard, k + 1):
                        break
            return False
        if isinstance(f, UntilLike):
            for j in range(a, b):
                if self.starts_at(f.body, j, b) and self.sat(f.body, j, b):
                    return True
                if not self.unit_ok(f.guard, j + 1):
                    return False
            return False
        if isinstance(f, AfterLike):
            last_bad = a
            for t in range(b, a, -1):
                if not self.unit_ok(f.guard, t):
                    last_bad = t
                    break
            return any(self.ends_at(f.body, a, j) for j in range(max(a + 1, last_bad), b + 1))
        if isinstance(f, Infinite):
            raise TypeError("infinite formulae are evaluated on lassos, not segments")
        raise TypeError(f"not an EOL formula: {f!r}")


@lru_cache(maxsize=1 << 16)
def monotone(f: Eol) -> bool:
    """Satisfaction on ``[a..b]`` can only switch from false to true as ``b`` grows."""
    if isinstance(f, (Top, Event)):
        return True
    if isinstance(f, (And, Or, OrderedAnd)):
        return monotone(f.left) and monotone(f.right)
    if isinstance(f, Between):
        return monotone(f.right)
    return False


def _seg_eval(f: Eol, seg: Segment) -> bool:
    return WordEvaluator(seg.owner.word(seg.end)).sat(f, seg.start, seg.end)


def eval_simple(phi: Eol, seg: Segment) -> bool:
    if not is_simple(phi):
        raise StratificationError("not a simple formula")
    return _seg_eval(phi, seg)


def eval_icomplex(psi: Eol, seg: Segment) -> bool:
    if not is_icomplex(psi):
        raise StratificationError("not an I-complex formula")
    return _seg_eval(psi, seg)


def eval_gcomplex(theta: Eol, seg: Segment) -> bool:
    if not is_gcomplex(theta):
        raise StratificationError("not a G-complex formula")
    return _seg_eval(theta, seg)


def _check_budget(xi: Infinite, lasso: Lasso, budget: UnfoldBudget):
    l, m = lasso.stem_length, lasso.loop_length
    if count_ordered_events(xi.head) > l + budget.head_unfolds * m:
        raise BudgetTooSmall("head unfold budget cannot witness all head events")
    if count_ordered_events(xi.cycle) > budget.cycle_unfolds * m:
        raise BudgetTooSmall("cycle unfold budget cannot witness all cycle events")


def witness(xi: Infinite, lasso: Lasso, budget: UnfoldBudget | None = None,
            evaluator: WordEvaluator | None = None) -> tuple[int, int] | None:
    """Least head end ``i`` and least loop unfolding ``j`` witnessing ``lasso |=e xi``.

    The head is read on ``sigma[0..i]`` with ``l <= i <= l + head_unfolds*m``,
    the cycle on ``sigma[l..l+j*m]`` with ``1 <= j <= cycle_unfolds``.
    """
    budget = budget or default_budget(xi)
    _check_budget(xi, lasso, budget)
    l, m = lasso.stem_length, lasso.loop_length
    n = l + max(budget.head_unfolds, budget.cycle_unfolds) * m
    ev = evaluator if evaluator is not None and evaluator.n >= n else WordEvaluator(lasso.word(n))
    i = next((i for i in range(l, l + budget.head_unfolds * m + 1) if ev.sat(xi.head, 0, i)), None)
    if i is None:
        return None
    j = next((j for j in range(1, budget.cycle_unfolds + 1) if ev.sat(xi.cycle, l, l + j * m)), None)
    if j is None:
        return None
    return i, j


def head_unfolds_used(lasso: Lasso, i: int) -> int:
    """Loop passes the head segment ``sigma[0..i]`` reaches into."""
    return max(0, math.ceil((i - lasso.stem_length) / lasso.loop_length))


def eval_infinite(xi: Infinite, lasso: Lasso, budget: UnfoldBudget | None = None,
                  evaluator: WordEvaluator | None = None) -> bool:
    """``lasso |=e xi``; ``evaluator`` may be a shared one over a long enough word."""
    return witness(xi, lasso, budget, evaluator) is not None


def formula_of_trace(lasso: Lasso) -> Infinite:
    """Ordered conjunction of the stem events, omega, the loop events."""
    return Infinite(ordered(*lasso.stem_actions), ordered(*lasso.loop_actions))


def subset_rel(xi1: Infinite, xi2: Infinite, universe) -> bool:
    """Model-relative ``xi1 ⊆ xi2``: every lasso satisfying ``xi2`` satisfies ``xi1``."""
    return all(universe.satisfies(xi1, i) for i in universe.models(xi2))


def conjunctive(f: Eol) -> Eol:
    """Replace every ordered-and by a plain conjunction."""
    if isinstance(f, OrderedAnd):
        return And(conjunctive(f.left), conjunctive(f.right))
    if isinstance(f, (Top, Event)):
        return f
    return type(f)(*(conjunctive(c) for c in children(f)))
