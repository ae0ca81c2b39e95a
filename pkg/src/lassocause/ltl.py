"""LTL formulae over state labels and event variables, evaluated on lassos.

Atoms name either a state label or an action.  An action atom holds at a
position when the transition just taken into that position carries the
action; position 0 has no incoming transition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .model import Lasso, TransitionSystem


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        self.message = message
        super().__init__(f"{message} at position {pos}")


class UnresolvedAtom(ValueError):
    pass


@dataclass(frozen=True)
class TrueF:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Ltl"

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    left: "Ltl"
    right: "Ltl"

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Ltl"
    right: "Ltl"

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Next:
    arg: "Ltl"

    def __str__(self):
        return f"X {_wrap(self.arg)}"


@dataclass(frozen=True)
class Until:
    left: "Ltl"
    right: "Ltl"

    def __str__(self):
        return f"({self.left} U {self.right})"


@dataclass(frozen=True)
class Eventually:
    arg: "Ltl"

    def __str__(self):
        return f"F {_wrap(self.arg)}"


@dataclass(frozen=True)
class Globally:
    arg: "Ltl"

    def __str__(self):
        return f"G {_wrap(self.arg)}"


Ltl = Union[TrueF, Atom, Not, And, Or, Next, Until, Eventually, Globally]

_UNARY = {"!": Not, "X": Next, "F": Eventually, "G": Globally}


def _wrap(f: Ltl) -> str:
    return str(f)


def implies(a: Ltl, b: Ltl) -> Ltl:
    return Or(Not(a), b)


def iff(a: Ltl, b: Ltl) -> Ltl:
    return And(implies(a, b), implies(b, a))


def subformulas(f: Ltl) -> Iterator[Ltl]:
    """Post-order walk; children come before parents."""
    for name in ("arg", "left", "right"):
        child = getattr(f, name, None)
        if child is not None:
            yield from subformulas(child)
    yield f


def atoms(f: Ltl) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def depth(f: Ltl) -> int:
    if isinstance(f, (TrueF, Atom)):
        return 0
    kids = [getattr(f, n) for n in ("arg", "left", "right") if hasattr(f, n)]
    return 1 + max(depth(k) for k in kids)


# -- parsing ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(<->|->|[!&|()]|\w+)")


def is_syntactic_safety(f: Ltl, positive: bool = True) -> bool:
    """True if ``f`` (under ``positive`` polarity) uses no eventuality.

    In negation normal form the formula may only use G, X, and, or and the
    release-like negated until; every violation then has a finite bad prefix.
    """
    if isinstance(f, (TrueF, Atom)):
        return True
    if isinstance(f, Not):
        return is_syntactic_safety(f.arg, not positive)
    if isinstance(f, (And, Or)):
        return is_syntactic_safety(f.left, positive) and is_syntactic_safety(f.right, positive)
    if isinstance(f, Next):
        return is_syntactic_safety(f.arg, positive)
    if isinstance(f, Globally):
        return positive and is_syntactic_safety(f.arg, positive)
    if isinstance(f, Eventually):
        return not positive and is_syntactic_safety(f.arg, positive)
    if isinstance(f, Until):
        return not positive and is_syntactic_safety(f.left, False) and is_syntactic_safety(f.right, False)
    raise TypeError(f)


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            at = len(text) - len(text[pos:].lstrip())
            raise LtlSyntaxError(f"unexpected character {text[at]!r}", at)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _Parser:
    # precedence, loosest first: <->, ->, |, &, U, unary
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.end = len(text)

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else self.end

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = repr(expected) if expected else "a formula"
            raise LtlSyntaxError(f"expected {want}", self.pos())
        self.i += 1
        return tok

    def parse(self) -> Ltl:
        f = self.iff()
        if self.peek() is not None:
            raise LtlSyntaxError(f"unexpected {self.peek()!r}", self.pos())
        return f

    def iff(self) -> Ltl:
        f = self.implies()
        while self.peek() == "<->":
            self.take()
            f = iff(f, self.implies())
        return f

    def implies(self) -> Ltl:
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(f, self.implies())
        return f

    def disj(self) -> Ltl:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Ltl:
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Ltl:
        f = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self) -> Ltl:
        tok = self.peek()
        if tok in _UNARY:
            self.take()
            return _UNARY[tok](self.unary())
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok is None or not re.fullmatch(r"\w+", tok) or tok == "U":
            raise LtlSyntaxError(f"unexpected {tok!r}" if tok else "unexpected end", self.pos())
        self.take()
        if tok == "true":
            return TrueF()
        if tok == "false":
            return Not(TrueF())
        return Atom(tok)


def parse_ltl(text: str) -> Ltl:
    """Parse ASCII LTL (``! & | -> <-> X F G U``); sugar is expanded."""
    return _Parser(text).parse()


# -- evaluation ---------------------------------------------------------

def _atom_reader(ts: TransitionSystem | None, names: set[str]):
    kinds = {}
    for name in names:
        if ts is None or name in ts.actions:
            kinds[name] = "action"
        elif name in ts.propositions or any(name in ts.label(s) for s in ts.states):
            kinds[name] = "label"
        else:
            raise UnresolvedAtom(f"atom {name!r} is neither an action nor a state label")
    return kinds


def positions(lasso: Lasso) -> tuple[int, list[int]]:
    """Quotient of the infinite word used for evaluation.

    Position ``l+m`` is the re-entry into the loop start (its incoming action
    is the loop-closing one), so it is kept apart from position ``l``.
    Returns the number of positions and the successor table.
    """
    l, n = lasso.loop_start, len(lasso.states)
    succ = list(range(1, n + 1)) + [l + 1]
    return n + 1, succ


def eval_ltl(phi: Ltl, lasso: Lasso, ts: TransitionSystem | None = None) -> bool:
    """Exact satisfaction of ``phi`` by the infinite execution ``lasso``.

    Subformulas are tabulated over the finite position quotient; until is the
    least fixpoint of its expansion law, computed by backward sweeps.
    """
    kinds = _atom_reader(ts, atoms(phi))
    size, succ = positions(lasso)
    n = len(lasso.states)

    def state(p):
        return lasso.states[p] if p < n else lasso.states[lasso.loop_start]

    def incoming(p):
        return lasso.actions[p - 1] if p >= 1 else None

    table: dict[Ltl, list[bool]] = {}
    for f in subformulas(phi):
        if f in table:
            continue
        if isinstance(f, TrueF):
            v = [True] * size
        elif isinstance(f, Atom):
            if kinds[f.name] == "action":
                v = [incoming(p) == f.name for p in range(size)]
            else:
                v = [f.name in ts.label(state(p)) for p in range(size)]
        elif isinstance(f, Not):
            v = [not x for x in table[f.arg]]
        elif isinstance(f, And):
            v = [x and y for x, y in zip(table[f.left], table[f.right])]
        elif isinstance(f, Or):
            v = [x or y for x, y in zip(table[f.left], table[f.right])]
        elif isinstance(f, Next):
            a = table[f.arg]
            v = [a[succ[p]] for p in range(size)]
        elif isinstance(f, Until):
            v = _until(table[f.left], table[f.right], succ)
        elif isinstance(f, Eventually):
            v = _until([True] * size, table[f.arg], succ)
        elif isinstance(f, Globally):
            v = [not x for x in _until([True] * size, [not y for y in table[f.arg]], succ)]
        else:
            raise TypeError(f"not an LTL formula: {f!r}")
        table[f] = v
    return table[phi][0]


def _until(left: list[bool], right: list[bool], succ: list[int]) -> list[bool]:
    size = len(left)
    v = list(right)
    changed = True
    while changed:
        changed = False
        for p in reversed(range(size)):
            if not v[p] and left[p] and v[succ[p]]:
                v[p] = True
                changed = True
    return v


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Lasso | None = None
    lassos: int = 0


def check_model(ts: TransitionSystem, phi: Ltl, max_lassos: int = 100_000) -> Verdict:
    """Exhaustive check over the elementary lassos of ``ts``."""
    from .search import iter_lassos

    count = 0
    for lasso in iter_lassos(ts, max_lassos):
        count += 1
        if not eval_ltl(phi, lasso, ts):
            return Verdict(False, lasso, count)
    return Verdict(True, None, count)
