"""Transition systems, the model file format, and lasso-shaped executions.

A lasso is stored as the visited states ``s_0 .. s_{l+m-1}`` together with the
actions ``alpha_1 .. alpha_{l+m}``; step ``t`` (1-based) is the transition
``s_{t-1} --alpha_t--> s_t`` and the last loop step re-enters ``s_l``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

LAMBDA = "λ"
LAMBDA_STATE = "s_λ"
RESERVED_NAMES = frozenset({LAMBDA, "LAMBDA"})

_NAME = r"\w+"
_STATE_RE = re.compile(rf"state\s+({_NAME})\s*(?:\{{([^}}]*)\}})?$")
_INIT_RE = re.compile(rf"init\s+({_NAME})$")
_TRANS_RE = re.compile(rf"({_NAME})\s*-\s*({_NAME})\s*->\s*({_NAME})$")


class ModelError(ValueError):
    """Raised for malformed model files. Carries a 1-based line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        self.message = message
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class TransitionSystem:
    states: tuple[str, ...]
    initials: tuple[str, ...]
    transitions: tuple[tuple[str, str, str], ...]
    labels: Mapping[str, frozenset[str]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        known = set(self.states)
        for src, _, dst in self.transitions:
            if src not in known or dst not in known:
                raise ModelError(f"transition {src} -> {dst} uses an unknown state")
        if not self.initials:
            raise ModelError("no initial state")
        for s in self.initials:
            if s not in known:
                raise ModelError(f"initial state {s!r} is not a state")

    @classmethod
    def build(cls, transitions: Iterable[tuple[str, str, str]], initials: Iterable[str],
              states: Iterable[str] = (), labels: Mapping[str, Iterable[str]] | None = None):
        """Convenience constructor; states default to those mentioned by transitions."""
        transitions = sorted(set(transitions))
        order: dict[str, None] = {}
        for s in states:
            order[s] = None
        for s in initials:
            order[s] = None
        for src, _, dst in transitions:
            order[src] = None
            order[dst] = None
        labels = {s: frozenset(ls) for s, ls in (labels or {}).items()}
        return cls(tuple(order), tuple(dict.fromkeys(initials)), tuple(transitions), labels)

    @cached_property
    def actions(self) -> tuple[str, ...]:
        return tuple(sorted({a for _, a, _ in self.transitions}))

    @cached_property
    def propositions(self) -> frozenset[str]:
        return frozenset().union(*self.labels.values()) if self.labels else frozenset()

    @cached_property
    def _succ(self) -> dict[str, tuple[tuple[str, str], ...]]:
        succ: dict[str, list[tuple[str, str]]] = {s: [] for s in self.states}
        for src, act, dst in self.transitions:
            succ[src].append((act, dst))
        return {s: tuple(sorted(v)) for s, v in succ.items()}

    def successors(self, state: str) -> tuple[tuple[str, str], ...]:
        """Outgoing ``(action, target)`` pairs, sorted."""
        return self._succ[state]

    def label(self, state: str) -> frozenset[str]:
        return self.labels.get(state, frozenset())

    def terminal_states(self) -> list[str]:
        return [s for s in self.states if not self._succ[s]]

    def is_execution(self, lasso: "Lasso") -> bool:
        if not lasso.states or lasso.states[0] not in self.initials:
            return False
        trans = set(self.transitions)
        n = len(lasso.states)
        for t, act in enumerate(lasso.actions):
            dst = lasso.states[t + 1] if t + 1 < n else lasso.states[lasso.loop_start]
            if (lasso.states[t], act, dst) not in trans:
                return False
        return True


def complete_terminal_states(ts: TransitionSystem) -> TransitionSystem:
    """Route every terminal state to one shared sink looping on ``λ``."""
    terminal = ts.terminal_states()
    if not terminal:
        return ts
    extra = [(s, LAMBDA, LAMBDA_STATE) for s in terminal]
    extra.append((LAMBDA_STATE, LAMBDA, LAMBDA_STATE))
    return TransitionSystem.build(
        list(ts.transitions) + extra, ts.initials,
        states=list(ts.states) + [LAMBDA_STATE], labels=ts.labels,
    )


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_model(text: str) -> TransitionSystem:
    """Parse the line-based model format.

    Each declaration ends with ``;``.  Supported forms::

        state NAME {label, ...};
        init NAME;
        SRC -ACTION-> DST;

    When the file declares any state explicitly, transitions and ``init`` may
    only mention declared states; otherwise states are declared implicitly.
    """
    stmts: list[tuple[str, int, int]] = []
    buf: list[str] = []
    start: tuple[int, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        for col, ch in enumerate(line, 1):
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    stmts.append((stmt, *start))
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = (lineno, col)
                buf.append(ch)
        buf.append("\n")
    if "".join(buf).strip():
        line, col = start
        raise ModelError("missing ';' after declaration", line, col)

    declared: dict[str, set[str]] = {}
    initials: list[tuple[str, int, int]] = []
    transitions: list[tuple[str, str, str, int, int]] = []
    for stmt, line, col in stmts:
        stmt = " ".join(stmt.split())
        if m := _STATE_RE.match(stmt):
            name = _check_name(m.group(1), line, col)
            labels = declared.setdefault(name, set())
            if m.group(2) is not None:
                for lab in m.group(2).split(","):
                    lab = lab.strip()
                    if not re.fullmatch(_NAME, lab):
                        raise ModelError(f"bad label {lab!r}", line, col)
                    labels.add(lab)
        elif m := _INIT_RE.match(stmt):
            initials.append((_check_name(m.group(1), line, col), line, col))
        elif m := _TRANS_RE.match(stmt):
            src, act, dst = (_check_name(g, line, col) for g in m.groups())
            transitions.append((src, act, dst, line, col))
        else:
            raise ModelError(f"syntax error in {stmt!r}", line, col)

    if declared:
        for src, act, dst, line, col in transitions:
            for s in (src, dst):
                if s not in declared:
                    raise ModelError(f"undeclared state {s!r}", line, col)
        for s, line, col in initials:
            if s not in declared:
                raise ModelError(f"undeclared initial state {s!r}", line, col)
    if not initials:
        raise ModelError("empty initial set")
    labels = {s: ls for s, ls in declared.items() if ls}
    return TransitionSystem.build(
        [(s, a, d) for s, a, d, _, _ in transitions], [s for s, _, _ in initials],
        states=list(declared), labels=labels,
    )


def _check_name(name: str, line: int, col: int) -> str:
    if name in RESERVED_NAMES:
        raise ModelError(f"{name!r} is reserved", line, col)
    return name


def format_model(ts: TransitionSystem) -> str:
    lines = []
    for s in ts.states:
        labs = ts.label(s)
        lines.append(f"state {s}" + (" {" + ", ".join(sorted(labs)) + "}" if labs else "") + ";")
    lines += [f"init {s};" for s in ts.initials]
    lines += [f"{s} -{a}-> {d};" for s, a, d in ts.transitions]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic execution ``stem . loop^omega``."""

    states: tuple[str, ...]
    actions: tuple[str, ...]
    loop_start: int

    def __post_init__(self):
        if len(self.states) != len(self.actions) or not self.states:
            raise ValueError("a lasso needs one action per visited state")
        if not 0 <= self.loop_start < len(self.states):
            raise ValueError("loop start out of range")

    @classmethod
    def from_words(cls, stem: Iterable[str], loop: Iterable[str], prefix: str = "p") -> "Lasso":
        """Build a lasso over fresh states from its stem and loop action words."""
        stem, loop = tuple(stem), tuple(loop)
        if not loop:
            raise ValueError("loop must be nonempty")
        n = len(stem) + len(loop)
        return cls(tuple(f"{prefix}{i}" for i in range(n)), stem + loop, len(stem))

    @property
    def stem_length(self) -> int:
        return self.loop_start

    @property
    def loop_length(self) -> int:
        return len(self.states) - self.loop_start

    @property
    def stem(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.states[: self.loop_start], self.actions[: self.loop_start]))

    @property
    def loop(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.states[self.loop_start:], self.actions[self.loop_start:]))

    @property
    def loop_start_state(self) -> str:
        return self.states[self.loop_start]

    @property
    def stem_actions(self) -> tuple[str, ...]:
        return self.actions[: self.loop_start]

    @property
    def loop_actions(self) -> tuple[str, ...]:
        return self.actions[self.loop_start:]

    def _index(self, pos: int) -> int:
        l, n = self.loop_start, len(self.states)
        return pos if pos < n else l + (pos - l) % (n - l)

    def state_at(self, pos: int) -> str:
        """State at position ``pos`` of the infinite execution."""
        return self.states[self._index(pos)]

    def action_at(self, step: int) -> str:
        """Action of step ``step >= 1``, i.e. of ``s_{step-1} -> s_step``."""
        if step < 1:
            raise IndexError("steps are numbered from 1")
        return self.actions[self._index(step - 1)]

    def word(self, steps: int) -> tuple[str, ...]:
        """Actions of the first ``steps`` steps."""
        return tuple(self.action_at(t) for t in range(1, steps + 1))

    def unroll(self, steps: int) -> list[tuple[str, str]]:
        """First ``steps`` steps of the infinite execution as (state, action) pairs."""
        if steps < 0:
            raise ValueError("steps must be >= 0")
        return [(self.state_at(t - 1), self.action_at(t)) for t in range(1, steps + 1)]

    def action_set(self) -> frozenset[str]:
        return frozenset(self.actions)

    def __str__(self):
        stem = " ".join(self.stem_actions)
        loop = " ".join(self.loop_actions)
        return f"{stem} ({loop})^w" if stem else f"({loop})^w"


@dataclass(frozen=True)
class Segment:
    """Finite piece ``sigma[start..end]`` of the unrolled execution."""

    owner: Lasso
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError("segment needs 0 <= start <= end")

    def actions(self) -> tuple[str, ...]:
        return tuple(self.owner.action_at(t) for t in range(self.start + 1, self.end + 1))


def event_occurs(seg: Segment, action: str) -> bool:
    """True iff some step strictly inside ``(start, end]`` is labelled ``action``."""
    return action in seg.actions()
