"""Explicit finite transducers over a pair alphabet, denoting fixed-length relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import count

from .alphabet import Alphabet

_uids = count()


@dataclass(frozen=True)
class TransducerNfa:
    """NFA over pairs of letters of a base alphabet.

    Arcs are (src, input letter index, output letter index, dst).  The word
    pair (u, v) is related when some run consumes (u[0], v[0]) ... in order
    and ends accepting; related words always have equal length.
    """

    alphabet: Alphabet
    n_states: int
    initial: int
    accepting: frozenset[int]
    arcs: tuple[tuple[int, int, int, int], ...]
    uid: int = field(default_factory=lambda: next(_uids), compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.initial < self.n_states:
            raise ValueError("initial state out of range")
        if any(not 0 <= s < self.n_states for s in self.accepting):
            raise ValueError("accepting state out of range")
        m = len(self.alphabet)
        for src, a, b, dst in self.arcs:
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError(f"arc ({src}, {a}, {b}, {dst}) references a missing state")
            if not (0 <= a < m and 0 <= b < m):
                raise ValueError(f"arc ({src}, {a}, {b}, {dst}) uses a letter outside the alphabet")

    @classmethod
    def from_token_arcs(cls, alphabet: Alphabet, n_states: int, initial: int,
                        accepting, arcs) -> "TransducerNfa":
        """Build from arcs labeled with letter tokens instead of indices."""
        idx = alphabet.index
        packed = tuple(sorted({(s, idx(a), idx(b), t) for (s, a, b, t) in arcs}))
        return cls(alphabet, n_states, initial, frozenset(accepting), packed)

    @cached_property
    def arcs_by_input(self) -> dict[int, dict[int, tuple[tuple[int, int], ...]]]:
        """state -> input letter -> ((output letter, next state), ...)."""
        out: dict[int, dict[int, list]] = {}
        for src, a, b, dst in self.arcs:
            out.setdefault(src, {}).setdefault(a, []).append((b, dst))
        return {s: {a: tuple(sorted(row)) for a, row in rows.items()} for s, rows in out.items()}

    @cached_property
    def coaccessible(self) -> frozenset[int]:
        """States from which some accepting state is reachable."""
        rev: dict[int, set[int]] = {}
        for src, _a, _b, dst in self.arcs:
            rev.setdefault(dst, set()).add(src)
        seen = set(self.accepting)
        todo = list(seen)
        while todo:
            s = todo.pop()
            for t in rev.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)

    def transpose(self) -> "TransducerNfa":
        """Swap input and output on every arc: the inverse relation."""
        return TransducerNfa(
            self.alphabet, self.n_states, self.initial, self.accepting,
            tuple(sorted((s, b, a, t) for (s, a, b, t) in self.arcs)),
        )

    def relates(self, left, right) -> bool:
        """Whether the token words (left, right) are in the relation."""
        u = self.alphabet.word(left)
        v = self.alphabet.word(right)
        if len(u) != len(v):
            return False
        current = {self.initial}
        for a, b in zip(u, v):
            nxt = set()
            for s in current:
                for (bb, t) in self.arcs_by_input.get(s, {}).get(a, ()):
                    if bb == b:
                        nxt.add(t)
            if not nxt:
                return False
            current = nxt
        return bool(current & self.accepting)

    def describe(self) -> str:
        """Deterministic textual dump for goldens and debugging."""
        lines = [f"states {self.n_states} initial {self.initial} "
                 f"accepting {' '.join(map(str, sorted(self.accepting)))}"]
        tok = self.alphabet.token
        for src, a, b, dst in sorted(self.arcs):
            lines.append(f"{src} -({tok(a)},{tok(b)})-> {dst}")
        return "\n".join(lines)


class TransducerBuilder:
    """Incremental construction helper used by the model encoders."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.n_states = 0
        self.arcs: set[tuple[int, int, int, int]] = set()

    def state(self) -> int:
        s = self.n_states
        self.n_states += 1
        return s

    def arc(self, src: int, a: str, b: str, dst: int) -> None:
        self.arcs.add((src, self.alphabet.index(a), self.alphabet.index(b), dst))

    def loop(self, state: int, pairs) -> None:
        for a, b in pairs:
            self.arc(state, a, b, state)

    def copy_loop(self, state: int, tokens) -> None:
        for t in tokens:
            self.arc(state, t, t, state)

    def build(self, initial: int, accepting) -> TransducerNfa:
        return TransducerNfa(self.alphabet, self.n_states, initial,
                             frozenset(accepting), tuple(sorted(self.arcs)))
