"""Ordered alphabets, including the pair alphabet used by length-preserving relations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Alphabet:
    """An ordered tuple of distinct letter tokens.

    Letter indices are positions in declaration order.  Words are handled as
    index tuples internally; token <-> index conversion happens at the API
    boundary.
    """

    letters: tuple[str, ...]
    _pos: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("alphabet must have at least one letter")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"alphabet letters must be distinct: {self.letters}")
        object.__setattr__(self, "_pos", {t: i for i, t in enumerate(self.letters)})

    @classmethod
    def of(cls, *letters: str) -> "Alphabet":
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, token: str) -> bool:
        return token in self._pos

    def index(self, token: str) -> int:
        try:
            return self._pos[token]
        except KeyError:
            raise ValueError(f"unknown letter {token!r} (alphabet: {' '.join(self.letters)})") from None

    def token(self, i: int) -> str:
        return self.letters[i]

    def word(self, tokens) -> tuple[int, ...]:
        """Convert an iterable of letter tokens to an index word."""
        return tuple(self.index(t) for t in tokens)

    def tokens(self, indices) -> tuple[str, ...]:
        return tuple(self.letters[i] for i in indices)

    def product(self) -> "Alphabet":
        """The pair alphabet over this alphabet; pair (i, j) sits at index i*m + j."""
        return Alphabet(tuple(f"{x}/{y}" for x in self.letters for y in self.letters))

    def pair_index(self, i: int, j: int) -> int:
        return i * len(self.letters) + j
