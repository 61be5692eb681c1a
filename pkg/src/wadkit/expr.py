"""Weakly acyclic expressions: AST, concrete syntax, compilation into table nodes.

Grammar (whitespace-separated tokens, letters may be multi-character):

    expr ::= term ('+' term)*
    term ::= '0'
           | '[' letter* ']*'                       loop set, possibly empty
           | '[' letter* ']*' letter tail           loop set, step letter, rest
    tail ::= term | '(' expr ')'

The step letter of a chain must not occur in its loop set.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from . import ops
from .alphabet import Alphabet
from .table import EMPTY, SELF, DiagramTable


class ExprSyntaxError(ValueError):
    """Malformed expression text; `position` is a character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class SideConditionError(ExprSyntaxError):
    """The step letter of a chain occurs in its own loop set."""


class WaExpression:
    """Base class for expression AST nodes."""

    def letters(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Empty(WaExpression):
    def letters(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class Star(WaExpression):
    loops: frozenset[str]

    def letters(self) -> frozenset[str]:
        return self.loops


@dataclass(frozen=True)
class Chain(WaExpression):
    loops: frozenset[str]
    letter: str
    rest: WaExpression

    def __post_init__(self) -> None:
        if self.letter in self.loops:
            raise ValueError(f"chain letter {self.letter!r} occurs in its loop set")

    def letters(self) -> frozenset[str]:
        return self.loops | {self.letter} | self.rest.letters()


@dataclass(frozen=True)
class Union(WaExpression):
    left: WaExpression
    right: WaExpression

    def letters(self) -> frozenset[str]:
        return self.left.letters() | self.right.letters()


# ----------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(\[|\]\*|\(|\)|\+|[^\s\[\]()+]+)")


def _lex(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(f"cannot read {stripped[:10]!r}", len(text) - len(stripped))
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self) -> tuple[str, int]:
        if self.i >= len(self.toks):
            raise ExprSyntaxError("unexpected end of expression", len(self.text))
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, token: str) -> None:
        got, pos = self.take()
        if got != token:
            raise ExprSyntaxError(f"expected {token!r}, found {got!r}", pos)

    def letter(self) -> str:
        tok, pos = self.take()
        if tok in ("[", "]*", "(", ")", "+"):
            raise ExprSyntaxError(f"expected a letter, found {tok!r}", pos)
        if tok not in self.alphabet:
            raise ExprSyntaxError(f"letter {tok!r} is not in the alphabet", pos)
        return tok

    def expr(self) -> WaExpression:
        e = self.term()
        while self.peek() == "+":
            self.take()
            e = Union(e, self.term())
        return e

    def term(self) -> WaExpression:
        tok = self.peek()
        if tok == "0":
            self.take()
            return Empty()
        if tok != "[":
            raise ExprSyntaxError(f"expected a term, found {tok!r}", self.pos())
        self.take()
        loops = []
        while self.peek() != "]*":
            loops.append(self.letter())
        self.take()
        nxt = self.peek()
        if nxt is None or nxt in ("+", ")"):
            return Star(frozenset(loops))
        letter_pos = self.pos()
        a = self.letter()
        if a in loops:
            raise SideConditionError(f"chain letter {a!r} occurs in its loop set", letter_pos)
        if self.peek() == "(":
            self.take()
            rest = self.expr()
            self.expect(")")
        else:
            rest = self.term()
        return Chain(frozenset(loops), a, rest)


def parse_expr(text: str, alphabet: Alphabet) -> WaExpression:
    """Parse concrete syntax into an AST, validating letters against `alphabet`."""
    p = _Parser(text, alphabet)
    e = p.expr()
    if p.peek() is not None:
        raise ExprSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    return e


def format_expr(e: WaExpression) -> str:
    """Concrete syntax for an AST; parse(format(e)) reproduces e."""
    if isinstance(e, Empty):
        return "0"
    if isinstance(e, Star):
        return f"[{' '.join(sorted(e.loops))}]*"
    if isinstance(e, Chain):
        tail = format_expr(e.rest)
        if isinstance(e.rest, Union):
            tail = f"( {tail} )"
        return f"[{' '.join(sorted(e.loops))}]* {e.letter} {tail}"
    if isinstance(e, Union):
        return f"{format_expr(e.left)} + {format_expr(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


# ----------------------------------------------------------------------
# compilation

def compile_expr(table: DiagramTable, e: WaExpression) -> int:
    """Compile an expression into the canonical node for its language."""
    alpha = table.alphabet
    unknown = e.letters() - set(alpha.letters)
    if unknown:
        raise ValueError(f"expression letters {sorted(unknown)} are not in the alphabet")

    def build(node: WaExpression) -> int:
        if isinstance(node, Empty):
            return EMPTY
        if isinstance(node, Star):
            succ = [SELF if tok in node.loops else EMPTY for tok in alpha]
            return table.make(succ, True)
        if isinstance(node, Chain):
            rest = build(node.rest)
            succ = [
                SELF if tok in node.loops else rest if tok == node.letter else EMPTY
                for tok in alpha
            ]
            return table.make(succ, False)
        if isinstance(node, Union):
            return ops.union(table, build(node.left), build(node.right))
        raise TypeError(f"not an expression: {node!r}")

    return build(e)


def holds(e: WaExpression, word: tuple[str, ...]) -> bool:
    """Direct AST-level membership test, independent of table compilation."""
    if isinstance(e, Empty):
        return False
    if isinstance(e, Star):
        return all(t in e.loops for t in word)
    if isinstance(e, Chain):
        for i, t in enumerate(word):
            if t == e.letter:
                if holds(e.rest, word[i + 1:]):
                    return True
            if t not in e.loops:
                return False
        return False
    if isinstance(e, Union):
        return holds(e.left, word) or holds(e.right, word)
    raise TypeError(f"not an expression: {e!r}")


# ----------------------------------------------------------------------
# random generation for property tests

def random_expr(alphabet: Alphabet, depth: int, seed) -> WaExpression:
    """Deterministic grammar-directed random expression of at most the given depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    letters = list(alphabet.letters)

    def subset(pool) -> frozenset[str]:
        return frozenset(t for t in pool if rng.random() < 0.5)

    def gen(d: int) -> WaExpression:
        kinds = ["empty", "star"] if d == 0 else ["empty", "star", "chain", "chain", "union", "union"]
        kind = rng.choice(kinds)
        if kind == "empty":
            return Empty()
        if kind == "star":
            return Star(subset(letters))
        if kind == "chain":
            a = rng.choice(letters)
            loops = subset([t for t in letters if t != a])
            return Chain(loops, a, gen(d - 1))
        return Union(gen(d - 1), gen(d - 1))

    return gen(depth)
