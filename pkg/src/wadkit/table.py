"""Hash-consed node table for weakly acyclic languages.

Every node denotes a weakly acyclic language through its successor tuple and
acceptance flag; the table guarantees that distinct node ids always denote
distinct languages, which makes emptiness, universality and language equality
plain integer comparisons.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import count
from typing import Final, Iterable, Sequence

from .alphabet import Alphabet

# Successor-tuple marker for "this letter loops back to the node itself".
SELF: Final = -1

# Pre-seeded node ids for the empty and the universal language.
EMPTY: Final = 0
UNIVERSAL: Final = 1

_table_uids = count()


class TableLimitError(RuntimeError):
    """Raised by make() when the configured node cap would be exceeded."""


@dataclass(frozen=True)
class NodeRecord:
    id: int
    succ: tuple[int, ...]
    flag: bool


class DiagramTable:
    """Append-only table of canonical nodes over a fixed alphabet.

    A table together with its memo caches is a single-threaded session
    object; run independent workloads on independent tables.
    """

    def __init__(self, alphabet: Alphabet, max_nodes: int | None = None):
        self.alphabet = alphabet
        self.uid = next(_table_uids)
        self.max_nodes = max_nodes
        m = len(alphabet)
        all_self = (SELF,) * m
        self._records: list[NodeRecord] = [
            NodeRecord(EMPTY, all_self, False),
            NodeRecord(UNIVERSAL, all_self, True),
        ]
        self._index: dict[tuple[tuple[int, ...], bool], int] = {
            (all_self, False): EMPTY,
            (all_self, True): UNIVERSAL,
        }
        # Shared memo for language operations; never invalidated, since the
        # language of an id never changes in an append-only table.
        self.memo: dict[tuple, int] = {}
        self.stats: Counter = Counter()

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def record(self, q: int) -> NodeRecord:
        if not 0 <= q < len(self._records):
            raise ValueError(f"unknown node id {q}")
        return self._records[q]

    def flag(self, q: int) -> bool:
        return self._records[q].flag

    def step(self, q: int, a: int) -> int:
        """Successor of q on letter index a, with SELF resolved to q."""
        t = self._records[q].succ[a]
        return q if t == SELF else t

    # ------------------------------------------------------------------
    # node creation

    def make(self, succ: Sequence[int], flag: bool) -> int:
        """Return the unique node id whose language is determined by (succ, flag).

        Creates at most one fresh record.  The one existing node that could
        share the language of the candidate record is the maximal id in succ
        after substituting it by SELF; a hit on any *other* node would denote
        a different language, so only that exact node is accepted.
        """
        succ = tuple(succ)
        n = len(self._records)
        if len(succ) != len(self.alphabet):
            raise ValueError(f"successor tuple has {len(succ)} entries, alphabet has {len(self.alphabet)}")
        for t in succ:
            if t != SELF and not 0 <= t < n:
                raise ValueError(f"dangling successor id {t} (table has {n} nodes)")
        flag = bool(flag)
        self.stats["make"] += 1

        hit = self._index.get((succ, flag))
        if hit is not None:
            return hit

        # Nodes 0 and 1 are pre-seeded, so an all-SELF tuple was caught above
        # and the max below is over a non-empty set.
        qmax = max(t for t in succ if t != SELF)
        reduced = tuple(SELF if t == qmax else t for t in succ)
        prior = self._records[qmax]
        if prior.succ == reduced and prior.flag == flag:
            return qmax

        if self.max_nodes is not None and n >= self.max_nodes:
            raise TableLimitError(f"node cap {self.max_nodes} reached")
        rec = NodeRecord(n, succ, flag)
        self._records.append(rec)
        self._index[(succ, flag)] = n
        self.stats["node"] += 1
        return n

    # ------------------------------------------------------------------
    # language queries

    def member(self, q: int, word: Iterable[str]) -> bool:
        return self.member_indices(q, self.alphabet.word(word))

    def member_indices(self, q: int, word: Sequence[int]) -> bool:
        self.record(q)
        cur = q
        for a in word:
            cur = self.step(cur, a)
        return self._records[cur].flag

    def enumerate_words(self, q: int, maxlen: int) -> set[tuple[str, ...]]:
        """All words of length <= maxlen in the language of q, as token tuples."""
        if maxlen < 0:
            raise ValueError("maxlen must be >= 0")
        self.record(q)
        cache: dict[tuple[int, int], frozenset] = {}

        def words(node: int, budget: int) -> frozenset:
            key = (node, budget)
            got = cache.get(key)
            if got is not None:
                return got
            out = {()} if self._records[node].flag else set()
            if budget > 0:
                for a in range(len(self.alphabet)):
                    for rest in words(self.step(node, a), budget - 1):
                        out.add((a, *rest))
            res = frozenset(out)
            cache[key] = res
            return res

        return {self.alphabet.tokens(w) for w in words(q, maxlen)}

    def reachable(self, q: int) -> list[int]:
        """Node ids reachable from q via non-SELF successors, q included."""
        self.record(q)
        seen = {q}
        todo = [q]
        while todo:
            x = todo.pop()
            for t in self._records[x].succ:
                if t != SELF and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return sorted(seen)

    def reachable_count(self, q: int) -> int:
        return len(self.reachable(q))

    # Constant-time decisions: canonicity reduces them to id comparisons.
    def is_empty(self, q: int) -> bool:
        return q == EMPTY

    def is_universal(self, q: int) -> bool:
        return q == UNIVERSAL

    def same_language(self, p: int, q: int) -> bool:
        return p == q

    # ------------------------------------------------------------------

    def check_integrity(self) -> None:
        """Assert structural invariants: acyclicity by construction and record uniqueness."""
        seen = set()
        for rec in self._records:
            for t in rec.succ:
                assert t == SELF or 0 <= t < rec.id, f"node {rec.id} references {t}"
            key = (rec.succ, rec.flag)
            assert key not in seen, f"duplicate record {key}"
            seen.add(key)
        all_self = (SELF,) * len(self.alphabet)
        assert self._records[EMPTY].succ == all_self and not self._records[EMPTY].flag
        assert self._records[UNIVERSAL].succ == all_self and self._records[UNIVERSAL].flag
        for rec in self._records[2:]:
            assert rec.succ != all_self, f"node {rec.id} duplicates a sink"
