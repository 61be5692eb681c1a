"""Predecessor and successor operations for fixed-length relations on table nodes.

Two engines are provided: a general one that runs a powerset construction
over (transducer state, node) pairs and contracts cycles on the fly, and a
polynomial one that applies when the relation diagram and the operand node
are pre-compatible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .table import EMPTY, SELF, DiagramTable
from .transducer import TransducerNfa

SubsetKey = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PreResult:
    """Outcome of a general Pre/Post computation.

    `contracted` reports whether a proper cycle (a subset re-encountered on
    the active call path, other than an immediate self-loop) was replaced by
    a SELF edge.  When it is true the result is exact only if the target
    language happens to be weakly acyclic; callers must treat the node as
    unverified otherwise.
    """

    node: int
    contracted: bool
    keys_visited: int
    edges: tuple[tuple[SubsetKey, int, SubsetKey], ...] | None = None
    key_nodes: dict[SubsetKey, int] | None = None


def _check_alphabet(table: DiagramTable, transducer: TransducerNfa) -> None:
    if transducer.alphabet != table.alphabet:
        raise ValueError("transducer alphabet does not match the table alphabet")


def pre_general(table: DiagramTable, transducer: TransducerNfa, q: int,
                *, trace: bool = False) -> PreResult:
    """Node for the predecessors of the language of q under the relation.

    Depth-first subset construction over (transducer state, node) pairs.
    Keys on the active call path are marked; stepping back onto a marked key
    emits a SELF edge.  Results are memoized per (transducer, key), but only
    for keys whose whole subtree completed without touching a marked
    ancestor, since a contracted SELF edge is only meaningful relative to
    the path it was found on.
    """
    _check_alphabet(table, transducer)
    table.record(q)
    m = len(table.alphabet)
    by_input = transducer.arcs_by_input
    accepting = transducer.accepting
    live = transducer.coaccessible
    # keys only ever hold residuals of q, so this snapshot stays sufficient
    # even though make() appends nodes during the run
    records = [table.record(i) for i in range(len(table))]
    memo = table.memo

    def step(key: SubsetKey, a: int) -> SubsetKey:
        # pairs with an empty node or a dead transducer state denote the
        # empty language; dropping them changes no subset's language or flag
        # but avoids cycles through dead weight
        out = set()
        for p, node in key:
            rows = by_input.get(p)
            if not rows:
                continue
            for b, p2 in rows.get(a, ()):
                t = records[node].succ[b]
                t = node if t == SELF else t
                if t != EMPTY and p2 in live:
                    out.add((p2, t))
        return tuple(sorted(out))

    def key_flag(key: SubsetKey) -> bool:
        return any(p in accepting and records[node].flag for p, node in key)

    root: SubsetKey = ((transducer.initial, q),)
    if q == EMPTY or transducer.initial not in live:
        root = ()
    contracted = False
    expanded: set[SubsetKey] = set()
    edges: list[tuple[SubsetKey, int, SubsetKey]] = [] if trace else None
    key_nodes: dict[SubsetKey, int] = {} if trace else None

    done = memo.get(("pre", transducer.uid, root))
    if done is not None and not trace:
        return PreResult(done, False, 0)

    on_path: set[SubsetKey] = {root}
    # frame: [key, successor entries, next letter, clean flag]
    stack: list[list] = [[root, [], 0, True]]
    expanded.add(root)
    table.stats["pre_general_expand"] += 1
    result = None
    while stack:
        frame = stack[-1]
        key, succ, i = frame[0], frame[1], frame[2]
        pushed = False
        while i < m:
            nxt = step(key, i)
            if edges is not None:
                edges.append((key, i, nxt))
            if nxt == key:
                succ.append(SELF)
            elif nxt in on_path:
                # Contract detected cycle: exact only for weakly acyclic targets.
                succ.append(SELF)
                contracted = True
                frame[3] = False
            else:
                hit = memo.get(("pre", transducer.uid, nxt))
                if hit is None:
                    frame[2] = i
                    on_path.add(nxt)
                    stack.append([nxt, [], 0, True])
                    if nxt not in expanded:
                        expanded.add(nxt)
                        table.stats["pre_general_expand"] += 1
                    pushed = True
                    break
                succ.append(hit)
            i += 1
        if pushed:
            continue
        node = table.make(succ, key_flag(key))
        if frame[3]:
            memo[("pre", transducer.uid, key)] = node
        if key_nodes is not None:
            key_nodes[key] = node
        on_path.discard(key)
        stack.pop()
        if stack:
            parent = stack[-1]
            parent[1].append(node)
            parent[2] += 1
            parent[3] = parent[3] and frame[3]
        else:
            result = node
    return PreResult(result, contracted, len(expanded),
                     tuple(edges) if edges is not None else None, key_nodes)


def post_general(table: DiagramTable, transducer: TransducerNfa, q: int,
                 *, trace: bool = False) -> PreResult:
    """Node for the successors of the language of q: Pre over the transposed relation."""
    return pre_general(table, transducer.transpose(), q, trace=trace)


def transpose_transducer(transducer: TransducerNfa) -> TransducerNfa:
    return transducer.transpose()


# ----------------------------------------------------------------------
# pre-compatibility and the polynomial engine

class PreCompatibilityError(ValueError):
    """The uniqueness assumption of the polynomial engine is violated."""


@dataclass(frozen=True)
class Compatibility:
    ok: bool
    letter: str | None = None
    first: str | None = None
    second: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _viable(rel_table: DiagramTable, p: int, table: DiagramTable, q: int, a: int):
    """Output letters b with nonempty relation residual (a,b) and nonempty node residual b."""
    m = len(table.alphabet)
    out = []
    for b in range(m):
        p2 = rel_table.step(p, a * m + b)
        q2 = table.step(q, b)
        if p2 != EMPTY and q2 != EMPTY:
            out.append((b, p2, q2))
    return out


def check_pre_compatibility(rel_table: DiagramTable, p: int,
                            table: DiagramTable, q: int) -> Compatibility:
    """Whether every simultaneously reachable residual pair admits at most one viable output letter.

    On failure reports the offending input letter and the two viable output
    letters witnessing the violation.
    """
    m = len(table.alphabet)
    if len(rel_table.alphabet) != m * m:
        raise ValueError("relation node must live in a table over the pair alphabet")
    rel_table.record(p)
    table.record(q)
    memo = table.memo
    if memo.get(("compat", rel_table.uid, p, q)):
        return Compatibility(True)

    seen = set()
    todo = [(p, q)]
    while todo:
        x, y = todo.pop()
        if (x, y) in seen or memo.get(("compat", rel_table.uid, x, y)):
            continue
        seen.add((x, y))
        if x == EMPTY or y == EMPTY:
            continue
        for a in range(m):
            viable = _viable(rel_table, x, table, y, a)
            if len(viable) > 1:
                return Compatibility(False, table.alphabet.token(a),
                                     table.alphabet.token(viable[0][0]),
                                     table.alphabet.token(viable[1][0]))
            if viable:
                _, x2, y2 = viable[0]
                todo.append((x2, y2))
    for pair in seen:
        memo[("compat", rel_table.uid, *pair)] = True
    return Compatibility(True)


def pre_compatible(rel_table: DiagramTable, p: int,
                   table: DiagramTable, q: int) -> int:
    """Predecessor node under a pre-compatible relation diagram; polynomial time.

    Deterministic descent: for each input letter there is at most one viable
    output letter, so no subsets and no contraction arise.  Raises
    PreCompatibilityError if the uniqueness assumption fails mid-recursion.
    """
    m = len(table.alphabet)
    if len(rel_table.alphabet) != m * m:
        raise ValueError("relation node must live in a table over the pair alphabet")
    rel_table.record(p)
    table.record(q)
    memo = table.memo

    def resolved(x: int, y: int) -> int | None:
        return memo.get(("prec", rel_table.uid, x, y))

    done = resolved(p, q)
    if done is not None:
        return done

    stack: list[list] = [[p, q, [], 0]]
    table.stats["pre_compatible_expand"] += 1
    while stack:
        frame = stack[-1]
        x, y, succ, i = frame
        pushed = False
        while i < m:
            viable = _viable(rel_table, x, table, y, i)
            if len(viable) > 1:
                raise PreCompatibilityError(
                    f"input letter {table.alphabet.token(i)!r} admits output letters "
                    f"{table.alphabet.token(viable[0][0])!r} and {table.alphabet.token(viable[1][0])!r}"
                )
            if not viable:
                succ.append(EMPTY)
                i += 1
                continue
            _, x2, y2 = viable[0]
            if x2 == x and y2 == y:
                succ.append(SELF)
                i += 1
                continue
            r = resolved(x2, y2)
            if r is None:
                frame[3] = i
                stack.append([x2, y2, [], 0])
                table.stats["pre_compatible_expand"] += 1
                pushed = True
                break
            succ.append(r)
            i += 1
        if pushed:
            continue
        res = table.make(succ, rel_table.flag(x) and table.flag(y))
        memo[("prec", rel_table.uid, x, y)] = res
        stack.pop()
    return memo[("prec", rel_table.uid, p, q)]


def transducer_from_relation(rel_table: DiagramTable, p: int,
                             base: DiagramTable) -> TransducerNfa:
    """Explicit transducer view of a relation diagram node.

    States are the node ids reachable from p in the relation table; useful
    for cross-checking the two Pre engines.
    """
    m = len(base.alphabet)
    if len(rel_table.alphabet) != m * m:
        raise ValueError("relation node must live in a table over the pair alphabet")
    nodes = rel_table.reachable(p)
    state_of = {n: i for i, n in enumerate(nodes)}
    arcs = []
    for n in nodes:
        for a in range(m):
            for b in range(m):
                t = rel_table.step(n, a * m + b)
                arcs.append((state_of[n], a, b, state_of[t]))
    accepting = frozenset(state_of[n] for n in nodes if rel_table.flag(n))
    return TransducerNfa(base.alphabet, len(nodes), state_of[p], accepting, tuple(sorted(arcs)))
