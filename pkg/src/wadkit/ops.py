"""Memoized Boolean operations on table nodes.

All operations run on explicit work stacks so that chains as deep as the
table itself cannot overflow the interpreter stack.
"""

from __future__ import annotations

from .table import EMPTY, SELF, UNIVERSAL, DiagramTable


def complement(table: DiagramTable, q: int) -> int:
    """Node accepting the complement of the language of q."""
    table.record(q)
    memo = table.memo

    def resolved(x: int) -> int | None:
        if x == EMPTY:
            return UNIVERSAL
        if x == UNIVERSAL:
            return EMPTY
        return memo.get(("not", x))

    done = resolved(q)
    if done is not None:
        return done

    m = len(table.alphabet)
    stack: list[list] = [[q, [], 0]]
    table.stats["complement_expand"] += 1
    while stack:
        frame = stack[-1]
        node, succ, i = frame
        rec = table.record(node)
        pushed = False
        while i < m:
            t = rec.succ[i]
            if t == SELF:
                succ.append(SELF)
                i += 1
                continue
            r = resolved(t)
            if r is None:
                frame[2] = i
                stack.append([t, [], 0])
                table.stats["complement_expand"] += 1
                pushed = True
                break
            succ.append(r)
            i += 1
        if pushed:
            continue
        memo[("not", node)] = table.make(succ, not rec.flag)
        stack.pop()
    return memo[("not", q)]


def _binop(table: DiagramTable, tag: str, p: int, q: int) -> int:
    table.record(p)
    table.record(q)
    memo = table.memo

    if tag == "and":
        absorbing, identity = EMPTY, UNIVERSAL
    else:
        absorbing, identity = UNIVERSAL, EMPTY

    def resolved(x: int, y: int) -> int | None:
        if x == absorbing or y == absorbing:
            return absorbing
        if x == identity:
            return y
        if y == identity:
            return x
        if x == y:
            return x
        # operations are commutative; normalizing the key doubles hit rate
        return memo.get((tag, x, y) if x <= y else (tag, y, x))

    done = resolved(p, q)
    if done is not None:
        return done

    m = len(table.alphabet)
    stack: list[list] = [[p, q, [], 0]]
    table.stats["binop_expand"] += 1
    while stack:
        frame = stack[-1]
        x, y, succ, i = frame
        rx, ry = table.record(x), table.record(y)
        pushed = False
        while i < m:
            tx, ty = rx.succ[i], ry.succ[i]
            x2 = x if tx == SELF else tx
            y2 = y if ty == SELF else ty
            if x2 == x and y2 == y:
                succ.append(SELF)
                i += 1
                continue
            r = resolved(x2, y2)
            if r is None:
                frame[3] = i
                stack.append([x2, y2, [], 0])
                table.stats["binop_expand"] += 1
                pushed = True
                break
            succ.append(r)
            i += 1
        if pushed:
            continue
        flag = (rx.flag and ry.flag) if tag == "and" else (rx.flag or ry.flag)
        res = table.make(succ, flag)
        memo[(tag, x, y) if x <= y else (tag, y, x)] = res
        stack.pop()
    return resolved(p, q)


def intersect(table: DiagramTable, p: int, q: int) -> int:
    """Node accepting the intersection of the languages of p and q."""
    return _binop(table, "and", p, q)


def union(table: DiagramTable, p: int, q: int) -> int:
    """Node accepting the union of the languages of p and q."""
    return _binop(table, "or", p, q)


def difference(table: DiagramTable, p: int, q: int) -> int:
    """Node accepting the language of p minus the language of q."""
    return intersect(table, p, complement(table, q))


def pad_closure(table: DiagramTable, q: int, pad_token: str) -> int:
    """Smallest superset of the language of q insensitive to one neutral letter.

    The result contains a word iff deleting every occurrence of the pad
    letter yields the pad-stripped projection of some word of q; i.e. it is
    closed under inserting and deleting pads anywhere.  Computed by a subset
    construction that treats pad edges as silent moves; since those edges
    only descend the node order, the construction meets no cycles beyond
    self-loops.
    """
    pad = table.alphabet.index(pad_token)
    table.record(q)
    memo = table.memo
    m = len(table.alphabet)
    records = table._records

    def close(nodes) -> tuple[int, ...]:
        out = set(nodes)
        todo = list(out)
        while todo:
            n = todo.pop()
            t = records[n].succ[pad]
            if t != SELF and t not in out:
                out.add(t)
                todo.append(t)
        out.discard(EMPTY)
        return tuple(sorted(out))

    def step(key, a) -> tuple[int, ...]:
        nxt = set()
        for n in key:
            t = records[n].succ[a]
            nxt.add(n if t == SELF else t)
        return close(nxt)

    root = close((q,))
    done = memo.get(("padclo", pad, root))
    if done is not None:
        return done

    on_path = {root}
    stack: list[list] = [[root, [], 0]]
    while stack:
        frame = stack[-1]
        key, succ, i = frame
        pushed = False
        while i < m:
            if i == pad:
                succ.append(SELF)
                i += 1
                continue
            nxt = step(key, i)
            if nxt == key:
                succ.append(SELF)
                i += 1
                continue
            hit = memo.get(("padclo", pad, nxt))
            if hit is None:
                if nxt in on_path:
                    raise AssertionError("pad closure met a nontrivial cycle")
                frame[2] = i
                on_path.add(nxt)
                stack.append([nxt, [], 0])
                pushed = True
                break
            succ.append(hit)
            i += 1
        if pushed:
            continue
        node = table.make(succ, any(records[n].flag for n in key))
        memo[("padclo", pad, key)] = node
        on_path.discard(key)
        stack.pop()
        if stack:
            parent = stack[-1]
            parent[1].append(node)
            parent[2] += 1
    return memo[("padclo", pad, root)]
