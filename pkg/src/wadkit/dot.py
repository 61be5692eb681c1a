"""Graphviz export of table fragments."""

from __future__ import annotations

from .table import SELF, DiagramTable


def to_dot(table: DiagramTable, roots=None, name: str = "wad") -> str:
    """One digraph; accepting nodes double-circled, self-loops drawn explicitly.

    Output is deterministic: nodes ascend by id and edge labels group the
    letters leading to a common successor in alphabet order.
    """
    if roots is None:
        nodes = list(range(len(table)))
    else:
        nodes = sorted({n for r in roots for n in table.reachable(r)})
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle];']
    for n in nodes:
        rec = table.record(n)
        shape = "doublecircle" if rec.flag else "circle"
        lines.append(f'  n{n} [label="{n}", shape={shape}];')
    for n in nodes:
        rec = table.record(n)
        grouped: dict[int, list[str]] = {}
        for a, t in enumerate(rec.succ):
            grouped.setdefault(n if t == SELF else t, []).append(table.alphabet.token(a))
        for t in sorted(grouped):
            label = ",".join(grouped[t])
            lines.append(f'  n{n} -> n{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
