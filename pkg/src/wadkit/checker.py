"""Backward-reachability fixpoint over table nodes."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import ops, oracle
from .relations import check_pre_compatibility, pre_compatible, pre_general, PreCompatibilityError
from .table import DiagramTable, TableLimitError

SAFE = "SAFE"
UNSAFE = "UNSAFE"
UNKNOWN_CONTRACTED = "UNKNOWN_CONTRACTED"
LIMIT = "LIMIT"


@dataclass
class CheckOptions:
    max_iterations: int | None = None
    timeout: float | None = None        # seconds, checked between iterations
    engine: str = "general"             # "general" | "compatible"
    trace: bool = False

    def __post_init__(self) -> None:
        if self.max_iterations is not None and self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.engine not in ("general", "compatible"):
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass
class CheckReport:
    verdict: str
    iterations: int
    contractions: int
    node: int
    iteration_sizes: list[int]
    peak_table: int
    millis: float
    trace_nodes: list[int] | None = field(default=None)

    @property
    def contraction_occurred(self) -> bool:
        return self.contractions > 0

    def csv_row(self, instance: str) -> str:
        return (f"{instance},{self.verdict},{self.iterations},"
                f"{self.iteration_sizes[-1]},{self.peak_table},"
                f"{self.contractions},{self.millis:.1f}")


CSV_HEADER = "instance,verdict,iterations,final_nodes,peak_table,contractions,millis"


def backward_reach(table: DiagramTable, transducers, target: int, init_word,
                   *, pad_letters=frozenset(), options: CheckOptions | None = None) -> CheckReport:
    """Iterate predecessors of the target until the init word is covered or a fixpoint holds.

    Every set in the chain is kept closed under inserting and deleting the
    given pad letters, so the unsafe test is a plain membership query on the
    unpadded init encoding.  A verdict of SAFE or UNSAFE is only issued on
    contraction-free runs; once a cycle was contracted the intermediate sets
    are unverified and the run reports UNKNOWN_CONTRACTED.
    """
    opts = options or CheckOptions()
    start = time.monotonic()
    transducers = list(transducers)
    for t in transducers:
        if t.alphabet != table.alphabet:
            raise ValueError("transducer alphabet does not match the table alphabet")
    table.record(target)
    init_word = table.alphabet.word(init_word)
    pads = sorted(pad_letters)

    def closed(node: int) -> int:
        # Keep every set insensitive to pad placement and count.  Without
        # this, sends and token production leave behind ever-growing pad
        # requirements and the chain has no word-level fixpoint.
        for pad in pads:
            node = ops.pad_closure(table, node, pad)
        return node

    relation_nodes = None
    rel_table = None
    if opts.engine == "compatible":
        rel_table = DiagramTable(table.alphabet.product(), max_nodes=table.max_nodes)
        relation_nodes = [oracle.relation_from_transducer(rel_table, t) for t in transducers]

    current = closed(target)
    iterations = 0
    contractions = 0
    sizes = [table.reachable_count(current)]
    trace_nodes = [current] if opts.trace else None
    verdict = None

    def out_of_budget() -> bool:
        if opts.max_iterations is not None and iterations >= opts.max_iterations:
            return True
        if opts.timeout is not None and time.monotonic() - start > opts.timeout:
            return True
        return False

    try:
        while True:
            if table.member_indices(current, init_word):
                verdict = UNSAFE if contractions == 0 else UNKNOWN_CONTRACTED
                break
            if out_of_budget():
                verdict = LIMIT
                break
            nxt = current
            if relation_nodes is None:
                for t in transducers:
                    res = pre_general(table, t, current)
                    if res.contracted:
                        contractions += 1
                    nxt = ops.union(table, nxt, closed(res.node))
            else:
                for p in relation_nodes:
                    compat = check_pre_compatibility(rel_table, p, table, current)
                    if not compat:
                        raise PreCompatibilityError(
                            f"relation is not pre-compatible with the current set: input "
                            f"{compat.letter!r} admits outputs {compat.first!r} and {compat.second!r}"
                        )
                    nxt = ops.union(table, nxt, closed(pre_compatible(rel_table, p, table, current)))
            iterations += 1
            sizes.append(table.reachable_count(nxt))
            if trace_nodes is not None:
                trace_nodes.append(nxt)
            if nxt == current:
                verdict = SAFE if contractions == 0 else UNKNOWN_CONTRACTED
                break
            current = nxt
    except TableLimitError:
        verdict = LIMIT

    millis = (time.monotonic() - start) * 1000.0
    return CheckReport(verdict, iterations, contractions, current, sizes,
                       len(table), millis, trace_nodes)
