"""Weakly acyclic diagrams: canonical representations of weakly acyclic
languages with Boolean operations, fixed-length-relation predecessors, and a
backward-reachability safety checker for channel systems, Petri nets and
broadcast protocols."""

from .alphabet import Alphabet
from .checker import CheckOptions, CheckReport, backward_reach
from .ops import complement, difference, intersect, union
from .relations import (
    PreResult,
    check_pre_compatibility,
    post_general,
    pre_compatible,
    pre_general,
    transpose_transducer,
)
from .table import EMPTY, SELF, UNIVERSAL, DiagramTable, NodeRecord, TableLimitError
from .transducer import TransducerNfa

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "CheckOptions",
    "CheckReport",
    "DiagramTable",
    "EMPTY",
    "NodeRecord",
    "PreResult",
    "SELF",
    "TableLimitError",
    "TransducerNfa",
    "UNIVERSAL",
    "backward_reach",
    "check_pre_compatibility",
    "complement",
    "difference",
    "intersect",
    "post_general",
    "pre_compatible",
    "pre_general",
    "transpose_transducer",
    "union",
]
