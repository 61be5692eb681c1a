"""Explicit-automaton toolkit used as independent ground truth.

Nothing here goes through the diagram algorithms: determinization,
minimization, weak-acyclicity checking, the classical three-step Pre
pipeline and the vector-based coverability check are all computed on
explicit state sets, so they can cross-validate the node-table path.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .alphabet import Alphabet
from .table import SELF, DiagramTable

if TYPE_CHECKING:
    from .models import PetriNet
    from .transducer import TransducerNfa


class NotWeaklyAcyclicError(ValueError):
    def __init__(self, cycle):
        super().__init__(f"automaton has a nontrivial cycle: {' -> '.join(map(str, cycle))}")
        self.cycle = tuple(cycle)


@dataclass(frozen=True)
class ExplicitNfa:
    alphabet: Alphabet
    states: frozenset
    transitions: dict  # (state, letter index) -> frozenset of states
    initial: frozenset
    accepting: frozenset

    def __post_init__(self) -> None:
        m = len(self.alphabet)
        for (s, a), targets in self.transitions.items():
            if s not in self.states or not 0 <= a < m or not targets <= self.states:
                raise ValueError(f"transition ({s}, {a}) -> {set(targets)} references undeclared states or letters")
        if not self.initial <= self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting states must be declared")

    @classmethod
    def from_arcs(cls, alphabet: Alphabet, arcs, initial, accepting, states=()) -> "ExplicitNfa":
        trans: dict = {}
        declared = set(states) | set(initial) | set(accepting)
        for s, tok, t in arcs:
            declared.add(s)
            declared.add(t)
            key = (s, alphabet.index(tok))
            trans.setdefault(key, set()).add(t)
        packed = {k: frozenset(v) for k, v in trans.items()}
        return cls(alphabet, frozenset(declared), packed, frozenset(initial), frozenset(accepting))

    def targets(self, s, a: int) -> frozenset:
        return self.transitions.get((s, a), frozenset())

    def accepts(self, word) -> bool:
        current = set(self.initial)
        for a in self.alphabet.word(word):
            current = {t for s in current for t in self.targets(s, a)}
            if not current:
                return False
        return bool(current & self.accepting)


@dataclass(frozen=True)
class ExplicitDfa:
    """Total deterministic automaton; an explicit sink state keeps it total."""

    alphabet: Alphabet
    states: frozenset
    transitions: dict  # (state, letter index) -> state
    initial: object
    accepting: frozenset

    def __post_init__(self) -> None:
        m = len(self.alphabet)
        for s in self.states:
            for a in range(m):
                if (s, a) not in self.transitions:
                    raise ValueError(f"missing transition for ({s}, {self.alphabet.token(a)})")
        if self.initial not in self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting states must be declared")

    @classmethod
    def from_rows(cls, alphabet: Alphabet, rows: dict, initial, accepting) -> "ExplicitDfa":
        """rows: state -> sequence of successor states in letter order."""
        trans = {}
        for s, row in rows.items():
            for a, t in enumerate(row):
                trans[(s, a)] = t
        return cls(alphabet, frozenset(rows), trans, initial, frozenset(accepting))

    def target(self, s, a: int):
        return self.transitions[(s, a)]

    def accepts(self, word) -> bool:
        s = self.initial
        for a in self.alphabet.word(word):
            s = self.transitions[(s, a)]
        return s in self.accepting


# ----------------------------------------------------------------------
# constructions

def determinize(nfa: ExplicitNfa) -> ExplicitDfa:
    """Accessible powerset construction; the empty subset acts as the sink."""
    m = len(nfa.alphabet)
    start = frozenset(nfa.initial)
    trans = {}
    states = {start}
    todo = [start]
    while todo:
        cur = todo.pop()
        for a in range(m):
            nxt = frozenset(t for s in cur for t in nfa.targets(s, a))
            trans[(cur, a)] = nxt
            if nxt not in states:
                states.add(nxt)
                todo.append(nxt)
    accepting = frozenset(s for s in states if s & nfa.accepting)
    return ExplicitDfa(nfa.alphabet, frozenset(states), trans, start, accepting)


def _trim(dfa: ExplicitDfa) -> ExplicitDfa:
    m = len(dfa.alphabet)
    reach = {dfa.initial}
    todo = [dfa.initial]
    while todo:
        s = todo.pop()
        for a in range(m):
            t = dfa.target(s, a)
            if t not in reach:
                reach.add(t)
                todo.append(t)
    trans = {(s, a): dfa.target(s, a) for s in reach for a in range(m)}
    return ExplicitDfa(dfa.alphabet, frozenset(reach), trans, dfa.initial,
                       dfa.accepting & reach)


def minimize(dfa: ExplicitDfa) -> ExplicitDfa:
    """Unique minimal total DFA, via partition refinement on the reachable part."""
    dfa = _trim(dfa)
    m = len(dfa.alphabet)
    states = sorted(dfa.states, key=repr)
    block = {s: (s in dfa.accepting) for s in states}
    while True:
        signature = {s: (block[s], tuple(block[dfa.target(s, a)] for a in range(m)))
                     for s in states}
        fresh = {}
        renum = {}
        for s in states:
            renum[s] = fresh.setdefault(signature[s], len(fresh))
        if len(fresh) == len(set(block.values())):
            break
        block = renum
    rows = {}
    accepting = set()
    for s in states:
        b = block[s]
        rows[b] = tuple(block[dfa.target(s, a)] for a in range(m))
        if s in dfa.accepting:
            accepting.add(b)
    return ExplicitDfa.from_rows(dfa.alphabet, rows, block[dfa.initial], accepting)


def canonical_form(dfa: ExplicitDfa) -> tuple:
    """Isomorphism-invariant signature of the minimized automaton.

    Two DFAs have equal signatures iff they accept the same language.
    """
    mdfa = minimize(dfa)
    m = len(mdfa.alphabet)
    order = {mdfa.initial: 0}
    queue = [mdfa.initial]
    while queue:
        s = queue.pop(0)
        for a in range(m):
            t = mdfa.target(s, a)
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    rows = tuple(
        tuple(order[mdfa.target(s, a)] for a in range(m))
        for s in sorted(order, key=order.get)
    )
    accepting = tuple(sorted(order[s] for s in mdfa.accepting))
    return (len(order), rows, accepting)


# ----------------------------------------------------------------------
# weak acyclicity

def _edges(aut) -> dict:
    out: dict = {}
    m = len(aut.alphabet)
    if isinstance(aut, ExplicitDfa):
        for s in aut.states:
            out[s] = {aut.target(s, a) for a in range(m)} - {s}
    else:
        for s in aut.states:
            out[s] = {t for a in range(m) for t in aut.targets(s, a)} - {s}
    return out


def find_nontrivial_cycle(aut) -> list | None:
    """Some simple cycle through at least two states, or None."""
    edges = _edges(aut)
    color = {s: 0 for s in edges}  # 0 fresh, 1 on stack, 2 done
    parent: dict = {}
    for root in sorted(edges, key=repr):
        if color[root]:
            continue
        stack = [(root, iter(sorted(edges[root], key=repr)))]
        color[root] = 1
        while stack:
            s, it = stack[-1]
            advanced = False
            for t in it:
                if color[t] == 0:
                    color[t] = 1
                    parent[t] = s
                    stack.append((t, iter(sorted(edges[t], key=repr))))
                    advanced = True
                    break
                if color[t] == 1:
                    cycle = [s]
                    cur = s
                    while cur != t:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    cycle.append(cycle[0])
                    return cycle
            if not advanced:
                color[s] = 2
                stack.pop()
    return None


def is_weakly_acyclic(aut) -> bool:
    """Every strongly connected component is a singleton; for NFAs,
    nondeterminism on a letter is forbidden from states self-looping on it."""
    if isinstance(aut, ExplicitNfa):
        for (s, _a), targets in aut.transitions.items():
            if s in targets and targets != {s}:
                return False
    return find_nontrivial_cycle(aut) is None


# ----------------------------------------------------------------------
# conversions

def wad_from_dfa(table: DiagramTable, dfa: ExplicitDfa) -> int:
    """Canonical node for the language of a weakly acyclic DFA.

    States are processed in reverse topological order (self-loops ignored),
    emitting SELF for self-loops; the table's make() takes care of merging
    language-equal states, so the input need not be minimal.  Inputs whose
    minimal DFA is not weakly acyclic are rejected with a witness cycle.
    """
    if dfa.alphabet != table.alphabet:
        raise ValueError("DFA alphabet does not match the table alphabet")
    dfa = _trim(dfa)
    if not is_weakly_acyclic(dfa):
        dfa = minimize(dfa)
        cycle = find_nontrivial_cycle(dfa)
        if cycle is not None:
            raise NotWeaklyAcyclicError(cycle)
    m = len(dfa.alphabet)
    edges = _edges(dfa)
    # Kahn's algorithm; the graph is a DAG at this point
    indeg = {s: 0 for s in edges}
    for s, targets in edges.items():
        for t in targets:
            indeg[t] += 1
    order = [s for s in sorted(edges, key=repr) if indeg[s] == 0]
    for s in order:
        for t in sorted(edges[s], key=repr):
            indeg[t] -= 1
            if indeg[t] == 0:
                order.append(t)
    node_of = {}
    for s in reversed(order):
        succ = []
        for a in range(m):
            t = dfa.target(s, a)
            succ.append(SELF if t == s else node_of[t])
        node_of[s] = table.make(succ, s in dfa.accepting)
    return node_of[dfa.initial]


def wad_from_nfa(table: DiagramTable, nfa: ExplicitNfa) -> int:
    return wad_from_dfa(table, determinize(nfa))


def dfa_from_wad(table: DiagramTable, q: int) -> ExplicitDfa:
    """Explicit total DFA over the nodes reachable from q."""
    nodes = table.reachable(q)
    m = len(table.alphabet)
    trans = {(n, a): table.step(n, a) for n in nodes for a in range(m)}
    accepting = frozenset(n for n in nodes if table.flag(n))
    return ExplicitDfa(table.alphabet, frozenset(nodes), trans, q, accepting)


def relation_from_transducer(rel_table: DiagramTable, transducer: "TransducerNfa") -> int:
    """Node over the pair alphabet for a transducer's relation.

    Rejects transducers whose relation language is not weakly acyclic.
    """
    if rel_table.alphabet != transducer.alphabet.product():
        raise ValueError("relation table must use the product of the transducer alphabet")
    m = len(transducer.alphabet)
    trans: dict = {}
    for s, a, b, t in transducer.arcs:
        trans.setdefault((s, a * m + b), set()).add(t)
    nfa = ExplicitNfa(
        rel_table.alphabet,
        frozenset(range(transducer.n_states)),
        {k: frozenset(v) for k, v in trans.items()},
        frozenset({transducer.initial}),
        transducer.accepting,
    )
    return wad_from_nfa(rel_table, nfa)


# ----------------------------------------------------------------------
# the classical Pre pipeline

def pre_oracle(transducer: "TransducerNfa", dfa: ExplicitDfa) -> ExplicitDfa:
    """Predecessor language the classical way: product, then determinize, then minimize."""
    if transducer.alphabet != dfa.alphabet:
        raise ValueError("transducer alphabet does not match the DFA alphabet")
    m = len(dfa.alphabet)
    by_input = transducer.arcs_by_input
    arcs = []
    states = {(transducer.initial, dfa.initial)}
    todo = [(transducer.initial, dfa.initial)]
    while todo:
        p, s = todo.pop()
        for a in range(m):
            for b, p2 in by_input.get(p, {}).get(a, ()):
                t = (p2, dfa.target(s, b))
                arcs.append(((p, s), dfa.alphabet.token(a), t))
                if t not in states:
                    states.add(t)
                    todo.append(t)
    accepting = {(p, s) for (p, s) in states
                 if p in transducer.accepting and s in dfa.accepting}
    nfa = ExplicitNfa.from_arcs(dfa.alphabet, arcs,
                                initial={(transducer.initial, dfa.initial)},
                                accepting=accepting, states=states)
    return minimize(determinize(nfa))


# ----------------------------------------------------------------------
# vector-based coverability, fully independent of the diagram machinery

def _minimal_basis(vectors) -> list[tuple[int, ...]]:
    basis: list[tuple[int, ...]] = []
    for v in sorted(set(vectors)):
        if not any(all(b[i] <= v[i] for i in range(len(v))) for b in basis):
            basis = [b for b in basis if not all(v[i] <= b[i] for i in range(len(v)))]
            basis.append(v)
    return basis


def pn_cover_oracle(net: "PetriNet", init, targets) -> bool:
    """Backward coverability on marking vectors with a minimal-basis worklist."""
    init = tuple(init)
    k = len(net.places)
    if len(init) != k or any(len(t) != k for t in targets):
        raise ValueError("marking arity does not match the net")
    pre_post = []
    for t in net.transitions:
        c = tuple(t.consume.get(p, 0) for p in net.places)
        r = tuple(t.produce.get(p, 0) for p in net.places)
        pre_post.append((c, r))

    basis = _minimal_basis(tuple(t) for t in targets)
    todo = list(basis)
    while todo:
        v = todo.pop()
        if all(v[i] <= init[i] for i in range(k)):
            return True
        for c, r in pre_post:
            pred = tuple(max(c[i], v[i] + c[i] - r[i]) for i in range(k))
            if not any(all(b[i] <= pred[i] for i in range(k)) for b in basis):
                basis = [b for b in basis if not all(pred[i] <= b[i] for i in range(k))]
                basis.append(pred)
                todo.append(pred)
    return any(all(b[i] <= init[i] for i in range(k)) for b in basis)


# ----------------------------------------------------------------------
# random weakly acyclic NFAs for property tests

def random_wa_nfa(alphabet: Alphabet, max_states: int, seed) -> ExplicitNfa:
    """Random NFA that is weakly acyclic by construction.

    States are ordered; non-self edges only go upward, and a state that
    self-loops on a letter has no other successor on it.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    n = rng.randint(1, max_states)
    m = len(alphabet)
    trans = {}
    for s in range(n):
        for a in range(m):
            roll = rng.random()
            if roll < 0.25:
                trans[(s, a)] = frozenset({s})
            elif roll < 0.45 or s == n - 1:
                continue
            else:
                targets = frozenset(t for t in range(s + 1, n) if rng.random() < 2.0 / (n - s))
                if targets:
                    trans[(s, a)] = targets
    accepting = frozenset(s for s in range(n) if rng.random() < 0.4) or frozenset({n - 1})
    return ExplicitNfa(alphabet, frozenset(range(n)), trans, frozenset({0}), accepting)
