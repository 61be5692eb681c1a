"""System models checked by backward reachability, with their step semantics.

The step functions here are the reference semantics used to validate the
encoded transducers; the encoders must not call them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .expr import WaExpression

LCS_DELIM = "#"
LCS_PAD = "X"
PN_TOKEN = "•"   # •
PN_DELIM = "#"
PN_PAD = "◦"     # ◦


# ----------------------------------------------------------------------
# lossy channel systems

@dataclass(frozen=True)
class LcsRule:
    src: str
    dst: str
    kind: str                 # "recv" | "send" | "nop"
    channel: int | None = None  # 1-based
    message: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("recv", "send", "nop"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "nop" and (self.channel is not None or self.message is not None):
            raise ValueError("nop rules take no channel or message")
        if self.kind != "nop" and (self.channel is None or self.message is None):
            raise ValueError(f"{self.kind} rules need a channel and a message")


@dataclass(frozen=True)
class LcsModel:
    states: tuple[str, ...]
    messages: tuple[str, ...]
    channels: int
    rules: tuple[LcsRule, ...]

    def __post_init__(self) -> None:
        if self.channels < 1:
            raise ValueError("at least one channel required")
        seen = set(self.states) | set(self.messages)
        if len(seen) != len(self.states) + len(self.messages):
            raise ValueError("states and messages must be distinct tokens")
        for reserved in (LCS_DELIM, LCS_PAD):
            if reserved in seen:
                raise ValueError(f"token {reserved!r} is reserved by the encoding")
        for r in self.rules:
            if r.src not in self.states or r.dst not in self.states:
                raise ValueError(f"rule references undeclared state: {r}")
            if r.kind != "nop":
                if not 1 <= r.channel <= self.channels:
                    raise ValueError(f"rule references channel {r.channel} of {self.channels}")
                if r.message not in self.messages:
                    raise ValueError(f"rule references undeclared message: {r}")


@dataclass(frozen=True)
class LcsConfig:
    states: tuple[str, ...]
    channels: tuple[tuple[str, ...], ...]


def lcs_successors(model: LcsModel, config: LcsConfig) -> Iterator[tuple[LcsRule, LcsConfig]]:
    """One-step successors under the semi-lossy semantics.

    A receive consumes the first occurrence of its message and drops
    everything in front of it; sends and nops are loss-free.
    """
    for rule in model.rules:
        for i, state in enumerate(config.states):
            if state != rule.src:
                continue
            states = config.states[:i] + (rule.dst,) + config.states[i + 1:]
            if rule.kind == "nop":
                yield rule, LcsConfig(states, config.channels)
            elif rule.kind == "send":
                ch = list(config.channels)
                ch[rule.channel - 1] = ch[rule.channel - 1] + (rule.message,)
                yield rule, LcsConfig(states, tuple(ch))
            else:
                content = config.channels[rule.channel - 1]
                if rule.message in content:
                    rest = content[content.index(rule.message) + 1:]
                    ch = list(config.channels)
                    ch[rule.channel - 1] = rest
                    yield rule, LcsConfig(states, tuple(ch))


# ----------------------------------------------------------------------
# Petri nets

@dataclass(frozen=True)
class PnTransition:
    name: str
    consume: dict  # place -> multiplicity; missing places default to 0
    produce: dict

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.consume.items())),
                     tuple(sorted(self.produce.items()))))


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[PnTransition, ...]

    def __post_init__(self) -> None:
        if len(set(self.places)) != len(self.places):
            raise ValueError("duplicate place names")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise ValueError("duplicate transition names")
        for t in self.transitions:
            for p in list(t.consume) + list(t.produce):
                if p not in self.places:
                    raise ValueError(f"transition {t.name} references undeclared place {p!r}")


Marking = tuple[int, ...]


def pn_enabled(net: PetriNet, t: PnTransition, marking: Marking) -> bool:
    return all(marking[i] >= t.consume.get(p, 0) for i, p in enumerate(net.places))


def pn_fire(net: PetriNet, t: PnTransition, marking: Marking) -> Marking:
    return tuple(marking[i] - t.consume.get(p, 0) + t.produce.get(p, 0)
                 for i, p in enumerate(net.places))


def pn_successors(net: PetriNet, marking: Marking) -> Iterator[tuple[PnTransition, Marking]]:
    for t in net.transitions:
        if pn_enabled(net, t, marking):
            yield t, pn_fire(net, t, marking)


# ----------------------------------------------------------------------
# broadcast protocols

@dataclass(frozen=True)
class BpAction:
    kind: str    # "local" | "rendezvous" | "broadcast"
    letter: str
    sends: tuple[tuple[str, str], ...]           # (src, dst) edges
    recvs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("local", "rendezvous", "broadcast"):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if not self.sends:
            raise ValueError(f"action {self.letter!r} has no sender edge")
        if self.kind == "local" and self.recvs:
            raise ValueError("local actions have no receive edges")
        if self.kind == "rendezvous" and not self.recvs:
            raise ValueError(f"rendezvous {self.letter!r} needs a receive edge")


@dataclass(frozen=True)
class BroadcastProtocol:
    states: tuple[str, ...]
    actions: tuple[BpAction, ...]

    def __post_init__(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        letters = [a.letter for a in self.actions]
        if len(set(letters)) != len(letters):
            raise ValueError("action letters must be distinct across the three kinds")
        for act in self.actions:
            for src, dst in act.sends + act.recvs:
                if src not in self.states or dst not in self.states:
                    raise ValueError(f"action {act.letter!r} references undeclared states")


BpConfig = tuple[str, ...]


def bp_successors(protocol: BroadcastProtocol, config: BpConfig) -> Iterator[tuple[BpAction, BpConfig]]:
    n = len(config)
    for act in protocol.actions:
        if act.kind == "local":
            for src, dst in act.sends:
                for i in range(n):
                    if config[i] == src:
                        yield act, config[:i] + (dst,) + config[i + 1:]
        elif act.kind == "rendezvous":
            for ssrc, sdst in act.sends:
                for rsrc, rdst in act.recvs:
                    for i in range(n):
                        if config[i] != ssrc:
                            continue
                        for j in range(n):
                            if i == j:
                                continue
                            if config[j] == rsrc:
                                out = list(config)
                                out[i] = sdst
                                out[j] = rdst
                                yield act, tuple(out)
        else:
            recv_of: dict[str, list[str]] = {}
            for rsrc, rdst in act.recvs:
                recv_of.setdefault(rsrc, []).append(rdst)
            for ssrc, sdst in act.sends:
                for i in range(n):
                    if config[i] != ssrc:
                        continue
                    choices = []
                    for j in range(n):
                        if j == i:
                            choices.append([sdst])
                        else:
                            choices.append(recv_of.get(config[j], [config[j]]))
                    for combo in product(*choices):
                        yield act, tuple(combo)


# ----------------------------------------------------------------------

SystemModel = LcsModel | PetriNet | BroadcastProtocol


@dataclass(frozen=True)
class SafetyQuery:
    """Initial configuration and one or more targets.

    A target is either a basis configuration (interpreted through the
    model's upward closure) or a weakly acyclic expression over the
    encoding alphabet.
    """

    initial: object
    targets: tuple[object, ...]

    def __post_init__(self) -> None:
        if not self.targets:
            raise ValueError("at least one target required")

    def expression_targets(self):
        return [t for t in self.targets if isinstance(t, WaExpression)]

    def basis_targets(self):
        return [t for t in self.targets if not isinstance(t, WaExpression)]
