"""Encode system models into words, upward-closed nodes, and one transducer per transition.

Pad letters (X for channels, ◦ for token counts) make the length-preserving
transducers able to model insertion and deletion.  Every segment language
and every transducer is closed under pads, so no per-step padding pass
exists; membership questions about concrete configurations go through
pad-insensitive nodes built by `pad_closed_word_node`.
"""

from __future__ import annotations

from .alphabet import Alphabet
from .expr import Chain, Star, WaExpression, compile_expr
from .models import (
    LCS_DELIM,
    LCS_PAD,
    PN_DELIM,
    PN_PAD,
    PN_TOKEN,
    BpConfig,
    BroadcastProtocol,
    LcsConfig,
    LcsModel,
    Marking,
    PetriNet,
    SystemModel,
)
from .table import DiagramTable
from .transducer import TransducerBuilder, TransducerNfa


# ----------------------------------------------------------------------
# alphabets

def encoding_alphabet(model: SystemModel) -> Alphabet:
    if isinstance(model, LcsModel):
        return Alphabet(model.states + model.messages + (LCS_DELIM, LCS_PAD))
    if isinstance(model, PetriNet):
        return Alphabet((PN_TOKEN, PN_DELIM, PN_PAD))
    if isinstance(model, BroadcastProtocol):
        return Alphabet(model.states)
    raise TypeError(f"not a system model: {model!r}")


def pad_letters(model: SystemModel) -> frozenset[str]:
    if isinstance(model, LcsModel):
        return frozenset({LCS_PAD})
    if isinstance(model, PetriNet):
        return frozenset({PN_PAD})
    return frozenset()


# ----------------------------------------------------------------------
# configuration words

def encode_config_word(model: SystemModel, config) -> tuple[str, ...]:
    """Exact encoding of a configuration, without pads."""
    if isinstance(model, LcsModel):
        _check_lcs_config(model, config)
        word = list(config.states) + [LCS_DELIM]
        for content in config.channels:
            word.extend(content)
            word.append(LCS_DELIM)
        return tuple(word)
    if isinstance(model, PetriNet):
        _check_marking(model, config)
        word = []
        for n in config:
            word.extend([PN_TOKEN] * n)
            word.append(PN_DELIM)
        return tuple(word)
    if isinstance(model, BroadcastProtocol):
        _check_bp_config(model, config)
        return tuple(config)
    raise TypeError(f"not a system model: {model!r}")


def _check_lcs_config(model: LcsModel, config: LcsConfig) -> None:
    if not config.states or any(s not in model.states for s in config.states):
        raise ValueError(f"bad process states {config.states!r}")
    if len(config.channels) != model.channels:
        raise ValueError(f"expected {model.channels} channels, got {len(config.channels)}")
    for content in config.channels:
        for tok in content:
            if tok not in model.messages:
                raise ValueError(f"bad channel letter {tok!r}")


def _check_marking(net: PetriNet, marking: Marking) -> None:
    if len(marking) != len(net.places) or any(n < 0 for n in marking):
        raise ValueError(f"bad marking {marking!r} for places {net.places}")


def _check_bp_config(protocol: BroadcastProtocol, config: BpConfig) -> None:
    if not config or any(s not in protocol.states for s in config):
        raise ValueError(f"bad configuration {config!r}")


# ----------------------------------------------------------------------
# upward-closed sets and pad-closed single words

def upward_expression(model: SystemModel, config) -> WaExpression:
    """Weakly acyclic expression for the upward closure of a basis configuration.

    LCS channel segments admit the pad letter in every skip loop, so that
    encodings reached through receive steps (which blank out lost letters in
    place) stay inside the set.  Petri segments admit both letters after the
    required tokens.  Broadcast configurations are exact words.
    """
    if isinstance(model, LcsModel):
        _check_lcs_config(model, config)
        skippable = frozenset(model.messages) | {LCS_PAD}
        tail: WaExpression = Star(frozenset())
        for content in reversed(config.channels):
            tail = Chain(skippable, LCS_DELIM, tail)
            for tok in reversed(content):
                tail = Chain(skippable - {tok}, tok, tail)
        tail = Chain(frozenset(), LCS_DELIM, tail)
        for state in reversed(config.states):
            tail = Chain(frozenset(), state, tail)
        return tail
    if isinstance(model, PetriNet):
        _check_marking(model, config)
        loop = frozenset({PN_TOKEN, PN_PAD})
        tail = Star(frozenset())
        for count in reversed(config):
            tail = Chain(loop, PN_DELIM, tail)
            for _ in range(count):
                tail = Chain(frozenset(), PN_TOKEN, tail)
        return tail
    if isinstance(model, BroadcastProtocol):
        _check_bp_config(model, config)
        tail = Star(frozenset())
        for state in reversed(config):
            tail = Chain(frozenset(), state, tail)
        return tail
    raise TypeError(f"not a system model: {model!r}")


def encode_upward(table: DiagramTable, model: SystemModel, config) -> int:
    """Node for the encoding of the upward closure of a basis configuration."""
    return compile_expr(table, upward_expression(model, config))


def pad_closed_word_node(table: DiagramTable, word, pad_tokens) -> int:
    """Node accepting exactly the given word with pads interleaved anywhere."""
    pads = frozenset(pad_tokens)
    if any(t in pads for t in word):
        raise ValueError("word must not itself contain pad letters")
    tail: WaExpression = Star(pads)
    for tok in reversed(tuple(word)):
        tail = Chain(pads, tok, tail)
    return compile_expr(table, tail)


def exact_config_node(table: DiagramTable, model: SystemModel, config) -> int:
    """Node for all padded variants of one configuration's encoding."""
    return pad_closed_word_node(table, encode_config_word(model, config), pad_letters(model))


def target_node(table: DiagramTable, model: SystemModel, target) -> int:
    """Node for a single safety target: a basis configuration or an expression."""
    if isinstance(target, WaExpression):
        return compile_expr(table, target)
    return encode_upward(table, model, target)


# ----------------------------------------------------------------------
# transducers

def transition_transducers(model: SystemModel) -> list[TransducerNfa]:
    if isinstance(model, LcsModel):
        return lcs_transition_transducers(model)
    if isinstance(model, PetriNet):
        return pn_transition_transducers(model)
    if isinstance(model, BroadcastProtocol):
        return bp_transition_transducers(model)
    raise TypeError(f"not a system model: {model!r}")


def lcs_transition_transducers(model: LcsModel) -> list[TransducerNfa]:
    """One transducer per rule.

    The state segment rewrites one occurrence of the source state.  Channel
    contents are kept contiguous between two pad zones (X* content X*):
    receives are semi-lossy and blank everything up to the consumed message
    into the leading zone, sends replace the first pad of the trailing zone,
    which is exactly an append on the pad-stripped channel.  A send that
    instead allowed content after the replaced pad would not keep
    predecessor languages weakly acyclic.
    """
    alpha = encoding_alphabet(model)
    chan_tokens = model.messages + (LCS_PAD,)
    out = []
    for rule in model.rules:
        b = TransducerBuilder(alpha)
        before = b.state()
        after = b.state()
        b.copy_loop(before, model.states)
        b.copy_loop(after, model.states)
        b.arc(before, rule.src, rule.dst, after)
        cur = b.state()
        b.arc(after, LCS_DELIM, LCS_DELIM, cur)
        for ch in range(1, model.channels + 1):
            if rule.kind == "recv" and ch == rule.channel:
                b.loop(cur, [(g, LCS_PAD) for g in chan_tokens if g != rule.message])
                kept = b.state()
                b.arc(cur, rule.message, LCS_PAD, kept)
                b.copy_loop(kept, chan_tokens)
                nxt = b.state()
                b.arc(kept, LCS_DELIM, LCS_DELIM, nxt)
            elif rule.kind == "send" and ch == rule.channel:
                content = b.state()
                padded = b.state()
                b.copy_loop(cur, (LCS_PAD,))
                b.copy_loop(content, model.messages)
                b.copy_loop(padded, (LCS_PAD,))
                for msg in model.messages:
                    b.arc(cur, msg, msg, content)
                b.arc(cur, LCS_PAD, rule.message, padded)
                b.arc(content, LCS_PAD, rule.message, padded)
                nxt = b.state()
                b.arc(padded, LCS_DELIM, LCS_DELIM, nxt)
            else:
                b.copy_loop(cur, chan_tokens)
                nxt = b.state()
                b.arc(cur, LCS_DELIM, LCS_DELIM, nxt)
            cur = nxt
        out.append(b.build(before, {cur}))
    return out


def pn_transition_transducers(net: PetriNet) -> list[TransducerNfa]:
    """One transducer per transition.

    Per place with consumption c and production r: min(c, r) forced copies
    enforce enabledness together with the |c - r| conversion arcs; token
    copies loop before the conversions and pad copies after, keeping both
    sides in tokens-then-pads form.
    """
    alpha = encoding_alphabet(net)
    out = []
    for t in net.transitions:
        b = TransducerBuilder(alpha)
        entry = b.state()
        cur = entry
        for place in net.places:
            c = t.consume.get(place, 0)
            r = t.produce.get(place, 0)
            for _ in range(min(c, r)):
                nxt = b.state()
                b.arc(cur, PN_TOKEN, PN_TOKEN, nxt)
                cur = nxt
            b.copy_loop(cur, (PN_TOKEN,))
            for _ in range(c - r):
                nxt = b.state()
                b.arc(cur, PN_TOKEN, PN_PAD, nxt)
                cur = nxt
            for _ in range(r - c):
                nxt = b.state()
                b.arc(cur, PN_PAD, PN_TOKEN, nxt)
                cur = nxt
            pad = b.state()
            b.arc(cur, PN_PAD, PN_PAD, pad)
            b.copy_loop(pad, (PN_PAD,))
            nxt = b.state()
            b.arc(cur, PN_DELIM, PN_DELIM, nxt)
            b.arc(pad, PN_DELIM, PN_DELIM, nxt)
            cur = nxt
        out.append(b.build(entry, {cur}))
    return out


def bp_transition_transducers(protocol: BroadcastProtocol) -> list[TransducerNfa]:
    """One transducer per action letter.

    Rendezvous actions admit both orders of the two moving processes.  A
    broadcast rewrites one sender and forces every state with a receive
    edge to take one; states without a receive edge stay put.
    """
    alpha = encoding_alphabet(protocol)
    out = []
    for act in protocol.actions:
        b = TransducerBuilder(alpha)
        if act.kind == "local":
            start = b.state()
            done = b.state()
            b.copy_loop(start, protocol.states)
            b.copy_loop(done, protocol.states)
            for src, dst in act.sends:
                b.arc(start, src, dst, done)
            out.append(b.build(start, {done}))
        elif act.kind == "rendezvous":
            start = b.state()
            sent = b.state()
            received = b.state()
            done = b.state()
            for s in (start, sent, received, done):
                b.copy_loop(s, protocol.states)
            for src, dst in act.sends:
                b.arc(start, src, dst, sent)
                b.arc(received, src, dst, done)
            for src, dst in act.recvs:
                b.arc(start, src, dst, received)
                b.arc(sent, src, dst, done)
            out.append(b.build(start, {done}))
        else:
            start = b.state()
            done = b.state()
            receivers = {src for src, _ in act.recvs}
            for state in (start, done):
                for src, dst in act.recvs:
                    b.arc(state, src, dst, state)
                for s in protocol.states:
                    if s not in receivers:
                        b.arc(state, s, s, state)
            for src, dst in act.sends:
                b.arc(start, src, dst, done)
            out.append(b.build(start, {done}))
    return out
