"""Line-oriented model files for the three system classes.

The header keyword selects the class; `#` starts a comment anywhere.

petri       places p q / transition t / consume p 2 / produce q 3
            init p 3 q 1 / target p 1 q 5
lcs         states p q r / messages a b / channels 2
            rule p -> q recv 1 a | rule q -> p send 2 b | rule p -> r nop
            init p q | a b | - / target q q | - | -
broadcast   states p q r / local d p -> q
            rendezvous b send p -> q recv p -> r
            broadcast c send r -> q recv q -> p
            init p p p p / target p q p p

Every model also accepts `target expr <expression>` lines; several target
lines union their sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoders import encoding_alphabet
from .expr import WaExpression, format_expr, parse_expr
from .models import (
    BpAction,
    BroadcastProtocol,
    LcsConfig,
    LcsModel,
    LcsRule,
    PetriNet,
    PnTransition,
    SafetyQuery,
    SystemModel,
)


class ModelFileError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ParsedModel:
    kind: str   # "petri" | "lcs" | "broadcast"
    model: SystemModel
    query: SafetyQuery


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_model_file(text: str) -> ParsedModel:
    rows = list(_lines(text))
    if not rows:
        raise ModelFileError("empty model file", 1)
    no, header = rows[0]
    if header not in ("petri", "lcs", "broadcast"):
        raise ModelFileError(f"unknown model kind {header!r}", no)
    body = rows[1:]
    if header == "petri":
        return _parse_petri(body)
    if header == "lcs":
        return _parse_lcs(body)
    return _parse_broadcast(body)


def _int(tok: str, no: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ModelFileError(f"expected an integer, found {tok!r}", no) from None
    if v < 0:
        raise ModelFileError(f"expected a nonnegative integer, found {tok}", no)
    return v


def _place_counts(parts: list[str], places, no: int) -> tuple[int, ...]:
    if len(parts) % 2:
        raise ModelFileError("expected alternating place/count pairs", no)
    counts = dict.fromkeys(places, 0)
    for name, num in zip(parts[::2], parts[1::2]):
        if name not in counts:
            raise ModelFileError(f"unknown place {name!r}", no)
        counts[name] = _int(num, no)
    return tuple(counts[p] for p in places)


def _parse_petri(body) -> ParsedModel:
    places: list[str] = []
    transitions: list[dict] = []
    init = None
    targets: list = []
    expr_texts: list[tuple[int, str]] = []
    for no, line in body:
        parts = line.split()
        kw = parts[0]
        if kw == "places":
            if places:
                raise ModelFileError("duplicate places declaration", no)
            places = parts[1:]
            if not places:
                raise ModelFileError("places line declares nothing", no)
        elif kw == "transition":
            if len(parts) != 2:
                raise ModelFileError("usage: transition NAME", no)
            transitions.append({"name": parts[1], "consume": {}, "produce": {}, "line": no})
        elif kw in ("consume", "produce"):
            if not transitions:
                raise ModelFileError(f"{kw} before any transition", no)
            if len(parts) != 3:
                raise ModelFileError(f"usage: {kw} PLACE COUNT", no)
            if parts[1] not in places:
                raise ModelFileError(f"unknown place {parts[1]!r}", no)
            flow = transitions[-1][kw]
            if parts[1] in flow:
                raise ModelFileError(f"duplicate {kw} for place {parts[1]!r}", no)
            flow[parts[1]] = _int(parts[2], no)
        elif kw == "init":
            if init is not None:
                raise ModelFileError("duplicate init line", no)
            init = _place_counts(parts[1:], places, no)
        elif kw == "target":
            if parts[1:2] == ["expr"]:
                expr_texts.append((no, line.split(None, 2)[2]))
            else:
                targets.append(_place_counts(parts[1:], places, no))
        else:
            raise ModelFileError(f"unknown keyword {kw!r}", no)
    if init is None:
        raise ModelFileError("missing init line", body[-1][0] if body else 1)
    if not targets and not expr_texts:
        raise ModelFileError("missing target line", body[-1][0])
    net = PetriNet(tuple(places),
                   tuple(PnTransition(t["name"], t["consume"], t["produce"]) for t in transitions))
    targets.extend(_parse_expr_targets(expr_texts, net))
    return ParsedModel("petri", net, SafetyQuery(init, tuple(targets)))


def _parse_expr_targets(expr_texts, model) -> list[WaExpression]:
    alpha = encoding_alphabet(model)
    out = []
    for no, text in expr_texts:
        try:
            out.append(parse_expr(text, alpha))
        except ValueError as exc:
            raise ModelFileError(f"bad target expression: {exc}", no) from None
    return out


def _split_channels(field: str, messages, no: int) -> tuple[str, ...]:
    if field == "-":
        return ()
    out = []
    for tok in field.split():
        if tok in messages:
            out.append(tok)
        elif all(c in messages for c in tok):
            out.extend(tok)
        else:
            raise ModelFileError(f"unknown message {tok!r}", no)
    return tuple(out)


def _parse_lcs(body) -> ParsedModel:
    states: list[str] = []
    messages: list[str] = []
    channels = None
    rules: list[LcsRule] = []
    init = None
    targets: list = []
    expr_texts: list[tuple[int, str]] = []

    def parse_config(rest: str, no: int) -> LcsConfig:
        fields = [f.strip() for f in rest.split("|")]
        if len(fields) != 1 + (channels or 0):
            raise ModelFileError(f"expected states plus {channels} channel fields", no)
        st = tuple(fields[0].split())
        for s in st:
            if s not in states:
                raise ModelFileError(f"unknown state {s!r}", no)
        chans = tuple(_split_channels(f, messages, no) for f in fields[1:])
        return LcsConfig(st, chans)

    for no, line in body:
        parts = line.split()
        kw = parts[0]
        if kw == "states":
            if states:
                raise ModelFileError("duplicate states declaration", no)
            states = parts[1:]
        elif kw == "messages":
            if messages:
                raise ModelFileError("duplicate messages declaration", no)
            messages = parts[1:]
        elif kw == "channels":
            if channels is not None:
                raise ModelFileError("duplicate channels declaration", no)
            channels = _int(parts[1], no)
        elif kw == "rule":
            if len(parts) < 5 or parts[2] != "->":
                raise ModelFileError("usage: rule SRC -> DST (recv CH MSG | send CH MSG | nop)", no)
            src, dst, action = parts[1], parts[3], parts[4]
            if action == "nop":
                if len(parts) != 5:
                    raise ModelFileError("nop takes no arguments", no)
                rules.append(LcsRule(src, dst, "nop"))
            elif action in ("recv", "send"):
                if len(parts) != 7:
                    raise ModelFileError(f"usage: rule SRC -> DST {action} CHANNEL MESSAGE", no)
                rules.append(LcsRule(src, dst, action, _int(parts[5], no), parts[6]))
            else:
                raise ModelFileError(f"unknown action {action!r}", no)
        elif kw == "init":
            if channels is None:
                raise ModelFileError("channels must be declared before init", no)
            if init is not None:
                raise ModelFileError("duplicate init line", no)
            init = parse_config(line.split(None, 1)[1], no)
        elif kw == "target":
            if parts[1:2] == ["expr"]:
                expr_texts.append((no, line.split(None, 2)[2]))
            else:
                if channels is None:
                    raise ModelFileError("channels must be declared before target", no)
                targets.append(parse_config(line.split(None, 1)[1], no))
        else:
            raise ModelFileError(f"unknown keyword {kw!r}", no)
    if channels is None or init is None or (not targets and not expr_texts):
        raise ModelFileError("missing channels, init, or target", body[-1][0] if body else 1)
    try:
        model = LcsModel(tuple(states), tuple(messages), channels, tuple(rules))
    except ValueError as exc:
        raise ModelFileError(str(exc), body[-1][0]) from None
    targets.extend(_parse_expr_targets(expr_texts, model))
    return ParsedModel("lcs", model, SafetyQuery(init, tuple(targets)))


def _edge(parts: list[str], at: int, no: int) -> tuple[tuple[str, str], int]:
    if len(parts) < at + 3 or parts[at + 1] != "->":
        raise ModelFileError("expected SRC -> DST", no)
    return (parts[at], parts[at + 2]), at + 3


def _parse_broadcast(body) -> ParsedModel:
    states: list[str] = []
    locals_: list[tuple[str, tuple[str, str]]] = []
    rendezvous: dict[str, dict] = {}
    broadcasts: dict[str, dict] = {}
    init = None
    targets: list = []
    expr_texts: list[tuple[int, str]] = []
    for no, line in body:
        parts = line.split()
        kw = parts[0]
        if kw == "states":
            if states:
                raise ModelFileError("duplicate states declaration", no)
            states = parts[1:]
        elif kw == "local":
            if len(parts) != 5:
                raise ModelFileError("usage: local LETTER SRC -> DST", no)
            edge, _ = _edge(parts, 2, no)
            locals_.append((parts[1], edge))
        elif kw in ("rendezvous", "broadcast"):
            book = rendezvous if kw == "rendezvous" else broadcasts
            entry = book.setdefault(parts[1], {"sends": [], "recvs": [], "line": no})
            at = 2
            while at < len(parts):
                role = parts[at]
                if role not in ("send", "recv"):
                    raise ModelFileError(f"expected send or recv, found {role!r}", no)
                edge, at = _edge(parts, at + 1, no)
                entry["sends" if role == "send" else "recvs"].append(edge)
        elif kw == "init":
            if init is not None:
                raise ModelFileError("duplicate init line", no)
            init = tuple(parts[1:])
        elif kw == "target":
            if parts[1:2] == ["expr"]:
                expr_texts.append((no, line.split(None, 2)[2]))
            else:
                targets.append(tuple(parts[1:]))
        else:
            raise ModelFileError(f"unknown keyword {kw!r}", no)
    if init is None or (not targets and not expr_texts):
        raise ModelFileError("missing init or target", body[-1][0] if body else 1)
    actions: list[BpAction] = []
    seen_letters = {letter for letter, _ in locals_} | set(rendezvous) | set(broadcasts)
    if len(seen_letters) != len(locals_) + len(rendezvous) + len(broadcasts):
        raise ModelFileError("action letters must be distinct", body[-1][0])
    local_edges: dict[str, list] = {}
    for letter, edge in locals_:
        local_edges.setdefault(letter, []).append(edge)
    for letter, edges in local_edges.items():
        actions.append(BpAction("local", letter, tuple(edges)))
    for letter, entry in rendezvous.items():
        try:
            actions.append(BpAction("rendezvous", letter, tuple(entry["sends"]), tuple(entry["recvs"])))
        except ValueError as exc:
            raise ModelFileError(str(exc), entry["line"]) from None
    for letter, entry in broadcasts.items():
        try:
            actions.append(BpAction("broadcast", letter, tuple(entry["sends"]), tuple(entry["recvs"])))
        except ValueError as exc:
            raise ModelFileError(str(exc), entry["line"]) from None
    try:
        model = BroadcastProtocol(tuple(states), tuple(actions))
    except ValueError as exc:
        raise ModelFileError(str(exc), body[-1][0] if body else 1) from None
    targets.extend(_parse_expr_targets(expr_texts, model))
    return ParsedModel("broadcast", model, SafetyQuery(init, tuple(targets)))


# ----------------------------------------------------------------------
# pretty-printing (used for the round-trip guarantee)

def format_model_file(parsed: ParsedModel) -> str:
    out: list[str] = [parsed.kind]
    model, query = parsed.model, parsed.query
    if parsed.kind == "petri":
        out.append("places " + " ".join(model.places))
        for t in model.transitions:
            out.append(f"transition {t.name}")
            for p in model.places:
                if t.consume.get(p):
                    out.append(f"  consume {p} {t.consume[p]}")
            for p in model.places:
                if t.produce.get(p):
                    out.append(f"  produce {p} {t.produce[p]}")
        out.append("init " + _fmt_counts(model.places, query.initial))
        for target in query.targets:
            out.append(_fmt_target(target, lambda c: _fmt_counts(model.places, c)))
    elif parsed.kind == "lcs":
        out.append("states " + " ".join(model.states))
        out.append("messages " + " ".join(model.messages))
        out.append(f"channels {model.channels}")
        for r in model.rules:
            suffix = "nop" if r.kind == "nop" else f"{r.kind} {r.channel} {r.message}"
            out.append(f"rule {r.src} -> {r.dst} {suffix}")
        out.append("init " + _fmt_lcs_config(query.initial))
        for target in query.targets:
            out.append(_fmt_target(target, _fmt_lcs_config))
    else:
        out.append("states " + " ".join(model.states))
        for act in model.actions:
            if act.kind == "local":
                for src, dst in act.sends:
                    out.append(f"local {act.letter} {src} -> {dst}")
            else:
                bits = [act.kind, act.letter]
                for src, dst in act.sends:
                    bits.append(f"send {src} -> {dst}")
                for src, dst in act.recvs:
                    bits.append(f"recv {src} -> {dst}")
                out.append(" ".join(bits))
        out.append("init " + " ".join(query.initial))
        for target in query.targets:
            out.append(_fmt_target(target, " ".join))
    return "\n".join(out) + "\n"


def _fmt_counts(places, marking) -> str:
    return " ".join(f"{p} {n}" for p, n in zip(places, marking))


def _fmt_lcs_config(config: LcsConfig) -> str:
    fields = [" ".join(config.states)]
    for content in config.channels:
        fields.append(" ".join(content) if content else "-")
    return " | ".join(fields)


def _fmt_target(target, config_formatter) -> str:
    if isinstance(target, WaExpression):
        return "target expr " + format_expr(target)
    return "target " + config_formatter(target)
