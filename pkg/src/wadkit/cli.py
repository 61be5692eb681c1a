"""Command-line interface: check, expr, bench, dump."""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import time
from pathlib import Path

from . import ops
from .alphabet import Alphabet
from .checker import CSV_HEADER, CheckOptions, CheckReport, backward_reach
from .dot import to_dot
from .encoders import (
    encode_config_word,
    encoding_alphabet,
    pad_letters,
    target_node,
    transition_transducers,
)
from .expr import ExprSyntaxError, compile_expr, parse_expr
from .modelfile import ModelFileError, parse_model_file
from .table import DiagramTable

EXIT_SAFE = 0
EXIT_UNSAFE = 1
EXIT_UNKNOWN = 2
EXIT_LIMIT = 3
EXIT_PARSE = 64

_VERDICT_EXITS = {"SAFE": EXIT_SAFE, "UNSAFE": EXIT_UNSAFE,
                  "UNKNOWN_CONTRACTED": EXIT_UNKNOWN, "LIMIT": EXIT_LIMIT}

MAX_NODES_ENV = "WADKIT_MAX_NODES"

# Cumulative-solved report buckets, in seconds.
TIME_BUCKETS = (0.1, 0.25, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0, 120.0, 300.0, 600.0)


def _max_nodes() -> int | None:
    raw = os.environ.get(MAX_NODES_ENV)
    return int(raw) if raw else None


def _check_instance(path: str, options: CheckOptions) -> CheckReport:
    parsed = parse_model_file(Path(path).read_text(encoding="utf-8"))
    table = DiagramTable(encoding_alphabet(parsed.model), max_nodes=_max_nodes())
    target = 0
    for t in parsed.query.targets:
        target = ops.union(table, target, target_node(table, parsed.model, t))
    init_word = encode_config_word(parsed.model, parsed.query.initial)
    transducers = transition_transducers(parsed.model)
    return backward_reach(table, transducers, target, init_word,
                          pad_letters=pad_letters(parsed.model), options=options)


def _append_stats(stats_path: str, rows: list[str]) -> None:
    path = Path(stats_path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", encoding="utf-8") as fh:
        if fresh:
            fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")


def _options_from_args(args) -> CheckOptions:
    return CheckOptions(max_iterations=args.max_iters, timeout=args.timeout,
                        engine=args.engine, trace=args.trace)


def cmd_check(args, out) -> int:
    try:
        report = _check_instance(args.model, _options_from_args(args))
    except (ModelFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(report.verdict, file=out)
    print(f"iterations={report.iterations} final_nodes={report.iteration_sizes[-1]} "
          f"peak_table={report.peak_table} contractions={report.contractions} "
          f"millis={report.millis:.1f}", file=out)
    if args.trace:
        for i, size in enumerate(report.iteration_sizes):
            print(f"iteration {i}: reachable_nodes={size}", file=out)
    if args.stats:
        _append_stats(args.stats, [report.csv_row(args.model)])
    return _VERDICT_EXITS[report.verdict]


def _bench_one(path: str, options: CheckOptions) -> tuple[str, str]:
    try:
        report = _check_instance(path, options)
        return path, report.csv_row(Path(path).name)
    except Exception as exc:  # per-instance failures recorded, run continues
        return path, f"{Path(path).name},ERROR,0,0,0,0,0.0  # {exc}"


def cmd_bench(args, out) -> int:
    paths = sorted(str(p) for ext in ("*.pn", "*.lcs", "*.bp")
                   for p in Path(args.directory).glob(ext))
    if not paths:
        print(f"error: no model files under {args.directory}", file=sys.stderr)
        return EXIT_PARSE
    options = _options_from_args(args)
    rows: list[tuple[str, str]] = []
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(_bench_one, p, options): p for p in paths}
            for fut in concurrent.futures.as_completed(futures):
                rows.append(fut.result())
        rows.sort(key=lambda r: r[0])
    else:
        rows = [_bench_one(p, options) for p in paths]
    print(CSV_HEADER, file=out)
    for _, row in rows:
        print(row, file=out)
    if args.stats:
        _append_stats(args.stats, [row for _, row in rows])

    decided_times = []
    for _, row in rows:
        fields = row.split(",")
        if fields[1] in ("SAFE", "UNSAFE"):
            decided_times.append(float(fields[6].split()[0]) / 1000.0)
    print("", file=out)
    print("time_bucket_s,decided", file=out)
    for bucket in TIME_BUCKETS:
        print(f"{bucket},{sum(1 for t in decided_times if t <= bucket)}", file=out)
    return EXIT_SAFE


def cmd_expr(args, out) -> int:
    try:
        alphabet = Alphabet(tuple(args.alphabet.split()))
        table = DiagramTable(alphabet, max_nodes=_max_nodes())
        node = compile_expr(table, parse_expr(args.expression, alphabet))
        if args.complement:
            node = ops.complement(table, node)
        if args.intersect is not None:
            node = ops.intersect(table, node, compile_expr(table, parse_expr(args.intersect, alphabet)))
        if args.union is not None:
            node = ops.union(table, node, compile_expr(table, parse_expr(args.union, alphabet)))
    except (ExprSyntaxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.member is not None:
        word = tuple(args.member.split())
        print("true" if table.member(node, word) else "false", file=out)
    elif args.enumerate is not None:
        words = sorted(table.enumerate_words(node, args.enumerate), key=lambda w: (len(w), w))
        joiner = "" if all(len(t) == 1 for t in alphabet) else "."
        print(" ".join("ε" if not w else joiner.join(w) for w in words), file=out)
    else:
        print(f"node={node} empty={table.is_empty(node)} universal={table.is_universal(node)} "
              f"reachable_nodes={table.reachable_count(node)} table_size={len(table)}", file=out)
    return EXIT_SAFE


def cmd_dump(args, out) -> int:
    try:
        if args.alphabet is not None:
            alphabet = Alphabet(tuple(args.alphabet.split()))
            table = DiagramTable(alphabet, max_nodes=_max_nodes())
            roots = [compile_expr(table, parse_expr(e, alphabet)) for e in args.source]
        else:
            if len(args.source) != 1:
                print("error: dump takes one model file (or -a with expressions)", file=sys.stderr)
                return EXIT_PARSE
            parsed = parse_model_file(Path(args.source[0]).read_text(encoding="utf-8"))
            table = DiagramTable(encoding_alphabet(parsed.model), max_nodes=_max_nodes())
            roots = [target_node(table, parsed.model, t) for t in parsed.query.targets]
    except (ModelFileError, ExprSyntaxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = to_dot(table, roots=None if args.whole_table else roots)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_SAFE


def _add_check_flags(sub) -> None:
    sub.add_argument("--engine", choices=("general", "compatible"), default="general")
    sub.add_argument("--max-iters", type=int, default=None)
    sub.add_argument("--timeout", type=float, default=None, help="seconds per instance")
    sub.add_argument("--stats", default=None, help="append one CSV row per instance")
    sub.add_argument("--trace", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wadkit",
                                     description="Weakly acyclic diagrams and backward-reachability checking")
    subs = parser.add_subparsers(dest="command", required=True)

    check = subs.add_parser("check", help="run backward reachability on one model file")
    check.add_argument("model")
    _add_check_flags(check)

    bench = subs.add_parser("bench", help="run every model file in a directory")
    bench.add_argument("directory")
    bench.add_argument("--jobs", type=int, default=1)
    _add_check_flags(bench)

    e = subs.add_parser("expr", help="compile and query expressions")
    e.add_argument("-a", "--alphabet", required=True, help="space-separated letters")
    e.add_argument("expression")
    e.add_argument("--complement", action="store_true")
    e.add_argument("--intersect", default=None, metavar="EXPR")
    e.add_argument("--union", default=None, metavar="EXPR")
    e.add_argument("--member", default=None, metavar="WORD", help="space-separated letters")
    e.add_argument("--enumerate", type=int, default=None, metavar="N")

    dump = subs.add_parser("dump", help="emit a DOT rendering of a table")
    dump.add_argument("source", nargs="+", help="model file, or expressions with -a")
    dump.add_argument("-a", "--alphabet", default=None)
    dump.add_argument("-o", "--output", default=None)
    dump.add_argument("--whole-table", action="store_true")

    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    if args.command == "check":
        return cmd_check(args, out)
    if args.command == "bench":
        return cmd_bench(args, out)
    if args.command == "expr":
        return cmd_expr(args, out)
    return cmd_dump(args, out)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
