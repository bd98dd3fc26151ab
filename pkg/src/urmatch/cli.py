"""Command-line front end.

Exit codes: 0 success, 1 precondition error (the input is outside what the
algorithm handles), 2 I/O, parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Callable

from . import bench, generators as gen
from .c4free import approximate as approximate_c4free
from .coloring import (
    EdgeColoring,
    ImprovementError,
    color_delta2_minus_delta,
    greedy_coloring,
    improve_coloring,
    partition_matching_ur,
)
from .exact import (
    BudgetExceeded,
    OracleBudget,
    chi_ur_exact,
    maximum_matching,
    min_ur_partition_of_matching,
    nu_exact,
    nu_s_exact,
    nu_ur_exact,
)
from .graph import (
    Graph,
    GraphFormatError,
    NotBipartiteError,
    is_bipartite,
    parse_edge_list,
    parse_graph,
    write_graph,
)
from .subcubic import approximate_subcubic
from .verify import Matching, NotAMatchingError, UnsupportedSizeError, is_ur
from .wrapper import InvariantViolation, PreconditionError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 2 with usage, as argparse does
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_graph(path: str) -> Graph:
    return parse_graph(Path(path).read_text())


def _read_matching(path: str | None) -> Matching:
    if path is None:
        raise UsageError("a matching file is required (-m)")
    return Matching.of(parse_edge_list(Path(path).read_text()))


class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.data: dict = {}
        self.lines: list[str] = []

    def emit(self) -> None:
        if self.as_json:
            print(json.dumps(self.data, sort_keys=True))
        else:
            for line in self.lines:
                print(line)


def _edges_lines(edges) -> list[str]:
    return [f"{u} {v}" for u, v in sorted(edges)]


# --- subcommands -------------------------------------------------------------


def cmd_verify(args, out: Output) -> int:
    g = _read_graph(args.graph)
    m = _read_matching(args.matching)
    ok, wit = is_ur(g, m)
    out.data = {"uniquely_restricted": ok, "witness": list(wit.vertices) if wit else None}
    if ok:
        out.lines = ["uniquely restricted"]
    else:
        out.lines = ["not uniquely restricted", f"witness: {wit}"]
    return 0


def cmd_exact(args, out: Output) -> int:
    g = _read_graph(args.graph)
    budget = OracleBudget.from_env()
    what = args.quantity
    if what == "nu":
        k = nu_exact(g, budget)
        witness = sorted(maximum_matching(g).edges) if is_bipartite(g) else []
        out.data = {"value": k, "witness": witness}
        out.lines = [f"value: {k}", *_edges_lines(witness)]
    elif what in ("nu-ur", "nu-s"):
        fn = nu_ur_exact if what == "nu-ur" else nu_s_exact
        k, m = fn(g, budget)
        out.data = {"value": k, "witness": sorted(m.edges)}
        out.lines = [f"value: {k}", *_edges_lines(m.edges)]
    elif what == "chi-ur":
        k, col = chi_ur_exact(g, budget)
        c = EdgeColoring(col)
        out.data = {"value": k, "coloring": [[u, v, x] for (u, v), x in sorted(col.items())]}
        out.lines = [f"value: {k}", *c.lines()[:-1]]
    else:
        m = _read_matching(args.matching)
        k, parts = min_ur_partition_of_matching(g, m, budget)
        out.data = {"value": k, "parts": [sorted(p.edges) for p in parts]}
        out.lines = [f"value: {k}"] + [
            f"{u} {v} {i + 1}" for i, p in enumerate(parts) for u, v in sorted(p.edges)
        ]
    return 0


def cmd_approx(args, out: Output) -> int:
    g = _read_graph(args.graph)
    trace: list | None = [] if args.trace else None
    if args.algorithm == "subcubic":
        res = approximate_subcubic(g, trace=trace, assert_invariants=args.assert_invariants)
    else:
        res = approximate_c4free(
            g, delta=args.delta, trace=trace, assert_invariants=args.assert_invariants
        )
    out.data = {
        "size": len(res),
        "guarantee": str(res.guarantee),
        "bound_against": res.size_lower_bound_used,
        "fallback": res.fallback,
        "matching": sorted(res.matching.edges),
    }
    out.lines = [f"size: {len(res)}", f"guarantee: {res.guarantee}"]
    if res.fallback:
        out.lines.append("fallback: regular component, bound against nu_ur(G-u)")
    if not args.no_oracle:
        try:
            opt, _ = nu_ur_exact(g, OracleBudget.from_env())
        except BudgetExceeded:
            opt = None
        if opt is not None:
            ratio = len(res) / opt if opt else 1.0
            out.data.update(oracle=opt, ratio=ratio)
            out.lines += [f"oracle: {opt}", f"ratio: {ratio:.4f}"]
    out.lines += _edges_lines(res.matching.edges)
    if trace is not None:
        out.data["trace"] = [str(r) for r in trace]
        out.lines += [f"trace: {r}" for r in trace]
    return 0


def cmd_color(args, out: Output) -> int:
    g = _read_graph(args.graph)
    order = None
    if args.random_order:
        order = list(range(g.n))
        random.Random(args.seed).shuffle(order)
    if args.procedure == "partition":
        m = _read_matching(args.matching)
        part = partition_matching_ur(g, None, m)
        out.data = {"parts": [sorted(p.edges) for p in part.parts], "colors": len(part)}
        out.lines = [
            f"{u} {v} {i + 1}" for i, p in enumerate(part.parts) for u, v in sorted(p.edges)
        ] + [f"colors: {len(part)}"]
        return 0
    if args.procedure == "greedy":
        col = greedy_coloring(g, order)
    elif args.procedure == "improve":
        col = improve_coloring(g, greedy_coloring(g, order), opportunistic=args.opportunistic)
    else:
        col = color_delta2_minus_delta(g)
    out.data = {
        "colors": col.color_count,
        "coloring": [[u, v, c] for (u, v), c in sorted(col.color_of.items())],
    }
    out.lines = col.lines()
    return 0


def _params(args) -> dict:
    p = {}
    for key in ("n", "na", "nb", "delta", "density", "n_min", "n_max"):
        val = getattr(args, key, None)
        if val is not None:
            p[key] = val
    if getattr(args, "connected", False):
        p["connected"] = True
    return p


def cmd_gen(args, out: Output) -> int:
    p = _params(args)
    try:
        if args.model in ("fig1", "fano"):
            g = gen.generate(args.model)
        elif args.model == "complete_bipartite":
            g = gen.complete_bipartite(args.na, args.nb)
        else:
            if args.model == "random_bipartite" and "n" in p:
                n = p.pop("n")
                p["na"], p["nb"] = n // 2, n - n // 2
            g = gen.generate(args.model, seed=args.seed, **p)
    except TypeError as exc:
        raise UsageError(f"missing or unexpected parameter for {args.model}: {exc}") from None
    text = write_graph(g)
    if args.output:
        Path(args.output).write_text(text)
    out.data = {"n": g.n, "m": g.m, "edges": g.sorted_edges()}
    out.lines = [] if args.output else text.rstrip("\n").splitlines()
    return 0


def cmd_bench(args, out: Output) -> int:
    algos = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algos:
        if a not in bench.ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(bench.ALGORITHMS)}")
    sink = open(args.output, "w") if args.output else None
    records = []
    try:
        for rec in bench.bench_run(
            args.model, algos, args.count, args.seed, _params(args), OracleBudget.from_env()
        ):
            records.append(rec)
            line = rec.to_json()
            if sink:
                sink.write(line + "\n")
                sink.flush()
            elif not args.json:
                print(line)
        summary = bench.summarize(records)
        if sink:
            sink.write(summary.to_json() + "\n")
    finally:
        if sink:
            sink.close()
    if args.json:
        out.data = {"records": [asdict(r) for r in records], "summary": asdict(summary)}
    else:
        out.lines = [summary.to_json()]
    return 1 if summary.failures else 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="urmatch", description="Uniquely restricted matchings and colourings.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    sp = add("verify", "check whether a matching is uniquely restricted")
    sp.add_argument("-g", "--graph", required=True)
    sp.add_argument("-m", "--matching", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = add("exact", "exact (exponential) oracles")
    sp.add_argument("quantity", choices=["nu", "nu-ur", "nu-s", "chi-ur", "min-partition"])
    sp.add_argument("-g", "--graph", required=True)
    sp.add_argument("-m", "--matching")
    sp.set_defaults(func=cmd_exact)

    sp = add("approx", "approximate a maximum uniquely restricted matching")
    sp.add_argument("algorithm", choices=["c4free", "subcubic"])
    sp.add_argument("-g", "--graph", required=True)
    sp.add_argument("--delta", type=int, help="degree bound for c4free (default: max degree)")
    sp.add_argument("--trace", action="store_true", help="print one line per extension step")
    sp.add_argument("--assert-invariants", action="store_true")
    sp.add_argument("--no-oracle", action="store_true", help="skip the exact comparison")
    sp.set_defaults(func=cmd_approx)

    sp = add("color", "uniquely restricted edge colourings")
    sp.add_argument("procedure", choices=["greedy", "improve", "partition", "delta2md"])
    sp.add_argument("-g", "--graph", required=True)
    sp.add_argument("-m", "--matching")
    sp.add_argument("--random-order", action="store_true", help="greedy vertex order shuffled by --seed")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--opportunistic", action="store_true", help="improve: keep removing classes")
    sp.set_defaults(func=cmd_color)

    def family_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--n", type=int)
        sp.add_argument("--na", type=int)
        sp.add_argument("--nb", type=int)
        sp.add_argument("--delta", type=int)
        sp.add_argument("--density", type=float)
        sp.add_argument("--connected", action="store_true")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("-o", "--output")

    sp = add("gen", "generate a graph")
    sp.add_argument("model", choices=sorted(gen.MODELS))
    family_args(sp)
    sp.set_defaults(func=cmd_gen)

    sp = add("bench", "run algorithms over a generated family (JSON lines)")
    sp.add_argument("--model", required=True, choices=sorted(gen.MODELS))
    sp.add_argument("--algorithms", required=True, help="comma-separated: " + ",".join(bench.ALGORITHMS))
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    family_args(sp)
    sp.set_defaults(func=cmd_bench)
    return p


PRECONDITION_ERRORS: tuple[type[BaseException], ...] = (
    PreconditionError,
    NotBipartiteError,
    NotAMatchingError,
    UnsupportedSizeError,
    BudgetExceeded,
    ImprovementError,
    InvariantViolation,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"urmatch: error: {exc}", file=sys.stderr)
        return 2
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 2
    out = Output(getattr(args, "json", False))
    handler: Callable = args.func
    try:
        code = handler(args, out)
    except UsageError as exc:
        print(f"urmatch: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, GraphFormatError) as exc:
        print(f"urmatch: error: {exc}", file=sys.stderr)
        return 2
    except PRECONDITION_ERRORS as exc:
        print(f"urmatch: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # remaining input problems, e.g. a matching edge missing from the graph
        print(f"urmatch: error: {exc}", file=sys.stderr)
        return 1
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
