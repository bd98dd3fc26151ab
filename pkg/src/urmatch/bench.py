"""Benchmark harness: run algorithms over a generated family and emit one
JSON record per (instance, algorithm)."""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from . import generators as gen
from .c4free import approximate as approximate_c4free
from .coloring import color_delta2_minus_delta, greedy_coloring, improve_coloring
from .exact import DEFAULT_BUDGET, BudgetExceeded, OracleBudget, chi_ur_exact, nu_ur_exact
from .graph import Graph
from .subcubic import approximate_subcubic

APPROX_ALGORITHMS = ("subcubic", "c4free")
COLOR_ALGORITHMS = ("greedy", "improve", "delta2md")
ALGORITHMS = APPROX_ALGORITHMS + COLOR_ALGORITHMS


@dataclass
class BenchRecord:
    instance_id: str
    n: int
    m: int
    delta: int
    algorithm: str
    seed: int
    output_size: int | None = None
    color_count: int | None = None
    oracle_value: int | None = None
    ratio: float | None = None
    elapsed_ms: float = 0.0
    # the proven bound for this run and whether the output meets it
    bound: str | None = None
    bound_ok: bool | None = None
    fallback: bool = False
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def instance_seeds(seed: int, count: int) -> list[int]:
    """Per-instance 64-bit seeds expanded from one master seed."""
    rng = random.Random(seed)
    return [rng.getrandbits(64) for _ in range(count)]


def _oracle(fn, g: Graph, budget: OracleBudget) -> int | None:
    try:
        budget.check_size(g, "oracle")
        return fn(g, budget)[0]
    except BudgetExceeded:
        return None


def _approx_bound_ok(size: int, opt: int, guarantee: Fraction, fallback: bool) -> bool:
    target = opt - 1 if fallback else opt
    return size >= math.ceil(guarantee * max(target, 0))


def run_one(
    g: Graph,
    algorithm: str,
    instance_id: str,
    seed: int,
    budget: OracleBudget = DEFAULT_BUDGET,
    with_oracle: bool = True,
) -> BenchRecord:
    rec = BenchRecord(instance_id, g.n, g.m, g.max_degree, algorithm, seed)
    delta = g.max_degree
    start = time.perf_counter()
    try:
        if algorithm in APPROX_ALGORITHMS:
            if algorithm == "subcubic":
                res = approximate_subcubic(g)
            else:
                res = approximate_c4free(g)
            rec.elapsed_ms = (time.perf_counter() - start) * 1000
            rec.output_size = len(res)
            rec.fallback = res.fallback
            rec.bound = f">= {res.guarantee} * nu_ur"
            opt = _oracle(nu_ur_exact, g, budget) if with_oracle else None
            if opt is not None:
                rec.oracle_value = opt
                rec.ratio = len(res) / opt if opt else 1.0
                rec.bound_ok = _approx_bound_ok(len(res), opt, res.guarantee, res.fallback)
        elif algorithm in COLOR_ALGORITHMS:
            if algorithm == "greedy":
                col, limit = greedy_coloring(g), delta * delta
            elif algorithm == "improve":
                col, limit = improve_coloring(g, greedy_coloring(g)), delta * delta - 1
            else:
                col, limit = color_delta2_minus_delta(g), delta * delta - delta
            rec.elapsed_ms = (time.perf_counter() - start) * 1000
            rec.color_count = col.color_count
            rec.bound = f"<= {limit} colors"
            rec.bound_ok = col.color_count <= limit and col.ur_valid(g)
            opt = _oracle(chi_ur_exact, g, budget) if with_oracle else None
            if opt is not None:
                rec.oracle_value = opt
                rec.ratio = col.color_count / opt if opt else 1.0
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    except (ValueError, RuntimeError, AssertionError) as exc:
        rec.elapsed_ms = (time.perf_counter() - start) * 1000
        rec.error = f"{type(exc).__name__}: {exc}"
        rec.bound_ok = False
    return rec


def family(model: str, count: int, seed: int, params: dict) -> Iterator[tuple[str, int, Graph | Exception]]:
    """``count`` instances of a generator model.  ``n`` may be given as
    ``n_min``/``n_max``, drawn per instance."""
    for i, s in enumerate(instance_seeds(seed, count)):
        p = dict(params)
        if "n_min" in p or "n_max" in p:
            lo = p.pop("n_min", None)
            hi = p.pop("n_max", None)
            lo = hi if lo is None else lo
            hi = lo if hi is None else hi
            p["n"] = random.Random(s).randint(lo, hi)
        if model == "random_bipartite" and "n" in p:
            n = p.pop("n")
            p["na"], p["nb"] = n // 2, n - n // 2
        try:
            g = gen.generate(model, seed=s, **p)
        except (gen.GeneratorError, TypeError) as exc:
            yield f"{model}-{i}", s, exc
            continue
        yield f"{model}-{i}", s, g


def bench_run(
    model: str,
    algorithms: Iterable[str],
    count: int,
    seed: int = 0,
    params: dict | None = None,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> Iterator[BenchRecord]:
    algorithms = list(algorithms)
    for iid, s, g in family(model, count, seed, params or {}):
        if isinstance(g, Exception):
            for a in algorithms:
                yield BenchRecord(iid, 0, 0, 0, a, s, error=f"{type(g).__name__}: {g}", bound_ok=False)
            continue
        for a in algorithms:
            yield run_one(g, a, iid, s, budget)


@dataclass
class BenchSummary:
    instances: int
    records: int
    failures: int
    min_ratio: float | None
    mean_ratio: float | None
    max_color_count: int | None
    fallback_rate: float | None
    per_algorithm: dict[str, dict[str, float | None]]

    def to_json(self) -> str:
        return json.dumps({"summary": asdict(self)}, sort_keys=True)


def summarize(records: list[BenchRecord]) -> BenchSummary:
    ratios = [r.ratio for r in records if r.ratio is not None]
    colors = [r.color_count for r in records if r.color_count is not None]
    approx = [r for r in records if r.algorithm in APPROX_ALGORITHMS and r.error is None]
    algos = sorted({r.algorithm for r in records})
    return BenchSummary(
        instances=len({r.instance_id for r in records}),
        records=len(records),
        failures=sum(1 for r in records if r.bound_ok is False),
        min_ratio=min(ratios) if ratios else None,
        mean_ratio=sum(ratios) / len(ratios) if ratios else None,
        max_color_count=max(colors) if colors else None,
        fallback_rate=sum(r.fallback for r in approx) / len(approx) if approx else None,
        per_algorithm={a: _ratio_stats([r for r in records if r.algorithm == a]) for a in algos},
    )


def _ratio_stats(records: list[BenchRecord]) -> dict[str, float | None]:
    ratios = [r.ratio for r in records if r.ratio is not None]
    return {
        "min_ratio": min(ratios) if ratios else None,
        "mean_ratio": sum(ratios) / len(ratios) if ratios else None,
    }


__all__ = [
    "ALGORITHMS",
    "BenchRecord",
    "BenchSummary",
    "bench_run",
    "instance_seeds",
    "run_one",
    "summarize",
]
