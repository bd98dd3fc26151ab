"""Acceptance suite: one test per criterion.  Each test records a
``criterion`` property; the conftest prints one PASS/FAIL line per criterion
at the end of the run."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from urmatch import generators as gen
from urmatch.c4free import alpha, choose_sides
from urmatch.c4free import approximate as approximate_c4free
from urmatch.cli import main
from urmatch.coloring import (
    FIG1_COLORING,
    ImprovementError,
    color_delta2_minus_delta,
    fig1_coloring,
    greedy_coloring,
    improve_coloring,
)
from urmatch.exact import chi_ur_exact, min_ur_partition_of_matching, nu_exact, nu_s_exact, nu_ur_exact
from urmatch.graph import Graph, bipartition, components, four_cycles, is_bipartite, is_connected, write_graph
from urmatch.subcubic import GUARANTEE, approximate_subcubic
from urmatch.subcubic.core import core_loop
from urmatch.subcubic.reductions import apply_reductions
from urmatch.verify import is_ur_bipartite, is_ur_bruteforce, is_ur_general


@pytest.fixture
def criterion(record_property):
    def start(name: str):
        record_property("criterion", name)
        return lambda detail: record_property("detail", detail)

    return start


def matchings(g: Graph):
    """Every matching of ``g`` (including the empty one)."""
    edges = g.sorted_edges()

    def rec(i: int, used: set[int], acc: list):
        if i == len(edges):
            yield list(acc)
            return
        yield from rec(i + 1, used, acc)
        u, v = edges[i]
        if u not in used and v not in used:
            acc.append(edges[i])
            yield from rec(i + 1, used | {u, v}, acc)
            acc.pop()

    return rec(0, set(), [])


def ratio_ok(size: int, opt: int, guarantee: Fraction, fallback: bool) -> bool:
    target = opt - 1 if fallback else opt
    return size >= math.ceil(guarantee * max(target, 0))


def is_kdd(g: Graph) -> bool:
    d = g.max_degree
    return g.n == 2 * d and g.is_regular() and is_bipartite(g)


# --- 1 ---------------------------------------------------------------------------


def test_criterion_01_definitional_chain(criterion):
    detail = criterion("1 definitional chain nu_s <= nu_ur <= nu")
    start = time.perf_counter()
    graphs = list(gen.enumerate_upto(8, connected=True))
    bad = 0
    for g in graphs:
        s, ur, nu = nu_s_exact(g)[0], nu_ur_exact(g)[0], nu_exact(g)
        bad += not (s <= ur <= nu)
    elapsed = time.perf_counter() - start
    detail(f"{len(graphs)} connected graphs n<=8, {bad} violations, {elapsed:.0f}s")
    assert len(graphs) == 1 + 1 + 2 + 6 + 21 + 112 + 853 + 11117
    assert bad == 0
    assert elapsed < 300


# --- 2 ---------------------------------------------------------------------------


def test_criterion_02_verifier_equivalence(criterion):
    detail = criterion("2 verifier equivalence")
    graphs = list(gen.enumerate_upto(8, is_bipartite))
    checked = disagreements = 0
    for g in graphs:
        b = bipartition(g)
        for m in matchings(g):
            x = is_ur_bipartite(g, b, m)[0]
            y = is_ur_general(g, m)[0]
            z = is_ur_bruteforce(g, m)
            checked += 1
            disagreements += not (x == y == z)
    detail(f"{len(graphs)} bipartite graphs n<=8, {checked} matchings, {disagreements} disagreements")
    assert disagreements == 0


# --- 3 ---------------------------------------------------------------------------


def subcubic_instances():
    yield from gen.enumerate_upto(10, gen.subcubic_bipartite, connected=True, n_min=6)
    rng = random.Random(2024)
    for i in range(300):
        n = rng.randint(11, 14)
        yield gen.random_subcubic_bipartite(n, rng.getrandbits(32), connected=True, density=rng.choice([0.5, 1.0, 2.0]))


def test_criterion_03_subcubic_ratio(criterion):
    detail = criterion("3 subcubic 5/9 ratio")
    start = time.perf_counter()
    count = bad = fallbacks = raw = 0
    worst = None
    for g in subcubic_instances():
        if not is_connected(g):
            continue
        res = approximate_subcubic(g, assert_invariants=True)
        opt = nu_ur_exact(g)[0]
        assert is_ur_bipartite(g, bipartition(g), res.matching)[0]
        count += 1
        fallbacks += res.fallback
        bad += not ratio_ok(len(res), opt, GUARANTEE, res.fallback)
        if opt:
            worst = min(worst or 1.0, len(res) / opt)
        # the labelled core itself, without the small-graph brute force
        red = apply_reductions(g)
        for comp in components(red.residual):
            k, _ = red.residual.induced(comp)
            if k.m == 0 or k.is_regular():
                continue
            kb = choose_sides(k, 3)
            m = core_loop(k, kb, assert_invariants=True, exact_below=0)
            assert is_ur_bipartite(k, kb, m)[0]
            raw += 1
            bad += 9 * len(m) < 5 * len(kb.side_a)
    elapsed = time.perf_counter() - start
    detail(
        f"{count} instances, {bad} below bound, min ratio {worst:.3f}, "
        f"fallback rate {fallbacks / count:.3f}, {raw} raw core runs, {elapsed:.0f}s"
    )
    assert count >= 500 and bad == 0 and elapsed < 600


# --- 4 ---------------------------------------------------------------------------


def _c4free_bipartite(g: Graph) -> bool:
    return g.max_degree <= 5 and is_bipartite(g) and not four_cycles(g)


@pytest.fixture(scope="module")
def small_c4free():
    return list(gen.enumerate_upto(10, _c4free_bipartite, connected=True, n_min=6))


def test_criterion_04_c4free_ratio(criterion, small_c4free):
    detail = criterion("4 C4-free alpha(Delta) ratio")
    start = time.perf_counter()
    parts = []
    for delta in (3, 4, 5):
        instances = [g for g in small_c4free if g.max_degree <= delta]
        rng = random.Random(delta)
        while len(instances) < 500:
            g = gen.random_c4free_bipartite(rng.randint(6, 14), delta, rng.getrandbits(32), connected=True)
            if is_connected(g):
                instances.append(g)
        bad = fallbacks = 0
        for g in instances:
            res = approximate_c4free(g, delta=delta, assert_invariants=True)
            assert res.guarantee == alpha(delta)
            assert is_ur_bipartite(g, bipartition(g), res.matching)[0]
            fallbacks += res.fallback
            bad += not ratio_ok(len(res), nu_ur_exact(g)[0], alpha(delta), res.fallback)
        parts.append(f"Delta={delta}: {len(instances)} inst, {bad} bad, fallback {fallbacks}")
        assert bad == 0
    detail("; ".join(parts) + f", {time.perf_counter() - start:.0f}s")
    assert (alpha(3), alpha(4)) == (Fraction(5, 9), Fraction(11, 29))


# --- 5 ---------------------------------------------------------------------------


def test_criterion_05_invariants(criterion, tmp_path, capsys):
    detail = criterion("5 invariants after every extension step")
    rng = random.Random(5)
    runs = 0
    for _ in range(60):
        n = rng.randint(30, 150)
        g = gen.random_subcubic_bipartite(n, rng.getrandbits(32), connected=True, density=rng.choice([0.5, 1.0, 2.0]))
        approximate_subcubic(g, assert_invariants=True)
        runs += 1
    for delta in (3, 4, 5):
        for _ in range(20):
            g = gen.random_c4free_bipartite(rng.randint(30, 150), delta, rng.getrandbits(32), connected=True)
            approximate_c4free(g, delta=delta, assert_invariants=True)
            runs += 1
    # the command-line switch reaches the same checks
    cli_runs = 0
    for seed in range(5):
        path = tmp_path / f"g{seed}.txt"
        path.write_text(write_graph(gen.random_subcubic_bipartite(60, seed, connected=True)))
        assert main(["approx", "subcubic", "-g", str(path), "--assert-invariants", "--no-oracle"]) == 0
        path.write_text(write_graph(gen.random_c4free_bipartite(60, 4, seed, connected=True)))
        assert main(["approx", "c4free", "-g", str(path), "--assert-invariants", "--no-oracle"]) == 0
        cli_runs += 2
    capsys.readouterr()
    detail(f"{runs} library runs and {cli_runs} CLI runs with invariant checks, no violation")


# --- 6 ---------------------------------------------------------------------------


def test_criterion_06_greedy(criterion):
    detail = criterion("6 greedy <= Delta^2 colours, all classes UR")
    count = 0
    for g in gen.enumerate_upto(7, lambda h: h.max_degree <= 5):
        c = greedy_coloring(g)
        assert c.color_count <= g.max_degree ** 2 and c.ur_valid(g)
        count += 1
    rng = random.Random(6)
    for _ in range(150):
        g = gen.random_bipartite(rng.randint(2, 15), rng.randint(2, 15), rng.randint(1, 5), rng.getrandbits(32))
        order = list(range(g.n))
        rng.shuffle(order)
        c = greedy_coloring(g, order)
        assert c.color_count <= g.max_degree ** 2 and c.ur_valid(g)
        count += 1
    for d, expected in ((2, 4), (3, 9)):
        g = gen.complete_bipartite(d, d)
        assert greedy_coloring(g).color_count == expected == chi_ur_exact(g)[0]
    detail(f"{count} graphs; K22 = 4 and K33 = 9 confirmed by oracle")


# --- 7 ---------------------------------------------------------------------------


def test_criterion_07_improve(criterion):
    detail = criterion("7 improve reaches <= Delta^2 - 1")
    count = 0
    graphs = [g for g in gen.enumerate_upto(7, lambda h: h.max_degree <= 5, connected=True) if g.m]
    rng = random.Random(7)
    while len(graphs) < 1300:
        try:
            g = gen.random_bipartite(rng.randint(3, 12), rng.randint(3, 12), rng.randint(2, 5), rng.getrandbits(32), connected=True)
        except gen.GeneratorError:
            continue  # no connected tree within the degree cap
        if is_connected(g) and g.m:
            graphs.append(g)
    for g in graphs:
        if is_kdd(g):
            with pytest.raises(ImprovementError):
                improve_coloring(g, greedy_coloring(g))
            continue
        c = improve_coloring(g, greedy_coloring(g))
        assert c.color_count <= g.max_degree ** 2 - 1 and c.ur_valid(g)
        count += 1
    with pytest.raises(ImprovementError):
        improve_coloring(gen.cycle(4), greedy_coloring(gen.cycle(4)))
    detail(f"{count} connected non-K_(D,D) graphs; K22 raises ImprovementError")


# --- 8 ---------------------------------------------------------------------------


def test_criterion_08_fig1_fixtures(criterion):
    detail = criterion("8 fixture graphs")
    g = gen.fig1()
    assert (g.n, g.m, g.is_regular(), g.max_degree) == (10, 15, True, 3)
    c = fig1_coloring()
    b = bipartition(g)
    assert sorted(e for cls in FIG1_COLORING for e in cls) == g.sorted_edges()
    for cls in FIG1_COLORING:
        assert is_ur_bipartite(g, b, list(cls))[0]
    assert c.color_count == 6 and c.ur_valid(g)
    diagonal = [(i, i + 5) for i in range(5)]
    k, _ = min_ur_partition_of_matching(g, diagonal)
    assert k == 3 > g.max_degree - 1
    h, m = gen.two_cliques_with_matching(3)
    k2, parts = min_ur_partition_of_matching(h, m)
    assert k2 == 3
    assert all(is_ur_general(h, p)[0] for p in parts)
    detail("fig1 6-class colouring verified; diagonal needs 3 parts; two K3 + matching needs 3")


# --- 9 ---------------------------------------------------------------------------


def test_criterion_09_delta2md(criterion):
    detail = criterion("9 delta2md <= 12 colours at Delta = 4")
    rng = random.Random(9)
    count = worst = 0
    while count < 100:
        g = gen.random_bipartite(rng.randint(5, 12), rng.randint(5, 12), 4, rng.getrandbits(32), connected=True)
        if g.max_degree != 4 or not is_connected(g) or is_kdd(g):
            continue
        c = color_delta2_minus_delta(g)
        assert c.color_count <= 12 and c.ur_valid(g)
        assert set(c.color_of) == set(g.edges)
        sk = c.skeleton
        assert set(sk) == set(g.edges) and len(set(sk.values())) == 4
        for v in range(g.n):
            at = [sk[e] for e in g.edges if v in e]
            assert len(at) == len(set(at))
        for e1, e2 in combinations(g.sorted_edges(), 2):
            if c.color_of[e1] == c.color_of[e2]:
                assert sk[e1] == sk[e2]
        worst = max(worst, c.color_count)
        count += 1
    detail(f"{count} instances, max {worst} colours")


# --- 10 --------------------------------------------------------------------------


def test_criterion_10_performance(criterion):
    detail = criterion("10 subcubic at n = 10000 under 60s")
    g = gen.random_subcubic_bipartite(10_000, 10, connected=True)
    start = time.perf_counter()
    res = approximate_subcubic(g)
    elapsed = time.perf_counter() - start
    detail(f"n={g.n}, m={g.m}, |M|={len(res)}, {elapsed:.1f}s")
    assert is_ur_bipartite(g, bipartition(g), res.matching)[0]
    assert elapsed < 60
