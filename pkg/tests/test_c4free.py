from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from urmatch import generators as gen
from urmatch.c4free import (
    ContainsC4Error,
    ExtensionState,
    alpha,
    approximate,
    accounting_slack,
    extension_loop,
    resolve_case1,
    resolve_case2,
)
from urmatch.exact import nu_ur_exact
from urmatch.graph import Bipartition, Graph, NotBipartiteError, bipartition
from urmatch.verify import is_ur_bipartite
from urmatch.wrapper import PreconditionError


def sides(a, b) -> Bipartition:
    return Bipartition(frozenset(a), frozenset(b))


def test_alpha_values():
    assert alpha(3) == Fraction(5, 9)
    assert alpha(4) == Fraction(11, 29)
    assert alpha(5) == Fraction(19, 67)


def test_case2_inequality_arithmetic_at_delta4_k2():
    delta, k = 4, 2
    assert Fraction((delta - 1) ** 2, delta - 2) * ((delta - 2) - (k - 1)) == Fraction(9, 2)
    assert Fraction(9, 2) >= delta - k - 1


def test_extension_loop_c6():
    g = gen.cycle(6)
    m = extension_loop(g, bipartition(g), 3, assert_invariants=True)
    assert len(m) >= math.ceil(Fraction(5, 9) * 3) == 2


def test_extension_loop_spider_matches_every_a_vertex():
    # centre 0, middle layer 1..3, leaves 4..6
    g = Graph.from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)])
    b = sides({1, 2, 3}, {0, 4, 5, 6})
    m = extension_loop(g, b, 3, assert_invariants=True)
    assert len(m) == 3 == nu_ur_exact(g)[0]


def test_extension_loop_p5_interior_a_side_at_delta4():
    g = gen.path(5)
    b = sides({1, 3}, {0, 2, 4})
    m = extension_loop(g, b, 4, assert_invariants=True)
    assert Fraction(len(m)) >= alpha(4) * 2


def test_case1_single_step_adds_one_edge():
    g = gen.path(3)  # B = {0, 2}, A = {1}
    st = ExtensionState.initial(g, sides({1}, {0, 2}), 3)
    edges, n_d = resolve_case1(st, 0, 1)
    assert len(edges) == 1 and st.s == 1 and n_d == 0


def test_case1_two_edges_from_disjoint_w_neighbourhoods():
    # A = {0, 1, 2}, B = {3, 4, 5}; 3 and 4 are in U next to different
    # unmatched A-vertices 0 and 1; both have only 2 outside
    g = Graph.from_edges(6, [(0, 3), (1, 4), (2, 3), (2, 4), (0, 5), (1, 5)])
    b = sides({0, 1, 2}, {3, 4, 5})
    st = ExtensionState.initial(g, b, 3)
    st.enter([5, 0, 1], [])
    assert st.d == 2
    edges, n_d = resolve_case1(st, 3, 2)
    assert len(edges) == 2 and st.s == 2


def test_case2_edge_to_unmatched_inside_neighbour():
    g = Graph.from_edges(6, [(0, 3), (0, 4), (0, 5), (1, 3), (2, 4)])
    b = sides({0, 1, 2}, {3, 4, 5})
    st = ExtensionState.initial(g, b, 3)
    st.enter([3, 1], [])
    # 4 now has outside neighbours 0 and 2 and no U-neighbour: second subcase
    edges, n_d = resolve_case2(st, 4)
    assert edges == [(0, 4)] and st.s == 1


def test_approximate_p4_and_c6():
    assert len(approximate(gen.path(4))) == 2
    r = approximate(gen.cycle(6))
    assert len(r) == 2 == nu_ur_exact(gen.cycle(6))[0]


def test_approximate_fano_incidence_graph():
    g = gen.fano()
    r = approximate(g, assert_invariants=True)
    assert r.fallback or r.max_matching_used
    best = max(nu_ur_exact(g.remove_vertices([u])[0])[0] for u in range(g.n))
    assert len(r) >= math.ceil(Fraction(5, 9) * best)
    assert is_ur_bipartite(g, bipartition(g), r.matching)[0]


def test_preconditions():
    with pytest.raises(ContainsC4Error):
        approximate(gen.cycle(4))
    with pytest.raises(NotBipartiteError):
        approximate(gen.complete(3))
    assert issubclass(ContainsC4Error, PreconditionError)


def test_trace_records_counters():
    g = gen.random_c4free_bipartite(40, 3, seed=2, connected=True)
    trace = []
    approximate(g, trace=trace)
    assert trace
    for rec in trace:
        assert rec.slack == accounting_slack(3, rec.s, rec.d, rec.f) >= 0
        assert rec.case in ("1", "2")


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(6, 16), st.sampled_from([3, 4, 5]), st.integers(0, 10**6))
def test_ratio_against_oracle(n, delta, seed):
    g = gen.random_c4free_bipartite(n, delta, seed=seed, connected=True)
    r = approximate(g, assert_invariants=True)
    opt = nu_ur_exact(g)[0]
    d = max(3, g.max_degree)
    target = opt - 1 if r.fallback else opt
    assert len(r) >= math.ceil(alpha(d) * target)
    assert is_ur_bipartite(g, bipartition(g), r.matching)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(30, 120), st.sampled_from([3, 4, 5]), st.integers(0, 10**6))
def test_extension_state_invariants_on_larger_graphs(n, delta, seed):
    g = gen.random_c4free_bipartite(n, delta, seed=seed, connected=True)
    r = approximate(g, assert_invariants=True)
    assert is_ur_bipartite(g, bipartition(g), r.matching)[0]
