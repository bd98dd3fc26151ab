from __future__ import annotations

import pytest
from hypothesis import given, settings

from strategies import bipartite_graphs, graphs
from urmatch import generators as gen
from urmatch.exact import (
    BudgetExceeded,
    OracleBudget,
    chi_ur_exact,
    min_ur_partition_of_matching,
    nu_exact,
    nu_s_exact,
    nu_ur_exact,
)
from urmatch.verify import Matching, is_induced_matching, is_ur, is_ur_bruteforce

K33 = gen.complete_bipartite(3, 3)
DIAGONAL = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)]
# a1b3, a2b1, a3b5, a4b2, a5b4 with a_i = i-1 and b_i = i+4
SHIFTED = [(0, 7), (1, 5), (2, 9), (3, 6), (4, 8)]


def test_nu_examples():
    assert nu_exact(gen.cycle(4)) == 2
    assert nu_exact(K33) == 3
    assert nu_exact(gen.fig1()) == 5
    assert nu_exact(gen.complete(5)) == 2


def test_nu_ur_examples():
    assert nu_ur_exact(gen.cycle(4))[0] == 1
    assert nu_ur_exact(K33)[0] == 1
    k, m = nu_ur_exact(gen.cycle(6))
    assert k == 2 and is_ur_bruteforce(gen.cycle(6), m)


def test_nu_s_examples():
    assert nu_s_exact(gen.path(4))[0] == 1
    assert nu_s_exact(gen.cycle(6))[0] == 2
    assert nu_s_exact(K33)[0] == 1


def test_chi_ur_examples():
    assert chi_ur_exact(gen.cycle(4))[0] == 4
    assert chi_ur_exact(gen.path(4))[0] == 2
    assert chi_ur_exact(gen.path(2))[0] == 1
    assert chi_ur_exact(K33)[0] == 9


def test_min_partition_examples():
    f = gen.fig1()
    assert min_ur_partition_of_matching(f, DIAGONAL)[0] == 3
    k, parts = min_ur_partition_of_matching(f, SHIFTED)
    assert k == 2
    assert all(is_ur(f, p)[0] for p in parts)
    assert min_ur_partition_of_matching(gen.path(4), [(0, 1), (2, 3)])[0] == 1


def test_budget_is_enforced():
    big = gen.random_subcubic_bipartite(60, seed=1)
    with pytest.raises(BudgetExceeded):
        nu_ur_exact(big)
    assert nu_ur_exact(gen.path(4), OracleBudget(max_vertices=4, max_edges=3))[0] == 2


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("URMATCH_MAX_VERTICES", "7")
    assert OracleBudget.from_env().max_vertices == 7


def _nu_ur_brute(g):
    from itertools import combinations

    best = 0
    edges = g.sorted_edges()
    for k in range(1, g.n // 2 + 1):
        for es in combinations(edges, k):
            ends = [x for e in es for x in e]
            if len(set(ends)) == len(ends) and is_ur_bruteforce(g, es):
                best = k
                break
        else:
            break
    return best


@settings(max_examples=60, deadline=None)
@given(graphs(n_max=7))
def test_nu_ur_matches_brute_force(g):
    k, m = nu_ur_exact(g)
    assert len(m) == k and is_ur_bruteforce(g, m)
    assert k == _nu_ur_brute(g)


@settings(max_examples=80, deadline=None)
@given(graphs(n_max=8))
def test_definitional_chain(g):
    s, ms = nu_s_exact(g)
    u, mu = nu_ur_exact(g)
    assert s <= u <= nu_exact(g)
    assert is_induced_matching(g, ms)


@settings(max_examples=30, deadline=None)
@given(bipartite_graphs(n_max=7))
def test_chi_ur_coloring_is_valid(g):
    k, col = chi_ur_exact(g)
    classes = {}
    for e, c in col.items():
        classes.setdefault(c, []).append(e)
    assert len(classes) == k and set(col) == set(g.edges)
    assert all(is_ur(g, Matching.of(es))[0] for es in classes.values())
    assert k >= g.max_degree
