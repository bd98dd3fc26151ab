from __future__ import annotations

import pytest
from hypothesis import given

from strategies import bipartite_graphs, graphs
from urmatch import generators as gen
from urmatch.graph import (
    Graph,
    GraphFormatError,
    NotBipartiteError,
    bipartition,
    classify_c4s,
    components,
    find_twins,
    four_cycles,
    is_bipartite,
    parse_graph,
    write_graph,
)


def test_parse_c4_with_header():
    g = parse_graph("p 4 4\n0 1\n1 2\n2 3\n3 0\n")
    assert g.n == 4 and g.sorted_edges() == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_parse_duplicate_edge_rejected():
    with pytest.raises(GraphFormatError, match="duplicate"):
        parse_graph("0 1\n0 1\n")


@pytest.mark.parametrize(
    "text",
    ["0 0\n", "p 2 1\n0 5\n", "0 1 2\n", "0 1\np 2 1\n", "p 3 2\n0 1\n"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_parse_error_reports_line_number():
    with pytest.raises(GraphFormatError) as info:
        parse_graph("# comment\n0 1\n1 1\n")
    assert "3" in str(info.value)


def test_fig1_fixture_is_3_regular_bipartite_on_10_vertices():
    g = gen.fig1()
    assert (g.n, g.m) == (10, 15)
    assert g.min_degree == g.max_degree == 3
    b = bipartition(g)
    assert b.side_a == frozenset(range(5)) and b.side_b == frozenset(range(5, 10))


def test_bipartition_c4():
    b = bipartition(gen.cycle(4))
    assert b.side_a == {0, 2} and b.side_b == {1, 3}


def test_bipartition_triangle_gives_odd_cycle():
    with pytest.raises(NotBipartiteError) as info:
        bipartition(gen.complete(3))
    assert sorted(info.value.cycle) == [0, 1, 2]


def test_twins():
    assert find_twins(gen.cycle(4)) == [(0, 2), (1, 3)]
    assert find_twins(gen.path(4)) == []
    assert len(find_twins(gen.complete_bipartite(3, 3))) == 6


def test_classify_c4s():
    c4 = gen.cycle(4)
    (only,) = classify_c4s(c4, bipartition(c4))
    assert only.kind == "twin"
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
    (only,) = classify_c4s(g, bipartition(g))
    assert only.kind == "C4_1" and only.a[0] == 0
    f = gen.fig1()
    kinds = {c.kind for c in classify_c4s(f, bipartition(f))}
    assert kinds == {"C4_2"}


def _four_cycles_brute(g: Graph) -> set[frozenset]:
    out = set()
    for a in range(g.n):
        for b in g.adj[a]:
            for c in g.adj[b]:
                if c == a:
                    continue
                for d in g.adj[c]:
                    if d not in (a, b) and g.has_edge(d, a):
                        out.add(frozenset([frozenset((a, b)), frozenset((b, c)), frozenset((c, d)), frozenset((d, a))]))
    return out


@given(graphs(n_max=8))
def test_four_cycles_match_brute_force(g):
    found = set()
    for x, p, y, q in four_cycles(g):
        found.add(frozenset([frozenset((x, p)), frozenset((p, y)), frozenset((y, q)), frozenset((q, x))]))
    assert found == _four_cycles_brute(g)


@given(graphs())
def test_round_trip(g):
    assert parse_graph(write_graph(g)) == g


@given(graphs())
def test_adjacency_symmetric_and_consistent(g):
    for u in range(g.n):
        for v in g.adj[u]:
            assert u in g.adj[v]
    assert sum(len(a) for a in g.adj) == 2 * g.m


@given(bipartite_graphs())
def test_bipartition_separates_edges_and_is_canonical(g):
    b = bipartition(g)
    assert b.side_a | b.side_b == frozenset(range(g.n))
    assert not b.side_a & b.side_b
    for u, v in g.edges:
        assert b.in_a(u) != b.in_a(v)
    for comp in components(g):
        assert b.in_a(min(comp))


@given(graphs())
def test_is_bipartite_matches_networkx(g):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    assert is_bipartite(g) == nx.is_bipartite(h)
