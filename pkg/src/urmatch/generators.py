"""Instance generators: fixed fixtures, seeded random families, and
exhaustive enumeration of small graphs up to isomorphism."""

from __future__ import annotations

import random
from collections import defaultdict
from importlib import resources
from itertools import combinations
from typing import Callable, Iterator

import networkx as nx

from .graph import Graph, is_bipartite, is_connected, parse_graph


class GeneratorError(ValueError):
    """Parameters the generator cannot satisfy."""


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise GeneratorError("complete_bipartite needs positive side sizes")
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def fixture(name: str) -> Graph:
    """Shipped fixture graph: ``fig1``, ``k33`` or ``fano``."""
    text = resources.files("urmatch.fixtures").joinpath(f"{name}.txt").read_text()
    return parse_graph(text)


def fig1() -> Graph:
    """The 3-regular bipartite graph on a1..a5 (ids 0..4) and b1..b5 (ids 5..9)."""
    return fixture("fig1")


def fano() -> Graph:
    """Point-line incidence graph of the Fano plane (Heawood graph)."""
    return fixture("fano")


def two_cliques_with_matching(k: int) -> tuple[Graph, list[tuple[int, int]]]:
    """Two disjoint copies of K_k joined by the perfect matching i -- k+i."""
    es = list(combinations(range(k), 2)) + [(k + i, k + j) for i, j in combinations(range(k), 2)]
    m = [(i, k + i) for i in range(k)]
    return Graph.from_edges(2 * k, es + m), m


# --- random families --------------------------------------------------------


def _relabel(n: int, edges: list[tuple[int, int]], rng: random.Random) -> Graph:
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def _capped_bipartite(
    na: int,
    nb: int,
    cap: int,
    rng: random.Random,
    extra_attempts: int,
    connected: bool,
    c4free: bool = False,
) -> list[tuple[int, int]]:
    """Vertices ``0..na-1`` form side A, ``na..na+nb-1`` side B."""
    n = na + nb
    adj: list[set[int]] = [set() for _ in range(n)]
    edges: list[tuple[int, int]] = []

    def closes_c4(a: int, b: int) -> bool:
        nb_b = adj[b]
        return any(nb_b & adj[x] for x in adj[a])

    def add(a: int, b: int) -> None:
        adj[a].add(b)
        adj[b].add(a)
        edges.append((a, b))

    if connected:
        a_side, b_side = list(range(na)), list(range(na, n))
        rng.shuffle(a_side)
        rng.shuffle(b_side)
        in_tree_a, in_tree_b = [a_side.pop()], []
        pending = a_side + b_side
        rng.shuffle(pending)
        stalled = 0
        while pending:
            v = pending.pop()
            pool = in_tree_b if v < na else in_tree_a
            open_ = [w for w in pool if len(adj[w]) < cap]
            if not open_:
                pending.insert(0, v)
                stalled += 1
                if stalled > len(pending):
                    raise GeneratorError("cannot build a connected degree-capped tree")
                continue
            stalled = 0
            w = rng.choice(open_)
            add(v, w) if v < na else add(w, v)
            (in_tree_a if v < na else in_tree_b).append(v)

    for _ in range(extra_attempts):
        a = rng.randrange(na)
        b = na + rng.randrange(nb)
        if b in adj[a] or len(adj[a]) >= cap or len(adj[b]) >= cap:
            continue
        if c4free and closes_c4(a, b):
            continue
        add(a, b)
    return edges


def random_bipartite(
    na: int, nb: int, delta: int, seed: int, density: float = 1.0, connected: bool = False
) -> Graph:
    """Random bipartite graph with maximum degree at most ``delta``.

    ``density`` scales the number of edge attempts relative to ``delta*(na+nb)/2``.
    """
    if na < 1 or nb < 1 or delta < 1:
        raise GeneratorError("random_bipartite needs positive parameters")
    rng = random.Random(seed)
    attempts = int(density * 2 * delta * (na + nb))
    edges = _capped_bipartite(na, nb, delta, rng, attempts, connected)
    return _relabel(na + nb, edges, rng)


def random_subcubic_bipartite(n: int, seed: int, connected: bool = False, density: float = 1.0) -> Graph:
    if n < 2:
        raise GeneratorError("random_subcubic_bipartite needs n >= 2")
    rng = random.Random(seed)
    na = n // 2
    attempts = int(density * 3 * n)
    edges = _capped_bipartite(na, n - na, 3, rng, attempts, connected)
    return _relabel(n, edges, rng)


def random_c4free_bipartite(n: int, delta: int, seed: int, connected: bool = False) -> Graph:
    """Incremental insertion rejecting edges that would close a 4-cycle,
    giving up after ``50*n`` attempts."""
    if n < 2 or delta < 1:
        raise GeneratorError("random_c4free_bipartite needs n >= 2 and delta >= 1")
    rng = random.Random(seed)
    na = n // 2
    edges = _capped_bipartite(na, n - na, delta, rng, 50 * n, connected, c4free=True)
    if not edges:
        raise GeneratorError("no edge could be inserted")
    return _relabel(n, edges, rng)


MODELS: dict[str, Callable[..., Graph]] = {
    "complete_bipartite": complete_bipartite,
    "random_bipartite": random_bipartite,
    "random_subcubic_bipartite": random_subcubic_bipartite,
    "random_c4free_bipartite": random_c4free_bipartite,
    "fig1": fig1,
    "fano": fano,
}


def generate(model: str, **params) -> Graph:
    try:
        fn = MODELS[model]
    except KeyError:
        raise GeneratorError(f"unknown model {model!r}") from None
    return fn(**params)


# --- exhaustive enumeration ---------------------------------------------------


def _invariant(g: Graph) -> tuple:
    deg = [len(a) for a in g.adj]
    tri = [sum(1 for u, w in combinations(g.adj[v], 2) if g.has_edge(u, w)) for v in range(g.n)]
    sig = sorted((deg[v], tri[v], tuple(sorted(deg[w] for w in g.adj[v]))) for v in range(g.n))
    return (g.n, g.m, tuple(sig))


def _to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


class _IsoClasses:
    def __init__(self) -> None:
        self.buckets: dict[tuple, list[tuple[Graph, nx.Graph]]] = defaultdict(list)
        self.members: list[Graph] = []

    def add(self, g: Graph) -> bool:
        bucket = self.buckets[_invariant(g)]
        h = _to_nx(g)
        for _, other in bucket:
            if nx.is_isomorphic(h, other):
                return False
        bucket.append((g, h))
        self.members.append(g)
        return True


def _grow(level: list[Graph], keep, connected: bool) -> list[Graph]:
    classes = _IsoClasses()
    for parent in level:
        k = parent.n
        for r in range(1 if connected else 0, k + 1):
            for nbrs in combinations(range(k), r):
                child = Graph.from_edges(k + 1, list(parent.edges) + [(v, k) for v in nbrs])
                if keep is None or keep(child):
                    classes.add(child)
    return classes.members


def enumerate_upto(
    n_max: int,
    keep: Callable[[Graph], bool] | None = None,
    connected: bool = False,
    n_min: int = 1,
) -> Iterator[Graph]:
    """All graphs on ``n_min..n_max`` vertices up to isomorphism.

    ``keep`` must describe a class closed under vertex deletion (for example
    "bipartite" or "maximum degree <= 3"); graphs are grown one vertex at a
    time and pruned with it.  With ``connected`` only connected graphs are
    grown, which is exhaustive because every connected graph has a vertex
    whose removal leaves it connected.
    """
    level = [Graph.from_edges(1, [])]
    for size in range(1, n_max + 1):
        if size > 1:
            level = _grow(level, keep, connected)
        if size >= n_min:
            yield from level


def enumerate_graphs(
    n: int, keep: Callable[[Graph], bool] | None = None, connected: bool = False
) -> list[Graph]:
    return list(enumerate_upto(n, keep, connected, n_min=n))


def subcubic_bipartite(g: Graph) -> bool:
    return g.max_degree <= 3 and is_bipartite(g)


__all__ = [
    "GeneratorError",
    "complete_bipartite",
    "cycle",
    "path",
    "complete",
    "fixture",
    "fig1",
    "fano",
    "two_cliques_with_matching",
    "random_bipartite",
    "random_subcubic_bipartite",
    "random_c4free_bipartite",
    "generate",
    "enumerate_graphs",
    "enumerate_upto",
    "subcubic_bipartite",
    "is_connected",
]
