"""Matchings and uniquely-restricted (UR) verification.

A matching is uniquely restricted iff no cycle alternates between matched
and unmatched edges.  For bipartite graphs this is decided in linear time
on the digraph of matched edges; general graphs get a bounded exhaustive
search for a second perfect matching of ``G[V(M)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Bipartition, Edge, Graph, bipartition, is_bipartite, norm

GENERAL_UR_MAX_VERTICES = 40


class NotAMatchingError(ValueError):
    pass


class UnsupportedSizeError(ValueError):
    """Exhaustive verification refused beyond its size guard."""


@dataclass(frozen=True)
class Matching:
    edges: frozenset[Edge]

    @classmethod
    def of(cls, edges: Iterable[Sequence[int]]) -> Matching:
        es = frozenset(norm(u, v) for u, v in edges)
        covered = [x for e in es for x in e]
        if len(set(covered)) != len(covered):
            raise NotAMatchingError("edges share an endpoint")
        return cls(es)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(x for e in self.edges for x in e)

    def mate(self) -> dict[int, int]:
        out = {}
        for u, v in self.edges:
            out[u] = v
            out[v] = u
        return out

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))


@dataclass(frozen=True)
class AlternatingCycleWitness:
    """Cyclic vertex sequence; edge ``(c[0], c[1])`` is matched, then the
    edges alternate."""

    vertices: tuple[int, ...]

    def check(self, g: Graph, m: Matching) -> bool:
        c = self.vertices
        k = len(c)
        if k < 4 or k % 2 or len(set(c)) != k:
            return False
        for i in range(k):
            e = norm(c[i], c[(i + 1) % k])
            if e not in g.edges:
                return False
            if (e in m.edges) != (i % 2 == 0):
                return False
        return True

    def __str__(self) -> str:
        return " ".join(map(str, self.vertices))


def _as_matching(m: Matching | Iterable[Sequence[int]]) -> Matching:
    return m if isinstance(m, Matching) else Matching.of(m)


def is_matching(g: Graph, edges: Iterable[Sequence[int]]) -> bool:
    """True iff the edges are pairwise non-adjacent.  Every edge must be in ``g``."""
    seen: set[int] = set()
    ok = True
    for u, v in edges:
        if norm(u, v) not in g.edges:
            raise ValueError(f"edge ({u}, {v}) not in graph")
        if u in seen or v in seen:
            ok = False
        seen.update((u, v))
    return ok


def _check_edges(g: Graph, m: Matching) -> None:
    for e in m.edges:
        if e not in g.edges:
            raise ValueError(f"edge {e} not in graph")


def is_ur_bipartite(
    g: Graph, b: Bipartition, m: Matching | Iterable[Sequence[int]]
) -> tuple[bool, AlternatingCycleWitness | None]:
    """Acyclicity test on the digraph whose nodes are the matched edges,
    with an arc ``(a, b) -> (a', b')`` whenever ``b`` is adjacent to ``a'``."""
    m = _as_matching(m)
    _check_edges(g, m)
    oriented = [b.orient(e) for e in sorted(m.edges)]
    if any(not b.in_a(a) for a, _ in oriented):
        raise ValueError("matched edge inside one side of the bipartition")
    mate_of_a = {a: bb for a, bb in oriented}
    cycle = _digraph_cycle(g, mate_of_a, [a for a, _ in oriented])
    if cycle is None:
        return True, None
    verts: list[int] = []
    for a in cycle:
        verts.extend((a, mate_of_a[a]))
    return False, AlternatingCycleWitness(tuple(verts))


def _digraph_cycle(g: Graph, mate_of_a: dict[int, int], roots: list[int]) -> list[int] | None:
    """Find a directed cycle among matched A-vertices; node ``a`` stands for
    the edge ``(a, mate_of_a[a])``.  Returns the A-vertices along the cycle."""
    WHITE, GREY, BLACK = 0, 1, 2
    state = dict.fromkeys(mate_of_a, WHITE)
    for root in roots:
        if state[root] != WHITE:
            continue
        state[root] = GREY
        stack = [(root, iter(g.adj[mate_of_a[root]]))]
        path = [root]
        while stack:
            node, it = stack[-1]
            advanced = False
            for a2 in it:
                if a2 == node or a2 not in state:
                    continue
                if state[a2] == GREY:
                    return path[path.index(a2):]
                if state[a2] == WHITE:
                    state[a2] = GREY
                    stack.append((a2, iter(g.adj[mate_of_a[a2]])))
                    path.append(a2)
                    advanced = True
                    break
            if not advanced:
                state[node] = BLACK
                stack.pop()
                path.pop()
    return None


def is_ur_general(
    g: Graph, m: Matching | Iterable[Sequence[int]]
) -> tuple[bool, AlternatingCycleWitness | None]:
    """Search ``G[V(M)]`` for a perfect matching other than ``M``.

    Exponential in the worst case; refuses ``|V(M)| > 40``.
    """
    m = _as_matching(m)
    _check_edges(g, m)
    cov = sorted(m.covered)
    if len(cov) > GENERAL_UR_MAX_VERTICES:
        raise UnsupportedSizeError(
            f"|V(M)| = {len(cov)} exceeds the exhaustive limit {GENERAL_UR_MAX_VERTICES}"
        )
    if len(m) < 2:
        return True, None
    inside = set(cov)
    nbrs = {v: [w for w in g.adj[v] if w in inside] for v in cov}
    mate = m.mate()
    other = _other_perfect_matching(nbrs, mate, cov)
    if other is None:
        return True, None
    return False, _cycle_from_difference(mate, other)


def _other_perfect_matching(
    nbrs: dict[int, list[int]], mate: dict[int, int], order: list[int]
) -> dict[int, int] | None:
    partner: dict[int, int] = {}

    def extend(differs: bool) -> bool:
        v = next((x for x in order if x not in partner), None)
        if v is None:
            return differs
        choices = [w for w in nbrs[v] if w not in partner]
        # try leaving M first: we are looking for a different matching
        choices.sort(key=lambda w: w == mate[v])
        for w in choices:
            partner[v] = w
            partner[w] = v
            if extend(differs or w != mate[v]):
                return True
            del partner[v], partner[w]
        return False

    return dict(partner) if extend(False) else None


def _cycle_from_difference(mate: dict[int, int], other: dict[int, int]) -> AlternatingCycleWitness:
    start = next(v for v in sorted(mate) if mate[v] != other[v])
    cyc = [start]
    x, use_m = start, True
    while True:
        x = mate[x] if use_m else other[x]
        use_m = not use_m
        if x == start:
            break
        cyc.append(x)
    return AlternatingCycleWitness(tuple(cyc))


def is_ur(
    g: Graph, m: Matching | Iterable[Sequence[int]], b: Bipartition | None = None
) -> tuple[bool, AlternatingCycleWitness | None]:
    """Dispatch to the bipartite digraph test when possible."""
    if b is None and is_bipartite(g):
        b = bipartition(g)
    if b is not None:
        return is_ur_bipartite(g, b, m)
    return is_ur_general(g, m)


def is_induced_matching(g: Graph, m: Matching | Iterable[Sequence[int]]) -> bool:
    m = _as_matching(m)
    cov = m.covered
    inner = sum(1 for v in cov for w in g.adj[v] if w in cov) // 2
    return inner == len(m)


def is_ur_bruteforce(g: Graph, m: Matching | Iterable[Sequence[int]]) -> bool:
    """Definitional check: no other matching covers exactly ``V(M)``.

    Enumerates every edge subset of ``G[V(M)]`` of size ``|M|``; only for
    tiny inputs.
    """
    from itertools import combinations

    m = _as_matching(m)
    cov = m.covered
    inner = sorted(e for e in g.edges if e[0] in cov and e[1] in cov)
    for cand in combinations(inner, len(m)):
        ends = [x for e in cand for x in e]
        if len(set(ends)) == len(ends) and set(ends) == cov and frozenset(cand) != m.edges:
            return False
    return True
