"""Exponential exact solvers used as ground truth: nu, nu_s, nu_ur,
chi'_ur and the minimum UR partition of a given matching.

Every solver is guarded by an :class:`OracleBudget`; running out of it
raises :class:`BudgetExceeded` rather than returning an approximation.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .graph import Bipartition, Graph, NotBipartiteError, bipartition, norm
from .verify import Matching, is_ur


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 20
    max_edges: int = 30
    time_limit: float = 60.0

    def __post_init__(self) -> None:
        if self.max_vertices <= 0 or self.max_edges <= 0 or self.time_limit <= 0:
            raise ValueError("budget fields must be positive")

    @classmethod
    def from_env(cls) -> OracleBudget:
        """Defaults overridable through ``URMATCH_MAX_VERTICES``,
        ``URMATCH_MAX_EDGES`` and ``URMATCH_TIME_LIMIT``."""
        return cls(
            int(os.environ.get("URMATCH_MAX_VERTICES", 20)),
            int(os.environ.get("URMATCH_MAX_EDGES", 30)),
            float(os.environ.get("URMATCH_TIME_LIMIT", 60.0)),
        )

    def check_size(self, g: Graph, what: str) -> None:
        if g.n > self.max_vertices or g.m > self.max_edges:
            raise BudgetExceeded(
                f"{what}: graph with n={g.n}, m={g.m} exceeds budget "
                f"({self.max_vertices} vertices, {self.max_edges} edges)"
            )


DEFAULT_BUDGET = OracleBudget()


class _Clock:
    def __init__(self, budget: OracleBudget, what: str):
        self.deadline = time.monotonic() + budget.time_limit
        self.what = what
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.ticks & 1023 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"{self.what}: time limit exceeded")


def _try_bipartition(g: Graph) -> Bipartition | None:
    try:
        return bipartition(g)
    except NotBipartiteError:
        return None


# --- maximum matching ---------------------------------------------------------


def hopcroft_karp(g: Graph, b: Bipartition) -> dict[int, int]:
    """Maximum matching of a bipartite graph as a symmetric mate map."""
    INF = float("inf")
    left = sorted(b.side_a)
    mate: dict[int, int] = {}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        queue = deque()
        for a in left:
            if a in mate:
                dist[a] = INF
            else:
                dist[a] = 0
                queue.append(a)
        found = False
        while queue:
            a = queue.popleft()
            for bb in g.adj[a]:
                a2 = mate.get(bb)
                if a2 is None:
                    found = True
                elif dist[a2] == INF:
                    dist[a2] = dist[a] + 1
                    queue.append(a2)
        return found

    def dfs(root: int) -> bool:
        # iterative to survive long augmenting paths
        stack = [(root, iter(g.adj[root]))]
        trail: list[tuple[int, int]] = []
        while stack:
            a, it = stack[-1]
            advanced = False
            for bb in it:
                a2 = mate.get(bb)
                if a2 is None:
                    trail.append((a, bb))
                    for x, y in trail:
                        mate[x] = y
                        mate[y] = x
                    return True
                if dist[a2] == dist[a] + 1:
                    trail.append((a, bb))
                    stack.append((a2, iter(g.adj[a2])))
                    advanced = True
                    break
            if not advanced:
                dist[a] = INF
                stack.pop()
                if trail:
                    trail.pop()
        return False

    while bfs():
        for a in left:
            if a not in mate:
                dfs(a)
    return mate


def maximum_matching(g: Graph) -> Matching:
    """Maximum matching of a bipartite graph (Hopcroft-Karp)."""
    b = bipartition(g)
    mate = hopcroft_karp(g, b)
    return Matching.of({norm(u, v) for u, v in mate.items()})


def nu_exact(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    b = _try_bipartition(g)
    if b is not None:
        return len(hopcroft_karp(g, b)) // 2
    budget.check_size(g, "nu")
    clock = _Clock(budget, "nu")
    memo: dict[int, int] = {}
    adjmask = [sum(1 << w for w in g.adj[v]) for v in range(g.n)]

    def best(free: int) -> int:
        if free in memo:
            return memo[free]
        clock.tick()
        # drop vertices with no free neighbour
        while free:
            v = (free & -free).bit_length() - 1
            if adjmask[v] & free:
                break
            free &= ~(1 << v)
        if not free:
            return 0
        v = (free & -free).bit_length() - 1
        rest = free & ~(1 << v)
        res = best(rest)
        cand = adjmask[v] & rest
        while cand:
            w = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            res = max(res, 1 + best(rest & ~(1 << w)))
        memo[free] = res
        return res

    return best((1 << g.n) - 1)


# --- alternating-cycle test used inside searches ------------------------------


def closes_alternating_cycle(
    g: Graph, mate: dict[int, int], u: int, v: int, bipartite: bool
) -> bool:
    """Would adding ``uv`` to the UR matching ``mate`` create an alternating
    cycle?  Such a cycle is ``u v x1 y1 ... xk yk u`` with ``xi yi`` matched.

    Bipartite graphs only need reachability; general graphs need simple
    paths, so the search backtracks.
    """
    seen: set[int] = set()

    def search(y: int) -> bool:
        for x in g.adj[y]:
            if x == u or x == v or x not in mate or mate[x] == y:
                continue
            if x in seen:
                continue
            y2 = mate[x]
            if y2 == u or y2 == v or y2 in seen:
                continue
            seen.add(x)
            seen.add(y2)
            if g.has_edge(y2, u) or search(y2):
                return True
            if not bipartite:
                seen.discard(x)
                seen.discard(y2)
        return False

    return search(v)


def _edge_order(g: Graph) -> list[tuple[int, int]]:
    return sorted(g.edges, key=lambda e: (-(g.degree(e[0]) + g.degree(e[1])), e))


# --- nu_ur and nu_s -----------------------------------------------------------


def nu_ur_exact(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, Matching]:
    """Maximum uniquely restricted matching by include/exclude branch and bound."""
    budget.check_size(g, "nu_ur")
    clock = _Clock(budget, "nu_ur")
    b = _try_bipartition(g)
    bip = b is not None
    edges = _edge_order(g)
    upper = nu_exact(g, budget)
    if bip:
        upper = min(upper, len(b.side_a), len(b.side_b))
    mate: dict[int, int] = {}
    chosen: list[tuple[int, int]] = []
    best: list[tuple[int, int]] = []
    m = len(edges)

    def bound(i: int) -> int:
        if bip:
            sa, sb = set(), set()
            for x, y in edges[i:]:
                if x not in mate and y not in mate:
                    if x in b.side_a:
                        sa.add(x)
                        sb.add(y)
                    else:
                        sa.add(y)
                        sb.add(x)
            return min(len(sa), len(sb))
        free = {x for e in edges[i:] if e[0] not in mate and e[1] not in mate for x in e}
        return len(free) // 2

    def rec(i: int) -> bool:
        nonlocal best
        clock.tick()
        if len(chosen) > len(best):
            best = list(chosen)
            if len(best) == upper:
                return True
        if i == m or len(chosen) + bound(i) <= len(best):
            return False
        x, y = edges[i]
        if x not in mate and y not in mate and not closes_alternating_cycle(g, mate, x, y, bip):
            mate[x] = y
            mate[y] = x
            chosen.append((x, y))
            done = rec(i + 1)
            chosen.pop()
            del mate[x], mate[y]
            if done:
                return True
        return rec(i + 1)

    rec(0)
    result = Matching.of(best)
    assert is_ur(g, result, b)[0]
    return len(result), result


def nu_s_exact(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, Matching]:
    """Maximum induced matching by include/exclude branch and bound."""
    budget.check_size(g, "nu_s")
    clock = _Clock(budget, "nu_s")
    edges = _edge_order(g)
    m = len(edges)
    covered: set[int] = set()
    chosen: list[tuple[int, int]] = []
    best: list[tuple[int, int]] = []

    def blocked(x: int) -> bool:
        return x in covered or any(w in covered for w in g.adj[x])

    def rec(i: int) -> None:
        nonlocal best
        clock.tick()
        if len(chosen) > len(best):
            best = list(chosen)
        if i == m:
            return
        free = {x for e in edges[i:] if not blocked(e[0]) and not blocked(e[1]) for x in e}
        if len(chosen) + len(free) // 2 <= len(best):
            return
        x, y = edges[i]
        if not blocked(x) and not blocked(y):
            covered.update((x, y))
            chosen.append((x, y))
            rec(i + 1)
            chosen.pop()
            covered.difference_update((x, y))
        rec(i + 1)

    rec(0)
    return len(best), Matching.of(best)


# --- colourings -----------------------------------------------------------------


def _partition_search(
    g: Graph,
    items: Sequence[tuple[int, int]],
    k: int,
    clock: _Clock,
    bip: bool,
) -> list[int] | None:
    """Assign ``items`` (edges) to ``k`` classes, each a UR matching.
    Colours are introduced in order (symmetry breaking)."""
    mates: list[dict[int, int]] = [dict() for _ in range(k)]
    colour = [-1] * len(items)

    def rec(i: int, used: int) -> bool:
        clock.tick()
        if i == len(items):
            return True
        x, y = items[i]
        for c in range(min(used + 1, k)):
            mt = mates[c]
            if x in mt or y in mt or closes_alternating_cycle(g, mt, x, y, bip):
                continue
            mt[x] = y
            mt[y] = x
            colour[i] = c
            if rec(i + 1, max(used, c + 1)):
                return True
            del mt[x], mt[y]
        return False

    return colour if rec(0, 0) else None


def _bfs_edge_order(g: Graph, edges: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Edges grouped around vertices in BFS order so conflicts surface early."""
    order: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    wanted = set(edges)
    visited = [False] * g.n
    for s in range(g.n):
        if visited[s]:
            continue
        visited[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                e = norm(v, w)
                if e in wanted and e not in seen:
                    seen.add(e)
                    order.append(e)
                if not visited[w]:
                    visited[w] = True
                    queue.append(w)
    return order


def chi_ur_exact(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, dict[tuple[int, int], int]]:
    """Uniquely restricted chromatic index by exhaustive search from the lower
    bound ``max(Delta, ceil(m / nu_ur))`` upward.  Colours are 1-based."""
    budget.check_size(g, "chi_ur")
    if g.m == 0:
        return 0, {}
    clock = _Clock(budget, "chi_ur")
    bip = _try_bipartition(g) is not None
    nur, _ = nu_ur_exact(g, budget)
    k = max(g.max_degree, -(-g.m // nur))
    items = _bfs_edge_order(g, g.sorted_edges())
    while True:
        colour = _partition_search(g, items, k, clock, bip)
        if colour is not None:
            return k, {e: c + 1 for e, c in zip(items, colour)}
        k += 1


def min_ur_partition_of_matching(
    g: Graph, m: Matching | Sequence[tuple[int, int]], budget: OracleBudget = DEFAULT_BUDGET
) -> tuple[int, list[Matching]]:
    """Fewest uniquely restricted matchings of ``g`` partitioning ``m``."""
    m = m if isinstance(m, Matching) else Matching.of(m)
    budget.check_size(g, "min_ur_partition")
    clock = _Clock(budget, "min_ur_partition")
    if not m.edges:
        return 0, []
    bip = _try_bipartition(g) is not None
    items = _bfs_edge_order(g, sorted(m.edges))
    k = 1
    while True:
        colour = _partition_search(g, items, k, clock, bip)
        if colour is not None:
            parts = [Matching.of(e for e, c in zip(items, colour) if c == i) for i in range(k)]
            return k, parts
        k += 1
