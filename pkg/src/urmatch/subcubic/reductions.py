"""Preprocessing for the subcubic algorithm.

Four reductions are applied until none fits, always the first applicable
one in this order:

1. excise an occurrence of one of the patterns R.1-R.5, keeping only its
   boundary vertices, and keep the pattern's select edges (R.6 is skipped,
   see the catalogue);
2. delete one of two vertices with the same neighbourhood;
3. delete a degree-1 vertex and its neighbour, keeping the edge;
4. delete an isolated vertex.

Each reduction loses at most as many UR-matching edges as it keeps, so a
good matching of the residual graph plus the kept edges is good for the
original graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..graph import Edge, Graph, norm
from .patterns import REDUCTION_PATTERNS, View, first_match

# an R-pattern reaches 4 edges from its centre; degree changes within that
# distance can create or destroy an occurrence
_PATTERN_RADIUS = 5


@dataclass
class ReductionStep:
    kind: str  # "R.1".."R.6", "twin", "pendant", "isolated"
    removed: tuple[int, ...]
    kept: tuple[Edge, ...] = ()

    def relabel(self, orig: list[int]) -> ReductionStep:
        return ReductionStep(
            self.kind,
            tuple(orig[x] for x in self.removed),
            tuple(norm(orig[u], orig[v]) for u, v in self.kept),
        )

    def __str__(self) -> str:
        kept = " ".join(f"{u}-{v}" for u, v in self.kept)
        return f"reduction {self.kind} removed={list(self.removed)} kept=[{kept}]"


@dataclass
class ReductionOutcome:
    residual: Graph
    kept_edges: frozenset[Edge]  # original ids
    vertex_map: list[int]  # residual id -> original id
    steps: list[ReductionStep] = field(default_factory=list)


def apply_reductions(g: Graph) -> ReductionOutcome:
    if g.max_degree > 3:
        raise ValueError("reductions expect maximum degree <= 3")
    adj = [set(a) for a in g.adj]
    alive = [True] * g.n
    kept: set[Edge] = set()
    steps: list[ReductionStep] = []
    view = View(nbrs=lambda v: adj[v])
    r_dirty = set(range(g.n))
    t_dirty = set(range(g.n))
    d_dirty = set(range(g.n))

    def remove(vertices: list[int]) -> None:
        touched = set()
        for x in vertices:
            alive[x] = False
            for w in adj[x]:
                adj[w].discard(x)
                touched.add(w)
            adj[x] = set()
        touched -= set(vertices)
        # mark everything whose surroundings changed
        dist = {x: 0 for x in touched if alive[x]}
        queue = deque(dist)
        while queue:
            x = queue.popleft()
            if dist[x] < _PATTERN_RADIUS:
                for w in adj[x]:
                    if w not in dist:
                        dist[w] = dist[x] + 1
                        queue.append(w)
        for x, k in dist.items():
            r_dirty.add(x)
            if k <= 2:
                t_dirty.add(x)
            if k == 0:
                d_dirty.add(x)

    def find_r(v: int):
        if len(adj[v]) != 3:
            return None
        for p in REDUCTION_PATTERNS:
            if p.unsafe:
                continue
            m = first_match(p, view, {"c": v})
            if m is not None:
                return p, m
        return None

    def find_twin(v: int) -> int | None:
        if not adj[v]:
            return None
        w = min(adj[v])
        for u in adj[w]:
            if u != v and adj[u] == adj[v]:
                return u
        return None

    while True:
        if r_dirty:
            v = r_dirty.pop()
            if not alive[v]:
                continue
            hit = find_r(v)
            if hit is None:
                continue
            p, m = hit
            gone = sorted(m[t] for t in p.names if t not in p.boundary)
            sel = tuple(sorted(norm(m[x], m[y]) for x, y in p.select))
            kept.update(sel)
            steps.append(ReductionStep(p.id, tuple(gone), sel))
            remove(gone)
        elif t_dirty:
            v = t_dirty.pop()
            if not alive[v]:
                continue
            u = find_twin(v)
            if u is None:
                continue
            x = max(u, v)
            steps.append(ReductionStep("twin", (x,)))
            remove([x])
        elif d_dirty:
            v = d_dirty.pop()
            if not alive[v] or len(adj[v]) > 1:
                continue
            if adj[v]:
                w = next(iter(adj[v]))
                e = norm(v, w)
                kept.add(e)
                steps.append(ReductionStep("pendant", tuple(sorted((v, w))), (e,)))
                remove([v, w])
            else:
                steps.append(ReductionStep("isolated", (v,)))
                remove([v])
        else:
            break

    residual, vmap = g.induced(v for v in range(g.n) if alive[v])
    return ReductionOutcome(residual, frozenset(kept), vmap, steps)
