"""5/9-approximation of the largest uniquely restricted matching in
bipartite graphs of maximum degree 3."""

from __future__ import annotations

from fractions import Fraction

from ..c4free import choose_sides
from ..exact import hopcroft_karp, nu_ur_exact
from ..graph import Edge, Graph, bipartition, components, norm
from ..verify import Matching, is_ur_bipartite
from ..wrapper import (
    ApproxResult,
    PreconditionError,
    approximate_by_components,
    lift,
    lift_trace,
)
from .core import BRUTE_FORCE_MAX_VERTICES, StepRecord, UnmatchedConfiguration, core_loop
from .reductions import ReductionStep, apply_reductions

GUARANTEE = Fraction(5, 9)

__all__ = [
    "GUARANTEE",
    "ReductionStep",
    "StepRecord",
    "UnmatchedConfiguration",
    "approximate_subcubic",
    "core_loop",
]


def _solve_component(k: Graph, trace: list | None, assert_invariants: bool) -> set[Edge]:
    if k.n <= BRUTE_FORCE_MAX_VERTICES:
        _, m = nu_ur_exact(k)
        if trace is not None:
            trace.append(StepRecord(0, "exact", "brute-force", 0, k.n, len(m), 0, 0, 0))
        return set(m.edges)
    if k.is_regular():
        # reductions elsewhere can leave a 3-regular piece behind
        kb = bipartition(k)
        mm = Matching.of(norm(a, x) for a, x in hopcroft_karp(k, kb).items())
        if is_ur_bipartite(k, kb, mm)[0]:
            return set(mm.edges)
        best: set[Edge] = set()
        best_trace: list = []
        for u in range(k.n):
            rest, orig = k.remove_vertices([u])
            local: list | None = [] if trace is not None else None
            edges = lift(_solve(rest, local, assert_invariants), orig)
            if len(edges) > len(best) or not best:
                best, best_trace = edges, (lift_trace(local, orig) if local is not None else [])
        if trace is not None:
            trace.extend(best_trace)
        return best
    m = core_loop(k, choose_sides(k, 3), trace, assert_invariants)
    return set(m.edges)


def _solve(h: Graph, trace: list | None, assert_invariants: bool) -> set[Edge]:
    red = apply_reductions(h)
    if trace is not None:
        trace.extend(red.steps)
    edges = set(red.kept_edges)
    r, vmap = red.residual, red.vertex_map
    for comp in components(r):
        k, korig = r.induced(comp)
        if k.m == 0:
            continue
        local: list | None = [] if trace is not None else None
        full = [vmap[x] for x in korig]
        edges |= lift(_solve_component(k, local, assert_invariants), full)
        if local is not None:
            trace.extend(lift_trace(local, full))
    return edges


def approximate_subcubic(
    g: Graph, trace: list | None = None, assert_invariants: bool = False
) -> ApproxResult:
    """Uniquely restricted matching of a bipartite graph with maximum degree
    at most 3, of size at least ``5/9 nu_ur(G)``; see ApproxResult for the
    3-regular components."""
    bipartition(g)  # raises NotBipartiteError
    if g.max_degree > 3:
        raise PreconditionError(f"maximum degree {g.max_degree} exceeds 3")
    return approximate_by_components(
        g, 3, lambda h, tr: _solve(h, tr, assert_invariants), GUARANTEE, trace
    )
