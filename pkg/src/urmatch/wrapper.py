"""Shared driver for the approximation algorithms.

Both approximations work component by component.  A connected component
that is Delta-regular has no B-vertex of degree < Delta, so the core loop
cannot start on it.  For those components we first try a maximum matching
(kept if it happens to be uniquely restricted, which makes it optimal) and
otherwise run the solver on ``K - u`` for every vertex ``u`` and keep the
best result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol

from .exact import hopcroft_karp
from .graph import Edge, Graph, bipartition, components, norm
from .verify import Matching, is_ur_bipartite


class PreconditionError(ValueError):
    """The input violates a precondition of the algorithm."""


class InvariantViolation(AssertionError):
    """An internal invariant failed; this indicates a bug or an input the
    analysis does not cover."""


class TraceRecord(Protocol):
    def relabel(self, orig: list[int]) -> TraceRecord: ...


@dataclass
class ApproxResult:
    matching: Matching
    guarantee: Fraction
    # what the guarantee is measured against: "|A|" for the plain core
    # loop, "nu_ur(G-u)" when a regular component went through the sweep
    size_lower_bound_used: str
    fallback: bool = False
    max_matching_used: bool = False
    trace: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.matching)


# solve(h, trace) returns matching edges of ``h`` (local ids); ``h`` has no
# Delta-regular component
Solver = Callable[[Graph, "list | None"], set[Edge]]


def lift(edges, orig: list[int]) -> set[Edge]:
    return {norm(orig[u], orig[v]) for u, v in edges}


def lift_trace(records: list, orig: list[int]) -> list:
    return [r.relabel(orig) for r in records]


def _sweep(h: Graph, solve: Solver, trace: list | None) -> set[Edge]:
    best: set[Edge] = set()
    best_trace: list = []
    for u in range(h.n):
        rest, orig = h.remove_vertices([u])
        local: list | None = [] if trace is not None else None
        edges = lift(solve(rest, local), orig)
        if len(edges) > len(best) or not best:
            best = edges
            best_trace = lift_trace(local, orig) if local is not None else []
    if trace is not None:
        trace.extend(best_trace)
    return best


def approximate_by_components(
    g: Graph, delta: int, solve: Solver, guarantee: Fraction, trace: list | None = None
) -> ApproxResult:
    b = bipartition(g)
    chosen: set[Edge] = set()
    fallback = used_max = False
    rest: list[int] = []
    for comp in components(g):
        h, orig = g.induced(comp)
        if h.m == 0:
            continue
        if h.min_degree == delta and h.max_degree == delta:
            hb = bipartition(h)
            mate = hopcroft_karp(h, hb)
            mm = Matching.of({norm(a, x) for a, x in mate.items()})
            if is_ur_bipartite(h, hb, mm)[0]:
                chosen |= lift(mm.edges, orig)
                used_max = True
                continue
            local: list | None = [] if trace is not None else None
            chosen |= lift(_sweep(h, solve, local), orig)
            if local is not None:
                trace.extend(lift_trace(local, orig))
            fallback = True
        else:
            rest.extend(comp)
    if rest:
        h, orig = g.induced(rest)
        local = [] if trace is not None else None
        chosen |= lift(solve(h, local), orig)
        if local is not None:
            trace.extend(lift_trace(local, orig))
    m = Matching.of(chosen)
    ok, wit = is_ur_bipartite(g, b, m)
    if not ok:
        raise InvariantViolation(f"output matching is not uniquely restricted: {wit}")
    return ApproxResult(
        m,
        guarantee,
        "nu_ur(G-u)" if fallback else "|A|",
        fallback=fallback,
        max_matching_used=used_max,
        trace=trace if trace is not None else [],
    )
