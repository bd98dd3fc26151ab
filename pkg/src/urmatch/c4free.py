"""Approximation of the maximum uniquely restricted matching in C4-free
bipartite graphs of maximum degree Delta, with ratio

    alpha(Delta) = ((Delta-1)^2 + (Delta-2)) / ((Delta-1)^3 + (Delta-2)).

The core grows a vertex set ``U`` from the B-side frontier, adding one
matched edge per step while keeping the accounting inequality

    (Delta-1)^2 * ((Delta-2)*s - (d+f)) >= (Delta-2)*f

over the A-vertices inside ``U`` (``s`` matched, ``d`` unmatched with a
neighbour outside ``U``, ``f`` the rest).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Bipartition, Edge, Graph, bipartition, components, four_cycles, norm
from .verify import Matching, is_ur_bipartite
from .wrapper import (
    ApproxResult,
    InvariantViolation,
    PreconditionError,
    approximate_by_components,
    lift,
    lift_trace,
)


class ContainsC4Error(PreconditionError):
    def __init__(self, cycle: tuple[int, ...]):
        self.cycle = cycle
        super().__init__(f"graph contains the 4-cycle {cycle}")


def alpha(delta: int) -> Fraction:
    if delta < 3:
        raise ValueError("alpha(Delta) is defined for Delta >= 3")
    return Fraction((delta - 1) ** 2 + (delta - 2), (delta - 1) ** 3 + (delta - 2))


def accounting_slack(delta: int, s: int, d: int, f: int) -> int:
    """Left minus right side of the accounting inequality (>= 0 when it holds)."""
    return (delta - 1) ** 2 * ((delta - 2) * s - (d + f)) - (delta - 2) * f


@dataclass
class ExtensionState:
    """``U``, ``M`` and the counters of a run of :func:`extension_loop`."""

    g: Graph
    b: Bipartition
    delta: int
    in_u: list[bool]
    mate: dict[int, int] = field(default_factory=dict)
    outside: list[int] = field(default_factory=list)  # neighbours not in U
    status: dict[int, str] = field(default_factory=dict)  # A∩U -> "s" | "d" | "f"
    s: int = 0
    d: int = 0
    f: int = 0
    size: int = 0

    @classmethod
    def initial(cls, g: Graph, b: Bipartition, delta: int) -> ExtensionState:
        return cls(g, b, delta, [False] * g.n, outside=[g.degree(v) for v in range(g.n)])

    @property
    def slack(self) -> int:
        return accounting_slack(self.delta, self.s, self.d, self.f)

    def matching(self) -> Matching:
        return Matching.of({norm(a, bb) for a, bb in self.mate.items()})

    def _classify(self, a: int) -> str:
        if a in self.mate:
            return "s"
        return "d" if self.outside[a] > 0 else "f"

    def enter(self, vertices: list[int], new_edges: list[tuple[int, int]]) -> None:
        """Move ``vertices`` into ``U``, add ``new_edges`` to ``M`` and
        refresh the counters of every A-vertex whose class may change."""
        g = self.g
        touched: set[int] = set()
        for x in vertices:
            self.in_u[x] = True
        self.size += len(vertices)
        for x in vertices:
            for w in g.adj[x]:
                self.outside[w] -= 1
                if self.in_u[w] and self.b.in_a(w):
                    touched.add(w)
            if self.b.in_a(x):
                touched.add(x)
        for a, bb in new_edges:
            self.mate[a] = bb
            self.mate[bb] = a
            touched.add(a)
        for a in touched:
            old = self.status.get(a)
            new = self._classify(a)
            if old == new:
                continue
            if old is not None:
                setattr(self, old, getattr(self, old) - 1)
            setattr(self, new, getattr(self, new) + 1)
            self.status[a] = new


@dataclass
class StepRecord:
    case: str
    u: int
    s: int
    d: int
    f: int
    slack: int
    n_d: int

    def relabel(self, orig: list[int]) -> StepRecord:
        return StepRecord(self.case, orig[self.u], self.s, self.d, self.f, self.slack, self.n_d)

    def __str__(self) -> str:
        return (
            f"case={self.case} u={self.u} s={self.s} d={self.d} f={self.f} "
            f"n_d={self.n_d} slack={self.slack}"
        )


def _check_preconditions(g: Graph, b: Bipartition, delta: int) -> None:
    if delta < 3:
        raise PreconditionError("Delta must be at least 3")
    if g.max_degree > delta:
        raise PreconditionError(f"maximum degree {g.max_degree} exceeds Delta={delta}")
    for u, v in g.edges:
        if b.in_a(u) == b.in_a(v):
            raise PreconditionError("bipartition does not separate an edge")
    low = [a for a in b.side_a if g.degree(a) < 2]
    if low:
        raise PreconditionError(f"A-vertex {min(low)} has degree < 2")
    if not any(g.degree(x) < delta for x in b.side_b):
        raise PreconditionError("no B-vertex has degree < Delta")
    cyc = four_cycles(g)
    if cyc:
        raise ContainsC4Error(cyc[0])


def check_state(st: ExtensionState) -> None:
    """Scan-based check of the invariants; raises InvariantViolation."""
    g, b = st.g, st.b
    for x, y in st.mate.items():
        if not (st.in_u[x] and st.in_u[y]):
            raise InvariantViolation("matched vertex outside U")
    for x in range(g.n):
        if b.in_a(x):
            continue
        if st.in_u[x] and any(not st.in_u[w] for w in g.adj[x]):
            raise InvariantViolation(f"B-vertex {x} in U has a neighbour outside U")
        if not st.in_u[x] and g.adj[x] and all(st.in_u[w] for w in g.adj[x]):
            raise InvariantViolation(f"B-vertex {x} outside U has all neighbours in U")
    counts = {"s": 0, "d": 0, "f": 0}
    for a in b.side_a:
        if st.in_u[a]:
            counts[st._classify(a)] += 1
    if (counts["s"], counts["d"], counts["f"]) != (st.s, st.d, st.f):
        raise InvariantViolation(f"counters {(st.s, st.d, st.f)} != definition {counts}")
    if st.slack < 0:
        raise InvariantViolation(f"accounting inequality violated (slack {st.slack})")
    ok, wit = is_ur_bipartite(g, b, st.matching())
    if not ok:
        raise InvariantViolation(f"matching not uniquely restricted: {wit}")


def resolve_case1(st: ExtensionState, u: int, v: int) -> tuple[list[tuple[int, int]], int]:
    """Frontier vertex ``u`` with a single neighbour ``v`` outside ``U``.

    Returns the added edges and ``n_d``.
    """
    g, in_u, mate = st.g, st.in_u, st.mate
    group = [x for x in g.adj[v] if not in_u[x] and st.outside[x] == 1]
    assert u in group

    def ell_type(x: int) -> bool:
        inside = [w for w in g.adj[x] if in_u[w]]
        return bool(inside) and all(w not in mate for w in inside)

    first = sorted(x for x in group if ell_type(x))
    rest = sorted(x for x in group if not ell_type(x))
    ordered = first + rest
    ell = len(first)
    before = {a for a in _frontier_unmatched(st, ordered)}
    if ell >= 2:
        edges = []
        used: set[int] = set()
        for x in first:
            w = min(w for w in g.adj[x] if in_u[w])
            if w in used:
                raise AssertionError(f"repeated partner {w}: the input contains a 4-cycle")
            used.add(w)
            edges.append((w, x))
    else:
        edges = [(v, ordered[0])]
    st.enter(ordered + [v], edges)
    n_d = sum(1 for a in before if a not in mate and st.outside[a] == 0)
    k = len(ordered)
    if n_d > k * (st.delta - 2) + ell:
        raise InvariantViolation(f"n_d={n_d} exceeds k(Delta-2)+l")
    return edges, n_d


def resolve_case2(st: ExtensionState, u: int) -> tuple[list[tuple[int, int]], int]:
    """Frontier vertex ``u`` with ``2 <= d_out(u) <= Delta-1``."""
    g, in_u, mate = st.g, st.in_u, st.mate
    outs = [x for x in g.adj[u] if not in_u[x]]
    inside = [w for w in g.adj[u] if in_u[w]]
    if inside and all(w not in mate for w in inside):
        edges = [(min(inside), u)]
    else:
        edges = [(outs[0], u)]
    before = set(_frontier_unmatched(st, [u]))
    st.enter([u] + outs, edges)
    n_d = sum(1 for a in before if a not in mate and st.outside[a] == 0)
    if n_d > st.delta - len(outs) - 1:
        raise InvariantViolation(f"n_d={n_d} exceeds Delta-k-1")
    return edges, n_d


def _frontier_unmatched(st: ExtensionState, bs: list[int]) -> list[int]:
    """Unmatched A-vertices of ``U`` adjacent to the given B-vertices."""
    out = set()
    for x in bs:
        for w in st.g.adj[x]:
            if st.in_u[w] and w not in st.mate:
                out.add(w)
    return sorted(out)


class _Frontier:
    """B-vertices outside ``U`` bucketed by their number of outside neighbours,
    each bucket a min-heap on vertex id with lazy deletion."""

    def __init__(self, st: ExtensionState):
        self.st = st
        self.buckets: list[list[int]] = [[] for _ in range(st.delta + 1)]
        for x in st.b.side_b:
            self.push(x)

    def push(self, x: int) -> None:
        k = self.st.outside[x]
        if 0 < k < len(self.buckets):
            heapq.heappush(self.buckets[k], x)

    def pop_min(self) -> int | None:
        st = self.st
        for k in range(1, len(self.buckets)):
            heap = self.buckets[k]
            while heap:
                x = heap[0]
                if st.in_u[x] or st.outside[x] != k:
                    heapq.heappop(heap)
                    continue
                return x
        return None


def extension_loop(
    g: Graph,
    b: Bipartition,
    delta: int | None = None,
    trace: list[StepRecord] | None = None,
    assert_invariants: bool = False,
) -> Matching:
    """Grow ``U`` until it covers the graph; return the UR matching of size
    at least ``alpha(Delta) * |A|``.

    ``g`` must be connected, C4-free and bipartite with side roles given by
    ``b``: every A-vertex of degree >= 2 and some B-vertex of degree < Delta.
    """
    delta = max(3, g.max_degree) if delta is None else delta
    _check_preconditions(g, b, delta)
    st = ExtensionState.initial(g, b, delta)
    frontier = _Frontier(st)
    while st.size < g.n:
        u = frontier.pop_min()
        if u is None:
            raise InvariantViolation("no frontier vertex while U != V (graph disconnected?)")
        k = st.outside[u]
        if k == 1:
            v = next(x for x in g.adj[u] if not st.in_u[x])
            edges, n_d = resolve_case1(st, u, v)
            case = "1"
        elif k <= delta - 1:
            edges, n_d = resolve_case2(st, u)
            case = "2"
        else:
            raise InvariantViolation(f"frontier minimum d_out={k} >= Delta")
        # outside-degrees only drop next to the A-vertices that just entered U
        for a in g.adj[u]:
            for x in g.adj[a]:
                if not st.in_u[x]:
                    frontier.push(x)
        if trace is not None:
            trace.append(StepRecord(case, u, st.s, st.d, st.f, st.slack, n_d))
        if st.slack < 0:
            raise InvariantViolation(f"accounting inequality violated after case {case} at u={u}")
        if assert_invariants:
            check_state(st)
    m = st.matching()
    na = len(b.side_a)
    if st.d != 0 or st.s != len(m) or st.s + st.f != na:
        raise InvariantViolation("final counters inconsistent")
    if Fraction(len(m)) < alpha(delta) * na:
        raise InvariantViolation(f"|M|={len(m)} below alpha*|A|")
    return m


def peel(g: Graph) -> tuple[set[Edge], list[int]]:
    """Repeatedly match a degree-1 vertex to its neighbour and delete both;
    drop isolated vertices.  Returns the peeled edges and the surviving
    vertices (all of degree >= 2 in what remains)."""
    alive = [True] * g.n
    deg = [g.degree(v) for v in range(g.n)]
    edges: set[Edge] = set()
    stack = [v for v in range(g.n) if deg[v] <= 1]

    def drop(x: int) -> None:
        alive[x] = False
        for w in g.adj[x]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)

    while stack:
        u = stack.pop()
        if not alive[u]:
            continue
        if deg[u] == 0:
            drop(u)
        elif deg[u] == 1:
            v = next(w for w in g.adj[u] if alive[w])
            edges.add(norm(u, v))
            drop(u)
            drop(v)
    return edges, [v for v in range(g.n) if alive[v]]


def choose_sides(h: Graph, delta: int) -> Bipartition:
    """Side roles for a connected graph: B must contain a vertex of degree
    < Delta; among valid choices the larger side becomes A."""
    b = bipartition(h)
    options = [
        x for x in (b, b.swapped()) if any(h.degree(v) < delta for v in x.side_b)
    ]
    if not options:
        raise InvariantViolation("component is Delta-regular")
    return max(options, key=lambda x: (len(x.side_a), x == b))


def _solve(delta: int, assert_invariants: bool):
    def solve(h: Graph, trace: list | None) -> set[Edge]:
        edges, alive = peel(h)
        if not alive:
            return edges
        r, orig = h.induced(alive)
        for comp in components(r):
            k, korig = r.induced(comp)
            local: list | None = [] if trace is not None else None
            m = extension_loop(k, choose_sides(k, delta), delta, local, assert_invariants)
            full = [orig[x] for x in korig]
            edges |= lift(m.edges, full)
            if local is not None:
                trace.extend(lift_trace(local, full))
        return edges

    return solve


def approximate(
    g: Graph,
    delta: int | None = None,
    trace: list | None = None,
    assert_invariants: bool = False,
) -> ApproxResult:
    """Uniquely restricted matching of a C4-free bipartite graph of size at
    least ``alpha(Delta) * nu_ur(G)`` (see ApproxResult for the regular case).

    ``delta`` defaults to the maximum degree (at least 3); a smaller value
    than the maximum degree is clamped up.
    """
    bipartition(g)  # raises NotBipartiteError
    cyc = four_cycles(g)
    if cyc:
        raise ContainsC4Error(cyc[0])
    d = max(3, g.max_degree, delta or 0)
    return approximate_by_components(g, d, _solve(d, assert_invariants), alpha(d), trace)
