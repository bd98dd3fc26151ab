"""Core extension loop of the subcubic algorithm.

The state is a triple ``(U, M, gamma)``: the processed vertex set, a UR
matching inside it, and a label for every A-vertex of ``U``:

* ``TOP``: matched;
* ``DASH``: unmatched and still adjacent to some B-vertex outside ``U``;
* ``BOT``: unmatched otherwise.

With ``s, d, f`` the numbers of ``TOP``, ``DASH`` and ``BOT`` labels the loop
keeps ``4(s - (d + f)) >= f``; once ``U = V`` this gives ``|M| >= 5/9 |A|``.

Each iteration takes the first case that applies:

1. a B-vertex outside ``U`` with exactly one neighbour outside ``U``;
2. a 4-cycle outside ``U`` whose A-vertices have degrees (3, 2);
3. a 4-cycle outside ``U`` whose A-vertices both have degree 3;
4. a B-vertex outside ``U`` with exactly two neighbours outside ``U``.

Cases 1 and 4 are resolved by fixed rules.  Cases 2 and 3 look the
configuration up in the pattern catalogue.  Every candidate extension is
checked against the state properties before it is committed; when no
catalogued resolution passes, a bounded search over the matched edges of
a small neighbourhood is used instead (reported as pattern ``search``).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations

from ..exact import nu_ur_exact
from ..graph import Bipartition, Graph, classify_c4s, find_twins, is_connected, norm
from ..verify import Matching, _digraph_cycle, is_ur_bipartite
from ..wrapper import InvariantViolation, PreconditionError
from .patterns import (
    CASE2_PATTERNS,
    CASE3_PATTERNS,
    LARGEST_PATTERN,
    Label,
    Pattern,
    View,
    is_a_name,
    match,
)

BRUTE_FORCE_MAX_VERTICES = LARGEST_PATTERN

# limits of the fallback search
_SEARCH_MAX_SETS = 80
_SEARCH_MAX_EDGES = 22


class UnmatchedConfiguration(InvariantViolation):
    """No catalogued resolution and no local search result keeps the state
    properties."""


class NoCaseApplies(InvariantViolation):
    pass


def accounting_slack(s: int, d: int, f: int) -> int:
    return 4 * (s - (d + f)) - f


@dataclass
class StepRecord:
    iteration: int
    case: str
    pattern: str
    anchor: int
    added: int
    s: int
    d: int
    f: int
    slack: int

    def relabel(self, orig: list[int]) -> StepRecord:
        return StepRecord(
            self.iteration, self.case, self.pattern, orig[self.anchor], self.added,
            self.s, self.d, self.f, self.slack,
        )

    def __str__(self) -> str:
        return (
            f"iter={self.iteration} case={self.case} pattern={self.pattern} "
            f"anchor={self.anchor} added={self.added} s={self.s} d={self.d} "
            f"f={self.f} slack={self.slack}"
        )


@dataclass
class Plan:
    """A proposed extension: vertices entering ``U`` and edges entering
    ``M`` (as ``(a, b)``), plus labels forced by the case rule."""

    pattern: str
    new: set[int]
    edges: list[tuple[int, int]]
    forced: dict[int, Label] = field(default_factory=dict)


@dataclass
class Outcome:
    plan: Plan
    new: set[int]
    edges: list[tuple[int, int]]
    labels: dict[int, Label]
    s: int
    d: int
    f: int

    @property
    def slack(self) -> int:
        return accounting_slack(self.s, self.d, self.f)


class LabeledState:
    def __init__(self, g: Graph, b: Bipartition):
        self.g = g
        self.b = b
        self.in_u = bytearray(g.n)
        self.label: list[Label | None] = [None] * g.n
        self.mate: dict[int, int] = {}
        self.outside = [g.degree(v) for v in range(g.n)]
        self.s = self.d = self.f = 0
        self.size = 0
        self.c4s = classify_c4s(g, b)
        self.c4_vertices = [c.a + c.b for c in self.c4s]
        # B-vertex -> 4-cycles with A-degrees (3, 2) through it
        self.c41_at: dict[int, list[int]] = {}
        for i, c in enumerate(self.c4s):
            if c.kind == "C4_1":
                for x in c.b:
                    self.c41_at.setdefault(x, []).append(i)

    @property
    def slack(self) -> int:
        return accounting_slack(self.s, self.d, self.f)

    def matching(self) -> Matching:
        return Matching.of(norm(a, x) for a, x in self.mate.items() if self.b.in_a(a))

    def view(self) -> View:
        return View(
            nbrs=lambda v: self.g.adj[v],
            in_u=lambda v: bool(self.in_u[v]),
            label=lambda v: self.label[v],
        )

    # --- evaluation of a plan -------------------------------------------

    def evaluate(self, plan: Plan) -> Outcome | None:
        """Outcome of ``plan`` if it keeps every state property, else None."""
        g, b, in_u, mate = self.g, self.b, self.in_u, self.mate
        new = set(plan.new)
        if any(in_u[x] for x in new):
            return None

        def inside(x: int) -> bool:
            return bool(in_u[x]) or x in new

        for x in plan.new:
            if not b.in_a(x) and any(not inside(w) for w in g.adj[x]):
                return None  # B-vertex of U next to an A-vertex outside U
        new_a = [x for x in plan.new if b.in_a(x)]
        stranded = sorted(
            {
                x
                for a in new_a
                for x in g.adj[a]
                if not inside(x) and all(inside(w) for w in g.adj[x])
            }
        )
        new.update(stranded)

        edges = list(plan.edges)
        used: set[int] = set()
        for a, x in edges:
            if a in mate or x in mate or a in used or x in used:
                return None
            if not (inside(a) and inside(x)) or not g.has_edge(a, x):
                return None
            used.update((a, x))

        touched = set(new_a)
        for x in new:
            if not b.in_a(x):
                touched.update(w for w in g.adj[x] if in_u[w])

        def assign(inside) -> dict[int, Label] | None:
            def has_outside_b(a: int) -> bool:
                return any(not inside(x) for x in g.adj[a])

            def near_live_c41(a: int) -> bool:
                for x in g.adj[a]:
                    if inside(x):
                        continue
                    for i in self.c41_at.get(x, ()):
                        if not any(inside(v) for v in self.c4_vertices[i]):
                            return True
                return False

            labels: dict[int, Label] = {}
            for a in touched:
                old = self.label[a]
                if a in used or old is Label.TOP:
                    lab = Label.TOP
                elif old is Label.BOT:
                    lab = Label.BOT
                elif old is Label.DASH:
                    lab = Label.DASH if has_outside_b(a) else Label.BOT
                else:
                    lab = Label.DASH if has_outside_b(a) and not near_live_c41(a) else Label.BOT
                labels[a] = lab
            for a, lab in plan.forced.items():
                if a in used:
                    return None
                if lab is Label.DASH and (not has_outside_b(a) or near_live_c41(a)):
                    return None
                labels[a] = lab
            return labels

        labels = assign(inside)
        if labels is None:
            return None
        # a stranded B-vertex whose neighbours were all DASH before it was
        # stranded takes one of them; the others become BOT
        if stranded:
            planned = set(plan.new)
            before = assign(lambda x: bool(in_u[x]) or x in planned)
            if before is None:
                before = {}
            settled: set[int] = set()
            for x in stranded:
                nb = list(g.adj[x])
                if any(w in used or w in settled for w in nb):
                    continue
                if not all(before.get(w, self.label[w]) is Label.DASH for w in nb):
                    continue
                w = min(nb)
                edges.append((w, x))
                used.update((w, x))
                settled.update(nb)
                labels[w] = Label.TOP
                for w2 in nb:
                    if w2 != w:
                        labels[w2] = Label.BOT

        s, d, f = self.s, self.d, self.f
        for a, lab in labels.items():
            old = self.label[a]
            if old is lab:
                continue
            if old is not None:
                s, d, f = _bump(old, -1, s, d, f)
            s, d, f = _bump(lab, 1, s, d, f)
        if accounting_slack(s, d, f) < 0:
            return None
        if edges and not self._stays_ur(edges):
            return None
        return Outcome(plan, new, edges, labels, s, d, f)

    def _stays_ur(self, edges: list[tuple[int, int]]) -> bool:
        """UR test for ``M + edges``.  A new alternating cycle must use a
        new edge; unless the new edges have arcs both from and to old ones,
        such a cycle stays among the new edges."""
        g, mate = self.g, self.mate
        new_mate = {a: x for a, x in edges}
        new_b = {x for _, x in edges}
        into = any(
            w in mate and w not in new_b and not self.b.in_a(w) for a in new_mate for w in g.adj[a]
        )
        out_of = any(
            w in mate and self.b.in_a(w) and w not in new_mate
            for x in new_b
            for w in g.adj[x]
        )
        if into and out_of:
            full = {a: x for a, x in mate.items() if self.b.in_a(a)}
            full.update(new_mate)
            return _digraph_cycle(g, full, sorted(full)) is None
        return _digraph_cycle(g, new_mate, sorted(new_mate)) is None

    def commit(self, out: Outcome) -> None:
        g = self.g
        for x in out.new:
            self.in_u[x] = 1
            for w in g.adj[x]:
                self.outside[w] -= 1
        self.size += len(out.new)
        for a, x in out.edges:
            self.mate[a] = x
            self.mate[x] = a
        for a, lab in out.labels.items():
            self.label[a] = lab
        self.s, self.d, self.f = out.s, out.d, out.f


def _bump(lab: Label, k: int, s: int, d: int, f: int) -> tuple[int, int, int]:
    if lab is Label.TOP:
        return s + k, d, f
    if lab is Label.DASH:
        return s, d + k, f
    return s, d, f + k


# --- full property check -----------------------------------------------------


def check_state(st: LabeledState) -> None:
    """Full scan of the state: matched vertices lie in U, labels agree with
    M and with outside neighbours, B-vertices of U see only U, B-vertices
    outside U see something outside, counters match the labels and keep a
    non-negative slack, no DASH vertex touches a live 4-cycle with
    A-degrees (3, 2), and M is uniquely restricted.  Raises
    InvariantViolation."""
    g, b = st.g, st.b
    for x in st.mate:
        if not st.in_u[x]:
            raise InvariantViolation(f"matched vertex {x} outside U")
    counts = {Label.TOP: 0, Label.DASH: 0, Label.BOT: 0}
    for v in range(g.n):
        if b.in_a(v):
            lab = st.label[v]
            if not st.in_u[v]:
                if lab is not None:
                    raise InvariantViolation(f"label on A-vertex {v} outside U")
                continue
            if lab is None:
                raise InvariantViolation(f"A-vertex {v} of U has no label")
            counts[lab] += 1
            if (lab is Label.TOP) != (v in st.mate):
                raise InvariantViolation(f"label {lab} of {v} disagrees with M")
            if lab is Label.DASH and all(st.in_u[x] for x in g.adj[v]):
                raise InvariantViolation(f"DASH vertex {v} has no neighbour outside U")
        else:
            if st.in_u[v] and any(not st.in_u[w] for w in g.adj[v]):
                raise InvariantViolation(f"B-vertex {v} of U adjacent to A outside U")
            if not st.in_u[v] and all(st.in_u[w] for w in g.adj[v]):
                raise InvariantViolation(f"B-vertex {v} outside U has no neighbour outside U")
    if (counts[Label.TOP], counts[Label.DASH], counts[Label.BOT]) != (st.s, st.d, st.f):
        raise InvariantViolation("counters disagree with the labels")
    if st.slack < 0:
        raise InvariantViolation(f"4(s-(d+f)) >= f violated (slack {st.slack})")
    for i, c in enumerate(st.c4s):
        if c.kind != "C4_1" or any(st.in_u[v] for v in st.c4_vertices[i]):
            continue
        for x in c.b:
            for w in g.adj[x]:
                if st.in_u[w] and st.label[w] is Label.DASH:
                    raise InvariantViolation(f"DASH vertex {w} next to a live 4-cycle {c}")
    ok, wit = is_ur_bipartite(g, b, st.matching())
    if not ok:
        raise InvariantViolation(f"matching not uniquely restricted: {wit}")


# --- case detection ------------------------------------------------------------


class _Selector:
    """Lazy heaps for the four case conditions, lowest vertex id first."""

    def __init__(self, st: LabeledState):
        self.st = st
        self.low: dict[int, list[int]] = {1: [], 2: []}
        for x in st.b.side_b:
            self.push(x)
        self.c41: list[tuple[int, int]] = []
        self.c42: list[tuple[int, int]] = []
        for i, c in enumerate(st.c4s):
            key = (min(st.c4_vertices[i]), i)
            if c.kind == "C4_1":
                self.c41.append(key)
            elif c.kind == "C4_2":
                self.c42.append(key)
        heapq.heapify(self.c41)
        heapq.heapify(self.c42)

    def push(self, x: int) -> None:
        k = self.st.outside[x]
        if k in self.low:
            heapq.heappush(self.low[k], x)

    def refresh(self, new: set[int]) -> None:
        g = self.st.g
        for v in new:
            for x in g.adj[v]:
                if not self.st.in_u[x] and not self.st.b.in_a(x):
                    self.push(x)

    def low_vertex(self, k: int) -> int | None:
        st, heap = self.st, self.low[k]
        while heap:
            x = heap[0]
            if st.in_u[x] or st.outside[x] != k:
                heapq.heappop(heap)
                continue
            return x
        return None

    def live_c4(self, heap: list[tuple[int, int]]) -> int | None:
        st = self.st
        while heap:
            i = heap[0][1]
            if any(st.in_u[v] for v in st.c4_vertices[i]):
                heapq.heappop(heap)
                continue
            return i
        return None


# --- resolutions ---------------------------------------------------------------


def plan_case1(st: LabeledState, u: int) -> tuple[Plan, int]:
    """Returns the plan and ``n_d``."""
    g, in_u = st.g, st.in_u
    v = next(x for x in g.adj[u] if not in_u[x])
    group = sorted(x for x in g.adj[v] if not in_u[x] and st.outside[x] == 1)
    group.remove(u)
    group.insert(0, u)
    ws = [[w for w in g.adj[x] if in_u[w]] for x in group]
    dash = sorted({w for wi in ws for w in wi if st.label[w] is Label.DASH})
    n_d = len(dash)
    new = {v, *group}
    if n_d <= 4:
        return Plan("case1.single", new, [(v, u)], {w: Label.BOT for w in dash}), n_d
    if len(group) != 3:
        raise InvariantViolation(f"n_d={n_d} >= 5 with k={len(group)}")
    full = [i for i in range(3) if len(ws[i]) == 2 and all(st.label[w] is Label.DASH for w in ws[i])]
    for i, j in combinations(full, 2):
        only_i = [w for w in ws[i] if w not in ws[j]]
        only_j = [w for w in ws[j] if w not in ws[i]]
        if only_i and only_j:
            w1, w2 = only_i[0], only_j[0]
            forced = {w: Label.BOT for w in dash if w not in (w1, w2)}
            forced[v] = Label.BOT
            return Plan("case1.double", new, [(w1, group[i]), (w2, group[j])], forced), n_d
    raise InvariantViolation("n_d >= 5 but the U-neighbourhoods are twins")


def plan_case4(st: LabeledState, u: int) -> Plan:
    g, in_u = st.g, st.in_u
    v1, v2 = sorted(x for x in g.adj[u] if not in_u[x])
    w = [x for x in g.adj[u] if in_u[x]]
    if len(w) > 1:
        raise InvariantViolation("case 4 vertex with two neighbours in U")
    if not w or st.label[w[0]] is not Label.DASH:
        return Plan("case4.outside", {u, v1, v2}, [(v1, u)], {v2: Label.DASH})
    return Plan("case4.inside", {u, v1, v2}, [(w[0], u)], {v1: Label.DASH, v2: Label.DASH})


def _anchors(st: LabeledState, i: int) -> list[dict[str, int]]:
    c = st.c4s[i]
    (x, y), (p, q) = c.a, c.b
    a_orders = [(x, y)] if c.kind == "C4_1" else [(x, y), (y, x)]
    out = []
    for a1, a2 in a_orders:
        for cc, b1 in ((p, q), (q, p)):
            out.append({"c": cc, "a1": a1, "b1": b1, "a2": a2})
    return out


def _pattern_plan(st: LabeledState, p: Pattern, m: dict[str, int]) -> Plan:
    new = {m[t] for t in p.names if t not in p.u_labels}
    edges = []
    for t1, t2 in p.select:
        a, x = (m[t1], m[t2]) if is_a_name(t1) else (m[t2], m[t1])
        edges.append((a, x))
    return Plan(p.id, new, edges)


def resolve_by_catalogue(
    st: LabeledState, i: int, catalogue: tuple[Pattern, ...]
) -> Outcome | None:
    view = st.view()
    anchors = _anchors(st, i)
    for p in catalogue:
        if p.impossible:
            continue
        for anchor in anchors:
            for m in match(p, view, anchor):
                out = st.evaluate(_pattern_plan(st, p, m))
                if out is not None:
                    return out
    return None


def _closure(st: LabeledState, verts: set[int]) -> set[int]:
    """Add the outside A-neighbours of every B-vertex."""
    g = st.g
    out = set(verts)
    for x in list(verts):
        if not st.b.in_a(x):
            out.update(w for w in g.adj[x] if not st.in_u[w])
    return out


def _candidate_sets(st: LabeledState, seed: set[int]) -> list[set[int]]:
    g = st.g
    base = _closure(st, seed)
    found = [base]
    seen = {frozenset(base)}
    frontier = [base]
    for _ in range(2):
        nxt = []
        for s in frontier:
            ext = sorted(
                {x for a in s if st.b.in_a(a) for x in g.adj[a] if not st.in_u[x] and x not in s}
            )
            for x in ext:
                t = _closure(st, s | {x})
                key = frozenset(t)
                if key not in seen:
                    seen.add(key)
                    found.append(t)
                    nxt.append(t)
                if len(found) >= _SEARCH_MAX_SETS:
                    return found
        frontier = nxt
    return found


def _matchings(edges: list[tuple[int, int]]):
    def rec(i: int, used: set[int], acc: list[tuple[int, int]]):
        if i == len(edges):
            yield list(acc)
            return
        yield from rec(i + 1, used, acc)
        a, x = edges[i]
        if a not in used and x not in used:
            used.update((a, x))
            acc.append((a, x))
            yield from rec(i + 1, used, acc)
            acc.pop()
            used.difference_update((a, x))

    yield from rec(0, set(), [])


def resolve_by_search(st: LabeledState, seed: set[int]) -> Outcome | None:
    """Best-slack extension over small vertex sets around ``seed``."""
    g, b = st.g, st.b
    for s in _candidate_sets(st, seed):
        cand = []
        for x in sorted(s):
            if b.in_a(x):
                continue
            for a in g.adj[x]:
                if a in s or (st.in_u[a] and a not in st.mate):
                    cand.append((a, x))
        if len(cand) > _SEARCH_MAX_EDGES:
            continue
        best: Outcome | None = None
        for es in _matchings(cand):
            out = st.evaluate(Plan("search", set(s), es))
            if out is not None and (best is None or (out.slack, len(out.edges)) > (best.slack, len(best.edges))):
                best = out
        if best is not None:
            return best
    return None


# --- the loop --------------------------------------------------------------------


def _check_preconditions(g: Graph, b: Bipartition) -> None:
    if g.max_degree > 3:
        raise PreconditionError(f"maximum degree {g.max_degree} exceeds 3")
    for u, v in g.edges:
        if b.in_a(u) == b.in_a(v):
            raise PreconditionError("bipartition does not separate an edge")
    if g.n and g.min_degree < 2:
        raise PreconditionError("minimum degree below 2")
    if g.n and not any(g.degree(x) <= 2 for x in b.side_b):
        raise PreconditionError("no B-vertex of degree <= 2")
    if not is_connected(g):
        raise PreconditionError("graph is not connected")


def core_loop(
    g: Graph,
    b: Bipartition,
    trace: list[StepRecord] | None = None,
    assert_invariants: bool = False,
    exact_below: int = BRUTE_FORCE_MAX_VERTICES,
) -> Matching:
    """UR matching of size at least ``5/9 |A|`` on a connected subcubic
    bipartite graph without twins, with minimum degree 2 and a B-vertex of
    degree at most 2.  Graphs with at most ``exact_below`` vertices are
    solved exactly."""
    _check_preconditions(g, b)
    if g.n <= exact_below:
        _, m = nu_ur_exact(g)
        if trace is not None:
            trace.append(StepRecord(0, "exact", "brute-force", 0, g.n, len(m), 0, 0, 0))
        return m
    if assert_invariants and find_twins(g):
        raise PreconditionError("graph has two vertices with the same neighbourhood")
    st = LabeledState(g, b)
    sel = _Selector(st)
    it = 0
    while st.size < g.n:
        it += 1
        out: Outcome | None = None
        u = sel.low_vertex(1)
        if u is not None:
            case, anchor = "1", u
            plan, _ = plan_case1(st, u)
            out = st.evaluate(plan)
            seed = plan.new
        else:
            i = sel.live_c4(sel.c41)
            catalogue = CASE2_PATTERNS
            case = "2"
            if i is None:
                i = sel.live_c4(sel.c42)
                catalogue = CASE3_PATTERNS
                case = "3"
            if i is not None:
                anchor = min(st.c4_vertices[i])
                out = resolve_by_catalogue(st, i, catalogue)
                seed = set(st.c4_vertices[i])
            else:
                u = sel.low_vertex(2)
                if u is None:
                    raise NoCaseApplies(f"no case applies with |U|={st.size} < n={g.n}")
                case, anchor = "4", u
                plan = plan_case4(st, u)
                out = st.evaluate(plan)
                seed = plan.new
        if out is None:
            out = resolve_by_search(st, seed)
        if out is None:
            raise UnmatchedConfiguration(f"case {case} at vertex {anchor}: no valid extension")
        st.commit(out)
        sel.refresh(out.new)
        if trace is not None:
            trace.append(
                StepRecord(it, case, out.plan.pattern, anchor, len(out.new), st.s, st.d, st.f, st.slack)
            )
        if assert_invariants:
            check_state(st)
    m = st.matching()
    na = len(b.side_a)
    if st.d != 0 or 9 * len(m) < 5 * na:
        raise InvariantViolation(f"final |M|={len(m)} below 5/9 |A| (|A|={na})")
    return m
