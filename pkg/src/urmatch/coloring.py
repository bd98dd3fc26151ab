"""Uniquely restricted edge colourings.

* ``greedy_coloring``: at most Delta^2 colours on any graph.
* ``improve_coloring``: pushes a coloring below Delta^2 on connected graphs
  other than K_{Delta,Delta} by emptying the highest colour class.
* ``partition_matching_ur``: splits a matching of a connected bipartite graph
  with Delta >= 4 (not K_{Delta,Delta}) into at most Delta - 1 UR matchings.
* ``color_delta2_minus_delta``: proper Delta-edge-colouring followed by the
  partition of every class, giving at most Delta^2 - Delta colours.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .graph import Bipartition, Edge, Graph, NotBipartiteError, bipartition, components, is_bipartite, is_connected, norm
from .verify import Matching, is_ur_bipartite, is_ur_general
from .wrapper import InvariantViolation, PreconditionError


class ImprovementError(RuntimeError):
    """No manipulation can remove an edge of the highest colour.  For a
    connected graph this only happens on K_{Delta,Delta}."""


class CaseAnalysisExhausted(InvariantViolation):
    pass


@dataclass
class EdgeColoring:
    color_of: dict[Edge, int]  # colours are 1-based
    # the proper Delta-edge-colouring a composed colouring was built from
    skeleton: dict[Edge, int] | None = None

    @property
    def color_count(self) -> int:
        return len(set(self.color_of.values()))

    def classes(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {}
        for e, c in sorted(self.color_of.items()):
            out.setdefault(c, []).append(e)
        return dict(sorted(out.items()))

    def is_proper(self) -> bool:
        seen: set[tuple[int, int]] = set()
        for (u, v), c in self.color_of.items():
            if (u, c) in seen or (v, c) in seen:
                return False
            seen.update(((u, c), (v, c)))
        return True

    def ur_valid(self, g: Graph) -> bool:
        """Every edge coloured, every class a UR matching (checked)."""
        if set(self.color_of) != set(g.edges) or not self.is_proper():
            return False
        b = bipartition(g) if is_bipartite(g) else None
        return all(_class_ok(g, b, es) for es in self.classes().values())

    def renumbered(self) -> EdgeColoring:
        """Colours compacted to ``1..k`` keeping their relative order."""
        rank = {c: i + 1 for i, c in enumerate(sorted(set(self.color_of.values())))}
        return EdgeColoring({e: rank[c] for e, c in self.color_of.items()}, self.skeleton)

    def lines(self) -> list[str]:
        out = [f"{u} {v} {c}" for (u, v), c in sorted(self.color_of.items())]
        out.append(f"colors: {self.color_count}")
        return out


@dataclass
class MatchingPartition:
    parts: list[Matching] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.parts)


def _class_ok(g: Graph, b: Bipartition | None, edges: Iterable[Edge]) -> bool:
    es = list(edges)
    ends = [x for e in es for x in e]
    if len(set(ends)) != len(ends):
        return False
    m = Matching(frozenset(es))
    if b is not None:
        return is_ur_bipartite(g, b, m)[0]
    return is_ur_general(g, m)[0]


# --- greedy Delta^2 colouring --------------------------------------------------


def greedy_coloring(g: Graph, order: Sequence[int] | None = None) -> EdgeColoring:
    """Colour the forward edges of each vertex in turn with the smallest
    colours not used on edges at any of its neighbours."""
    order = list(range(g.n)) if order is None else list(order)
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    at: list[set[int]] = [set() for _ in range(g.n)]  # colours on edges at v
    color: dict[Edge, int] = {}
    for u in order:
        banned = set().union(*(at[w] for w in g.adj[u])) if g.adj[u] else set()
        c = 1
        for w in sorted((w for w in g.adj[u] if pos[w] > pos[u]), key=pos.__getitem__):
            while c in banned:
                c += 1
            color[norm(u, w)] = c
            at[u].add(c)
            at[w].add(c)
            banned.add(c)
    return EdgeColoring(color)


# --- improvement below Delta^2 -------------------------------------------------


class _Recolorer:
    def __init__(self, g: Graph, color: dict[Edge, int]):
        self.g = g
        self.b = bipartition(g) if is_bipartite(g) else None
        self.color = dict(color)
        self.members: dict[int, set[Edge]] = {}
        for e, c in color.items():
            self.members.setdefault(c, set()).add(e)

    def attempt(self, changes: dict[Edge, int]) -> bool:
        """Apply ``changes`` if every touched class stays a UR matching."""
        old = {e: self.color[e] for e in changes}
        for e, c in changes.items():
            self.members[old[e]].discard(e)
            self.members.setdefault(c, set()).add(e)
            self.color[e] = c
        if all(_class_ok(self.g, self.b, self.members[c]) for c in set(changes.values())):
            return True
        for e, c in changes.items():
            self.members[c].discard(e)
            self.members[old[e]].add(e)
            self.color[e] = old[e]
        return False

    def remove_one(self, victim: int, palette: list[int]) -> bool:
        """Move one edge out of the victim class by one of three local
        manipulations, tried in order."""
        g = self.g
        edges = sorted(self.members.get(victim, ()))
        for uv in edges:
            for u, v in (uv, uv[::-1]):
                for alpha in palette:
                    if self.attempt({uv: alpha}):
                        return True
                for x in g.adj[u]:
                    if x == v:
                        continue
                    for y in g.adj[x]:
                        if y == u:
                            continue
                        xy = norm(x, y)
                        c3 = self.color[xy]
                        if c3 == victim:
                            continue
                        for alpha in palette:
                            if alpha != c3 and self.attempt({xy: alpha, uv: c3}):
                                return True
                for x in g.adj[u]:
                    if x == v:
                        continue
                    ux = norm(u, x)
                    c2 = self.color[ux]
                    if c2 == victim:
                        continue
                    for y in g.adj[x]:
                        if y == u:
                            continue
                        xy = norm(x, y)
                        c3 = self.color[xy]
                        if c3 == victim or c3 == c2:
                            continue
                        if self.attempt({uv: c2, ux: c3, xy: c2}):
                            return True
        return False


def improve_coloring(g: Graph, c: EdgeColoring, opportunistic: bool = False) -> EdgeColoring:
    """UR colouring with at most Delta^2 - 1 colours, obtained from ``c`` by
    emptying its highest colour class one edge at a time.

    With ``opportunistic`` the next highest classes are attacked as well
    until a class cannot be emptied; no bound beyond Delta^2 - 1 is claimed.
    Raises ImprovementError when the class cannot be emptied (K_{Delta,Delta}).
    """
    if not is_connected(g):
        raise PreconditionError("graph is not connected")
    if set(c.color_of) != set(g.edges):
        raise PreconditionError("colouring does not cover exactly the edges of the graph")
    delta = g.max_degree
    cur = c.renumbered()
    if cur.color_count > delta * delta:
        raise PreconditionError(f"colouring uses {cur.color_count} > Delta^2 colours")
    target = delta * delta - 1
    while True:
        k = cur.color_count
        if k <= target and not opportunistic:
            return cur
        if k <= 1:
            if k > target:
                raise ImprovementError("a single edge needs one colour")
            return cur
        rec = _Recolorer(g, cur.color_of)
        palette = list(range(1, k))
        while rec.members.get(k):
            before = len(rec.members[k])
            if not rec.remove_one(k, palette):
                if k > target:
                    raise ImprovementError(
                        f"no manipulation removes colour {k} ({before} edges left)"
                    )
                return cur
            if len(rec.members[k]) >= before:
                raise InvariantViolation("victim class did not shrink")
        cur = EdgeColoring(rec.color).renumbered()


# --- proper Delta-edge-colouring of a bipartite graph ----------------------------


def bipartite_proper_coloring(g: Graph) -> EdgeColoring:
    """Proper edge colouring with Delta colours: each edge takes a colour
    free at one end, after swapping a two-coloured alternating path if the
    colour is busy at the other end."""
    if not is_bipartite(g):
        raise NotBipartiteError("graph is not bipartite")
    delta = g.max_degree
    at: list[dict[int, int]] = [dict() for _ in range(g.n)]  # colour -> neighbour

    def free(v: int) -> int:
        return next(c for c in range(1, delta + 1) if c not in at[v])

    for u, v in g.sorted_edges():
        a, b = free(u), free(v)
        if a not in at[v]:
            c = a
        else:
            # swap a/b on the path from v that starts with colour a; it
            # cannot reach u in a bipartite graph
            path = [v]
            col = a
            while col in at[path[-1]]:
                path.append(at[path[-1]][col])
                col = b if col == a else a
            recol = []
            col = a
            for x, y in zip(path, path[1:]):
                recol.append((x, y, col))
                col = b if col == a else a
            for x, y, cc in recol:
                del at[x][cc]
                del at[y][cc]
            for x, y, cc in recol:
                nc = b if cc == a else a
                at[x][nc] = y
                at[y][nc] = x
            c = a
        at[u][c] = v
        at[v][c] = u
    color = {norm(u, w): c for u in range(g.n) for c, w in at[u].items()}
    return EdgeColoring(color)


# --- partition of a matching into Delta - 1 UR matchings ---------------------------


def _check_partition_preconditions(g: Graph, delta: int) -> None:
    if not is_bipartite(g):
        raise PreconditionError("graph is not bipartite")
    if not is_connected(g):
        raise PreconditionError("graph is not connected")
    if delta < 4:
        raise PreconditionError(f"maximum degree {delta} < 4")
    b = bipartition(g)
    if (
        len(b.side_a) == delta
        and len(b.side_b) == delta
        and g.m == delta * delta
    ):
        raise PreconditionError(f"graph is K_{{{delta},{delta}}}")


def partition_matching_ur(
    g: Graph, b: Bipartition | None, m: Matching | Iterable[Sequence[int]], delta: int | None = None
) -> MatchingPartition:
    """At most ``delta - 1`` UR matchings whose union is ``m``."""
    m = m if isinstance(m, Matching) else Matching.of(m)
    delta = g.max_degree if delta is None else max(delta, g.max_degree)
    _check_partition_preconditions(g, delta)
    b = bipartition(g) if b is None else b
    for e in m.edges:
        if e not in g.edges:
            raise PreconditionError(f"{e} is not an edge")
    if not m.edges:
        return MatchingPartition([])
    color = _color_matching(g, b, sorted(b.orient(e) for e in m.edges), delta)
    parts: dict[int, list[Edge]] = {}
    for (a, x), c in color.items():
        parts.setdefault(c, []).append(norm(a, x))
    out = MatchingPartition([Matching.of(parts[c]) for c in sorted(parts)])
    for p in out.parts:
        if not is_ur_bipartite(g, b, p)[0]:
            raise CaseAnalysisExhausted("a part is not uniquely restricted")
    return out


Oriented = tuple[int, int]  # (A-vertex, B-vertex)


def _color_matching(g: Graph, b: Bipartition, m: list[Oriented], delta: int) -> dict[Oriented, int]:
    covered = {x for e in m for x in e}
    if len(covered) < g.n:
        # colour inside every component of G[V(M)] separately
        h, orig = g.induced(sorted(covered))
        out: dict[Oriented, int] = {}
        for comp in components(h):
            cs = {orig[x] for x in comp}
            mk = [e for e in m if e[0] in cs]
            out.update(_color_perfect(g, b, mk, delta, cs))
        return out
    return _color_perfect(g, b, m, delta, set(covered))


def _color_perfect(
    g: Graph, b: Bipartition, m: list[Oriented], delta: int, verts: set[int]
) -> dict[Oriented, int]:
    """Colour a perfect matching ``m`` of the connected graph ``G[verts]``."""
    deg = {v: sum(1 for w in g.adj[v] if w in verts) for v in verts}
    low = sorted(v for v in verts if deg[v] < delta)
    if low:
        return _greedy_bfs(g, m, delta, verts, low[0], seeds=[])
    cut = _find_cut_pair(g, m, verts)
    if cut is not None:
        return _color_with_cut(g, b, m, delta, verts, *cut)
    return _color_regular(g, b, m, delta, verts)


def _mate_map(m: list[Oriented]) -> dict[int, Oriented]:
    out: dict[int, Oriented] = {}
    for e in m:
        out[e[0]] = e
        out[e[1]] = e
    return out


def _greedy_bfs(
    g: Graph,
    m: list[Oriented],
    delta: int,
    verts: set[int],
    last_vertex: int,
    seeds: list[Oriented],
) -> dict[Oriented, int]:
    """Greedy colouring along a reversed BFS order of the matched edges.

    The root is the edge at ``last_vertex`` and is coloured last, guided by
    ``last_vertex``.  ``seeds`` (already outside ``verts``) are coloured
    first, all with colour 1.
    """
    edge_of = _mate_map(m)
    root = edge_of[last_vertex]
    seen = {root}
    bfs = [root]
    queue = deque([root])
    while queue:
        e = queue.popleft()
        for x in e:
            for w in g.adj[x]:
                if w in verts and edge_of[w] not in seen:
                    seen.add(edge_of[w])
                    bfs.append(edge_of[w])
                    queue.append(edge_of[w])
    if len(bfs) != len(m):
        raise CaseAnalysisExhausted("matched edges do not form a connected graph")
    order = seeds + bfs[::-1]
    color: dict[Oriented, int] = {e: 1 for e in seeds}
    owner = _mate_map(seeds)
    owner.update(edge_of)
    done: set[int] = {x for e in seeds for x in e}
    palette = range(1, delta)
    for i, e in enumerate(order[len(seeds):], start=len(seeds)):
        if i == len(order) - 1:
            u = last_vertex
        else:
            # the A endpoint when both qualify
            u = next(
                (x for x in e if sum(1 for w in g.adj[x] if w in done) <= delta - 2),
                None,
            )
            if u is None:
                raise CaseAnalysisExhausted(f"no endpoint of {e} with <= Delta-2 earlier neighbours")
        banned = {color[owner[w]] for w in g.adj[u] if w in done}
        c = next((c for c in palette if c not in banned), None)
        if c is None:
            raise CaseAnalysisExhausted(f"no free colour for {e}")
        color[e] = c
        done.update(e)
    return color


def _connected_without(g: Graph, verts: set[int], gone: set[int]) -> list[set[int]]:
    rest = verts - gone
    comps: list[set[int]] = []
    seen: set[int] = set()
    for s in sorted(rest):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            for w in g.adj[x]:
                if w in rest and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _find_cut_pair(g: Graph, m: list[Oriented], verts: set[int]):
    for e, f in combinations(m, 2):
        comps = _connected_without(g, verts, {*e, *f})
        if len(comps) > 1:
            return e, f, comps
    return None


def _color_with_cut(
    g: Graph,
    b: Bipartition,
    m: list[Oriented],
    delta: int,
    verts: set[int],
    e: Oriented,
    f: Oriented,
    comps: list[set[int]],
) -> dict[Oriented, int]:
    """Two matched edges whose ends separate the graph: colour both sides
    with ``e, f`` included and reconcile the colours on ``e, f``."""
    side1 = comps[0]
    side2 = set().union(*comps[1:])
    ef = {*e, *f}
    colorings = []
    for side in (side1, side2):
        vs = side | ef
        ms = [x for x in m if x[0] in vs]
        sub = {}
        for comp in _connected_without(g, vs, set()):
            mk = [x for x in ms if x[0] in comp]
            low = min(v for v in comp if sum(1 for w in g.adj[v] if w in comp) < delta)
            sub.update(_greedy_bfs(g, mk, delta, comp, low, seeds=[]))
        colorings.append((vs, sub))
    sub_g1 = _restricted(g, colorings[0][0])
    for first, second in ((0, 1), (1, 0)):
        vs1, c1 = colorings[first]
        _, c2 = colorings[second]
        h1 = sub_g1 if first == 0 else _restricted(g, vs1)
        for c1v in _variants(h1, b, c1, (e, f), delta):
            for perm in permutations(range(1, delta)):
                out = dict(c1v)
                for x, c in c2.items():
                    if x not in (e, f):
                        out[x] = perm[c - 1]
                if _all_ur(g, b, out):
                    return out
    raise CaseAnalysisExhausted("no reconciliation of the two sides of a cut")


def _restricted(g: Graph, vs: set[int]) -> Graph:
    return Graph.from_edges(g.n, [(u, v) for u, v in g.edges if u in vs and v in vs])


def _variants(h: Graph, b: Bipartition, c: dict[Oriented, int], pair, delta: int):
    """``c`` itself, then ``c`` with one edge of ``pair`` recoloured, keeping
    every class UR in ``h``."""
    yield c
    for x in pair:
        for beta in range(1, delta):
            if beta == c[x]:
                continue
            d = dict(c)
            d[x] = beta
            if _all_ur(h, b, d):
                yield d


def _all_ur(g: Graph, b: Bipartition, color: dict[Oriented, int]) -> bool:
    classes: dict[int, list[Edge]] = {}
    for (a, x), c in color.items():
        classes.setdefault(c, []).append(norm(a, x))
    return all(is_ur_bipartite(g, b, Matching(frozenset(es)))[0] for es in classes.values())


def _color_regular(
    g: Graph, b: Bipartition, m: list[Oriented], delta: int, verts: set[int]
) -> dict[Oriented, int]:
    """Delta-regular, perfect matching, no separating pair: colour two
    matched edges alike first, then everything else with the edge next to
    both of them last."""
    edge_of = _mate_map(m)
    for e in m:
        for z in e:
            mate = e[1] if z == e[0] else e[0]
            nb = [w for w in g.adj[z] if w in verts and w != mate]
            for w1, w2 in permutations(nb, 2):
                e1, e2 = edge_of[w1], edge_of[w2]
                o1 = e1[0] if e1[1] == w1 else e1[1]
                if g.has_edge(o1, w2):
                    continue
                rest = verts - {*e1, *e2}
                if len(_connected_without(g, rest, set())) != 1:
                    continue
                mk = [x for x in m if x not in (e1, e2)]
                color = _greedy_bfs(g, mk, delta, rest, z, seeds=[e2, e1])
                if _all_ur(g, b, color):
                    return color
    raise CaseAnalysisExhausted("no seed triple found in a regular graph")


# --- the Delta^2 - Delta pipeline --------------------------------------------------


def color_delta2_minus_delta(g: Graph) -> EdgeColoring:
    delta = g.max_degree
    _check_partition_preconditions(g, delta)
    b = bipartition(g)
    skeleton = bipartite_proper_coloring(g)
    color: dict[Edge, int] = {}
    offset = 0
    for _, es in skeleton.classes().items():
        part = partition_matching_ur(g, b, Matching.of(es), delta)
        for i, p in enumerate(part.parts):
            for e in p.edges:
                color[e] = offset + i + 1
        offset += len(part.parts)
    return EdgeColoring(color, dict(skeleton.color_of)).renumbered()


# --- shipped fixture -------------------------------------------------------------------

# six UR matchings partitioning the edges of the fig1 fixture; a_i is
# vertex i-1 and b_i is vertex i+4
FIG1_COLORING: tuple[tuple[Edge, ...], ...] = (
    ((0, 5), (3, 6), (4, 8)),
    ((0, 6), (1, 8), (4, 9)),
    ((1, 5), (2, 7), (3, 9)),
    ((0, 7), (3, 8)),
    ((1, 6), (2, 9)),
    ((2, 5), (4, 7)),
)


def fig1_coloring() -> EdgeColoring:
    return EdgeColoring({e: i + 1 for i, es in enumerate(FIG1_COLORING) for e in es})
