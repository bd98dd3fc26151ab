"""Undirected simple graphs, bipartitions and the structural queries the
matching algorithms rely on (twins, 4-cycles, components)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

Edge = tuple[int, int]


class GraphFormatError(ValueError):
    """Malformed graph or matching text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotBipartiteError(ValueError):
    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        super().__init__(f"graph is not bipartite (odd cycle {cycle})")


def norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``adj[v]`` is the ascending tuple of neighbours of ``v``; ``edges`` holds
    each edge once as ``(min, max)``.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    edges: frozenset[Edge] = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        es: set[Edge] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            e = norm(u, v)
            if e in es:
                raise ValueError(f"duplicate edge {e}")
            es.add(e)
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), frozenset(es))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @property
    def min_degree(self) -> int:
        return min((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return norm(u, v) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled to ``0..k-1``.

        Returns the subgraph and ``orig`` with ``orig[new] == old``.
        """
        orig = sorted(set(vertices))
        index = {v: i for i, v in enumerate(orig)}
        es = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(orig), es), orig

    def remove_vertices(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        gone = set(vertices)
        return self.induced(v for v in range(self.n) if v not in gone)

    def is_regular(self) -> bool:
        return self.n > 0 and self.min_degree == self.max_degree


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset[int]
    side_b: frozenset[int]

    def in_a(self, v: int) -> bool:
        return v in self.side_a

    def orient(self, e: Sequence[int]) -> Edge:
        """Return the edge as ``(a, b)`` with ``a`` on side A."""
        u, v = e
        return (u, v) if u in self.side_a else (v, u)

    def swapped(self) -> Bipartition:
        return Bipartition(self.side_b, self.side_a)


def components(g: Graph) -> list[list[int]]:
    """Connected components, each sorted, ordered by smallest vertex."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def two_coloring(g: Graph) -> list[int] | list[None]:
    """Side of every vertex (0 = A, 1 = B) or raise NotBipartiteError."""
    color: list[int | None] = [None] * g.n
    parent = [-1] * g.n
    for s in range(g.n):
        if color[s] is not None:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if color[w] is None:
                    color[w] = 1 - color[u]  # type: ignore[operator]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    raise NotBipartiteError(_odd_cycle(parent, u, w))
    return color  # type: ignore[return-value]


def _odd_cycle(parent: list[int], u: int, w: int) -> list[int]:
    def path(x: int) -> list[int]:
        p = [x]
        while parent[x] != -1:
            x = parent[x]
            p.append(x)
        return p

    pu, pw = path(u), path(w)
    on_pw = set(pw)
    lca = next(x for x in pu if x in on_pw)
    left = pu[: pu.index(lca) + 1]
    right = pw[: pw.index(lca)]
    return left + right[::-1]


def bipartition(g: Graph) -> Bipartition:
    """Canonical bipartition: the lowest vertex of every component is on side A.

    Raises NotBipartiteError carrying an odd-cycle witness.
    """
    color = two_coloring(g)
    a = frozenset(v for v in range(g.n) if color[v] == 0)
    return Bipartition(a, frozenset(range(g.n)) - a)


def is_bipartite(g: Graph) -> bool:
    try:
        two_coloring(g)
    except NotBipartiteError:
        return False
    return True


def find_twins(g: Graph) -> list[Edge]:
    """All pairs ``(u, v)``, ``u < v``, with ``N(u) == N(v)``."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for v in range(g.n):
        groups.setdefault(g.adj[v], []).append(v)
    pairs = []
    for members in groups.values():
        pairs.extend(combinations(members, 2))
    return sorted(pairs)


def four_cycles(g: Graph) -> list[tuple[int, int, int, int]]:
    """Every 4-cycle once, as ``(x, p, y, q)`` with ``x < y`` opposite,
    ``p < q`` opposite and ``x`` the smallest vertex of the cycle.

    Pairs of opposite vertices are found through common neighbourhoods.
    """
    found = set()
    for x in range(g.n):
        common: dict[int, list[int]] = {}
        for p in g.adj[x]:
            for y in g.adj[p]:
                if y > x:
                    common.setdefault(y, []).append(p)
        for y, mids in common.items():
            for p, q in combinations(sorted(mids), 2):
                if min(p, q) > x:
                    found.add((x, p, y, q))
    return sorted(found)


@dataclass(frozen=True)
class C4Instance:
    """A 4-cycle of a bipartite graph with A-vertices ``a`` and B-vertices ``b``.

    ``kind`` is ``"C4_1"`` when the A-degrees are (3, 2) (then ``a[0]`` has
    degree 3), ``"C4_2"`` when both are 3 and ``"twin"`` when both are 2.
    Other degree combinations (only possible above degree 3) are ``"other"``.
    """

    a: tuple[int, int]
    b: tuple[int, int]
    kind: str


def classify_c4s(g: Graph, b: Bipartition) -> list[C4Instance]:
    out = []
    for x, p, y, q in four_cycles(g):
        if b.in_a(x):
            a_pair, b_pair = (x, y), (p, q)
        else:
            a_pair, b_pair = (p, q), (x, y)
        d = (g.degree(a_pair[0]), g.degree(a_pair[1]))
        if d == (2, 3):
            a_pair, d = (a_pair[1], a_pair[0]), (3, 2)
        kind = {(3, 2): "C4_1", (3, 3): "C4_2", (2, 2): "twin"}.get(d, "other")
        out.append(C4Instance(a_pair, b_pair, kind))
    return out


# --- text format ---------------------------------------------------------


def parse_graph(text: str | bytes) -> Graph:
    """Parse the edge-list format: optional ``p <n> <m>`` header, ``#``
    comments, one ``<u> <v>`` edge per line.

    Integer tokens are used as vertex ids directly; if any token is not a
    non-negative integer, all tokens are treated as labels and numbered in
    order of first appearance.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header: tuple[int, int] | None = None
    raw: list[tuple[str, str, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None or raw:
                raise GraphFormatError("header must come first and only once", lineno)
            if len(parts) != 3 or not all(t.isdigit() for t in parts[1:]):
                raise GraphFormatError("header must be 'p <n> <m>'", lineno)
            header = (int(parts[1]), int(parts[2]))
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"expected '<u> <v>', got {line!r}", lineno)
        raw.append((parts[0], parts[1], lineno))

    numeric = all(u.isdigit() and v.isdigit() for u, v, _ in raw)
    if numeric:
        ids = [(int(u), int(v), ln) for u, v, ln in raw]
    else:
        index: dict[str, int] = {}
        ids = []
        for u, v, ln in raw:
            for t in (u, v):
                index.setdefault(t, len(index))
            ids.append((index[u], index[v], ln))

    if header is not None:
        n = header[0]
    else:
        n = 1 + max((max(u, v) for u, v, _ in ids), default=-1)
    seen: set[Edge] = set()
    for u, v, ln in ids:
        if u == v:
            raise GraphFormatError(f"loop at vertex {u}", ln)
        if u >= n or v >= n:
            raise GraphFormatError(f"vertex id >= n={n}", ln)
        e = norm(u, v)
        if e in seen:
            raise GraphFormatError(f"duplicate edge {u} {v}", ln)
        seen.add(e)
    if header is not None and header[1] != len(ids):
        raise GraphFormatError(f"header announces {header[1]} edges, found {len(ids)}")
    return Graph.from_edges(n, [(u, v) for u, v, _ in ids])


def write_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str | bytes) -> list[Edge]:
    """Edge lines of a matching file (no header)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or not all(t.isdigit() for t in parts):
            raise GraphFormatError(f"expected '<u> <v>', got {line!r}", lineno)
        out.append(norm(int(parts[0]), int(parts[1])))
    return out
