"""Catalogue of local configurations used by the subcubic algorithm, and a
generic matcher for them.

A pattern is a small template graph.  Template names starting with ``a`` or
``s`` are A-side vertices, all others B-side; ``s*`` vertices must already
lie in ``U`` (with a label from ``u_labels``), all other template vertices
must lie outside ``U``.  Boundary vertices may have neighbours outside the
template; every other vertex has exactly its template neighbours among the
vertices outside ``U`` (neighbours inside ``U`` are unconstrained).  Matches
are induced on the vertices outside ``U``.

The ``select`` edges are added to the matching when the pattern is
resolved.  Patterns marked ``impossible`` cannot occur once the reductions
have run (they are reduction patterns in disguise, or closed components
small enough for brute force); they are kept for auditing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from enum import Enum
from typing import Callable, Iterable, Iterator


class Label(Enum):
    TOP = "T"  # matched
    DASH = "|-"  # unmatched, still has a neighbour outside U
    BOT = "_|_"  # unmatched, saturated

    def __str__(self) -> str:
        return self.value


UNMATCHED = frozenset({Label.DASH, Label.BOT})


def is_a_name(name: str) -> bool:
    return name[0] in "as"


@dataclass(frozen=True)
class Pattern:
    id: str
    edges: tuple[tuple[str, str], ...]
    select: tuple[tuple[str, str], ...] = ()
    boundary: frozenset[str] = frozenset()
    u_labels: dict[str, frozenset[Label]] = field(default_factory=dict, hash=False)
    impossible: bool = False
    # excising the pattern is not safe: its select edges can close an
    # alternating cycle through the boundary (see REDUCTION_PATTERNS)
    unsafe: bool = False

    def __post_init__(self) -> None:
        names = self.names
        for u, v in self.edges:
            if is_a_name(u) == is_a_name(v):
                raise ValueError(f"{self.id}: edge {u}-{v} inside one side")
        ends = [x for e in self.select for x in e]
        if len(set(ends)) != len(ends):
            raise ValueError(f"{self.id}: select edges share an endpoint")
        es = {frozenset(e) for e in self.edges}
        for e in self.select:
            if frozenset(e) not in es:
                raise ValueError(f"{self.id}: select edge {e} is not a template edge")
        if not set(self.u_labels) <= set(names) or not self.boundary <= set(names):
            raise ValueError(f"{self.id}: unknown vertex name")

    @cached_property
    def names(self) -> list[str]:
        out: list[str] = []
        for e in self.edges:
            for x in e:
                if x not in out:
                    out.append(x)
        return out

    @property
    def size(self) -> int:
        """Number of template vertices outside ``U``."""
        return sum(1 for x in self.names if x not in self.u_labels)

    def neighbours(self, name: str) -> list[str]:
        return [v if u == name else u for u, v in self.edges if name in (u, v)]

    @property
    def label_plan(self) -> dict[str, str]:
        """``T`` for select endpoints on side A; other A-vertices get
        ``|-`` or ``_|_`` at resolution time depending on whether they keep
        a neighbour outside ``U``."""
        matched = {x for e in self.select for x in e}
        return {
            x: ("T" if x in matched else "|- or _|_")
            for x in self.names
            if is_a_name(x)
        }


def _e(spec: str) -> tuple[tuple[str, str], ...]:
    """``"c-a1 c-a2"`` -> edge tuple."""
    return tuple(tuple(tok.split("-")) for tok in spec.split())  # type: ignore[misc]


def _p(pid: str, edges: str, select: str = "", boundary: str = "", **kw) -> Pattern:
    return Pattern(pid, _e(edges), _e(select), frozenset(boundary.split()), **kw)


# the two B-vertices c, b1 and the A-vertices a1, a2 form the anchoring 4-cycle
C4 = "c-a1 c-a2 b1-a1 b1-a2"
# c and b1 each with a private third neighbour (a4 and a3)
HEX = C4 + " c-a4 b1-a3"

REDUCTION_PATTERNS: tuple[Pattern, ...] = (
    _p("R.1", HEX + " b2-a1 b2-a4 b2-a3", "c-a2 b2-a1", "a3"),
    _p("R.2", HEX + " b3-a4 b3-a3", "c-a2 b3-a3", "a1"),
    _p("R.3", HEX + " b2-a4 b3-a3 b3-a5 b3-a6 b2-a5 b2-a6", "c-a2 b1-a3 b2-a5", "a1 a6"),
    _p("R.4", HEX + " b2-a1 b2-a4 b2-a3", "b1-a2 b2-a1", "a3 a4"),
    # Selecting c-a4 and b1-a3 here is unsafe: a4 is adjacent to the kept
    # vertex b2 and c to the kept vertex a1, so an alternating path outside
    # closes a cycle c-a4-b2-...-a1-c.  c-a2 and b3-a4 keep every
    # alternating path inside the pattern away from the boundary.
    _p("R.5", HEX + " b2-a4 b2-a3 b3-a4 b3-a3", "c-a2 b3-a4", "a1 b2"),
    # With b3 kept as well, no pair of interior edges is safe; the pattern
    # is left to the core algorithm.
    _p("R.6", HEX + " b2-a4 b2-a3 b3-a4 b3-a3", "c-a4 b1-a3", "a1 b2 b3", unsafe=True),
)

# 4-cycles with A-degrees (3, 2): a1 has degree 3, a2 degree 2.  Listed from
# the most specific configuration to the most general one.
CASE2_PATTERNS: tuple[Pattern, ...] = (
    # both B-vertices see only a1, a2 outside U; a1's third neighbour d lies
    # on another 4-cycle
    _p("C2.shared.attached", C4 + " d-a5 d-a6 e-a5 e-a6 a1-d", "c-a2 e-a6 a1-d", "a5"),
    _p("C2.shared", C4, "c-a2", "a1"),
    # b1 has a private neighbour a3; b2 sees only a1 and a3
    _p("C2.one-private.closed", C4 + " b1-a3 b2-a1 b2-a3", "c-a2 b1-a3", "a3"),
    _p("C2.one-private", C4 + " b1-a3", "c-a2 b1-a3", "a1 a3"),
    # both B-vertices have private neighbours
    _p("C2.two-private.ii", HEX + " b2-a1 b2-a4 b2-a3 b3-a4 b3-a3", "c-a2 b2-a1 b3-a3"),
    _p("C2.two-private.iii", HEX + " b2-a1 b2-a4 b2-a3", "c-a1 b2-a3"),
    _p("C2.two-private.iv", HEX + " b2-a1 b2-a4 b2-a3", boundary="a3", impossible=True),
    _p("C2.two-private.v", HEX + " b2-a1 b2-a4 b2-a3", boundary="a3 a4", impossible=True),
    _p("C2.two-private.vi", HEX + " b3-a4 b3-a3", boundary="a1", impossible=True),
    _p("C2.two-private.ix", HEX + " b2-a4 b2-a3 b3-a4 b3-a3", boundary="a1 b2", impossible=True),
    _p("C2.two-private.x", HEX + " b2-a1 b2-a3 b3-a4 b3-a3", "b1-a2 b2-a3 b3-a4"),
    _p("C2.two-private.xi", HEX + " b2-a1 b2-a3 b3-a4 b3-a3", "b1-a2 b2-a3 b3-a4", "a4"),
    _p("C2.two-private.xii", HEX + " b2-a1 b2-a4", "c-a2 b1-a3 b2-a4", "a3"),
    _p("C2.two-private.xiii", HEX + " b2-a1 b2-a4", "c-a2 b1-a3 b2-a4", "a3 a4"),
    # pattern (i) next to another 4-cycle with A-degrees (3, 2)
    _p(
        "C2.next-to-c4.a",
        HEX + " b5-a1 b5-a7 b5-a8 b6-a7 b6-a8",
        "c-a2 b1-a3 a1-b5 b6-a8",
        "a7 a4 a3",
    ),
    _p(
        "C2.next-to-c4.b",
        HEX + " b5-a1 b5-a7 b5-a8 b6-a7 b6-a8 b6-a9",
        "c-a2 b1-a3 a1-b5 b6-a8",
        "a7 a9 a4 a3",
    ),
    _p(
        "C2.two-c4.xvi",
        HEX + " b2-a1 b3-a3 b3-a5 b3-a6 b2-a5 b2-a6",
        "c-a4 b1-a2 a1-b2 a3-b3",
        "a4 a6",
    ),
    _p(
        "C2.two-c4.xviii",
        HEX + " b2-a4 b3-a3 b3-a5 b3-a6 b2-a5 b2-a6",
        boundary="a1 a6",
        impossible=True,
    ),
    _p(
        "C2.two-c4.xvii",
        HEX + " b2-a4 b3-a3 b3-a5 b3-a6 b2-a5 b2-a6",
        "c-a2 b1-a3 b3-a5",
        "a1 a4 a6",
    ),
    _p("C2.two-private.i", HEX, "c-a2 b1-a3", "a1 a4 a3"),
    _p("C2.two-private.vii", HEX + " b3-a4 b3-a3", "c-a2 b3-a4", "a1 a3"),
    _p("C2.two-private.viii", HEX + " b3-a4 b3-a3", "c-a2 b3-a4", "a1 a4 a3"),
)

_FREE = UNMATCHED
_TOP = frozenset({Label.TOP})

# 4-cycles whose A-vertices both have degree 3
CASE3_PATTERNS: tuple[Pattern, ...] = (
    # c and b1 see only a1, a2 outside U; dispatch on their U-neighbours
    _p("C3.shared.same", C4 + " s1-c s1-b1", "s1-c", "a1 a2", u_labels={"s1": _FREE}),
    _p(
        "C3.shared.free-free",
        C4 + " s1-c s2-b1",
        "s1-c s2-b1",
        "a1 a2",
        u_labels={"s1": _FREE, "s2": _FREE},
    ),
    _p(
        "C3.shared.top-free",
        C4 + " s1-c s2-b1",
        "c-a2 s2-b1",
        "a1 a2",
        u_labels={"s1": _TOP, "s2": _FREE},
    ),
    _p("C3.shared.top-top", C4, "c-a2", "a1 a2"),
    _p("C3.one-private", C4 + " b1-a3", "c-a1 b1-a3", "a1 a2 a3"),
    _p("C3.two-private.ii", HEX + " b2-a1 b2-a4 b2-a3 b3-a4 b3-a3 b3-a2", impossible=True),
    _p("C3.two-private.iii", HEX + " b2-a1 b2-a4 b2-a3", boundary="a2", impossible=True),
    _p("C3.two-private.v", HEX + " b2-a1 b2-a4 b2-a3 b3-a2 b3-a3", "c-a4 b1-a1 b3-a3"),
    _p("C3.two-private.vi", HEX + " b2-a1 b2-a4 b2-a3 b3-a4 b3-a3", "c-a2 b2-a1 b3-a3", "a2"),
    _p("C3.two-private.iv", HEX + " b2-a1 b2-a4 b2-a3", "c-a4 b1-a1", "a2 a3"),
    _p("C3.two-private.ix", HEX + " b2-a4 b2-a3 b3-a2 b3-a3", "c-a4 b1-a1 b3-a3"),
    _p("C3.two-private.vii", HEX + " b2-a1 b2-a4", "c-a2 b1-a3 b2-a1", "a2 a3"),
    _p("C3.two-private.viii", HEX + " b2-a3 b2-a4", "c-a4 b1-a3", "a1 a2"),
    _p("C3.two-private.i", HEX, "c-a2 b1-a3", "a1 a2 a4 a3"),
)

# vertices outside U in the largest transcribed pattern; components up to
# this size are solved exactly
LARGEST_PATTERN = max(p.size for p in REDUCTION_PATTERNS + CASE2_PATTERNS + CASE3_PATTERNS)


# --- matching ------------------------------------------------------------


@dataclass
class View:
    """What the matcher needs to know about the host graph."""

    nbrs: Callable[[int], Iterable[int]]
    in_u: Callable[[int], bool] = lambda v: False
    label: Callable[[int], Label | None] = lambda v: None


@dataclass(frozen=True)
class _Plan:
    order: tuple[str, ...]
    parent: tuple[str | None, ...]  # an earlier template neighbour
    tnbrs: dict[str, frozenset[str]]
    inner_deg: dict[str, int]


@lru_cache(maxsize=None)
def _plan(p: Pattern, roots: tuple[str, ...]) -> _Plan:
    tnbrs = {x: frozenset(p.neighbours(x)) for x in p.names}
    order = list(roots)
    outside = [x for x in p.names if x not in p.u_labels]
    while len(order) < len(p.names):
        nxt = next(
            x
            for x in outside + list(p.u_labels)
            if x not in order and any(y in order for y in tnbrs[x])
        )
        order.append(nxt)
    parent = tuple(
        None if i < len(roots) else next(y for y in order[:i] if y in tnbrs[t])
        for i, t in enumerate(order)
    )
    inner_deg = {x: sum(1 for y in tnbrs[x] if y not in p.u_labels) for x in p.names}
    return _Plan(tuple(order), parent, tnbrs, inner_deg)


def match(p: Pattern, view: View, anchor: dict[str, int]) -> Iterator[dict[str, int]]:
    """All embeddings of ``p`` extending the partial map ``anchor``."""
    plan = _plan(p, tuple(anchor))
    order, tnbrs, inner_deg = plan.order, plan.tnbrs, plan.inner_deg
    u_labels, boundary = p.u_labels, p.boundary
    out_cache: dict[int, int] = {}

    def outside_count(v: int) -> int:
        k = out_cache.get(v)
        if k is None:
            k = out_cache[v] = sum(1 for w in view.nbrs(v) if not view.in_u(w))
        return k

    def fits(t: str, v: int, m: dict[str, int]) -> bool:
        if t in u_labels:
            if not view.in_u(v) or view.label(v) not in u_labels[t]:
                return False
        else:
            if view.in_u(v):
                return False
            k = outside_count(v)
            if k < inner_deg[t] or (k > inner_deg[t] and t not in boundary):
                return False
        vn = view.nbrs(v)
        tn = tnbrs[t]
        for t2, v2 in m.items():
            if v2 == v:
                return False
            if t2 in tn:
                if v2 not in vn:
                    return False
            elif t not in u_labels and t2 not in u_labels and v2 in vn:
                return False
        return True

    m: dict[str, int] = {}
    for t in order[: len(anchor)]:
        if not fits(t, anchor[t], m):
            return
        m[t] = anchor[t]

    def rec(i: int) -> Iterator[dict[str, int]]:
        if i == len(order):
            yield dict(m)
            return
        t = order[i]
        for v in sorted(view.nbrs(m[plan.parent[i]])):
            if fits(t, v, m):
                m[t] = v
                yield from rec(i + 1)
                del m[t]

    yield from rec(len(anchor))


def first_match(p: Pattern, view: View, anchor: dict[str, int]) -> dict[str, int] | None:
    return next(match(p, view, anchor), None)
