"""Square coarsening process over a single contour.

The triangles of one contour are grouped bottom-up by a discrete-time
process.  At time 0 every maximal triangle becomes a square (carrying the
triangles nested inside it as members).  At each step, squares shoot arrows
at heavier squares within reach of the cube of their own mass; connected
groups fuse into the smallest square covering them, absorbing anything that
ends up inside.  A single contour always fuses down to one square; the
number of steps this takes is the formation time of the contour.

Positions are exact: a square covers the integer sites [lo, hi] and its
real basis is (lo - 1/2, hi + 1/2).  Arrow shadows, the open intervals
between the facing edges of two squares, are stored with doubled integer
coordinates so containment and laminarity tests stay in integer
arithmetic.  A zero-gap arrow has a degenerate point shadow; a point counts
as inside an interval only when strictly interior, and contains nothing
except itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contours import DEFAULT_C, decompose
from .triangles import Triangle, TriangleConfiguration


class InternalConsistencyError(RuntimeError):
    """The process reached a state the single-contour theory rules out."""


@dataclass(frozen=True)
class Square:
    """Sites [lo, hi] plus the triangles it has swallowed so far."""

    lo: int
    hi: int
    members: tuple[Triangle, ...]

    def __init__(self, lo: int, hi: int, members):
        mem = tuple(sorted(members, key=lambda t: (t.lo, t.hi)))
        if lo > hi:
            raise ValueError(f"square needs lo <= hi, got [{lo}, {hi}]")
        if not mem:
            raise ValueError("a square must carry at least one triangle")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "members", mem)

    @property
    def mass(self) -> int:
        return sum(t.mass for t in self.members)

    @property
    def basis(self) -> tuple[float, float]:
        return (self.lo - 0.5, self.hi + 0.5)

    def interval2(self) -> tuple[int, int]:
        """Doubled coordinates of the open basis interval."""
        return (2 * self.lo - 1, 2 * self.hi + 1)


@dataclass(frozen=True)
class Arrow:
    """Directed link between squares, stored as indices into a square list."""

    source: int
    target: int
    kind: str  # "old" or "new"
    shadow: tuple[int, int]  # doubled coordinates of the gap between the two


def _shadow_between(left: Square, right: Square) -> tuple[int, int]:
    return (2 * left.hi + 1, 2 * right.lo - 1)


def _shadow_is_point(sh: tuple[int, int]) -> bool:
    return sh[0] == sh[1]


def _shadow_inside(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Whether shadow a lies inside shadow b (as open/point sets)."""
    if a == b:
        return True
    if _shadow_is_point(b):
        return False
    if _shadow_is_point(a):
        return b[0] < a[0] < b[1]
    return b[0] <= a[0] and a[1] <= b[1]


def _shadows_intersect(a: tuple[int, int], b: tuple[int, int]) -> bool:
    if _shadow_is_point(a) and _shadow_is_point(b):
        return a == b
    if _shadow_is_point(a):
        return b[0] < a[0] < b[1]
    if _shadow_is_point(b):
        return a[0] < b[0] < a[1]
    return max(a[0], b[0]) < min(a[1], b[1])


def _shadows_laminar(a: tuple[int, int], b: tuple[int, int]) -> bool:
    if not _shadows_intersect(a, b):
        return True
    return _shadow_inside(a, b) or _shadow_inside(b, a)


def square_dist(s1: Square, s2: Square) -> int:
    """Sites strictly between two disjoint squares."""
    if s1.hi < s2.lo:
        return s2.lo - s1.hi - 1
    if s2.hi < s1.lo:
        return s1.lo - s2.hi - 1
    raise ValueError("squares overlap; distance is only defined when disjoint")


def squares_init(tris: TriangleConfiguration, c: float = DEFAULT_C) -> list[Square]:
    """Time-0 squares: one per maximal triangle, carrying its nested content.

    Requires the configuration to be a single contour at scale c.
    """
    partition = decompose(tris, c)
    if len(partition) != 1:
        raise ValueError(
            f"square process needs a single contour, found {len(partition)}"
        )
    ts = tris.triangles
    maximal = [
        t for t in ts if not any(u != t and u.contains(t) for u in ts)
    ]
    out = []
    for m in maximal:
        members = [t for t in ts if m.contains(t)]
        out.append(Square(lo=m.lo, hi=m.hi, members=members))
    out.sort(key=lambda s: s.lo)
    return out


def old_arrows(squares: list[Square], c: float = DEFAULT_C) -> list[Arrow]:
    """All arrows from a square to a strictly heavier one within reach of
    c * (own mass)^3, plus left-to-right arrows between equal masses."""
    arrows = []
    for i, s in enumerate(squares):
        for j, t in enumerate(squares):
            if i == j:
                continue
            if s.mass > t.mass:
                continue
            if s.mass == t.mass and not s.lo < t.lo:
                continue
            if square_dist(s, t) <= c * s.mass ** 3:
                left, right = (s, t) if s.lo < t.lo else (t, s)
                arrows.append(
                    Arrow(source=i, target=j, kind="old",
                          shadow=_shadow_between(left, right))
                )
    return arrows


def new_arrows(squares: list[Square], c: float = DEFAULT_C) -> list[Arrow]:
    """Thin the old arrows: per source and direction keep only the nearest
    target."""
    best: dict[tuple[int, int], Arrow] = {}
    for a in old_arrows(squares, c):
        direction = 1 if squares[a.target].lo > squares[a.source].lo else -1
        key = (a.source, direction)
        cur = best.get(key)
        if cur is None or (
            square_dist(squares[a.source], squares[a.target])
            < square_dist(squares[cur.source], squares[cur.target])
        ):
            best[key] = a
    return [
        Arrow(a.source, a.target, "new", a.shadow)
        for a in sorted(best.values(), key=lambda a: (a.source, a.target))
    ]


def _components(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values(), key=lambda xs: min(xs))


@dataclass(frozen=True)
class StepOutcome:
    """One tick of the coarsening dynamics.

    squares_after are the fused squares; merged_groups[k] lists the indices
    (into the input list) that went into squares_after[k].  primary_squares
    and secondary_squares classify the inputs that took part in a fusion:
    endpoints of maximal-shadow arrows versus squares swallowed inside such
    a shadow.
    """

    squares_after: tuple[Square, ...]
    merged_groups: tuple[tuple[int, ...], ...]
    olds: tuple[Arrow, ...]
    news: tuple[Arrow, ...]
    primary_arrows: tuple[Arrow, ...]
    primary_squares: frozenset[int]
    secondary_squares: frozenset[int]

    @property
    def progressed(self) -> bool:
        return any(len(g) > 1 for g in self.merged_groups)


def step(squares: list[Square], c: float = DEFAULT_C) -> StepOutcome:
    """Fuse every arrow-connected group into its covering square."""
    olds = old_arrows(squares, c)
    news = new_arrows(squares, c)
    comps = _components(len(squares), [(a.source, a.target) for a in olds])
    protos = [
        (min(squares[i].lo for i in comp), max(squares[i].hi for i in comp))
        for comp in comps
    ]
    maximal = []
    for p in protos:
        if protos.count(p) > 1:
            raise InternalConsistencyError("two fusion groups share a hull")
        if not any(q != p and q[0] <= p[0] and p[1] <= q[1] for q in protos):
            maximal.append(p)
    maximal.sort()
    groups: list[tuple[int, ...]] = []
    seen: set[int] = set()
    for lo, hi in maximal:
        idx = tuple(
            i for i, s in enumerate(squares) if lo <= s.lo and s.hi <= hi
        )
        groups.append(idx)
        seen.update(idx)
    if len(seen) != len(squares):
        raise InternalConsistencyError("a square was left outside every hull")

    after = []
    for (lo, hi), idx in zip(maximal, groups):
        members = [t for i in idx for t in squares[i].members]
        after.append(Square(lo=lo, hi=hi, members=members))

    # Maximal-shadow arrows and the squares hidden inside their shadows.
    primary = [
        a
        for a in news
        if not any(
            b is not a and a.shadow != b.shadow and _shadow_inside(a.shadow, b.shadow)
            for b in news
        )
    ]
    primary_idx = frozenset(i for a in primary for i in (a.source, a.target))
    secondary_idx = frozenset(
        i
        for i, s in enumerate(squares)
        if i not in primary_idx
        and any(
            a.shadow[0] <= s.interval2()[0] and s.interval2()[1] <= a.shadow[1]
            for a in primary
        )
    )
    return StepOutcome(
        squares_after=tuple(after),
        merged_groups=tuple(groups),
        olds=tuple(olds),
        news=tuple(news),
        primary_arrows=tuple(primary),
        primary_squares=primary_idx,
        secondary_squares=secondary_idx,
    )


@dataclass(frozen=True)
class SquareProcessTrace:
    """Full history of the coarsening run, including every step's arrows."""

    configs: tuple[tuple[Square, ...], ...]
    steps: tuple[StepOutcome, ...]
    c: float

    @property
    def formation_time(self) -> int:
        return len(self.configs) - 1

    @property
    def final(self) -> Square:
        return self.configs[-1][0]

    def first_seen(self, square: Square) -> int:
        for t, cfg in enumerate(self.configs):
            if square in cfg:
                return t
        raise KeyError("square never appears in this trace")


def run_square_process(
    tris: TriangleConfiguration, c: float = DEFAULT_C
) -> SquareProcessTrace:
    """Run the dynamics until one square remains.

    The input must be a single contour; a state with several squares but no
    arrows would contradict that and raises InternalConsistencyError.
    """
    current = squares_init(tris, c)
    configs = [tuple(current)]
    steps = []
    while len(current) > 1:
        out = step(current, c)
        if len(out.squares_after) >= len(current):
            raise InternalConsistencyError(
                "coarsening stalled with several squares and no arrows; "
                "the input cannot be a single contour"
            )
        steps.append(out)
        current = list(out.squares_after)
        configs.append(tuple(current))
    return SquareProcessTrace(configs=tuple(configs), steps=tuple(steps), c=c)


@dataclass(frozen=True)
class ArrowReport:
    connectivity_match: bool
    shadows_laminar: bool
    primaries_disjoint: bool
    sources_not_heavier: bool

    @property
    def ok(self) -> bool:
        return (
            self.connectivity_match
            and self.shadows_laminar
            and self.primaries_disjoint
            and self.sources_not_heavier
        )


def arrow_lemma_checks(squares: list[Square], c: float = DEFAULT_C) -> ArrowReport:
    """Structural facts the fusion step relies on, checked on one state.

    New arrows must connect exactly what old arrows connect, shadows of new
    arrows must form a laminar family, maximal shadows must be pairwise
    disjoint, and no arrow may point from a heavier square to a lighter one.
    """
    olds = old_arrows(squares, c)
    news = new_arrows(squares, c)
    comp_old = _components(len(squares), [(a.source, a.target) for a in olds])
    comp_new = _components(len(squares), [(a.source, a.target) for a in news])
    connectivity = comp_old == comp_new
    laminar = all(
        _shadows_laminar(a.shadow, b.shadow)
        for i, a in enumerate(news)
        for b in news[i + 1 :]
    )
    primary = [
        a
        for a in news
        if not any(
            b is not a and a.shadow != b.shadow and _shadow_inside(a.shadow, b.shadow)
            for b in news
        )
    ]
    prim_disjoint = all(
        not _shadows_intersect(a.shadow, b.shadow) or a.shadow == b.shadow
        for i, a in enumerate(primary)
        for b in primary[i + 1 :]
    )
    masses_ok = all(
        squares[a.source].mass <= squares[a.target].mass for a in olds + news
    )
    return ArrowReport(
        connectivity_match=connectivity,
        shadows_laminar=laminar,
        primaries_disjoint=prim_disjoint,
        sources_not_heavier=masses_ok,
    )
