"""Interface triangles of a finite-energy spin configuration.

A spin flip relative to the all-plus state creates walls at half-integer
positions.  Pairing walls two at a time, always closing the smallest gap
first (leftmost on ties), turns a configuration with 2k walls into k
triangles.  A triangle is stored by the integer endpoints [lo, hi] of its
basis, the sites it covers; its wall coordinates are lo - 1/2 and hi + 1/2.

The map is a bijection: spins determine triangles through the pairing rule,
and triangles determine spins because a site is minus exactly when an odd
number of triangle bases cover it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .model import (
    ExactEnergy,
    ModelParams,
    SpinConfiguration,
    power_tail,
    relative_energy,
    relative_energy_exact,
)


@dataclass(frozen=True, order=True)
class Triangle:
    """Basis interval [lo, hi] of lattice sites, lo <= hi."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"triangle needs lo <= hi, got [{self.lo}, {self.hi}]")

    @property
    def mass(self) -> int:
        return self.hi - self.lo + 1

    @property
    def left(self) -> float:
        """Left wall coordinate lo - 1/2."""
        return self.lo - 0.5

    @property
    def right(self) -> float:
        """Right wall coordinate hi + 1/2."""
        return self.hi + 0.5

    @property
    def basis_sites(self) -> tuple[int, ...]:
        return tuple(range(self.lo, self.hi + 1))

    def covers(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, other: "Triangle") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class InterfaceList:
    """Ascending half-integer wall positions; always evenly many."""

    positions: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.positions) % 2 != 0:
            raise ValueError("wall positions must come in pairs")
        for p in self.positions:
            if (2.0 * p) % 2.0 != 1.0:
                raise ValueError(f"wall positions must be half-integers, got {p}")
        if any(a >= b for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("wall positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self) -> Iterator[float]:
        return iter(self.positions)


@dataclass(frozen=True)
class TriangleConfiguration:
    """A finite collection of triangles, kept sorted by basis."""

    triangles: tuple[Triangle, ...]

    def __init__(self, triangles: Iterable[Triangle] = ()):
        tris = tuple(sorted(triangles, key=lambda t: (t.lo, t.hi)))
        for t in tris:
            if not isinstance(t, Triangle):
                raise TypeError(f"expected Triangle, got {type(t).__name__}")
        object.__setattr__(self, "triangles", tris)

    def __len__(self) -> int:
        return len(self.triangles)

    def __iter__(self) -> Iterator[Triangle]:
        return iter(self.triangles)

    def __contains__(self, t: Triangle) -> bool:
        return t in self.triangles

    @property
    def span(self) -> tuple[int, int] | None:
        """Smallest site interval containing every basis, None when empty."""
        if not self.triangles:
            return None
        return (
            min(t.lo for t in self.triangles),
            max(t.hi for t in self.triangles),
        )

    @property
    def total_mass(self) -> int:
        return sum(t.mass for t in self.triangles)

    @property
    def masses(self) -> tuple[int, ...]:
        return tuple(t.mass for t in self.triangles)


def interface_points(sigma: SpinConfiguration) -> InterfaceList:
    """Half-integer positions where sigma changes sign (plus boundary outside)."""
    a, b = sigma.window
    pts = []
    for x in range(a - 1, b + 1):
        if sigma.spin(x) != sigma.spin(x + 1):
            pts.append(x + 0.5)
    return InterfaceList(tuple(pts))


def build_triangles(sigma: SpinConfiguration) -> TriangleConfiguration:
    """Pair up the walls of sigma into triangles.

    Repeatedly find the smallest gap between adjacent surviving walls
    (leftmost wins ties), pair those two walls into a triangle, remove them,
    and continue.  The triangle's basis runs over the sites strictly between
    its two walls.
    """
    # Work with integer wall codes: the wall at x + 1/2 is coded as x.
    codes = [int(p - 0.5) for p in interface_points(sigma)]
    out = []
    while codes:
        best = 0
        best_gap = codes[1] - codes[0]
        for i in range(1, len(codes) - 1):
            gap = codes[i + 1] - codes[i]
            if gap < best_gap:
                best, best_gap = i, gap
        left, right = codes[best], codes[best + 1]
        out.append(Triangle(lo=left + 1, hi=right))
        del codes[best : best + 2]
    return TriangleConfiguration(out)


def spins_from_triangles(
    tris: TriangleConfiguration, window: tuple[int, int]
) -> SpinConfiguration:
    """Invert the triangle map: minus exactly under an odd number of bases.

    Every triangle must fit inside the window; otherwise the result could
    not reproduce the triangles and a ValueError is raised.
    """
    a, b = window
    if a > b:
        raise ValueError(f"window must satisfy a <= b, got {window}")
    for t in tris:
        if t.lo < a or t.hi > b:
            raise ValueError(
                f"triangle [{t.lo}, {t.hi}] does not fit in window [{a}, {b}]"
            )
    counts = [0] * (b - a + 1)
    for t in tris:
        for x in range(t.lo, t.hi + 1):
            counts[x - a] += 1
    values = tuple(1 if c % 2 == 0 else -1 for c in counts)
    return SpinConfiguration(window=window, values=values)


def tri_dist(t1: Triangle, t2: Triangle) -> int:
    """Distance between two laminar triangles.

    Disjoint bases: the number of sites strictly between them.  Nested
    bases: the smaller margin between the inner and outer endpoints.
    Partially overlapping bases are outside the geometry this package
    works with and raise ValueError.
    """
    if t1.hi < t2.lo:
        return t2.lo - t1.hi - 1
    if t2.hi < t1.lo:
        return t1.lo - t2.hi - 1
    if t1.contains(t2):
        return min(t2.lo - t1.lo, t1.hi - t2.hi)
    if t2.contains(t1):
        return min(t1.lo - t2.lo, t2.hi - t1.hi)
    raise ValueError(
        f"triangles [{t1.lo}, {t1.hi}] and [{t2.lo}, {t2.hi}] partially overlap"
    )


def check_compatibility(tris: TriangleConfiguration) -> bool:
    """True iff every pair is laminar and at distance >= the smaller mass."""
    ts = tris.triangles
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            a, b = ts[i], ts[j]
            if a.hi >= b.lo and b.hi >= a.lo:  # bases intersect
                if not (a.contains(b) or b.contains(a)):
                    return False
            if tri_dist(a, b) < min(a.mass, b.mass):
                return False
    return True


def w_kernel(length: int, params: ModelParams) -> float:
    """Boundary energy kernel W(L).

    Twice the energy a minus block of L sites exchanges with the L sites to
    its right minus what it exchanges with everything beyond them, plus the
    2(j1 - 1) correction from the two distance-1 bonds at the block edges.
    This is a lower bound for the conditional energy of any triangle of mass
    L inserted into a compatible configuration.
    """
    return float(w_kernel_batch(length, params)[length - 1])


def w_kernel_batch(max_length: int, params: ModelParams) -> np.ndarray:
    """W(L) for every L = 1..max_length in one prefix-sum pass.

    With P(k) the partial sum of n^-s up to k and C(k) the partial sum of P,
    the double sums in W collapse to
        W(L) = 4 C(2L-1) - 6 C(L-1) - 2 L zeta(s) + 2 (j1 - 1),
    which needs one cumulative-sum array of length 2*max_length.
    """
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    s = params.decay
    n = np.arange(1, 2 * max_length, dtype=np.float64)
    partial = np.cumsum(n ** (-s))
    big = np.concatenate(([0.0], np.cumsum(partial)))  # big[k] = C(k)
    zeta_s = 1.0 + power_tail(2, s)
    lengths = np.arange(1, max_length + 1, dtype=np.int64)
    return (
        4.0 * big[2 * lengths - 1]
        - 6.0 * big[lengths - 1]
        - 2.0 * lengths * zeta_s
        + 2.0 * (params.j1 - 1.0)
    )


def conditional_energy(
    added: TriangleConfiguration,
    context: TriangleConfiguration,
    params: ModelParams,
    exact: bool = False,
):
    """Energy cost of inserting `added` on top of `context`.

    Defined as the relative energy of the union minus that of the context
    alone.  The two sets must be disjoint and their union compatible.  With
    exact=True (alpha = 0 only) returns an ExactEnergy.
    """
    added_set = set(added.triangles)
    if added_set & set(context.triangles):
        raise ValueError("added and context triangles must be disjoint sets")
    union = TriangleConfiguration(added.triangles + context.triangles)
    if not check_compatibility(union):
        raise ValueError("union of added and context is not compatible")
    if not union.triangles:
        return ExactEnergy.zero() if exact else 0.0
    window = union.span
    assert window is not None
    full = spins_from_triangles(union, window)
    rest = spins_from_triangles(context, window)
    if exact:
        return relative_energy_exact(full, params) - relative_energy_exact(rest, params)
    return relative_energy(full, params) - relative_energy(rest, params)
