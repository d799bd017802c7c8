"""Quantitative bounds: kernel scans, entropy of anchored contours, convexity.

Three independent numerical studies live here.

* walpha_scan compares the boundary energy kernel W(L) against its
  theoretical floor for every L up to some cutoff and reports the minimal
  nearest-neighbour coupling that keeps the floor valid.

* enumerate_G counts every single-contour configuration of a given total
  mass anchored with its left edge at the origin, weights each by
  exp(-b * sum h_alpha(triangle mass)), and compares the total against the
  geometric bound that makes the contour series summable.  The enumeration
  is exhaustive: completeness comes from two necessary separation
  conditions (prefix/suffix gap caps and dead contiguous blocks) proved
  against the partition axioms, soundness from running the full contour
  decomposition at every leaf.  The leaf filter runs in a numba kernel; a
  pure-Python reference enumerator and a raw window scan cross-check it in
  the tests.

* convexity_check brute-forces the splitting inequality
  b h(y) + (b - a) sum_i h(x_i) >= b h(y + sum_i x_i) over a box of integer
  arguments.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from .contours import DEFAULT_C, decompose, verify_c
from .model import ALPHA_PLUS, ModelParams, h_alpha, zeta_alpha
from .triangles import (
    Triangle,
    TriangleConfiguration,
    check_compatibility,
    w_kernel_batch,
)

__all__ = [
    "ALPHA_PLUS",
    "ConvexityReport",
    "EntropyReport",
    "HAlpha",
    "WAlphaReport",
    "convexity_check",
    "convexity_margin",
    "enumerate_G",
    "h_alpha",
    "iter_single_contours",
    "walpha_scan",
    "zeta_alpha",
]

# Abort the entropy enumeration after this many search-tree nodes; anything
# beyond it would run for hours and should be rejected as infeasible.
LEAF_BUDGET = 2_000_000_000


@dataclass(frozen=True)
class HAlpha:
    """Callable form of the mass scale function for a fixed alpha."""

    alpha: float

    def __call__(self, length: int) -> float:
        return h_alpha(length, self.alpha)


# ---------------------------------------------------------------------------
# Kernel scan


@dataclass(frozen=True)
class WAlphaReport:
    alpha: float
    j1: float
    l_max: int
    min_slack: float
    argmin_length: int
    violations: int
    first_violation: int | None
    minimal_j1: float


def walpha_scan(alpha: float, j1: float, l_max: int) -> WAlphaReport:
    """Slack of W(L) over its floor for L = 1..l_max.

    The floor is zeta_alpha * L^alpha for alpha > 0 and 2 ln L + 8 at
    alpha = 0.  minimal_j1 is the smallest nearest-neighbour coupling that
    would keep the slack nonnegative over the scanned range; it uses the
    fact that W depends on j1 only through the additive term 2(j1 - 1).
    """
    params = ModelParams(alpha=alpha, j1=j1)
    w = w_kernel_batch(l_max, params)
    lengths = np.arange(1, l_max + 1, dtype=np.float64)
    if alpha == 0.0:
        floor = 2.0 * np.log(lengths) + 8.0
    else:
        floor = zeta_alpha(alpha) * lengths ** alpha
    slack = w - floor
    idx = int(np.argmin(slack))
    viol = np.flatnonzero(slack < 0.0)
    deficit = floor - (w - 2.0 * (j1 - 1.0))  # what 2(j1 - 1) must cover
    minimal = 1.0 + float(np.max(deficit)) / 2.0
    return WAlphaReport(
        alpha=alpha,
        j1=j1,
        l_max=l_max,
        min_slack=float(slack[idx]),
        argmin_length=idx + 1,
        violations=int(viol.size),
        first_violation=int(viol[0]) + 1 if viol.size else None,
        minimal_j1=minimal,
    )


# ---------------------------------------------------------------------------
# Anchored contour enumeration

class UnitInstance(NamedTuple):
    """A maximal triangle with its nested content, in coordinates relative
    to its own left edge.  width is the basis length of the outer triangle,
    mass the total triangle mass including everything nested."""

    width: int
    mass: int
    tris: tuple[tuple[int, int], ...]


@lru_cache(maxsize=None)
def _unit_instances(mass: int) -> tuple[UnitInstance, ...]:
    out = []
    for outer in range(1, mass + 1):
        inner = mass - outer
        if inner == 0:
            out.append(UnitInstance(outer, mass, ((0, outer - 1),)))
            continue
        if outer < inner + 2:
            continue
        for combo in _nested_arrangements(inner, outer):
            tris = ((0, outer - 1),) + combo
            cfg = TriangleConfiguration(Triangle(lo, hi) for lo, hi in tris)
            if check_compatibility(cfg):
                out.append(UnitInstance(outer, mass, tris))
    return tuple(out)


def _nested_arrangements(
    total: int, outer_width: int
) -> Iterator[tuple[tuple[int, int], ...]]:
    """Ordered sub-unit placements of the given total mass strictly inside
    an outer triangle of the given width.  Pairwise gaps of at least one
    site are enforced here; the full compatibility filter runs afterwards."""

    def rec(remaining: int, min_start: int, placed):
        if remaining == 0:
            yield tuple(placed)
            return
        for sub_mass in range(1, remaining + 1):
            for inst in _unit_instances(sub_mass):
                w = inst.width
                # hull must end at least one site short of the outer edge
                for start in range(min_start, outer_width - w):
                    shifted = [(lo + start, hi + start) for lo, hi in inst.tris]
                    yield from rec(
                        remaining - sub_mass, start + w + 1, placed + shifted
                    )

    yield from rec(total, 1, [])


def _compositions(total: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in _compositions(total - first):
            yield (first,) + rest


def _structures(m: int) -> Iterator[tuple[UnitInstance, ...]]:
    """All ordered sequences of unit instances with total mass m."""
    for comp in _compositions(m):
        pools = [_unit_instances(mu) for mu in comp]
        if any(not p for p in pools):
            continue
        yield from itertools.product(*pools)


def _gap_bounds(units: tuple[UnitInstance, ...], c: float):
    """Per-gap lower bounds (adjacent outer triangles must keep their
    compatibility distance) and upper caps (a larger gap would make the
    prefix/suffix bipartition a valid two-contour split)."""
    k = len(units)
    cum = [0]
    for u in units:
        cum.append(cum[-1] + u.mass)
    total = cum[-1]
    glow = np.empty(max(k - 1, 1), dtype=np.int64)
    gcap = np.empty(max(k - 1, 1), dtype=np.int64)
    for j in range(k - 1):
        glow[j] = min(units[j].width, units[j + 1].width)
        side = min(cum[j + 1], total - cum[j + 1])
        gcap[j] = math.floor(c * side ** 3)
    return glow[: k - 1], gcap[: k - 1]


@njit(cache=True, nogil=True)
def _tri_dist_nb(lo1, hi1, lo2, hi2):
    if hi1 < lo2:
        return lo2 - hi1 - 1
    if hi2 < lo1:
        return lo1 - hi2 - 1
    if lo1 <= lo2 and hi2 <= hi1:
        a = lo2 - lo1
        b = hi1 - hi2
        return a if a < b else b
    if lo2 <= lo1 and hi1 <= hi2:
        a = lo1 - lo2
        b = hi2 - hi1
        return a if a < b else b
    return -1


@njit(cache=True, nogil=True)
def _compatible_nb(lo, hi, n):
    for i in range(n):
        for j in range(i + 1, n):
            d = _tri_dist_nb(lo[i], hi[i], lo[j], hi[j])
            if d < 0:
                return False
            mi = hi[i] - lo[i] + 1
            mj = hi[j] - lo[j] + 1
            mm = mi if mi < mj else mj
            if d < mm:
                return False
    return True


@njit(cache=True, nogil=True)
def _pair_violates_nb(lo, hi, label, n, la, lb, c):
    big = 1 << 60
    lo_a, hi_a, ma = big, -big, 0
    lo_b, hi_b, mb = big, -big, 0
    for i in range(n):
        if label[i] == la:
            if lo[i] < lo_a:
                lo_a = lo[i]
            if hi[i] > hi_a:
                hi_a = hi[i]
            ma += hi[i] - lo[i] + 1
        elif label[i] == lb:
            if lo[i] < lo_b:
                lo_b = lo[i]
            if hi[i] > hi_b:
                hi_b = hi[i]
            mb += hi[i] - lo[i] + 1
    if ma == 0 or mb == 0:
        return False
    d = big
    for i in range(n):
        if label[i] != la:
            continue
        for j in range(n):
            if label[j] != lb:
                continue
            dd = _tri_dist_nb(lo[i], hi[i], lo[j], hi[j])
            if dd < 0:
                return True
            if dd < d:
                d = dd
    if hi_a < lo_b or hi_b < lo_a:
        mm = ma if ma < mb else mb
        return d <= c * mm * mm * mm
    if lo_a <= lo_b and hi_b <= hi_a and not (lo_a == lo_b and hi_a == hi_b):
        in_lo, in_hi, in_m, outer = lo_b, hi_b, mb, la
    elif lo_b <= lo_a and hi_a <= hi_b and not (lo_a == lo_b and hi_a == hi_b):
        in_lo, in_hi, in_m, outer = lo_a, hi_a, ma, lb
    else:
        return True  # partially overlapping or identical spans
    if d <= c * in_m * in_m * in_m:
        return True
    for i in range(n):
        if label[i] != outer:
            continue
        contains = lo[i] <= in_lo and in_hi <= hi[i]
        disjoint = hi[i] < in_lo or in_hi < lo[i]
        if not (contains or disjoint):
            return True
    return False


@njit(cache=True, nogil=True)
def _single_contour_nb(lo, hi, label, n, c):
    for i in range(n):
        label[i] = i
    merged = True
    while merged:
        merged = False
        for la in range(n):
            has_a = False
            for i in range(n):
                if label[i] == la:
                    has_a = True
                    break
            if not has_a:
                continue
            for lb in range(la + 1, n):
                has_b = False
                for i in range(n):
                    if label[i] == lb:
                        has_b = True
                        break
                if not has_b:
                    continue
                if _pair_violates_nb(lo, hi, label, n, la, lb, c):
                    for i in range(n):
                        if label[i] == lb:
                            label[i] = la
                    merged = True
    first = label[0]
    for i in range(1, n):
        if label[i] != first:
            return False
    return True


@njit(cache=True, nogil=True)
def _count_anchored_nb(
    unit_len, unit_mass, tri_ptr, tri_lo, tri_hi, glow, gcap, c, budget, out
):
    """DFS over gap vectors; out[0] accumulates single-contour leaves and
    out[1] the visited node count.  Returns 1 when the budget ran out."""
    k = unit_len.shape[0]
    n_tri = tri_lo.shape[0]
    lo_buf = np.empty(n_tri, np.int64)
    hi_buf = np.empty(n_tri, np.int64)
    label = np.empty(n_tri, np.int64)
    cum = np.zeros(k + 1, np.int64)
    for i in range(k):
        cum[i + 1] = cum[i] + unit_mass[i]
    start = np.zeros(k, np.int64)

    if k == 1:
        for t in range(n_tri):
            lo_buf[t] = tri_lo[t]
            hi_buf[t] = tri_hi[t]
        out[1] += 1
        if _compatible_nb(lo_buf, hi_buf, n_tri) and _single_contour_nb(
            lo_buf, hi_buf, label, n_tri, c
        ):
            out[0] += 1
        return 0

    g = np.empty(k - 1, np.int64)
    level = 0
    g[0] = glow[0] - 1
    while level >= 0:
        g[level] += 1
        if g[level] > gcap[level]:
            level -= 1
            continue
        out[1] += 1
        if out[1] > budget:
            return 1
        # A contiguous run of units with both flanking gaps beyond the cube
        # of its mass can never rejoin the rest; larger gaps stay dead, so
        # pop rather than advance.
        dead = False
        for i in range(1, level + 1):
            bm = cum[level + 1] - cum[i]
            thr = c * bm * bm * bm
            if g[i - 1] > thr and g[level] > thr:
                dead = True
                break
        if dead:
            level -= 1
            continue
        if level < k - 2:
            level += 1
            g[level] = glow[level] - 1
            continue
        # leaf: place the units and run the full filters
        start[0] = 0
        for j in range(k - 1):
            start[j + 1] = start[j] + unit_len[j] + g[j]
        idx = 0
        for u in range(k):
            for t in range(tri_ptr[u], tri_ptr[u + 1]):
                lo_buf[idx] = tri_lo[t] + start[u]
                hi_buf[idx] = tri_hi[t] + start[u]
                idx += 1
        if _compatible_nb(lo_buf, hi_buf, n_tri) and _single_contour_nb(
            lo_buf, hi_buf, label, n_tri, c
        ):
            out[0] += 1
    return 0


def _structure_arrays(units: tuple[UnitInstance, ...], c: float):
    unit_len = np.array([u.width for u in units], dtype=np.int64)
    unit_mass = np.array([u.mass for u in units], dtype=np.int64)
    tri_ptr = np.zeros(len(units) + 1, dtype=np.int64)
    lows, highs = [], []
    for i, u in enumerate(units):
        for lo, hi in u.tris:
            lows.append(lo)
            highs.append(hi)
        tri_ptr[i + 1] = len(lows)
    glow, gcap = _gap_bounds(units, c)
    return (
        unit_len,
        unit_mass,
        tri_ptr,
        np.array(lows, dtype=np.int64),
        np.array(highs, dtype=np.int64),
        glow,
        gcap,
    )


def _structure_key(units: tuple[UnitInstance, ...]) -> tuple[tuple[int, ...], int]:
    masses = sorted(hi - lo + 1 for u in units for lo, hi in u.tris)
    return (tuple(masses), len(units))


_COUNT_CACHE: dict = {}


def _anchored_counts(m: int, c: float, threads: int = 1):
    """Exact count of anchored single contours of mass m, grouped by the
    multiset of triangle masses and the number of top-level units."""
    key = (m, float(c))
    if key in _COUNT_CACHE:
        return _COUNT_CACHE[key]
    tasks = [(units, _structure_arrays(units, c)) for units in _structures(m)]

    def run(task):
        units, arrays = task
        out = np.zeros(2, dtype=np.int64)
        status = _count_anchored_nb(*arrays, float(c), LEAF_BUDGET, out)
        return units, int(out[0]), int(out[1]), status

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    visited = sum(r[2] for r in results)
    if any(r[3] != 0 for r in results) or visited > LEAF_BUDGET:
        raise ValueError(
            f"enumeration for mass {m} at c={c} exceeds the node budget "
            f"({LEAF_BUDGET}); this mass is infeasible to count exactly"
        )
    grouped: dict = {}
    for units, count, _, _ in results:
        if count:
            gk = _structure_key(units)
            grouped[gk] = grouped.get(gk, 0) + count
    out = tuple(sorted((k[0], k[1], v) for k, v in grouped.items()))
    _COUNT_CACHE[key] = out
    return out


def iter_single_contours(
    m: int, c: float = DEFAULT_C
) -> Iterator[TriangleConfiguration]:
    """Pure-Python reference enumeration of anchored single contours.

    Yields every compatible configuration of total mass m whose left edge
    is at site 0 and whose contour decomposition at scale c is a single
    contour.  Intended for small m; the numba counting path must agree."""
    for units in _structures(m):
        k = len(units)
        glow, gcap = _gap_bounds(units, c)
        cum = [0]
        for u in units:
            cum.append(cum[-1] + u.mass)

        def leaves(level: int, gaps: list[int]) -> Iterator[tuple[int, ...]]:
            if level == k - 1:
                yield tuple(gaps)
                return
            for g in range(int(glow[level]), int(gcap[level]) + 1):
                dead = False
                for i in range(1, level + 1):
                    bm = cum[level + 1] - cum[i]
                    thr = c * bm ** 3
                    if gaps[i - 1] > thr and g > thr:
                        dead = True
                        break
                if dead:
                    break
                gaps.append(g)
                yield from leaves(level + 1, gaps)
                gaps.pop()

        for gaps in leaves(0, []):
            starts = [0]
            for j in range(k - 1):
                starts.append(starts[-1] + units[j].width + gaps[j])
            tris = [
                Triangle(lo + starts[i], hi + starts[i])
                for i, u in enumerate(units)
                for lo, hi in u.tris
            ]
            cfg = TriangleConfiguration(tris)
            if not check_compatibility(cfg):
                continue
            if len(decompose(cfg, c)) == 1:
                yield cfg


@dataclass(frozen=True)
class EntropyReport:
    """Weighted count of anchored mass-m contours against its bound.

    g_white collects configurations with a single top-level unit (their
    tree root is white), g_black the rest.
    """

    m: int
    alpha: float
    b: float
    c: float
    g_total: float
    g_white: float
    g_black: float
    bound: float
    configurations: int

    @property
    def ok(self) -> bool:
        return self.g_total <= self.bound


def enumerate_G(
    m: int, c: float, b: float, alpha: float, threads: int = 1
) -> EntropyReport:
    """Exhaustively enumerate anchored single contours of mass m and weight
    them by exp(-b * sum h_alpha(|T|)).

    The bound column is 2 exp(-b m^alpha) for alpha > 0 and
    2 m exp(-b (ln m + 4)) at alpha = 0.  Counting is exact and cached per
    (m, c); changing b or alpha reuses the cache.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"mass must be a positive integer, got {m!r}")
    if m > 10:
        raise ValueError(f"mass {m} is infeasible for exhaustive enumeration")
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    sep = verify_c(c)
    if not sep.ok:
        raise ValueError(f"separation series at c={c} sums to {sep.total:.4f} >= 1/2")
    counts = _anchored_counts(m, float(c), threads=threads)
    g_white = 0.0
    g_black = 0.0
    n_configs = 0
    for masses, k_top, count in counts:
        weight = math.exp(-b * sum(h_alpha(mm, alpha) for mm in masses))
        if k_top == 1:
            g_white += count * weight
        else:
            g_black += count * weight
        n_configs += count
    if alpha == 0.0:
        bound = 2.0 * m * math.exp(-b * (math.log(m) + 4.0))
    else:
        bound = 2.0 * math.exp(-b * m ** alpha)
    return EntropyReport(
        m=m,
        alpha=alpha,
        b=b,
        c=float(c),
        g_total=g_white + g_black,
        g_white=g_white,
        g_black=g_black,
        bound=bound,
        configurations=n_configs,
    )


# ---------------------------------------------------------------------------
# Convexity brute force


@dataclass(frozen=True)
class ConvexityReport:
    alpha: float
    a: float
    b: float
    n_max: int
    x_max: int
    min_margin: float
    argmin: tuple[int, ...]  # (y, x_1, .., x_{n-1}) at the minimal margin
    violations: int


def convexity_margin(
    alpha: float, a: float, b: float, xs: tuple[int, ...], y: int
) -> float:
    """b h(y) + (b - a) sum h(x_i) - b h(y + sum x_i) for one argument tuple."""
    total = y + sum(xs)
    return (
        b * h_alpha(y, alpha)
        + (b - a) * sum(h_alpha(x, alpha) for x in xs)
        - b * h_alpha(total, alpha)
    )


def convexity_check(
    alpha: float, a: float, b: float, n_max: int = 4, x_max: int = 200
) -> ConvexityReport:
    """Brute-force the splitting inequality over 1 <= x_i <= y <= x_max for
    every piece count n in 2..n_max (n - 1 free x variables).

    Requires 0 < a < b, and at alpha = 0 additionally 1 < b/(b-a) < 2,
    outside of which the inequality has no chance at large arguments.
    """
    if not 0.0 < a < b:
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    if alpha == 0.0:
        p = b / (b - a)
        if not 1.0 < p < 2.0:
            raise ValueError(
                f"alpha = 0 needs 1 < b/(b-a) < 2, got b/(b-a) = {p:.6f}"
            )
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    if x_max < 1:
        raise ValueError(f"x_max must be at least 1, got {x_max}")
    hmax = n_max * x_max
    h = np.empty(hmax + 1, dtype=np.float64)
    h[0] = np.nan
    if alpha == 0.0:
        h[1:] = np.log(np.arange(1, hmax + 1, dtype=np.float64)) + 4.0
    else:
        h[1:] = np.arange(1, hmax + 1, dtype=np.float64) ** alpha

    best = math.inf
    best_arg: tuple[int, ...] = ()
    violations = 0

    def scan(y: int, k: int) -> None:
        """All k-tuples of x values in 1..y, peeling one variable at a time."""
        nonlocal best, best_arg, violations
        base_h = b * h[y]
        xs = np.arange(1, y + 1)
        sum_h = (b - a) * h[1 : y + 1]
        sum_x = xs.copy()
        for _ in range(k - 1):
            sum_h = (sum_h[:, None] + (b - a) * h[1 : y + 1][None, :]).reshape(-1)
            sum_x = (sum_x[:, None] + xs[None, :]).reshape(-1)
        margin = base_h + sum_h - b * h[y + sum_x]
        violations += int(np.count_nonzero(margin < -1e-9))
        i = int(np.argmin(margin))
        if margin[i] < best:
            best = float(margin[i])
            # unravel i into the k x-values (row-major, last variable fastest)
            arg = []
            rem = i
            for _ in range(k):
                arg.append(rem % y + 1)
                rem //= y
            best_arg = (y, *reversed(arg))

    for n in range(2, n_max + 1):
        k = n - 1
        for y in range(1, x_max + 1):
            if k <= 2:
                scan(y, k)
            else:
                # peel the extra variables in python to bound memory
                for extra in itertools.product(range(1, y + 1), repeat=k - 2):
                    extra_h = (b - a) * sum(h[x] for x in extra)
                    extra_x = sum(extra)
                    xs = np.arange(1, y + 1)
                    grid_h = (b - a) * (h[1 : y + 1][:, None] + h[1 : y + 1][None, :])
                    grid_x = xs[:, None] + xs[None, :]
                    margin = (
                        b * h[y]
                        + extra_h
                        + grid_h
                        - b * h[y + extra_x + grid_x]
                    )
                    violations += int(np.count_nonzero(margin < -1e-9))
                    i = int(np.argmin(margin))
                    mn = float(margin.flat[i])
                    if mn < best:
                        ii, jj = np.unravel_index(i, margin.shape)
                        best = mn
                        best_arg = (y, *extra, int(ii) + 1, int(jj) + 1)

    return ConvexityReport(
        alpha=alpha,
        a=a,
        b=b,
        n_max=n_max,
        x_max=x_max,
        min_margin=best,
        argmin=best_arg,
        violations=violations,
    )
