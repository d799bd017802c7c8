"""Kernel floor scans, anchored contour entropy, and the splitting inequality."""

import itertools
import math

import pytest

from trigas.bounds import (
    EntropyReport,
    HAlpha,
    convexity_check,
    convexity_margin,
    enumerate_G,
    iter_single_contours,
    walpha_scan,
)
from trigas.contours import decompose
from trigas.triangles import Triangle, TriangleConfiguration, check_compatibility


class TestHAlpha:
    def test_callable_matches_function(self):
        h = HAlpha(0.5)
        assert h(4) == 2.0
        assert HAlpha(0.0)(1) == 4.0


class TestWAlphaScan:
    def test_high_coupling_is_clean_alpha_half(self):
        report = walpha_scan(0.5, 10.0, 2000)
        assert report.violations == 0
        assert report.first_violation is None
        # the tightest point sits at length 1 where the floor is largest
        # relative to the kernel
        assert report.argmin_length == 1
        assert report.min_slack == pytest.approx(16.603676427375213, rel=1e-9)

    def test_high_coupling_is_clean_alpha_zero(self):
        report = walpha_scan(0.0, 10.0, 2000)
        assert report.violations == 0
        assert report.min_slack > 0.0

    def test_minimal_j1_alpha_half(self):
        report = walpha_scan(0.5, 10.0, 2000)
        assert report.minimal_j1 == pytest.approx(1.6981617863123943, rel=1e-9)
        # already converged in l_max at this scale
        wider = walpha_scan(0.5, 10.0, 5000)
        assert wider.minimal_j1 == pytest.approx(report.minimal_j1, abs=1e-9)

    def test_minimal_j1_alpha_zero(self):
        report = walpha_scan(0.0, 10.0, 10000)
        assert report.minimal_j1 == pytest.approx(4.80907869, abs=1e-6)

    def test_minimal_j1_does_not_depend_on_scanned_j1(self):
        a = walpha_scan(0.5, 10.0, 500).minimal_j1
        b = walpha_scan(0.5, 2.0, 500).minimal_j1
        assert a == pytest.approx(b, abs=1e-12)

    def test_scan_at_minimal_coupling_is_marginal(self):
        minimal = walpha_scan(0.0, 10.0, 5000).minimal_j1
        at = walpha_scan(0.0, minimal + 1e-9, 5000)
        assert at.violations == 0
        assert 0.0 <= at.min_slack < 1e-6
        below = walpha_scan(0.0, minimal - 0.01, 5000)
        assert below.violations > 0

    def test_weak_coupling_violates(self):
        report = walpha_scan(0.5, 1.0, 2000)
        assert report.violations == 5
        assert report.first_violation == 1
        assert report.min_slack < 0.0

    def test_slack_shifts_linearly_in_j1(self):
        lo = walpha_scan(0.5, 1.0, 50)
        hi = walpha_scan(0.5, 4.0, 50)
        assert hi.min_slack - lo.min_slack == pytest.approx(6.0, abs=1e-9)


def _raw_window_count(m: int, c: float, width: int = 60) -> int:
    """Count anchored single contours of mass m with no structural shortcuts.

    Every set of triangles inside a fixed window is generated directly from
    mass partitions and filtered through compatibility and the contour
    decomposition, so agreement with enumerate_G checks soundness and
    completeness of its unit/gap search at once.
    """
    tris_by_mass = {
        mass: [Triangle(lo, lo + mass - 1) for lo in range(width - mass + 1)]
        for mass in range(1, m + 1)
    }

    def partitions(n, cap):
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in partitions(n - first, first):
                yield (first,) + rest

    total = 0
    for part in partitions(m, m):
        seen = set()
        for combo in itertools.product(*(tris_by_mass[mass] for mass in part)):
            key = frozenset((t.lo, t.hi) for t in combo)
            if len(key) < len(combo) or key in seen:
                continue
            seen.add(key)
            if min(t.lo for t in combo) != 0:
                continue
            cfg = TriangleConfiguration(sorted(combo, key=lambda t: (t.lo, -t.hi)))
            if not check_compatibility(cfg):
                continue
            if len(decompose(cfg, c)) == 1:
                total += 1
    return total


class TestSingleContourEnumeration:
    def test_mass_one_is_unique(self):
        configs = list(iter_single_contours(1))
        assert len(configs) == 1
        assert list(configs[0]) == [Triangle(0, 0)]

    @pytest.mark.parametrize("m,expected", [(1, 1), (2, 16), (3, 256)])
    def test_small_mass_counts(self, m, expected):
        assert sum(1 for _ in iter_single_contours(m, 15.0)) == expected

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_counts_match_raw_window_scan(self, m):
        assert _raw_window_count(m, 15.0) == sum(
            1 for _ in iter_single_contours(m, 15.0)
        )

    def test_every_yield_is_an_anchored_single_contour(self):
        for cfg in iter_single_contours(3, 15.0):
            assert min(t.lo for t in cfg) == 0
            assert check_compatibility(cfg)
            assert len(decompose(cfg, 15.0)) == 1

    def test_no_duplicates(self):
        seen = set()
        for cfg in iter_single_contours(3, 15.0):
            key = frozenset((t.lo, t.hi) for t in cfg)
            assert key not in seen
            seen.add(key)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_reference_agrees_with_counting_kernel(self, m):
        report = enumerate_G(m, 15.0, 8.0, 0.5)
        assert report.configurations == sum(1 for _ in iter_single_contours(m, 15.0))

    def test_gap_grid_tightens_with_c(self):
        # fewer allowed gaps between two unit triangles at a smaller scale
        assert sum(1 for _ in iter_single_contours(2, 13.5)) == 14


class TestEnumerateG:
    def test_mass_one_closed_form(self):
        report = enumerate_G(1, 15.0, 8.0, 0.5)
        assert report.g_total == math.exp(-8.0)
        assert report.g_white == report.g_total
        assert report.g_black == 0.0
        assert report.configurations == 1

    @pytest.mark.parametrize("c,gaps", [(15.0, 15), (13.5, 13)])
    @pytest.mark.parametrize("alpha", [0.0, 0.5])
    def test_mass_two_closed_form(self, c, gaps, alpha):
        b = 8.0
        report = enumerate_G(2, c, b, alpha)
        h1 = HAlpha(alpha)(1)
        h2 = HAlpha(alpha)(2)
        assert report.g_white == math.exp(-b * h2)
        assert report.g_black == pytest.approx(
            gaps * math.exp(-2 * b * h1), rel=1e-15
        )
        assert report.configurations == gaps + 1

    def test_mass_three_configuration_count(self):
        # 1 solo, 15 split 2+1, 15 split 1+2, 15^2 split 1+1+1
        assert enumerate_G(3, 15.0, 8.0, 0.5).configurations == 256

    def test_mass_four_count_regression(self):
        assert enumerate_G(4, 15.0, 8.0, 0.5).configurations == 30976

    def test_white_and_black_split_the_total(self):
        report = enumerate_G(4, 15.0, 8.0, 0.5)
        assert report.g_total == pytest.approx(
            report.g_white + report.g_black, rel=1e-15
        )

    @pytest.mark.parametrize("alpha", [0.0, 0.5])
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_bound_holds_at_b_eight(self, alpha, m):
        assert enumerate_G(m, 15.0, 8.0, alpha).ok

    def test_bound_formula(self):
        rep = enumerate_G(2, 15.0, 8.0, 0.5)
        assert rep.bound == 2.0 * math.exp(-8.0 * 2 ** 0.5)
        rep0 = enumerate_G(2, 15.0, 8.0, 0.0)
        assert rep0.bound == 4.0 * math.exp(-8.0 * (math.log(2) + 4.0))

    def test_threads_do_not_change_the_answer(self):
        single = enumerate_G(4, 15.0, 8.0, 0.5, threads=1)
        multi = enumerate_G(4, 15.0, 8.0, 0.5, threads=4)
        assert single.configurations == multi.configurations
        assert single.g_total == pytest.approx(multi.g_total, rel=1e-12)

    def test_report_ok_property(self):
        report = EntropyReport(
            m=1, alpha=0.5, b=1.0, c=15.0,
            g_total=0.3, g_white=0.3, g_black=0.0,
            bound=0.2, configurations=1,
        )
        assert not report.ok

    def test_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            enumerate_G(0, 15.0, 8.0, 0.5)
        with pytest.raises(ValueError):
            enumerate_G(11, 15.0, 8.0, 0.5)

    def test_rejects_unverified_scale(self):
        with pytest.raises(ValueError, match="separation series"):
            enumerate_G(2, 8.0, 8.0, 0.5)

    def test_rejects_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            enumerate_G(2, 15.0, 8.0, 0.6)


A_STAR = 10.0 * (2.0 - math.sqrt(2.0))


class TestConvexity:
    def test_margin_spot_value(self):
        got = convexity_margin(0.5, 1.0, 10.0, (2, 3), 4)
        want = 10.0 * 2.0 + 9.0 * (2 ** 0.5 + 3 ** 0.5) - 10.0 * 3.0
        assert got == pytest.approx(want, rel=1e-15)

    def test_interior_coefficients_are_clean(self):
        report = convexity_check(0.5, 1.0, 10.0, n_max=4, x_max=60)
        assert report.violations == 0
        assert report.argmin == (1, 1)
        # minimum at y = x = 1: 2b - a - b sqrt(2)
        assert report.min_margin == pytest.approx(
            20.0 - 1.0 - 10.0 * math.sqrt(2.0), rel=1e-12
        )

    def test_alpha_zero_is_clean(self):
        report = convexity_check(0.0, 1.0, 10.0, n_max=3, x_max=80)
        assert report.violations == 0
        assert report.argmin == (1, 1)
        assert report.min_margin > 0.0

    def test_boundary_ratio_is_tight(self):
        # at a = b (2 - sqrt 2) the two-piece margin vanishes on the whole
        # diagonal x = y, so the scan touches zero without crossing it
        assert convexity_margin(0.5, A_STAR, 10.0, (1,), 1) == pytest.approx(
            0.0, abs=1e-9
        )
        report = convexity_check(0.5, A_STAR, 10.0, n_max=4, x_max=60)
        assert report.violations == 0
        assert abs(report.min_margin) <= 1e-9
        assert len(report.argmin) == 2
        assert report.argmin[0] == report.argmin[1]

    def test_past_the_boundary_violates(self):
        report = convexity_check(0.5, A_STAR + 0.05, 10.0, n_max=2, x_max=30)
        assert report.violations > 0
        # worst diagonal point: sqrt(30) times the coefficient deficit
        assert report.min_margin == pytest.approx(
            -0.05 * math.sqrt(30.0), rel=1e-9
        )
        assert report.argmin == (30, 30)

    def test_three_piece_scan_agrees_with_direct_margin(self):
        report = convexity_check(0.5, 1.0, 10.0, n_max=3, x_max=12)
        direct = min(
            convexity_margin(0.5, 1.0, 10.0, xs, y)
            for n in (2, 3)
            for y in range(1, 13)
            for xs in itertools.product(range(1, y + 1), repeat=n - 1)
        )
        assert report.min_margin == pytest.approx(direct, rel=1e-12)

    def test_rejects_bad_coefficients(self):
        with pytest.raises(ValueError):
            convexity_check(0.5, 10.0, 10.0)
        with pytest.raises(ValueError):
            convexity_check(0.5, 0.0, 10.0)
        with pytest.raises(ValueError):
            convexity_check(0.5, 11.0, 10.0)

    def test_alpha_zero_needs_subcritical_ratio(self):
        # b/(b-a) must stay below 2: a = 5, b = 10 sits exactly on the edge
        with pytest.raises(ValueError, match="b/\\(b-a\\)"):
            convexity_check(0.0, 5.0, 10.0)
        with pytest.raises(ValueError):
            convexity_check(0.0, 6.0, 10.0)

    def test_rejects_degenerate_grid(self):
        with pytest.raises(ValueError):
            convexity_check(0.5, 1.0, 10.0, n_max=1)
        with pytest.raises(ValueError):
            convexity_check(0.5, 1.0, 10.0, x_max=0)
