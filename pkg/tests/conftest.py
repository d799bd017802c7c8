"""Shared generators for the exhaustive and randomized test families."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from trigas.model import ModelParams, SpinConfiguration
from trigas.triangles import Triangle, TriangleConfiguration, build_triangles


def all_spin_configs(width: int, lo: int = 0):
    """Every spin configuration on the window [lo, lo + width - 1]."""
    window = (lo, lo + width - 1)
    for bits in range(1 << width):
        values = tuple(-1 if (bits >> i) & 1 else 1 for i in range(width))
        yield SpinConfiguration(window=window, values=values)


def compatible_families(width: int, max_triangles: int, lo: int = 0):
    """Triangle families of every spin configuration on a width-site window
    that produce at most max_triangles triangles, skipping the empty one."""
    for sigma in all_spin_configs(width, lo):
        tris = build_triangles(sigma)
        if 1 <= len(tris.triangles) <= max_triangles:
            yield tris


def random_compatible_family(
    rng: random.Random, width: int = 40, p_minus: float = 0.3
) -> TriangleConfiguration:
    """Triangle family of a random spin configuration; may be empty."""
    values = tuple(-1 if rng.random() < p_minus else 1 for _ in range(width))
    sigma = SpinConfiguration(window=(0, width - 1), values=values)
    return build_triangles(sigma)


def spin_values(min_size: int = 1, max_size: int = 18):
    return st.lists(
        st.sampled_from((-1, 1)), min_size=min_size, max_size=max_size
    ).map(tuple)


def spin_configs(min_size: int = 1, max_size: int = 18):
    return st.builds(
        lambda vals, lo: SpinConfiguration(
            window=(lo, lo + len(vals) - 1), values=vals
        ),
        spin_values(min_size, max_size),
        st.integers(min_value=-30, max_value=30),
    )


def small_params():
    return st.builds(
        ModelParams,
        alpha=st.sampled_from((0.0, 0.25, 0.5)),
        j1=st.sampled_from((1.0, 2.5, 10.0)),
    )


def naive_triangle_distance(t1: Triangle, t2: Triangle) -> int | None:
    """Distance by literal counting: number of sites strictly between for
    disjoint bases, smaller edge margin for nested ones, None for partial
    overlap.  Used as an oracle for tri_dist."""
    a, b = sorted((t1, t2), key=lambda t: (t.lo, -t.hi))
    if a.hi < b.lo:
        return b.lo - a.hi - 1
    if b.hi <= a.hi:
        return min(b.lo - a.lo, a.hi - b.hi)
    return None
