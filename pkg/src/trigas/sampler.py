"""Metropolis dynamics on a finite window with all-plus surroundings.

Single-spin-flip Metropolis for the long-range chain: the window interacts
with itself through the coupling table and with the frozen plus exterior
through closed-form tail sums, so the stationary law is the finite-volume
Gibbs measure conditioned on plus outside the window.  The flip loop runs
in a numba kernel fed with pregenerated random streams, which makes runs
bit-reproducible for a fixed seed.

Also here: the exact Boltzmann law for tiny windows (the sampler's test
oracle), an estimator for the event that some contour covers the origin,
and the truncated series bound that certifies when that event has
probability below one half.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .contours import DEFAULT_C, decompose
from .model import (
    ModelParams,
    SpinConfiguration,
    coupling,
    exterior_coupling_sum,
    power_tail,
    relative_energy,
)
from .triangles import build_triangles

_CHUNK_ATTEMPTS = 4_000_000
_EVENT_CACHE_LIMIT = 65_536


@dataclass(frozen=True)
class SamplerConfig:
    """Run description: window of this many sites roughly centred at the
    origin, inverse temperature beta, model couplings, sweep counts and
    seeding.  One sweep is window_size flip attempts at random sites."""

    window_size: int
    beta: float
    params: ModelParams
    sweeps: int
    burn_in: int = 0
    seed: int = 0
    chains: int = 1

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if not self.burn_in >= 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if not self.sweeps > self.burn_in:
            raise ValueError(
                f"sweeps ({self.sweeps}) must exceed burn_in ({self.burn_in})"
            )
        if self.chains < 1:
            raise ValueError(f"chains must be >= 1, got {self.chains}")

    @property
    def window(self) -> tuple[int, int]:
        lo = -(self.window_size // 2)
        return (lo, lo + self.window_size - 1)


@njit(cache=True)
def _mc_chain_nb(values, kcol, ext, beta, sites, urand, origin, flags, samples):
    width = values.shape[0]
    n_sweeps = flags.shape[0]
    a = 0
    for sw in range(n_sweeps):
        for _ in range(width):
            i = sites[a]
            u = urand[a]
            a += 1
            vi = values[i]
            acc = ext[i]
            for j in range(width):
                acc += kcol[abs(i - j)] * values[j]
            delta = vi * acc
            if delta <= 0.0 or u < math.exp(-beta * delta):
                values[i] = -vi
        flags[sw] = 1 if values[origin] == -1 else 0
        for j in range(width):
            samples[sw, j] = values[j]


def _coupling_table(width: int, params: ModelParams) -> np.ndarray:
    kcol = np.zeros(width, dtype=np.float64)
    for d in range(1, width):
        kcol[d] = coupling(d, params)
    return kcol


def _exterior_table(width: int, params: ModelParams) -> np.ndarray:
    return np.array(
        [
            exterior_coupling_sum(i + 1, params)
            + exterior_coupling_sum(width - i, params)
            for i in range(width)
        ],
        dtype=np.float64,
    )


def _batch_means_stderr(series: np.ndarray) -> float:
    """Standard error of the mean of a (chains, retained) 0/1 series using
    32 batches per chain (fewer when the series is very short)."""
    chains, retained = series.shape
    nb = min(32, retained)
    bs = retained // nb
    trimmed = series[:, : nb * bs].reshape(chains, nb, bs).astype(np.float64)
    bm = trimmed.mean(axis=2).reshape(-1)
    if bm.size < 2:
        return 0.0
    return float(bm.std(ddof=1) / math.sqrt(bm.size))


@dataclass(frozen=True)
class ChainResult:
    config: SamplerConfig
    estimate: float  # pooled frequency of a minus spin at the origin
    stderr: float
    per_chain: tuple[float, ...]
    minus_series: np.ndarray  # (chains, retained) uint8
    samples: np.ndarray  # (chains, retained, window_size) int8


def run_chain(cfg: SamplerConfig) -> ChainResult:
    """Run the configured chains and report the minus frequency at the
    origin after burn-in.  Identical configs produce identical streams."""
    width = cfg.window_size
    kcol = _coupling_table(width, cfg.params)
    ext = _exterior_table(width, cfg.params)
    origin = -cfg.window[0]
    flags = np.empty((cfg.chains, cfg.sweeps), dtype=np.uint8)
    samples = np.empty((cfg.chains, cfg.sweeps, width), dtype=np.int8)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    chunk_sweeps = max(1, _CHUNK_ATTEMPTS // width)
    for k in range(cfg.chains):
        rng = np.random.Generator(np.random.PCG64(children[k]))
        values = np.ones(width, dtype=np.int8)
        done = 0
        while done < cfg.sweeps:
            n = min(cfg.sweeps - done, chunk_sweeps)
            sites = rng.integers(0, width, size=n * width, dtype=np.int64)
            urand = rng.random(n * width)
            _mc_chain_nb(
                values,
                kcol,
                ext,
                cfg.beta,
                sites,
                urand,
                origin,
                flags[k, done : done + n],
                samples[k, done : done + n],
            )
            done += n
    retained_flags = flags[:, cfg.burn_in :]
    retained_samples = samples[:, cfg.burn_in :, :]
    per_chain = tuple(float(row.mean()) for row in retained_flags)
    return ChainResult(
        config=cfg,
        estimate=float(retained_flags.mean()),
        stderr=_batch_means_stderr(retained_flags),
        per_chain=per_chain,
        minus_series=retained_flags,
        samples=retained_samples,
    )


def exact_boltzmann(
    window_size: int, beta: float, params: ModelParams
) -> dict[tuple[int, ...], float]:
    """Exact stationary law on a small window by full enumeration."""
    if window_size > 16:
        raise ValueError("exact enumeration is limited to 16 sites")
    lo = -(window_size // 2)
    window = (lo, lo + window_size - 1)
    weights: dict[tuple[int, ...], float] = {}
    for bits in range(1 << window_size):
        vals = tuple(-1 if (bits >> i) & 1 else 1 for i in range(window_size))
        h = relative_energy(SpinConfiguration(window=window, values=vals), params)
        weights[vals] = math.exp(-beta * h)
    z = sum(weights.values())
    return {vals: w / z for vals, w in weights.items()}


@dataclass(frozen=True)
class EventReport:
    config: SamplerConfig
    c: float
    event_estimate: float  # frequency of a contour triangle covering 0
    event_stderr: float
    spin_estimate: float  # frequency of a minus spin at 0
    spin_stderr: float
    inclusion_violations: int  # samples with minus at 0 but no covering contour


def contour_event_estimate(cfg: SamplerConfig, c: float = DEFAULT_C) -> EventReport:
    """Estimate the probability that the origin sits under some contour.

    Each retained sample is converted to triangles and decomposed; the
    event asks whether any contour owns a triangle whose basis covers the
    origin.  A minus spin at the origin forces the event (odd covering
    count needs at least one cover), so inclusion_violations must be zero.
    """
    res = run_chain(cfg)
    window = cfg.window
    origin_idx = -window[0]
    chains, retained, _ = res.samples.shape
    events = np.zeros((chains, retained), dtype=np.uint8)
    cache: dict[bytes, bool] = {}
    violations = 0
    for k in range(chains):
        for t in range(retained):
            row = res.samples[k, t]
            key = row.tobytes()
            hit = cache.get(key)
            if hit is None:
                if (row == -1).any():
                    sigma = SpinConfiguration(
                        window=window, values=tuple(int(v) for v in row)
                    )
                    tris = build_triangles(sigma)
                    partition = decompose(tris, c)
                    hit = any(
                        tri.covers(0)
                        for gamma in partition
                        for tri in gamma.triangles
                    )
                else:
                    hit = False
                if len(cache) < _EVENT_CACHE_LIMIT:
                    cache[key] = hit
            if row[origin_idx] == -1 and not hit:
                violations += 1
            events[k, t] = hit
    return EventReport(
        config=cfg,
        c=c,
        event_estimate=float(events.mean()),
        event_stderr=_batch_means_stderr(events),
        spin_estimate=res.estimate,
        spin_stderr=res.stderr,
        inclusion_violations=violations,
    )


@dataclass(frozen=True)
class SeriesReport:
    """Truncated value and certified remainder of the covering series
    2 * sum_m m * exp(-kappa * h-term(m)) with kappa = zeta * beta / 2."""

    beta: float
    zeta: float
    alpha: float
    kappa: float
    value: float
    remainder: float
    converged: bool

    @property
    def below_half(self) -> bool:
        return self.converged and self.value + self.remainder < 0.5


def _dyadic_tail_bound(start: int, kappa: float, alpha: float) -> float:
    """Upper bound on sum_{m >= start} 2 m exp(-kappa m^alpha) by doubling
    blocks: the block [2^k s, 2^(k+1) s) has at most 2^k s terms, each at
    most 2 * 2^(k+1) s * exp(-kappa (2^k s)^alpha)."""
    total = 0.0
    log_s = math.log(start)
    for k in range(2000):
        log_term = (2 * k + 2) * math.log(2.0) + 2 * log_s - kappa * (
            (2.0 ** k) * start
        ) ** alpha
        if log_term > 700.0:
            return math.inf
        term = math.exp(log_term)
        total += term
        if log_term < -745.0:
            break
    return total


def peierls_series_bound(
    beta: float, zeta: float, alpha: float, m_max: int = 2_000_000
) -> SeriesReport:
    """Evaluate the contour covering series with a rigorous remainder.

    At alpha = 0 the series is 2 e^{-4 kappa} * zeta-function(kappa - 1),
    which converges only for kappa > 2; divergence is reported rather than
    raised.  For alpha > 0 any positive kappa converges.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    kappa = 0.5 * zeta * beta
    if alpha == 0.0:
        if kappa <= 2.0:
            return SeriesReport(
                beta, zeta, alpha, kappa, math.inf, math.inf, converged=False
            )
        value = 2.0 * math.exp(-4.0 * kappa) * (1.0 + power_tail(2, kappa - 1.0))
        return SeriesReport(beta, zeta, alpha, kappa, value, 0.0, converged=True)
    if kappa <= 0:
        return SeriesReport(
            beta, zeta, alpha, kappa, math.inf, math.inf, converged=False
        )
    total = 0.0
    m = 1
    while m <= m_max:
        term = 2.0 * m * math.exp(-kappa * m ** alpha)
        total += term
        if term < 1e-18 and m > 100:
            break
        m += 1
    remainder = _dyadic_tail_bound(m + 1, kappa, alpha)
    return SeriesReport(
        beta,
        zeta,
        alpha,
        kappa,
        total,
        remainder,
        converged=math.isfinite(remainder),
    )


def beta_threshold(
    zeta: float, alpha: float, lo: float = 1e-3, hi: float = 200.0
) -> float:
    """Smallest beta at which the covering series drops below one half,
    found by bisection; the series value is decreasing in beta."""
    if not peierls_series_bound(hi, zeta, alpha).below_half:
        raise ValueError(f"series never drops below 1/2 up to beta = {hi}")
    if peierls_series_bound(lo, zeta, alpha).below_half:
        return lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if peierls_series_bound(mid, zeta, alpha).below_half:
            hi = mid
        else:
            lo = mid
    return hi
