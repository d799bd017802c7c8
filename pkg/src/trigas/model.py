"""Couplings and relative energies for a 1d long-range Ising chain.

The chain lives on the integers with plus boundary conditions at infinity.
A bond between sites x and y pays J(|x-y|) when the spins disagree, where
J(1) = j1 is a tunable nearest-neighbour strength and J(n) = n^-(2-alpha)
for n > 1 with alpha in [0, 1/2].  Energies are always measured relative to
the all-plus ground state, so a configuration with finitely many minus spins
has a finite energy given by a convergent sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "ALPHA_PLUS",
    "ExactEnergy",
    "ModelParams",
    "SpinConfiguration",
    "coupling",
    "exterior_coupling_sum",
    "h_alpha",
    "power_tail",
    "relative_energy",
    "relative_energy_exact",
    "tail_sum",
    "zeta_alpha",
]

# Largest alpha for which the interface constant 3 - 2^(alpha+1) stays positive.
ALPHA_PLUS = math.log(3.0) / math.log(2.0) - 1.0


@dataclass(frozen=True)
class ModelParams:
    """Interaction parameters.

    alpha controls the decay exponent 2 - alpha of the long-range tail and
    must lie in [0, 1/2].  j1 > 0 is the nearest-neighbour coupling.  window
    is an optional default lattice interval [a, b] for experiment drivers;
    all library operations take windows explicitly.
    """

    alpha: float
    j1: float
    window: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must lie in [0, 1/2], got {self.alpha}")
        if not self.j1 > 0:
            raise ValueError(f"j1 must be positive, got {self.j1}")
        if self.window is not None:
            a, b = self.window
            if a > b:
                raise ValueError(f"window must satisfy a <= b, got {self.window}")

    @property
    def decay(self) -> float:
        """The tail exponent s = 2 - alpha."""
        return 2.0 - self.alpha


@dataclass(frozen=True)
class SpinConfiguration:
    """Spins on a finite window [a, b]; everything outside is +1.

    values[i] is the spin at site a + i and must be +1 or -1.
    """

    window: tuple[int, int]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        a, b = self.window
        if a > b:
            raise ValueError(f"window must satisfy a <= b, got {self.window}")
        if len(self.values) != b - a + 1:
            raise ValueError(
                f"window {self.window} holds {b - a + 1} sites but got "
                f"{len(self.values)} values"
            )
        for v in self.values:
            if v not in (-1, 1):
                raise ValueError(f"spins must be +1 or -1, got {v!r}")

    @classmethod
    def from_string(cls, text: str, origin: int | None = None) -> "SpinConfiguration":
        """Parse a +/- string; origin is the lattice index of the first char.

        When origin is omitted the window is centred so that site 0 sits at
        position len(text) // 2 from the left.
        """
        if not text:
            raise ValueError("spin string must be nonempty")
        vals = []
        for ch in text:
            if ch == "+":
                vals.append(1)
            elif ch == "-":
                vals.append(-1)
            else:
                raise ValueError(f"spin string may contain only + and -, got {ch!r}")
        if origin is None:
            origin = -(len(text) // 2)
        return cls(window=(origin, origin + len(text) - 1), values=tuple(vals))

    def to_string(self) -> str:
        return "".join("+" if v == 1 else "-" for v in self.values)

    def spin(self, x: int) -> int:
        """Spin at site x, defaulting to +1 outside the window."""
        a, b = self.window
        if a <= x <= b:
            return self.values[x - a]
        return 1

    @property
    def minus_sites(self) -> tuple[int, ...]:
        a = self.window[0]
        return tuple(a + i for i, v in enumerate(self.values) if v == -1)


def coupling(n: int, params: ModelParams) -> float:
    """J(n) for integer distance n >= 1."""
    if n < 1:
        raise ValueError(f"coupling distance must be >= 1, got {n}")
    if n == 1:
        return float(params.j1)
    return float(n) ** (-params.decay)


@lru_cache(maxsize=None)
def power_tail(start: int, s: float) -> float:
    """Sum of n^-s over n >= start, for s > 1.

    Direct summation up to a cutoff plus an Euler-Maclaurin closed form for
    the remainder.  With the cutoff at max(start, 400) and correction terms
    through the third derivative the truncation error is far below 1e-15,
    comfortably inside the 1e-12 accuracy this module promises.
    """
    if s <= 1.0:
        raise ValueError(f"power tail diverges for s <= 1, got s={s}")
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    cutoff = max(start, 400)
    head = math.fsum(n ** (-s) for n in range(start, cutoff))
    a = float(cutoff)
    tail = (
        a ** (1.0 - s) / (s - 1.0)
        + 0.5 * a ** (-s)
        + s * a ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * a ** (-s - 3.0) / 720.0
    )
    return head + tail


def tail_sum(start: int, params: ModelParams) -> float:
    """Sum of J(n) over n >= start, for start >= 2 (pure power-law range)."""
    if start < 2:
        raise ValueError(f"tail_sum requires start >= 2, got {start}")
    return power_tail(start, params.decay)


def exterior_coupling_sum(start: int, params: ModelParams) -> float:
    """Sum of J(d) over all distances d >= start, start >= 1.

    Unlike tail_sum this handles start = 1, where the distance-1 bond
    contributes j1 instead of 1.
    """
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    if start == 1:
        return float(params.j1) + power_tail(2, params.decay)
    return power_tail(start, params.decay)


def relative_energy(sigma: SpinConfiguration, params: ModelParams) -> float:
    """Energy of sigma relative to all-plus.

    Counts J(|x-y|) once per disagreeing pair.  Pairs inside the window are
    summed directly; pairs between a window minus spin and the all-plus
    exterior are summed in closed form via exterior tails, so the value does
    not depend on how much plus padding the window carries.
    """
    lo, hi = sigma.window
    vals = sigma.values
    width = hi - lo + 1
    minus_idx = [i for i, v in enumerate(vals) if v == -1]
    if not minus_idx:
        return 0.0
    k = [0.0] * width
    for d in range(1, width):
        k[d] = coupling(d, params)
    total = 0.0
    for i in minus_idx:
        for j, v in enumerate(vals):
            if v == 1:
                total += k[abs(i - j)]
        total += exterior_coupling_sum(i + 1, params)
        total += exterior_coupling_sum(width - i, params)
    return total


@lru_cache(maxsize=None)
def _basel_partial(n: int) -> Fraction:
    """Exact partial sum of 1/d^2 for d = 1..n."""
    if n <= 0:
        return Fraction(0)
    return _basel_partial(n - 1) + Fraction(1, n * n)


@dataclass(frozen=True)
class ExactEnergy:
    """Exact energy value a + b * zeta(2) with rational a, b.

    Only the alpha = 0 model produces energies of this shape: every exterior
    tail is zeta(2) minus a rational partial sum and every in-window bond is
    rational.  Supports enough arithmetic to verify telescoping identities
    without any floating point.
    """

    rational: Fraction
    basel_coeff: Fraction

    def __add__(self, other: "ExactEnergy") -> "ExactEnergy":
        return ExactEnergy(
            self.rational + other.rational,
            self.basel_coeff + other.basel_coeff,
        )

    def __sub__(self, other: "ExactEnergy") -> "ExactEnergy":
        return ExactEnergy(
            self.rational - other.rational,
            self.basel_coeff - other.basel_coeff,
        )

    def __float__(self) -> float:
        return float(self.rational) + float(self.basel_coeff) * (math.pi ** 2 / 6.0)

    @classmethod
    def zero(cls) -> "ExactEnergy":
        return cls(Fraction(0), Fraction(0))


def relative_energy_exact(sigma: SpinConfiguration, params: ModelParams) -> ExactEnergy:
    """Exact-rational relative energy; requires alpha = 0.

    j1 is converted with Fraction(j1), which is exact for ints, Fractions and
    any float (floats are binary rationals).  Intended for small windows; the
    denominators grow quickly.
    """
    if params.alpha != 0.0:
        raise ValueError("exact energies are only available for alpha = 0")
    j1 = Fraction(params.j1)
    lo, hi = sigma.window
    vals = sigma.values
    width = hi - lo + 1
    minus_idx = [i for i, v in enumerate(vals) if v == -1]
    rational = Fraction(0)
    basel = Fraction(0)
    for i in minus_idx:
        for j, v in enumerate(vals):
            if v == 1:
                d = abs(i - j)
                rational += j1 if d == 1 else Fraction(1, d * d)
        for start in (i + 1, width - i):
            # sum over d >= start of J(d) = zeta(2) - partial + (j1 - 1 if start == 1)
            basel += 1
            rational -= _basel_partial(start - 1)
            if start == 1:
                rational += j1 - 1
    return ExactEnergy(rational, basel)


def h_alpha(length: int, alpha: float) -> float:
    """Interface scale function: length^alpha, or ln(length) + 4 at alpha = 0."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if alpha == 0.0:
        return math.log(length) + 4.0
    return float(length) ** alpha


def zeta_alpha(alpha: float) -> float:
    """Interface constant 1 - 2(2^alpha - 1), positive only below ALPHA_PLUS."""
    if not 0.0 <= alpha < ALPHA_PLUS:
        raise ValueError(
            f"interface constant is positive only for 0 <= alpha < {ALPHA_PLUS:.6f}, "
            f"got {alpha}"
        )
    return 3.0 - 2.0 ** (alpha + 1.0)
