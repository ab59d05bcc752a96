"""The limit functional, its optimal density, and recovery partitions.

F_infinity(mu) = int_{f>0} phi(s/(pi f)) f dx
               + phi_infinity * |{f = 0}|
               + phi(0) * (singular mass),

minimized over probability measures by the density f_inf = s / int s,
with limiting cost phi((1/pi) int s).  Recovery partitions realize the
limsup construction for measures with piecewise-constant density: each
zero block becomes a single partition interval, each positive block is
split into k_i equal intervals with k_i from the block quota plus 0/1
correctors on the largest fractional remainders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import quadrature
from .coefficients import CoefficientSet
from .partition import MeasureRepr, Partition, cost_Fn
from .phi import ConvexFn, inf_aware_mul

ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class PiecewiseConstMeasure:
    """Probability density constant on the m blocks ((i-1)/m, i/m)."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        if not self.alphas:
            raise ValueError("need at least one block")
        if any(a < 0.0 for a in self.alphas):
            raise ValueError("block heights must be >= 0")
        if abs(sum(self.alphas) - self.m) > ALPHA_TOL * self.m:
            raise ValueError(
                f"heights must sum to m={self.m}, got {sum(self.alphas)}"
            )

    @classmethod
    def make(cls, alphas) -> "PiecewiseConstMeasure":
        return cls(tuple(float(a) for a in alphas))

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def zero_blocks(self) -> tuple[int, ...]:
        """Indices (0-based) of blocks with zero height."""
        return tuple(i for i, a in enumerate(self.alphas) if a == 0.0)

    @property
    def m0(self) -> int:
        return len(self.zero_blocks)

    def as_measure(self) -> MeasureRepr:
        m = self.m
        return MeasureRepr.from_cells(
            [(i / m, (i + 1) / m, a) for i, a in enumerate(self.alphas)]
        )


@dataclass(frozen=True)
class RecoveryPlan:
    n: int
    counts: tuple[int, ...]      # k_i per block; zero blocks carry 1 interval
    correctors: tuple[int, ...]  # gamma_i in {0, 1}

    def __post_init__(self):
        if any(g not in (0, 1) for g in self.correctors):
            raise ValueError("correctors must be 0 or 1")


def f_infinity(cs: CoefficientSet, grid: int = 256) -> MeasureRepr:
    """The optimal limiting density s(x)/int s as a measure.

    Piecewise-constant coefficients give one exact cell per table cell;
    otherwise the density is sampled as per-cell means of s on a uniform
    grid of the requested size.
    """
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    total = cs.integrate_s(0.0, 1.0)
    if cs.s_is_piecewise_constant:
        cells = [(lo, hi, val / total) for lo, hi, val in cs.s_cells()]
        return MeasureRepr.from_cells(cells)
    cells = []
    masses = []
    for i in range(grid):
        lo, hi = i / grid, (i + 1) / grid
        masses.append(cs.integrate_s(lo, hi, tol=1e-12) / total)
        cells.append((lo, hi, masses[-1] / (hi - lo)))
    # rescale away quadrature roundoff so the measure is exactly normalized
    scale = 1.0 / math.fsum(masses)
    cells = [(lo, hi, h * scale) for lo, hi, h in cells]
    return MeasureRepr.from_cells(cells)


def F_infinity(
    mu: MeasureRepr,
    cs: CoefficientSet,
    phi: ConvexFn,
    tol: float = 1e-10,
) -> float:
    """The limit functional; inf bookkeeping follows 0 * inf = 0."""
    acc = []
    knots = cs.s_knots()
    for lo, hi, h in mu.density_cells:
        if h <= 0.0:
            continue
        integrand = lambda x, h=h: phi(cs.s_of(x) / (math.pi * h)) * h
        acc.append(quadrature.integrate(integrand, lo, hi, tol, knots))
    integral = math.fsum(acc)
    zero_len = mu.zero_set_length()
    singular = mu.atom_mass()
    return (
        integral
        + inf_aware_mul(phi.recession_factor, zero_len)
        + inf_aware_mul(phi.value_at_zero, singular)
    )


def limit_cost(cs: CoefficientSet, phi: ConvexFn) -> float:
    """Limiting optimal cost phi((1/pi) int_0^1 s)."""
    return phi(cs.integrate_s(0.0, 1.0) / math.pi)


def recovery_partition(
    mu: PiecewiseConstMeasure, n: int
) -> tuple[Partition, RecoveryPlan]:
    """Partition of size n realizing the recovery construction for mu.

    Zero blocks become single intervals equal to their block; positive
    blocks are split into k_i equal intervals, k_i = floor of the block
    quota alpha_i (n - m0) / m plus a 0/1 corrector.  Correctors go to
    the largest fractional remainders, ties to the lower index.
    """
    m, m0 = mu.m, mu.m0
    if n < m:
        raise ValueError(f"need n >= m, got n={n} < m={m}")
    quota_scale = (n - m0) / m
    counts = [0] * m
    remainders = []
    for i, a in enumerate(mu.alphas):
        if a == 0.0:
            counts[i] = 1
            continue
        quota = a * quota_scale
        counts[i] = int(math.floor(quota))
        remainders.append((-(quota - counts[i]), i))
    deficit = (n - m0) - sum(counts[i] for i in range(m) if mu.alphas[i] > 0.0)
    remainders.sort()
    correctors = [0] * m
    for _, i in remainders[:deficit]:
        correctors[i] = 1
        counts[i] += 1
    if any(counts[i] == 0 for i in range(m)):
        raise ValueError(
            f"corrector assignment left a positive block without intervals; "
            f"n={n} is too small for this measure"
        )
    breakpoints = [0.0]
    for i in range(m):
        lo, hi = i / m, (i + 1) / m
        k = counts[i] if mu.alphas[i] > 0.0 else 1
        for j in range(1, k):
            breakpoints.append(lo + (hi - lo) * j / k)
        breakpoints.append(hi)
    part = Partition.make(breakpoints)
    assert part.n == n, f"recovery built {part.n} intervals, wanted {n}"
    return part, RecoveryPlan(
        n=n, counts=tuple(counts), correctors=tuple(correctors)
    )


def verify_recovery(
    mu: PiecewiseConstMeasure,
    cs: CoefficientSet,
    phi: ConvexFn,
    n_list,
    rel_tol: float = 1e-8,
) -> list[tuple[int, float, float, float]]:
    """Rows (n, F_n of the recovery partition, F_infinity(mu), gap)."""
    f_inf = F_infinity(mu.as_measure(), cs, phi)
    rows = []
    for n in n_list:
        part, _ = recovery_partition(mu, n)
        fn = cost_Fn(part, cs, phi, rel_tol)
        rows.append((n, fn, f_inf, fn - f_inf))
    return rows
