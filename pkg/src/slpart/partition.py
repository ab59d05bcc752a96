"""Partitions of (0,1), their empirical measures, and the discrete cost.

A partition is n ordered breakpoints 0 = x_0 <= ... <= x_n = 1; empty
intervals are legal.  The associated probability measure has constant
density 1/(n L(I_j)) on every non-empty interval and an atom of mass 1/n
at each coincident breakpoint.  Wasserstein-1 on [0,1] is the L^1
distance between CDFs and is computed exactly on the merged breakpoint
grid; it metrizes the weak* convergence used by the limit theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coefficients import CoefficientSet
from .phi import ConvexFn
from .quadrature import fsum_pairwise
from .sl_solver import EMPTY_LENGTH, Interval, first_eigenvalue

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    breakpoints: tuple[float, ...]

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2:
            raise ValueError("a partition needs at least 2 breakpoints")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a > b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be non-decreasing")

    @classmethod
    def make(cls, breakpoints) -> "Partition":
        return cls(tuple(float(b) for b in breakpoints))

    @classmethod
    def uniform(cls, n: int) -> "Partition":
        return cls.make(i / n for i in range(n + 1))

    @property
    def n(self) -> int:
        return len(self.breakpoints) - 1

    def intervals(self) -> list[Interval]:
        bp = self.breakpoints
        return [Interval(a, b) for a, b in zip(bp, bp[1:])]


@dataclass(frozen=True)
class MeasureRepr:
    """Probability measure: piecewise-constant density plus finitely many atoms."""

    density_cells: tuple[tuple[float, float, float], ...]
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        cells = self.density_cells
        for lo, hi, h in cells:
            if not (0.0 <= lo < hi <= 1.0) or h < 0.0:
                raise ValueError(f"bad density cell ({lo}, {hi}, {h})")
        if any(a[1] - 1e-15 > b[0] for a, b in zip(cells, cells[1:])):
            raise ValueError("density cells must be sorted and non-overlapping")
        for loc, mass in self.atoms:
            if not (0.0 <= loc <= 1.0) or mass <= 0.0:
                raise ValueError(f"bad atom ({loc}, {mass})")
        if abs(self.total_mass() - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {self.total_mass()} is not 1")

    def total_mass(self) -> float:
        return fsum_pairwise(
            [h * (hi - lo) for lo, hi, h in self.density_cells]
            + [m for _, m in self.atoms]
        )

    def atom_mass(self) -> float:
        return fsum_pairwise(m for _, m in self.atoms)

    def zero_set_length(self) -> float:
        """Length of {f = 0}: uncovered gaps plus zero-height cells."""
        covered = fsum_pairwise(
            hi - lo for lo, hi, h in self.density_cells if h > 0.0
        )
        return 1.0 - covered

    @classmethod
    def from_cells(cls, cells, atoms=()) -> "MeasureRepr":
        merged: dict[float, float] = {}
        for loc, mass in atoms:
            merged[float(loc)] = merged.get(float(loc), 0.0) + float(mass)
        return cls(
            density_cells=tuple(
                (float(lo), float(hi), float(h)) for lo, hi, h in sorted(cells)
            ),
            atoms=tuple(sorted(merged.items())),
        )


def cost_Fn(
    P: Partition, cs: CoefficientSet, phi: ConvexFn, rel_tol: float = 1e-8
) -> float:
    """Discrete cost (1/n) sum_j phi(n / lambda(I_j)^(1/2)); may be inf."""
    n = P.n
    terms = []
    for J in P.intervals():
        if J.is_empty:
            terms.append(phi.value_at_zero)
        else:
            lam = first_eigenvalue(J, cs, rel_tol).lam
            terms.append(phi(n / math.sqrt(lam)))
    return fsum_pairwise(terms) / n


def empirical_measure(P: Partition) -> MeasureRepr:
    """Density 1/(n L) on non-empty intervals, atoms of mass 1/n elsewhere."""
    n = P.n
    cells = []
    atoms = []
    for J in P.intervals():
        if J.is_empty:
            atoms.append((J.hi, 1.0 / n))
        else:
            cells.append((J.lo, J.hi, 1.0 / (n * J.length)))
    return MeasureRepr.from_cells(cells, atoms)


def portion_count(P: Partition, a_lo: float, a_hi: float) -> float:
    """Rescaled count of partition intervals meeting the open set (a_lo, a_hi).

    The set is silently clipped to [0, 1]; empty intervals count through
    their breakpoint location.
    """
    n = P.n
    c_lo, c_hi = max(a_lo, 0.0), min(a_hi, 1.0)
    total = 0.0
    for J in P.intervals():
        if J.is_empty:
            if a_lo < J.hi < a_hi:
                total += 1.0 / n
        else:
            overlap = min(J.hi, c_hi) - max(J.lo, c_lo)
            if overlap > 0.0:
                total += overlap / (n * J.length)
    return total


def _cdf_breaks(mu: MeasureRepr, nu: MeasureRepr) -> list[float]:
    pts = {0.0, 1.0}
    for m in (mu, nu):
        for lo, hi, _ in m.density_cells:
            pts.add(lo)
            pts.add(hi)
        for loc, _ in m.atoms:
            pts.add(loc)
    return sorted(pts)


def _cdf_values(m: MeasureRepr, grid: list[float]) -> list[float]:
    """Right-continuous CDF values F(g+) at the grid points."""
    atom_at = {}
    for loc, mass in m.atoms:
        atom_at[loc] = atom_at.get(loc, 0.0) + mass
    dens = _density_lookup(m)
    vals = [atom_at.get(grid[0], 0.0)]
    for a, b in zip(grid, grid[1:]):
        f = vals[-1] + dens(0.5 * (a + b)) * (b - a)
        vals.append(f + atom_at.get(b, 0.0))
    return vals


def _density_lookup(m: MeasureRepr):
    cells = m.density_cells

    def dens(x: float) -> float:
        for lo, hi, h in cells:
            if lo <= x < hi:
                return h
        return 0.0

    return dens


def wasserstein1(mu: MeasureRepr, nu: MeasureRepr) -> float:
    """Exact W1 distance: integral of |CDF_mu - CDF_nu| over [0, 1]."""
    if abs(mu.total_mass() - nu.total_mass()) > 1e-9:
        raise ValueError(
            f"mass mismatch: {mu.total_mass()} vs {nu.total_mass()}"
        )
    grid = _cdf_breaks(mu, nu)
    fmu = _cdf_values(mu, grid)
    fnu = _cdf_values(nu, grid)
    dmu = _density_lookup(mu)
    dnu = _density_lookup(nu)
    total = 0.0
    for k in range(len(grid) - 1):
        a, b = grid[k], grid[k + 1]
        width = b - a
        mid = 0.5 * (a + b)
        slope = dmu(mid) - dnu(mid)
        d_left = fmu[k] - fnu[k]
        d_right = d_left + slope * width
        if d_left * d_right >= 0.0:
            total += 0.5 * (abs(d_left) + abs(d_right)) * width
        else:
            # linear difference crosses zero inside the segment
            total += (
                0.5
                * width
                * (d_left * d_left + d_right * d_right)
                / (abs(d_left) + abs(d_right))
            )
    return total
