"""First Dirichlet eigenvalue of -(p u')' + q u = lambda w u on a subinterval.

Discretization: uniform grid with m interior nodes, self-adjoint second
order finite differences (harmonic means of p at the dual-cell
interfaces, q and w sampled at the cell midpoints, i.e. at the nodes).
After symmetrization by the diagonal mass matrix the smallest eigenvalue
comes from bisection on the Sturm sign count; grids are refined
geometrically and Richardson extrapolation of the h^2 error gives a
certified stopping rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from ._kernels import smallest_eigenvalue, solve_symmetric_tridiag
from .coefficients import CoefficientSet
from .expressions import PiecewiseTable

EMPTY_LENGTH = 1e-12
MAX_GRID = 1 << 21


class SolverError(RuntimeError):
    """Grid refinement budget exhausted before reaching tolerance."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"need 0 <= lo <= hi <= 1, got ({self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def is_empty(self) -> bool:
        return self.length < EMPTY_LENGTH


@dataclass(frozen=True)
class EigenResult:
    lam: float
    error_estimate: float
    grid_size: int
    eigenfunction_samples: tuple | None = None

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.lam)


def _cell_values(coeff, xs: np.ndarray, h: float) -> np.ndarray:
    """Coefficient per dual cell around each interior node.

    Tables use their exact cell averages (point sampling of a jump gives
    a rough O(h) eigenvalue error that defeats extrapolation); smooth
    expressions are sampled at the cell midpoint, i.e. the node.
    """
    if isinstance(coeff, PiecewiseTable):
        edges = np.concatenate((xs[1:-1] - 0.5 * h, [xs[-2] + 0.5 * h]))
        return coeff.segment_means(edges)
    return coeff.eval_array(xs[1:-1])


def _interface_values(coeff, xs: np.ndarray) -> np.ndarray:
    """Harmonic mean of p per inter-node segment (exact for tables)."""
    if isinstance(coeff, PiecewiseTable):
        return 1.0 / coeff.reciprocal().segment_means(xs)
    p = coeff.eval_array(xs)
    return 2.0 * p[:-1] * p[1:] / (p[:-1] + p[1:])


def _symmetrized_system(J: Interval, cs: CoefficientSet, m: int):
    """Tridiagonal (d, e) of the mass-symmetrized discrete operator."""
    h = J.length / (m + 1)
    xs = J.lo + h * np.arange(m + 2)
    q = _cell_values(cs.q, xs, h)
    w = _cell_values(cs.w, xs, h)
    p_if = _interface_values(cs.p, xs)
    diag = (p_if[:-1] + p_if[1:]) / h**2 + q
    off = -p_if[1:-1] / h**2
    d = diag / w
    e = off / np.sqrt(w[:-1] * w[1:])
    return d, e, xs, w


def _grid_eigenvalue(J: Interval, cs: CoefficientSet, m: int) -> float:
    d, e, _, _ = _symmetrized_system(J, cs, m)
    return float(smallest_eigenvalue(d, e))


def initial_grid(L: float) -> int:
    return max(32, math.ceil(8.0 / L))


def first_eigenvalue(
    J: Interval,
    cs: CoefficientSet,
    rel_tol: float = 1e-8,
    want_eigenfunction: bool = False,
) -> EigenResult:
    """Certified first Dirichlet eigenvalue on J (inf sentinel when empty)."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must be in (0, 1), got {rel_tol}")
    if J.is_empty:
        return EigenResult(lam=math.inf, error_estimate=0.0, grid_size=0)
    # nested refinement m -> 2m+1 halves h = L/(m+1) exactly, which the
    # h^2 elimination below requires (m -> 2m would leave an O(h^3) tail)
    m = initial_grid(J.length)
    lam_prev = _grid_eigenvalue(J, cs, m)
    m = 2 * m + 1
    lam = _grid_eigenvalue(J, cs, m)
    extr_prev = lam + (lam - lam_prev) / 3.0
    while 2 * m + 1 <= MAX_GRID:
        m = 2 * m + 1
        lam_prev, lam = lam, _grid_eigenvalue(J, cs, m)
        extr = lam + (lam - lam_prev) / 3.0
        change = abs(extr - extr_prev)
        if change <= rel_tol * max(abs(extr), 1e-12):
            samples = _eigenfunction(J, cs, m, lam) if want_eigenfunction else None
            return EigenResult(
                lam=extr,
                error_estimate=change,
                grid_size=m,
                eigenfunction_samples=samples,
            )
        extr_prev = extr
    raise SolverError(
        f"grid budget {MAX_GRID} exhausted on ({J.lo}, {J.hi}) at rel_tol {rel_tol:g}"
    )


def _eigenfunction(J: Interval, cs: CoefficientSet, m: int, lam_grid: float):
    """Inverse iteration at the converged grid; samples include endpoints."""
    d, e, xs, w = _symmetrized_system(J, cs, m)
    shift = lam_grid - max(abs(lam_grid), 1.0) * 1e-9
    rng = np.random.default_rng(0)
    y = rng.standard_normal(m)
    for _ in range(3):
        y = solve_symmetric_tridiag(d - shift, e, y)
        y /= np.linalg.norm(y)
    u = y / np.sqrt(w)
    u /= np.abs(u).max()
    if u[int(np.argmax(np.abs(u)))] < 0.0:
        u = -u
    pts = [(float(J.lo), 0.0)]
    pts += [(float(x), float(v)) for x, v in zip(xs[1:-1], u)]
    pts.append((float(J.hi), 0.0))
    return tuple(pts)


def closed_form_eigenvalue(J: Interval, p: float, q: float, w: float) -> float:
    """Constant-coefficient eigenvalue pi^2 / (s^2 L^2) + q/w, s^2 = w/p.

    The potential enters scaled by the weight: the Rayleigh quotient for
    constants is (p pi^2/L^2 + q) / w, which also matches the global
    upper bound beta^2 pi^2 / L^2 + beta^2 at the extreme coefficients.
    """
    if J.is_empty:
        raise ValueError("closed form needs a non-empty interval")
    s2 = w / p
    return math.pi**2 / (s2 * J.length**2) + q / w


def global_bounds(J: Interval, beta: float) -> tuple[float, float]:
    """Two-sided eigenvalue bounds from the coefficient bounds alone."""
    if J.is_empty:
        raise ValueError("global bounds need a non-empty interval")
    L2 = J.length**2
    return (math.pi**2 / (beta**2 * L2), beta**2 * math.pi**2 / L2 + beta**2)


def local_upper_bound(J: Interval, cs: CoefficientSet, tol: float = 1e-10) -> float:
    """Mean-deviation upper bound; collapses to pi^2/(s L)^2 + beta^2 for constants."""
    if J.is_empty:
        raise ValueError("local bounds need a non-empty interval")
    knots = cs.s_knots()
    a, b = J.lo, J.hi

    def pw2(x):
        return cs.p(x) * cs.w(x) ** 2

    w_mean = quadrature.mean_value(cs.w, a, b, tol, knots)
    pw2_mean = quadrature.mean_value(pw2, a, b, tol, knots)
    c = pw2_mean / w_mean
    dev = quadrature.mean_value(lambda x: abs(pw2(x) - c * cs.w(x)), a, b, tol, knots)
    return (
        math.pi**2 / J.length**2 * (pw2_mean + 2.0 * dev) / w_mean**3
        + cs.beta**2
    )


def local_lower_bound(J: Interval, cs: CoefficientSet, tol: float = 1e-10) -> float:
    """Mean-deviation lower bound; collapses to pi^2/(s L)^2 for constants."""
    if J.is_empty:
        raise ValueError("local bounds need a non-empty interval")
    knots = cs.s_knots()
    a, b = J.lo, J.hi

    def inv_p(x):
        return 1.0 / cs.p(x)

    ip_mean = quadrature.mean_value(inv_p, a, b, tol, knots)
    w_mean = quadrature.mean_value(cs.w, a, b, tol, knots)
    c = w_mean / ip_mean
    dev = quadrature.mean_value(lambda x: abs(cs.w(x) - c / cs.p(x)), a, b, tol, knots)
    return math.pi**2 / (ip_mean * (w_mean + math.pi**2 * dev) * J.length**2)


def shrinkage_limit_check(
    x0: float,
    cs: CoefficientSet,
    radii,
    rel_tol: float = 1e-8,
) -> list[tuple[float, float]]:
    """Rows (radius, lambda * L^2) for intervals shrinking to x0.

    At a Lebesgue point of p and w the products approach pi^2 / s(x0)^2;
    no convergence rate is asserted, the table is for inspection.
    """
    if not 0.0 < x0 < 1.0:
        raise ValueError(f"x0 must be interior to (0, 1), got {x0}")
    radii = list(radii)
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    rows = []
    for r in radii:
        if x0 - r <= 0.0 or x0 + r >= 1.0:
            raise ValueError(f"interval around x0={x0} with radius {r} leaves (0, 1)")
        J = Interval(x0 - r, x0 + r)
        res = first_eigenvalue(J, cs, rel_tol)
        rows.append((r, res.lam * J.length**2))
    return rows
