"""Desk-scale studies of the asymptotic predictions.

asymptotic_study tracks, over a list of n, the optimal cost against the
limiting cost and the W1 distance between the optimal empirical measure
and the predicted density, plus interval-count portions over the eight
dyadic subintervals.  brascamp_lieb_sweep probes the splitting
inequality 1/sqrt(lambda(0,x)) + 1/sqrt(lambda(x,1)) >= 1/sqrt(lambda(I))
over a grid of interior x; with the relax_q mode this runs outside the
standing hypotheses, where the inequality is known to break.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .coefficients import CoefficientSet
from .gamma import f_infinity, limit_cost
from .optimizer import Optimum, OptimizerConfig, optimize
from .partition import empirical_measure, portion_count, wasserstein1
from .phi import ConvexFn
from .sl_solver import Interval, first_eigenvalue

DYADIC_CELLS = 8


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    optimal_cost: float
    limit_cost: float
    cost_gap: float
    w1_distance: float
    portions: tuple[float, ...]
    converged: bool


@dataclass(frozen=True)
class AsymptoticReport:
    rows: tuple[AsymptoticRow, ...]


@dataclass(frozen=True)
class BLiebRow:
    x: float
    lhs: float
    rhs: float
    holds: bool
    skipped: bool = False


@dataclass(frozen=True)
class BLiebReport:
    rows: tuple[BLiebRow, ...]


def asymptotic_study(
    cs: CoefficientSet,
    phi: ConvexFn,
    n_list,
    cfg: OptimizerConfig,
    density_grid: int = 256,
    threads: int = 1,
) -> AsymptoticReport:
    """Optimize for each n and compare against the limiting predictions."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    target = f_infinity(cs, density_grid)
    lim = limit_cost(cs, phi)

    def run(n: int) -> tuple[Optimum, float, tuple[float, ...]]:
        opt = optimize(replace(cfg, n=n), cs, phi)
        emp = empirical_measure(opt.partition)
        w1 = wasserstein1(emp, target)
        portions = tuple(
            portion_count(opt.partition, k / DYADIC_CELLS, (k + 1) / DYADIC_CELLS)
            for k in range(DYADIC_CELLS)
        )
        return opt, w1, portions

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, n_list))
    else:
        results = [run(n) for n in n_list]
    rows = tuple(
        AsymptoticRow(
            n=n,
            optimal_cost=opt.cost,
            limit_cost=lim,
            cost_gap=opt.cost - lim,
            w1_distance=w1,
            portions=portions,
            converged=opt.converged,
        )
        for n, (opt, w1, portions) in zip(n_list, results)
    )
    return AsymptoticReport(rows=rows)


def brascamp_lieb_sweep(
    cs: CoefficientSet,
    x_grid,
    rel_tol: float = 1e-9,
    threads: int = 1,
) -> BLiebReport:
    """Rows of the splitting inequality over interior x values.

    holds is lhs >= rhs - 10*tol with tol the propagated eigenvalue
    error estimates; rows with a non-positive eigenvalue are skipped
    and flagged rather than erroring.
    """
    xs = [float(x) for x in x_grid]
    if any(not 0.0 < x < 1.0 for x in xs):
        raise ValueError("x grid must be interior to (0, 1)")
    full = first_eigenvalue(Interval(0.0, 1.0), cs, rel_tol)

    def run(x: float) -> BLiebRow:
        left = first_eigenvalue(Interval(0.0, x), cs, rel_tol)
        right = first_eigenvalue(Interval(x, 1.0), cs, rel_tol)
        if left.lam <= 0.0 or right.lam <= 0.0 or full.lam <= 0.0:
            return BLiebRow(x=x, lhs=math.nan, rhs=math.nan, holds=False, skipped=True)
        lhs = left.lam**-0.5 + right.lam**-0.5
        rhs = full.lam**-0.5
        tol = (
            0.5 * left.lam**-1.5 * left.error_estimate
            + 0.5 * right.lam**-1.5 * right.error_estimate
            + 0.5 * full.lam**-1.5 * full.error_estimate
        )
        return BLiebRow(x=x, lhs=lhs, rhs=rhs, holds=lhs >= rhs - 10.0 * tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(run, xs))
    else:
        rows = tuple(run(x) for x in xs)
    return BLiebReport(rows=rows)
