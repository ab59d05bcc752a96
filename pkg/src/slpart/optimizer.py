"""Minimization of the discrete partition cost over n-interval partitions.

Multistart coordinate descent: each interior breakpoint in turn is moved
by golden-section line search inside its neighbors' bracket, sweeping
until the largest move in a sweep drops below step_tol.  Restart 0 is
the equidistributed partition; later restarts start from the quantiles
of the predicted limiting density plus seeded jitter.  Eigenvalues are
cheap in one dimension and no endpoint-derivative formula is used, so
the search is derivative free by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientSet
from .gamma import f_infinity
from .partition import MeasureRepr, Partition
from .phi import ConvexFn
from .quadrature import fsum_pairwise
from .sl_solver import EMPTY_LENGTH, Interval, first_eigenvalue

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    n: int
    restarts: int = 2
    max_iters: int = 200
    step_tol: float = 1e-6
    seed: int = 0
    allow_empty: bool = False
    eig_rel_tol: float = 1e-7

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.step_tol > 0.0:
            raise ValueError("step_tol must be > 0")


@dataclass(frozen=True)
class Optimum:
    partition: Partition
    cost: float
    iterations: int
    restarts_used: int
    per_interval_lambdas: tuple[float, ...]
    converged: bool
    cost_history: tuple[float, ...]


def _interval_lambda(a: float, b: float, cs, rel_tol: float) -> float:
    if b - a < EMPTY_LENGTH:
        return math.inf
    return first_eigenvalue(Interval(a, b), cs, rel_tol).lam


def _phi_term(lam: float, n: int, phi: ConvexFn) -> float:
    if math.isinf(lam):
        return phi.value_at_zero
    return phi(n / math.sqrt(lam))


def _golden_min(g, a: float, b: float, xtol: float):
    """Golden-section minimum of g on [a, b]; returns best probed (x, g(x))."""
    u = a + (1.0 - GOLDEN) * (b - a)
    v = a + GOLDEN * (b - a)
    gu, gv = g(u), g(v)
    best_x, best_g = (u, gu) if gu <= gv else (v, gv)
    while b - a > xtol:
        if gu <= gv:
            b, v, gv = v, u, gu
            u = a + (1.0 - GOLDEN) * (b - a)
            gu = g(u)
            if gu < best_g:
                best_x, best_g = u, gu
        else:
            a, u, gu = u, v, gv
            v = a + GOLDEN * (b - a)
            gv = g(v)
            if gv < best_g:
                best_x, best_g = v, gv
    return best_x, best_g


def quantile_breakpoints(density: MeasureRepr, n: int) -> list[float]:
    """Breakpoints x_j with CDF(x_j) = j/n for an atom-free density."""
    pts = [0.0]
    cells = density.density_cells
    acc = 0.0
    ci = 0
    for j in range(1, n):
        target = j / n
        while ci < len(cells):
            lo, hi, h = cells[ci]
            cell_mass = h * (hi - lo)
            if acc + cell_mass >= target or ci == len(cells) - 1:
                if h > 0.0:
                    pts.append(min(hi, lo + (target - acc) / h))
                else:
                    pts.append(hi)
                break
            acc += cell_mass
            ci += 1
    pts.append(1.0)
    return sorted(pts)


def _starts(cfg: OptimizerConfig, cs: CoefficientSet):
    n = cfg.n
    yield list(Partition.uniform(n).breakpoints)
    if cfg.restarts == 1:
        return
    quant = quantile_breakpoints(f_infinity(cs), n)
    for k in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        x = np.array(quant)
        x[1:-1] += rng.normal(0.0, 0.25 / n, size=n - 1)
        x[1:-1] = np.clip(np.sort(x[1:-1]), 0.0, 1.0)
        yield list(x)


def _descend(x, cs, phi, cfg: OptimizerConfig, allow_empty: bool):
    """Coordinate sweeps on one start; returns (x, cost, sweeps, converged, history)."""
    n = cfg.n
    rel = cfg.eig_rel_tol
    delta = 0.0 if allow_empty else 1e-9
    lams = [_interval_lambda(a, b, cs, rel) for a, b in zip(x, x[1:])]
    terms = [_phi_term(lam, n, phi) for lam in lams]
    history = [fsum_pairwise(terms) / n]
    converged = False
    sweeps = 0
    for _ in range(cfg.max_iters):
        sweeps += 1
        max_move = 0.0
        for j in range(1, n):
            a, b = x[j - 1] + delta, x[j + 1] - delta
            if a >= b:
                continue

            def g(t, j=j):
                lam_l = _interval_lambda(x[j - 1], t, cs, rel)
                lam_r = _interval_lambda(t, x[j + 1], cs, rel)
                return _phi_term(lam_l, n, phi) + _phi_term(lam_r, n, phi)

            cur = terms[j - 1] + terms[j]
            cand, gcand = _golden_min(g, a, b, xtol=0.25 * cfg.step_tol)
            if gcand < cur:
                move = abs(cand - x[j])
                x[j] = cand
                lams[j - 1] = _interval_lambda(x[j - 1], cand, cs, rel)
                lams[j] = _interval_lambda(cand, x[j + 1], cs, rel)
                terms[j - 1] = _phi_term(lams[j - 1], n, phi)
                terms[j] = _phi_term(lams[j], n, phi)
                max_move = max(max_move, move)
        history.append(fsum_pairwise(terms) / n)
        if max_move < cfg.step_tol:
            converged = True
            break
    return x, history[-1], sweeps, converged, history, lams


def optimize(cfg: OptimizerConfig, cs: CoefficientSet, phi: ConvexFn) -> Optimum:
    """Best partition over all restarts; deterministic for a fixed seed."""
    allow_empty = cfg.allow_empty and not math.isinf(phi.value_at_zero)
    best = None
    for idx, start in enumerate(_starts(cfg, cs)):
        x, cost, sweeps, conv, history, lams = _descend(
            start, cs, phi, cfg, allow_empty
        )
        key = (cost, idx)
        if best is None or key < best[0]:
            best = (key, x, cost, sweeps, conv, history, lams)
    _, x, cost, sweeps, conv, history, lams = best
    return Optimum(
        partition=Partition.make(x),
        cost=cost,
        iterations=sweeps,
        restarts_used=cfg.restarts,
        per_interval_lambdas=tuple(lams),
        converged=conv,
        cost_history=tuple(history),
    )


def brute_force(
    n: int,
    grid: int,
    cs: CoefficientSet,
    phi: ConvexFn,
    rel_tol: float = 1e-6,
) -> Optimum:
    """Exhaustive search on the uniform breakpoint grid (oracle, n <= 3)."""
    if n not in (1, 2, 3):
        raise ValueError(f"brute force supports n in {{1, 2, 3}}, got {n}")
    if grid > 400:
        raise ValueError(f"grid must be <= 400, got {grid}")
    cache: dict[tuple[float, float], float] = {}

    def lam(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = _interval_lambda(a, b, cs, rel_tol)
        return cache[key]

    nodes = [i / grid for i in range(grid + 1)]
    best_cost = math.inf
    best_bp = None
    evals = 0
    if n == 1:
        candidates = [(0.0, 1.0)]
    elif n == 2:
        candidates = [(0.0, t, 1.0) for t in nodes]
    else:
        candidates = [
            (0.0, t1, t2, 1.0)
            for i, t1 in enumerate(nodes)
            for t2 in nodes[i:]
        ]
    for bp in candidates:
        evals += 1
        cost = (
            fsum_pairwise(
                _phi_term(lam(a, b), n, phi) for a, b in zip(bp, bp[1:])
            )
            / n
        )
        if cost < best_cost:
            best_cost, best_bp = cost, bp
    lams = tuple(lam(a, b) for a, b in zip(best_bp, best_bp[1:]))
    return Optimum(
        partition=Partition.make(best_bp),
        cost=best_cost,
        iterations=evals,
        restarts_used=1,
        per_interval_lambdas=lams,
        converged=True,
        cost_history=(best_cost,),
    )
