"""Coefficient triples (p, q, w) with bound constant beta.

The standing hypotheses are 1/beta <= p, w <= beta and 0 <= q <= beta;
a relax_q mode lifts only the lower bound on q.  The derived function
s = sqrt(w/p) drives the limiting density and all length scalings.
Hypotheses are checked by dense sampling, not symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .expressions import (
    Coefficient,
    PiecewiseTable,
    coefficient_from_config,
)

DEFAULT_GRID = 10_000


@dataclass(frozen=True)
class BoundCheck:
    """Result of checking one coefficient against its bounds."""

    name: str
    ok: bool
    lo_bound: float | None
    hi_bound: float
    min_value: float
    max_value: float
    worst_x: float
    messages: tuple[str, ...]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    checks: tuple[BoundCheck, ...]
    s_min: float
    s_max: float

    def failures(self) -> list[str]:
        return [m for c in self.checks for m in c.messages]


@dataclass(frozen=True)
class CoefficientSet:
    """The triple (p, q, w), the constant beta > 1, and derived s."""

    p: Coefficient
    q: Coefficient
    w: Coefficient
    beta: float
    relax_q: bool = False

    def __post_init__(self):
        if not (self.beta > 1.0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a finite real > 1, got {self.beta}")

    def s_of(self, x: float) -> float:
        return math.sqrt(self.w(x) / self.p(x))

    def s_array(self, x: np.ndarray) -> np.ndarray:
        return np.sqrt(self.w.eval_array(x) / self.p.eval_array(x))

    def s_knots(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.p.knots()) | set(self.w.knots())))

    def all_knots(self) -> tuple[float, ...]:
        return tuple(
            sorted(set(self.p.knots()) | set(self.q.knots()) | set(self.w.knots()))
        )

    @property
    def s_is_piecewise_constant(self) -> bool:
        return _piecewise_constant(self.p) and _piecewise_constant(self.w)

    def s_cells(self) -> list[tuple[float, float, float]]:
        """(lo, hi, s value) cells; only valid when s is piecewise constant."""
        if not self.s_is_piecewise_constant:
            raise ValueError("s is not piecewise constant for these coefficients")
        edges = sorted({0.0, 1.0, *self.s_knots()})
        return [
            (lo, hi, self.s_of(0.5 * (lo + hi)))
            for lo, hi in zip(edges, edges[1:])
        ]

    def integrate_s(self, a: float, b: float, tol: float = 1e-10) -> float:
        """Integral of s over [a, b]; exact cell sums for tables."""
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError(f"need 0 <= a <= b <= 1, got ({a}, {b})")
        if a == b:
            return 0.0
        if self.s_is_piecewise_constant:
            total = 0.0
            for lo, hi, val in self.s_cells():
                total += val * max(0.0, min(b, hi) - max(a, lo))
            return total
        return quadrature.integrate(self.s_of, a, b, tol, knots=self.s_knots())

    def validate(self, grid: int = DEFAULT_GRID) -> ValidationReport:
        """Check the standing hypotheses by dense sampling on [0, 1]."""
        x = np.linspace(0.0, 1.0, grid)
        inv_beta = 1.0 / self.beta
        q_lo = None if self.relax_q else 0.0
        checks = [
            _check_bounds("p", self.p.eval_array(x), x, inv_beta, self.beta),
            _check_bounds("q", self.q.eval_array(x), x, q_lo, self.beta),
            _check_bounds("w", self.w.eval_array(x), x, inv_beta, self.beta),
        ]
        s = self.s_array(x)
        checks.append(_check_bounds("s", s, x, inv_beta, self.beta))
        return ValidationReport(
            ok=all(c.ok for c in checks),
            checks=tuple(checks),
            s_min=float(s.min()),
            s_max=float(s.max()),
        )


def _piecewise_constant(c: Coefficient) -> bool:
    return isinstance(c, PiecewiseTable) or c.is_constant


def _check_bounds(name, values, x, lo, hi, tol=1e-12) -> BoundCheck:
    excess = values - hi
    if lo is not None:
        excess = np.maximum(excess, lo - values)
    worst = int(np.argmax(excess))
    msgs = []
    if lo is not None:
        i = int(np.argmin(values))
        if lo - values[i] > tol:
            msgs.append(f"{name}({x[i]:.6g}) = {values[i]:.6g} < {lo:.6g}")
    i = int(np.argmax(values))
    if values[i] - hi > tol:
        msgs.append(f"{name}({x[i]:.6g}) = {values[i]:.6g} > {hi:.6g}")
    return BoundCheck(
        name=name,
        ok=not msgs,
        lo_bound=lo,
        hi_bound=hi,
        min_value=float(values.min()),
        max_value=float(values.max()),
        worst_x=float(x[worst]),
        messages=tuple(msgs),
    )


def coefficients_from_config(cfg: dict) -> CoefficientSet:
    """Build a CoefficientSet from its JSON config block.

    Expected keys: p, q, w (expression string, bare number, or
    {"cells": [[lo, hi, value], ...]}) and beta (number > 1).
    """
    missing = [k for k in ("p", "q", "w", "beta") if k not in cfg]
    if missing:
        raise ValueError(f"coefficient config missing keys: {', '.join(missing)}")
    beta = cfg["beta"]
    if not isinstance(beta, (int, float)) or isinstance(beta, bool):
        raise ValueError(f"beta must be a number, got {beta!r}")
    return CoefficientSet(
        p=coefficient_from_config(cfg["p"]),
        q=coefficient_from_config(cfg["q"]),
        w=coefficient_from_config(cfg["w"]),
        beta=float(beta),
        relax_q=bool(cfg.get("relax_q", False)),
    )
