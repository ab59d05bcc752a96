"""Strictly convex cost functions with declared boundary data.

A ConvexFn carries its value at zero and its recession factor (the limit
of phi(t)/t, declared as "zero" or "infinite") as explicit fields rather
than inferred limits: the limiting functional is discontinuous in these
data, so they are part of the definition, not something to estimate from
samples.  Infinity is the float inf sentinel with the conventions
c * inf = inf for c > 0 and 0 * inf = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expressions import parse_expr

RECESSIONS = ("zero", "infinite")


@dataclass(frozen=True)
class ConvexFn:
    kind: str
    value_at_zero: float
    recession: str
    params: dict = field(default_factory=dict)
    fn: Callable[[float], float] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.recession not in RECESSIONS:
            raise ValueError(
                f"recession must be one of {RECESSIONS}, got {self.recession!r}; "
                "linear (finite nonzero) growth is not supported"
            )
        if self.value_at_zero < 0.0:
            raise ValueError("value at zero must be >= 0 (possibly inf)")

    def __call__(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"cost function argument must be >= 0, got {t}")
        if t == 0.0:
            return self.value_at_zero
        return self.fn(t)

    @property
    def recession_factor(self) -> float:
        return 0.0 if self.recession == "zero" else math.inf


def eval_phi(f: ConvexFn, t: float) -> float:
    return f(t)


def inf_aware_mul(a: float, b: float) -> float:
    """Product with the 0 * inf = 0 bookkeeping convention."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def power_inverse(r: float) -> ConvexFn:
    """phi(t) = t^(-2r), r > 0: sums of positive eigenvalue powers."""
    if not r > 0.0:
        raise ValueError(f"power_inverse needs r > 0, got {r}")
    return ConvexFn(
        kind="power_inverse",
        value_at_zero=math.inf,
        recession="zero",
        params={"r": float(r)},
        fn=lambda t: t ** (-2.0 * r),
    )


def power(r: float) -> ConvexFn:
    """phi(t) = t^(2r): sums of reciprocal eigenvalue powers.

    Requires 2r > 1 so the function is strictly convex with superlinear
    growth; r = 1 (plain squares) is the workhorse case.
    """
    if not r > 0.5:
        raise ValueError(f"power needs r > 1/2 for strict convexity, got {r}")
    return ConvexFn(
        kind="power",
        value_at_zero=0.0,
        recession="infinite",
        params={"r": float(r)},
        fn=lambda t: t ** (2.0 * r),
    )


def shifted(a: float, b: float) -> ConvexFn:
    """phi(t) = (t - a)^2 + b with a, b > 0: non-monotone with interior minimum."""
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"shifted needs a, b > 0, got a={a}, b={b}")
    return ConvexFn(
        kind="shifted",
        value_at_zero=a * a + b,
        recession="infinite",
        params={"a": float(a), "b": float(b)},
        fn=lambda t: (t - a) ** 2 + b,
    )


def heat() -> ConvexFn:
    """phi(t) = exp(1/t^2): short-time heat trace approximation."""

    def _eval(t: float) -> float:
        e = 1.0 / (t * t)
        return math.inf if e > 709.0 else math.exp(e)

    return ConvexFn(kind="heat", value_at_zero=math.inf, recession="zero", fn=_eval)


def custom(expr: str, value_at_zero: float, recession: str) -> ConvexFn:
    """User-supplied phi from an expression in the variable x (= t).

    Boundary data must be declared; sampling validation only warns and
    never overrides the declaration.
    """
    parsed = parse_expr(expr)
    return ConvexFn(
        kind="custom",
        value_at_zero=float(value_at_zero),
        recession=recession,
        params={"expr": expr},
        fn=lambda t: parsed(t),
    )


def presets() -> list:
    """The preset ConvexFn factories."""
    return [power_inverse, power, shifted, heat, custom]


def sanity_report(f: ConvexFn, seed: int = 0, samples: int = 200) -> list[str]:
    """Sampling checks of the standing hypotheses; returns warnings.

    Checks non-negativity, midpoint convexity with at least one strict
    witness, consistency of the declared recession with phi(T)/T at
    large T, and monotonicity when the recession is null.
    """
    rng = np.random.default_rng(seed)
    warnings = []
    ts = rng.uniform(1e-3, 10.0, size=samples)
    vals = np.array([f(t) for t in ts])
    if np.any(vals < 0.0):
        warnings.append("phi takes negative values on samples")
    strict = False
    for _ in range(samples):
        a, b = rng.uniform(1e-3, 10.0, size=2)
        if a == b:
            continue
        mid, avg = f(0.5 * (a + b)), 0.5 * (f(a) + f(b))
        if mid > avg + 1e-12 * max(1.0, abs(avg)):
            warnings.append(f"midpoint convexity fails at a={a:.6g}, b={b:.6g}")
            break
        if mid < avg - 1e-12 * max(1.0, abs(avg)):
            strict = True
    else:
        if not strict:
            warnings.append("no strict-convexity witness found (phi may be linear)")
    big = 1e8
    ratio = f(big) / big
    if f.recession == "zero" and not ratio < 1.0:
        warnings.append(f"declared null recession but phi(T)/T = {ratio:.3g} at T={big:g}")
    if f.recession == "infinite" and not ratio > 1e6:
        warnings.append(
            f"declared infinite recession but phi(T)/T = {ratio:.3g} at T={big:g}"
        )
    if f.recession == "zero":
        ts_sorted = np.sort(ts)
        vs = np.array([f(t) for t in ts_sorted])
        if np.any(np.diff(vs) > 1e-9 * np.maximum(1.0, np.abs(vs[:-1]))):
            warnings.append("null recession but phi is not non-increasing on samples")
    return warnings


def phi_from_config(cfg: dict) -> ConvexFn:
    """Build a ConvexFn from its JSON config block."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError("phi config must be an object with a 'kind' key")
    kind = cfg["kind"]
    if kind == "power_inverse":
        return power_inverse(_num(cfg, "r"))
    if kind == "power":
        return power(_num(cfg, "r"))
    if kind == "shifted":
        return shifted(_num(cfg, "a"), _num(cfg, "b"))
    if kind == "heat":
        return heat()
    if kind == "custom":
        v0 = cfg.get("value_at_zero")
        if v0 == "inf":
            v0 = math.inf
        if not isinstance(v0, (int, float)):
            raise ValueError("custom phi needs numeric value_at_zero or \"inf\"")
        if "recession" not in cfg:
            raise ValueError("custom phi needs a declared recession")
        return custom(str(cfg.get("expr", "")), float(v0), cfg["recession"])
    raise ValueError(f"unknown phi kind {kind!r}")


def _num(cfg: dict, key: str) -> float:
    v = cfg.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ValueError(f"phi config key {key!r} must be a number, got {v!r}")
    return float(v)
