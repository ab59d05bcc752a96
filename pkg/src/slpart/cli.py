"""Command-line entry point: JSON configs in, JSON/CSV reports out.

Subcommands: eig, optimize, gamma, recovery, verify, blieb.  Exit codes:
0 success, 2 config validation error, 1 runtime failure, 64 unknown
subcommand.  All numbers are serialized with 17 significant digits so
identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .coefficients import CoefficientSet, coefficients_from_config
from .experiments import asymptotic_study, brascamp_lieb_sweep
from .gamma import (
    PiecewiseConstMeasure,
    F_infinity,
    f_infinity,
    limit_cost,
    verify_recovery,
)
from .optimizer import OptimizerConfig, optimize
from .partition import MeasureRepr
from .phi import ConvexFn, phi_from_config
from .sl_solver import (
    Interval,
    first_eigenvalue,
    global_bounds,
    local_lower_bound,
    local_upper_bound,
)

USAGE = """\
usage: slpart <command> [options]

commands:
  eig       first Dirichlet eigenvalue of a subinterval, with bounds
  optimize  minimize the partition cost for a given n
  gamma     limit functional and limiting cost of a measure
  recovery  recovery-sequence cost table for a piecewise-constant measure
  verify    asymptotic study: optimal cost, W1 distance, portions vs n
  blieb     splitting-inequality sweep over interior points

run `slpart <command> --help` for options.
"""

COMMANDS = ("eig", "optimize", "gamma", "recovery", "verify", "blieb")


class ConfigError(ValueError):
    """Configuration rejected before any compute started."""


def fmt17(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def to_json(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits (inf/nan as strings)."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(k)}: {to_json(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        s = fmt17(obj)
        return json.dumps(s) if s in ("inf", "-inf", "nan") else s
    return json.dumps(obj)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _write_csv(path: str | None, header, rows) -> None:
    out = sys.stdout if path is None or path == "-" else open(path, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else fmt17(c) for c in row])
    finally:
        if out is not sys.stdout:
            out.close()


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def load_coefficients(path: str, relax_q: bool = False) -> tuple[CoefficientSet, dict]:
    cfg = _load_json(path)
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top-level config must be an object")
    if relax_q:
        cfg = {**cfg, "relax_q": True}
    try:
        cs = coefficients_from_config(cfg)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    report = cs.validate()
    if not report.ok:
        raise ConfigError(
            f"{path}: coefficient hypotheses violated: " + "; ".join(report.failures())
        )
    return cs, cfg


def load_phi(cfg: dict, override: str | None = None) -> ConvexFn:
    block = cfg.get("phi")
    if override is not None:
        text = override.strip()
        if text.startswith("{"):
            try:
                block = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"bad inline phi JSON: {exc}") from exc
        else:
            block = _load_json(override)
    if block is None:
        raise ConfigError("config has no phi block (and no --phi given)")
    try:
        return phi_from_config(block)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"phi config: {exc}") from exc


def load_measure(path: str):
    """A measure config: {m, alphas} or {cells, atoms}."""
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: measure config must be an object")
    try:
        if "alphas" in obj:
            mu = PiecewiseConstMeasure.make(obj["alphas"])
            if "m" in obj and obj["m"] != mu.m:
                raise ValueError(f"m={obj['m']} but {mu.m} alphas given")
            return mu
        if "cells" in obj:
            return MeasureRepr.from_cells(obj["cells"], obj.get("atoms", ()))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}: measure needs 'alphas' or 'cells'")


def _parse_n_list(text: str) -> list[int]:
    try:
        ns = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad n list {text!r}: {exc}") from exc
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"n list must be increasing, got {text!r}")
    return ns


def _argparser(name: str, **kwargs) -> argparse.ArgumentParser:
    return argparse.ArgumentParser(prog=f"slpart {name}", **kwargs)


def cmd_eig(argv) -> int:
    ap = _argparser("eig")
    ap.add_argument("--config", required=True)
    ap.add_argument("--lo", type=float, required=True)
    ap.add_argument("--hi", type=float, required=True)
    ap.add_argument("--rel-tol", type=float, default=1e-8)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    cs, _ = load_coefficients(args.config)
    try:
        J = Interval(args.lo, args.hi)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    res = first_eigenvalue(J, cs, args.rel_tol)
    payload = {
        "lambda": res.lam,
        "error_estimate": res.error_estimate,
        "grid_size": res.grid_size,
        "global_bounds": None if J.is_empty else list(global_bounds(J, cs.beta)),
        "local_bounds": None
        if J.is_empty
        else [local_lower_bound(J, cs), local_upper_bound(J, cs)],
    }
    _write_text(args.out, to_json(payload) + "\n")
    return 0


def cmd_optimize(argv) -> int:
    ap = _argparser("optimize")
    ap.add_argument("--config", required=True)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--restarts", type=int, default=2)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--step-tol", type=float, default=1e-6)
    ap.add_argument("--max-iters", type=int, default=200)
    ap.add_argument("--eig-rel-tol", type=float, default=1e-7)
    ap.add_argument("--allow-empty", action="store_true")
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    cs, cfg = load_coefficients(args.config)
    phi = load_phi(cfg)
    try:
        ocfg = OptimizerConfig(
            n=args.n,
            restarts=args.restarts,
            max_iters=args.max_iters,
            step_tol=args.step_tol,
            seed=args.seed,
            allow_empty=args.allow_empty,
            eig_rel_tol=args.eig_rel_tol,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    opt = optimize(ocfg, cs, phi)
    payload = {
        "breakpoints": list(opt.partition.breakpoints),
        "cost": opt.cost,
        "lambdas": list(opt.per_interval_lambdas),
        "converged": opt.converged,
    }
    _write_text(args.out, to_json(payload) + "\n")
    return 0


def cmd_gamma(argv) -> int:
    ap = _argparser("gamma")
    ap.add_argument("--config", required=True)
    ap.add_argument("--measure", required=True)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--out", default="-")
    ap.add_argument("--finf-csv", default=None)
    args = ap.parse_args(argv)
    cs, cfg = load_coefficients(args.config)
    phi = load_phi(cfg)
    mu = load_measure(args.measure)
    if isinstance(mu, PiecewiseConstMeasure):
        mu = mu.as_measure()
    payload = {
        "F_infinity": F_infinity(mu, cs, phi),
        "limit_cost": limit_cost(cs, phi),
    }
    _write_text(args.out, to_json(payload) + "\n")
    if args.finf_csv is not None:
        dens = f_infinity(cs, args.grid)
        rows = [("cell", lo, hi, h) for lo, hi, h in dens.density_cells]
        _write_csv(args.finf_csv, ["kind", "lo", "hi", "value"], rows)
    return 0


def cmd_recovery(argv) -> int:
    ap = _argparser("recovery")
    ap.add_argument("--config", required=True)
    ap.add_argument("--measure", required=True)
    ap.add_argument("--n-list", required=True)
    ap.add_argument("--rel-tol", type=float, default=1e-8)
    ap.add_argument("--out-csv", default="-")
    args = ap.parse_args(argv)
    cs, cfg = load_coefficients(args.config)
    phi = load_phi(cfg)
    mu = load_measure(args.measure)
    if not isinstance(mu, PiecewiseConstMeasure):
        raise ConfigError("recovery needs a {m, alphas} measure")
    ns = _parse_n_list(args.n_list)
    if ns[0] < mu.m:
        raise ConfigError(f"all n must be >= m = {mu.m}")
    rows = verify_recovery(mu, cs, phi, ns, rel_tol=args.rel_tol)
    _write_csv(args.out_csv, ["n", "F_n", "F_infinity", "gap"], rows)
    return 0


def cmd_verify(argv) -> int:
    ap = _argparser("verify")
    ap.add_argument("--config", required=True)
    ap.add_argument("--phi", default=None, help="inline JSON or path; overrides config")
    ap.add_argument("--n-list", required=True)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--restarts", type=int, default=2)
    ap.add_argument("--step-tol", type=float, default=1e-4)
    ap.add_argument("--max-iters", type=int, default=200)
    ap.add_argument("--eig-rel-tol", type=float, default=1e-6)
    ap.add_argument("--density-grid", type=int, default=256)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-csv", default="-")
    args = ap.parse_args(argv)
    cs, cfg = load_coefficients(args.config)
    phi = load_phi(cfg, args.phi)
    ns = _parse_n_list(args.n_list)
    try:
        ocfg = OptimizerConfig(
            n=ns[0],
            restarts=args.restarts,
            max_iters=args.max_iters,
            step_tol=args.step_tol,
            seed=args.seed,
            eig_rel_tol=args.eig_rel_tol,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = asymptotic_study(
        cs, phi, ns, ocfg, density_grid=args.density_grid, threads=args.threads
    )
    header = ["n", "cost", "limit_cost", "gap", "w1"] + [
        f"portion_{k}" for k in range(8)
    ]
    rows = [
        (r.n, r.optimal_cost, r.limit_cost, r.cost_gap, r.w1_distance, *r.portions)
        for r in report.rows
    ]
    _write_csv(args.out_csv, header, rows)
    return 0


def cmd_blieb(argv) -> int:
    ap = _argparser("blieb")
    ap.add_argument("--config", required=True)
    ap.add_argument("--grid", type=int, default=99)
    ap.add_argument("--relax-q", action="store_true")
    ap.add_argument("--rel-tol", type=float, default=1e-9)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out-csv", default="-")
    args = ap.parse_args(argv)
    if args.grid < 1:
        raise ConfigError("grid must be >= 1")
    cs, _ = load_coefficients(args.config, relax_q=args.relax_q)
    xs = [i / (args.grid + 1) for i in range(1, args.grid + 1)]
    report = brascamp_lieb_sweep(cs, xs, rel_tol=args.rel_tol, threads=args.threads)
    rows = [
        (r.x, r.lhs, r.rhs, "skip" if r.skipped else ("true" if r.holds else "false"))
        for r in report.rows
    ]
    _write_csv(args.out_csv, ["x", "lhs", "rhs", "holds"], rows)
    return 0


HANDLERS = {
    "eig": cmd_eig,
    "optimize": cmd_optimize,
    "gamma": cmd_gamma,
    "recovery": cmd_recovery,
    "verify": cmd_verify,
    "blieb": cmd_blieb,
}


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return 0 if argv else 64
    cmd = argv[0]
    if cmd not in HANDLERS:
        sys.stderr.write(f"unknown command {cmd!r}\n{USAGE}")
        return 64
    try:
        return HANDLERS[cmd](argv[1:])
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which is a config error here
        return 2 if exc.code else 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
