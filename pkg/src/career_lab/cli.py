"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 divergent regime,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import io
from .beliefs import steady_state
from .equilibrium import FocVariant, equilibrium_path, marginal_benefit_erratum, steady_state_effort, steady_state_gamma
from .errors import CareerLabError, DivergentSeries, InvalidModel
from .model import CostSpec, FlatThenPowerCost, ModelParams, PowerCost, cost_from_dict, parse_cost, parse_precision, validate_params
from .simulation import SimConfig
from .statics import monotonicity_scan, persistence_point
from .verify import run_verification

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENT, EXIT_VERIFY = 0, 1, 2, 3
SEED_ENV = "CAREER_LAB_SEED"

DEFAULTS = {
    "m1": 0.0,
    "h1": 1.0,
    "h_eps": 1.0,
    "h_delta": "inf",
    "beta": 0.9,
    "cost": {"type": "power", "c": 1.0, "p": 2.0},
    "tol": 1e-10,
    "T": 10,
    "n_reps": 100_000,
    "master_seed": 0,
}


class ConfigError(CareerLabError, ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    cost: CostSpec
    tol: float
    T: int
    n_reps: int
    master_seed: int

    def sim_config(self) -> SimConfig:
        return SimConfig(self.params, self.cost, self.T, self.n_reps, self.master_seed, self.tol)


def _coerce_cost(value) -> CostSpec:
    if isinstance(value, (PowerCost, FlatThenPowerCost)):
        return value
    if isinstance(value, str):
        return parse_cost(value)
    if isinstance(value, dict):
        return cost_from_dict(value)
    raise ConfigError(f"cannot interpret cost {value!r}")


def build_config(args: argparse.Namespace, env=None) -> RunConfig:
    """Merge defaults < config file < CAREER_LAB_SEED (seed only) < flags, then validate."""
    env = os.environ if env is None else env
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    if env.get(SEED_ENV):
        merged["master_seed"] = env[SEED_ENV]
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    try:
        params = ModelParams(
            m1=float(merged["m1"]),
            h1=float(merged["h1"]),
            h_eps=float(merged["h_eps"]),
            h_delta=parse_precision(merged["h_delta"]),
            beta=float(merged["beta"]),
        )
        cost = _coerce_cost(merged["cost"])
        tol = float(merged["tol"])
        T = int(merged["T"])
        n_reps = int(merged["n_reps"])
        seed = int(merged["master_seed"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CareerLabError):
            raise
        raise ConfigError(f"invalid config value: {exc}") from None
    validate_params(params, cost)
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    if T < 1:
        raise ConfigError(f"T must be at least 1, got {T}")
    if n_reps < 1:
        raise ConfigError(f"n_reps must be at least 1, got {n_reps}")
    return RunConfig(params, cost, tol, T, n_reps, seed)


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _divergent_message():
    return "divergent regime: beta = 1 with h_delta = inf makes the marginal benefit of effort infinite"


# ---------------------------------------------------------------------------
# commands


def cmd_path(args, cfg: RunConfig) -> int:
    eq = equilibrium_path(cfg.params, cfg.cost, cfg.T, cfg.tol)
    with _output(args.out) as fh:
        io.write_csv(fh, eq.HEADER, eq.rows())
    return EXIT_OK


def cmd_steady(args, cfg: RunConfig) -> int:
    ss = steady_state(cfg.params)
    out = {
        "mu_star": ss.mu_star,
        "h_star": ss.h_star,
        "gamma": steady_state_gamma(ss.mu_star, cfg.params.beta),
        "a_star": steady_state_effort(cfg.params, cfg.cost),
    }
    with _output(args.out) as fh:
        fh.write(io.dump_json(out))
    return EXIT_OK


ERRATA_HEADER = ("t", "gamma_corrected", "gamma_h10", "gamma_h21", "diff_h10", "ratio_h21")


def cmd_errata(args, cfg: RunConfig) -> int:
    p = cfg.params
    if p.beta >= 1.0:
        raise ConfigError("errata comparison requires beta < 1")
    if args.variants is None:
        variants = {"h10", "h21"} if p.persistent_type else {"h21"}
    else:
        variants = {v.strip() for v in args.variants.split(",") if v.strip()}
        if variants - {"h10", "h21"}:
            raise ConfigError(f"unknown variants {sorted(variants - {'h10', 'h21'})}")
    eq = equilibrium_path(p, cfg.cost, cfg.T, cfg.tol)
    rows = []
    for t in range(1, cfg.T + 1):
        g = eq.gamma_seq[t - 1]
        g10 = marginal_benefit_erratum(FocVariant.H10_AS_PUBLISHED, t, eq.path, p.beta, cfg.tol) if "h10" in variants else None
        g21 = marginal_benefit_erratum(FocVariant.H21_AS_PUBLISHED, t, eq.path, p.beta, cfg.tol) if "h21" in variants else None
        diff = None if g10 is None else g10 - g
        ratio = None if g21 is None else (g21 / g if g != 0.0 else float("nan"))
        rows.append((t, g, g10, g21, diff, ratio))
    with _output(args.out) as fh:
        io.write_csv(fh, ERRATA_HEADER, rows)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    variant = FocVariant(args.solver_variant)
    report = run_verification(cfg.sim_config(), workers=args.workers, solver_variant=variant)
    with _output(args.out) as fh:
        fh.write(io.dump_json(report))
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


SWEEP_HEADERS = {
    "r": ("r", "mu_star", "gamma", "a_star"),
    "beta": ("beta", "mu_star", "gamma", "a_star"),
    "mu1": ("mu1", "gamma"),
}


def _sweep_values(args):
    if args.grid:
        try:
            start, stop, num = args.grid.split(":")
            return [float(x) for x in np.linspace(float(start), float(stop), int(num))]
        except ValueError:
            raise ConfigError(f"--grid expects start:stop:num, got {args.grid!r}") from None
    text = args.values or ""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--values expects comma-separated numbers, got {text!r}") from None


def cmd_sweep(args, cfg: RunConfig) -> int:
    var = args.var
    if var not in SWEEP_HEADERS:
        raise ConfigError(f"unknown sweep variable {var!r}; choose from r, beta, mu1")
    values = _sweep_values(args)
    p = cfg.params
    header = SWEEP_HEADERS[var]
    rows = []
    if var == "r":
        if p.beta >= 1.0:
            raise ConfigError("r sweep requires beta < 1")
        for r in values:
            pt = persistence_point(p.beta, cfg.cost, r)
            rows.append((r, pt.mu_star, pt.gamma, pt.a_star))
    elif var == "beta":
        if p.persistent_type:
            raise ConfigError("beta sweep needs finite h_delta (a steady state)")
        for b in values:
            if not 0.0 <= b <= 1.0:
                raise ConfigError(f"beta values must lie in [0, 1], got {b}")
            pt = persistence_point(b, cfg.cost, p.r)
            rows.append((b, pt.mu_star, pt.gamma, pt.a_star))
    else:
        if values:
            scan = monotonicity_scan(p.beta, p.r, values, min(cfg.tol, 1e-12))
            rows = list(scan.rows())
    with _output(args.out) as fh:
        io.write_csv(fh, header, rows)
    if args.svg:
        y_name = args.y or header[-1]
        if y_name not in header[1:]:
            raise ConfigError(f"--y must be one of {header[1:]}")
        j = header.index(y_name)
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(io.svg_line_chart([r[0] for r in rows], [r[j] for r in rows], x_label=var, y_label=y_name))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--m1", type=float)
    p.add_argument("--h1", type=float)
    p.add_argument("--h-eps", dest="h_eps", type=float)
    p.add_argument("--h-delta", dest="h_delta", help="positive number or 'inf'")
    p.add_argument("--beta", type=float)
    p.add_argument("--cost", help="power:c:p or flat_then_power:k:c:p")
    p.add_argument("--tol", type=float)
    p.add_argument("--T", "-T", dest="T", type=int)
    p.add_argument("--n-reps", dest="n_reps", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--out", "-o", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="career-lab", description="Equilibrium lab for the Gaussian career-concerns model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("path", help="equilibrium marginal benefits and efforts as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("steady", help="steady-state quadruple as JSON")
    _add_common(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("errata", help="corrected vs published marginal benefits as CSV")
    _add_common(p)
    p.add_argument("--variants", help="comma list from h10,h21")
    p.set_defaults(func=cmd_errata)

    p = sub.add_parser("verify", help="run the verification suite, JSON report")
    _add_common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--solver-variant", default="corrected", choices=[v.value for v in FocVariant], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="parameter sweep as CSV, optional SVG chart")
    _add_common(p)
    p.add_argument("--var", required=True, help="r, beta or mu1")
    p.add_argument("--values", help="comma-separated sweep points")
    p.add_argument("--grid", help="start:stop:num evenly spaced points")
    p.add_argument("--svg", help="write a line chart to this path")
    p.add_argument("--y", help="output column to plot")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except DivergentSeries:
        print(f"error: {_divergent_message()}", file=sys.stderr)
        return EXIT_DIVERGENT
    except InvalidModel as exc:
        for e in exc.errors:
            print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CareerLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
