"""Monte-Carlo play of the game and deviation oracles for the equilibrium.

Replications are simulated in fixed-size blocks. Each block draws from its
own generator, seeded by (master_seed, block index), so results do not depend
on how blocks are scheduled across workers. Blocks are reassembled in index
order before any aggregation.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .beliefs import PrecisionPath, mu_limit, precision_step
from .equilibrium import equilibrium_path, marginal_benefit
from .errors import TooFewReplications
from .model import INF, CostSpec, FlatThenPowerCost, ModelParams, cost as cost_fn, marginal_cost_inverse

BLOCK_SIZE = 8192
MIN_CALIBRATION_REPS = 10_000
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    cost: CostSpec
    T: int = 10
    n_reps: int = 100_000
    master_seed: int = 0
    tol: float = 1e-10

    def __post_init__(self):
        if self.T < 1 or self.n_reps < 1:
            raise ValueError("T and n_reps must be at least 1")


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed & _SEED_MASK, spawn_key=(block,)))


def _blocks(n_reps):
    return [(b, min(BLOCK_SIZE, n_reps - b * BLOCK_SIZE)) for b in range(math.ceil(n_reps / BLOCK_SIZE))]


def _map_blocks(fn, n_reps, workers):
    jobs = _blocks(n_reps)
    if workers <= 1:
        return [fn(b, n) for b, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


class _Draws:
    """Per-period shocks for one block; drawn lazily in a fixed order."""

    def __init__(self, rng, params, n):
        self.rng, self.params, self.n = rng, params, n
        self.eta1 = params.m1 + rng.standard_normal(n) / math.sqrt(params.h1)

    def period(self):
        p = self.params
        eps = self.rng.standard_normal(self.n) / math.sqrt(p.h_eps)
        if p.h_delta is INF:
            delta = np.zeros(self.n)
        else:
            delta = self.rng.standard_normal(self.n) / math.sqrt(p.h_delta)
        return eps, delta


# ---------------------------------------------------------------------------
# equilibrium play


@dataclass(frozen=True)
class SimStats:
    T: int
    n_reps: int
    mean_resid: tuple
    se_resid: tuple
    mean_err: tuple
    se_err: tuple
    var_err: tuple
    theory_var: tuple

    HEADER = ("t", "mean_resid", "se_resid", "var_eta_minus_m", "theory_var", "flag")

    def rows(self, flags=None):
        flags = flags or (False,) * self.T
        for i in range(self.T):
            yield (i + 1, self.mean_resid[i], self.se_resid[i], self.var_err[i], self.theory_var[i], int(flags[i]))


def _play_block(params, efforts, frozen_precision, master_seed, block, n):
    draws = _Draws(block_rng(master_seed, block), params, n)
    T = len(efforts)
    eta = draws.eta1
    m = np.full(n, float(params.m1))
    h = params.h1
    resid = np.empty((T, n))
    err = np.empty((T, n))
    hs = []
    for t in range(T):
        a = efforts[t]
        eps, delta = draws.period()
        y = eta + a + eps
        resid[t] = y - (m + a)
        err[t] = eta - m
        hs.append(h)
        z = y - a
        m = (h * m + params.h_eps * z) / (h + params.h_eps)
        if not frozen_precision:
            h = precision_step(h, params)
        eta = eta + delta
    return resid, err, hs


def _mean_se(x):
    n = x.shape[1]
    mean = x.mean(axis=1)
    if n == 1:
        return mean, np.zeros_like(mean)
    return mean, x.std(axis=1, ddof=1) / math.sqrt(n)


def simulate(config: SimConfig, *, workers: int = 1, efforts=None, frozen_precision: bool = False) -> SimStats:
    """Play the equilibrium ``n_reps`` times for ``T`` periods.

    ``efforts`` defaults to the equilibrium path. ``frozen_precision`` makes the
    market skip the precision update (negative control for the calibration check).
    """
    params = config.params
    if efforts is None:
        efforts = equilibrium_path(params, config.cost, config.T, config.tol).effort_seq
    efforts = tuple(float(a) for a in efforts[: config.T])
    parts = _map_blocks(
        lambda b, n: _play_block(params, efforts, frozen_precision, config.master_seed, b, n),
        config.n_reps,
        workers,
    )
    resid = np.concatenate([p[0] for p in parts], axis=1)
    err = np.concatenate([p[1] for p in parts], axis=1)
    hs = parts[0][2]
    mr, sr = _mean_se(resid)
    me, se = _mean_se(err)
    ddof = 1 if config.n_reps > 1 else 0
    var = err.var(axis=1, ddof=ddof)
    return SimStats(
        config.T,
        config.n_reps,
        tuple(mr.tolist()),
        tuple(sr.tolist()),
        tuple(me.tolist()),
        tuple(se.tolist()),
        tuple(var.tolist()),
        tuple(1.0 / h for h in hs),
    )


def wage_consistency(stats: SimStats, n_se: float = 3.0) -> list:
    """Per-period flags where mean(y_t - w_t) is further than ``n_se`` standard errors from 0."""
    return [abs(m) > n_se * s for m, s in zip(stats.mean_resid, stats.se_resid)]


@dataclass(frozen=True)
class CalibrationReport:
    flags: tuple
    relative_deviation: tuple
    threshold: float

    @property
    def flagged_periods(self):
        return [t for t, f in enumerate(self.flags, start=1) if f]


def filter_calibration(stats: SimStats, n_rel_se: float = 5.0) -> CalibrationReport:
    """Compare sample Var(eta_t - m_t) with the market's posterior variance 1/h_t.

    The relative standard error of a normal sample variance is sqrt(2/(n-1)).
    """
    if stats.n_reps < MIN_CALIBRATION_REPS:
        raise TooFewReplications(
            f"filter calibration needs at least {MIN_CALIBRATION_REPS} replications, got {stats.n_reps}"
        )
    threshold = n_rel_se * math.sqrt(2.0 / (stats.n_reps - 1))
    rel = tuple(abs(v - tv) / tv for v, tv in zip(stats.var_err, stats.theory_var))
    return CalibrationReport(tuple(d > threshold for d in rel), rel, threshold)


# ---------------------------------------------------------------------------
# deviations


def _objective(a_hat, a_star, gamma, cost):
    return -cost_fn(cost, a_hat) + (a_hat - a_star) * gamma


def deviation_objective(t: int, a_hat: float, path: PrecisionPath, params: ModelParams, cost: CostSpec, tol: float = 1e-10) -> float:
    """The effort-dependent part of the manager's period-t objective: -g(a) + (a - a_t*) gamma_t.

    The current wage, the terms in m_t and the continuation terms do not
    depend on a and are omitted.
    """
    gamma = marginal_benefit(t, path, params.beta, tol).gamma
    return _objective(a_hat, marginal_cost_inverse(cost, gamma), gamma, cost)


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def effort_search_bound(t: int, path: PrecisionPath, params: ModelParams, cost: CostSpec) -> float:
    """Upper end of the effort search interval, from an a-priori bound on gamma_t."""
    beta = params.beta
    if beta < 1.0:
        gamma_max = beta / (1.0 - beta)
    else:
        # beta = 1, finite h_delta: gamma_t <= (1 - mu_t) / (1 - sup_{s>t} mu_s)
        q = max(path.mu(t + 1), mu_limit(params))
        gamma_max = (1.0 - path.mu(t)) / (1.0 - q)
    return marginal_cost_inverse(cost, gamma_max) + 1.0


@dataclass(frozen=True)
class DeviationReport:
    t: int
    a_star: float
    gamma: float
    argmax: float
    fd_derivative: float
    foc_residual: float
    grid_resolution: float
    flat_argmax_set: bool = False
    argmax_set: tuple = field(default=())

    @property
    def agrees(self) -> bool:
        return abs(self.argmax - self.a_star) <= 1e-6

    def to_json(self) -> str:
        d = asdict(self)
        d["argmax_set"] = list(self.argmax_set)
        d["agrees"] = bool(self.agrees)
        return json.dumps(d, sort_keys=True)


def best_response(
    t: int,
    path: PrecisionPath,
    params: ModelParams,
    cost: CostSpec,
    tol: float = 1e-10,
    *,
    gamma: float | None = None,
    a_star: float | None = None,
    n_grid: int = 1000,
    fd_step: float = 1e-5,
) -> DeviationReport:
    """Maximize the deviation objective by grid search plus golden-section refinement.

    ``gamma`` and ``a_star`` default to the corrected solution; passing them
    lets a caller check some other candidate strategy.
    """
    if gamma is None:
        gamma = marginal_benefit(t, path, params.beta, tol).gamma
    if a_star is None:
        a_star = marginal_cost_inverse(cost, gamma)

    def f(a):
        return _objective(a, a_star, gamma, cost)

    hi = effort_search_bound(t, path, params, cost)
    grid = np.linspace(0.0, hi, n_grid)
    vals = np.array([f(a) for a in grid])
    i = int(np.argmax(vals))
    res = float(grid[1] - grid[0])
    if a_star >= fd_step:
        fd = (f(a_star + fd_step) - f(a_star - fd_step)) / (2.0 * fd_step)
    else:
        fd = (f(a_star + fd_step) - f(a_star)) / fd_step
    foc = gamma - cost.marginal(a_star)

    if gamma == 0.0 and isinstance(cost, FlatThenPowerCost):
        # every effort in [0, k] is optimal; report the convention value k
        return DeviationReport(t, a_star, gamma, float(cost.k), fd, foc, res, True, (0.0, float(cost.k)))
    lo, up = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, n_grid - 1)])
    arg = golden_section_max(f, lo, up, 1e-8)
    return DeviationReport(t, a_star, gamma, arg, fd, foc, res)


def wage_bound(params: ModelParams, cost: CostSpec, effort_bound: float) -> float:
    """Heuristic bound on |w_t| used only to pick the Monte-Carlo horizon."""
    h_min = params.h1 if params.persistent_type else min(params.h1, precision_step(params.h1, params))
    return abs(params.m1) + effort_bound + 6.0 / math.sqrt(h_min)


def mc_horizon(beta: float, bound: float, tol: float) -> int:
    """Smallest H with beta^(H+1) / (1 - beta) * bound < tol."""
    if beta == 0.0:
        return 0
    return max(1, math.ceil(math.log(tol * (1.0 - beta) / bound) / math.log(beta) - 1.0))


def _deviation_block(params, efforts, t, a_hat, H, master_seed, block, n):
    """Discounted wage streams after period t, without and with a deviation at t, on common draws."""
    draws = _Draws(block_rng(master_seed, block), params, n)
    beta = params.beta
    eta = draws.eta1
    m_base = np.full(n, float(params.m1))
    m_dev = m_base.copy()
    h = params.h1
    acc_base = np.zeros(n)
    acc_dev = np.zeros(n)
    for tau in range(1, t + H + 1):
        a = efforts[tau - 1]
        if tau > t:
            w = beta ** (tau - t)
            acc_base += w * (m_base + a)
            acc_dev += w * (m_dev + a)
        eps, delta = draws.period()
        noise = eta + eps
        # market de-biases by the conjectured a_tau*; only the played effort differs
        z_base = noise
        z_dev = noise + (a_hat - a if tau == t else 0.0)
        k = params.h_eps / (h + params.h_eps)
        m_base = m_base + k * (z_base - m_base)
        m_dev = m_dev + k * (z_dev - m_dev)
        h = precision_step(h, params)
        eta = eta + delta
    return acc_base, acc_dev


@dataclass(frozen=True)
class MCDeviation:
    t: int
    a_hat: float
    a_star: float
    horizon: int
    wage_bound: float
    value: float
    se: float
    baseline: float
    baseline_se: float
    slope: float
    slope_se: float


def mc_deviation(t: int, a_hat: float, config: SimConfig, tol: float | None = None, *, workers: int = 1) -> MCDeviation:
    """Monte-Carlo discounted future wages when the manager plays ``a_hat`` at ``t``.

    The equilibrium run uses the same draws, so ``slope`` (value difference per
    unit of deviation) has the paired standard error ``slope_se``.
    """
    params = config.params
    tol = config.tol if tol is None else tol
    beta = params.beta
    if beta >= 1.0:
        raise ValueError("Monte-Carlo deviation values require beta < 1")
    eq_short = equilibrium_path(params, config.cost, t, config.tol)
    a_star = eq_short.effort_seq[t - 1]
    if beta == 0.0:
        return MCDeviation(t, a_hat, a_star, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    bound = wage_bound(params, config.cost, marginal_cost_inverse(config.cost, beta / (1.0 - beta)) + 1.0)
    H = mc_horizon(beta, bound, tol)
    efforts = equilibrium_path(params, config.cost, t + H, config.tol).effort_seq
    parts = _map_blocks(
        lambda b, n: _deviation_block(params, efforts, t, a_hat, H, config.master_seed, b, n),
        config.n_reps,
        workers,
    )
    base = np.concatenate([p[0] for p in parts])
    dev = np.concatenate([p[1] for p in parts])
    n = base.size

    def mean_se(x):
        return float(x.mean()), (float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0)

    v, v_se = mean_se(dev)
    b, b_se = mean_se(base)
    delta = a_hat - a_star
    if delta == 0.0:
        slope = slope_se = 0.0
    else:
        slope, slope_se = mean_se((dev - base) / delta)
    return MCDeviation(t, a_hat, a_star, H, bound, v, v_se, b, b_se, slope, slope_se)


def mc_deviation_value(t: int, a_hat: float, config: SimConfig, tol: float | None = None, *, workers: int = 1):
    """(value, standard error) of the discounted future wage stream after deviating to ``a_hat``."""
    r = mc_deviation(t, a_hat, config, tol, workers=workers)
    return r.value, r.se
