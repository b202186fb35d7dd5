"""Transient coefficients b_s, the transient identity and monotonicity scans.

Throughout, the weights mu_2, mu_3, ... are functions of the argument mu_1,
generated by iterating mu' = 1 / (2 + r - mu).
"""

from __future__ import annotations

from dataclasses import dataclass

from .beliefs import mu_star_of, mu_step
from .equilibrium import certified_sum, steady_state_gamma
from .errors import DivergentSeries
from .model import CostSpec, marginal_cost_inverse


def mu_iterates(mu1: float, r: float, n: int) -> list:
    """[mu_1, mu_2, ..., mu_n] with each mu_{i+1} = mu_step(mu_i, r)."""
    out = [mu1]
    for _ in range(n - 1):
        out.append(mu_step(out[-1], r))
    return out


def b_s(mu_t: float, s: int, r: float) -> float:
    """b_s(mu_t) = (1 - mu_t) * mu_{t+1} * ... * mu_{t+s-1}; independent of t."""
    if s < 1:
        raise ValueError(f"s must be at least 1, got {s}")
    mus = mu_iterates(mu_t, r, s)
    out = 1.0 - mu_t
    for m in mus[1:]:
        out *= m
    return out


def b_s_published(mu_t: float, t: int, s: int, r: float) -> float:
    """Earlier definition b_s(mu_t) = (1 - mu_t) * mu_{t+1} * ... * mu_s.

    The product length depends on the position ``t`` of the argument. Kept
    only to exhibit the identity residuals.
    """
    mus = mu_iterates(mu_t, r, s - t + 1)
    out = 1.0 - mu_t
    for m in mus[1:]:
        out *= m
    return out


def transient_identity_residual(mu1: float, s: int, r: float) -> float:
    """b_{s+1}(mu_1) - (1 - mu_1) / (1 + r - mu_1) * b_s(mu_2); zero under the b_s above."""
    mu2 = mu_step(mu1, r)
    return b_s(mu1, s + 1, r) - (1.0 - mu1) / (1.0 + r - mu1) * b_s(mu2, s, r)


def published_identity_residual(mu1: float, s: int, r: float) -> float:
    """Residual of the unrepaired identity b_{s+1}(mu_1) = (1-mu_1)/(1-mu_2) mu_2 b_s(mu_2).

    Uses the position-dependent definition; equals (1-mu_1) mu_2...mu_s (mu_{s+1} - 1).
    """
    mu2 = mu_step(mu1, r)
    lhs = b_s_published(mu1, 1, s + 1, r)
    return lhs - (1.0 - mu1) / (1.0 - mu2) * mu2 * b_s_published(mu2, 2, s, r)


def alternate_repair_residual(mu1: float, s: int, r: float) -> float:
    """Residual of b_{s+1}(mu_1) = (1-mu_1)/(1-mu_2) mu_2 b_{s+1}(mu_2), position-dependent b."""
    mu2 = mu_step(mu1, r)
    lhs = b_s_published(mu1, 1, s + 1, r)
    return lhs - (1.0 - mu1) / (1.0 - mu2) * mu2 * b_s_published(mu2, 2, s + 1, r)


def _b_terms(mu1, beta, r):
    mu_lim = mu_star_of(r) if r > 0 else 1.0
    b = 1.0 - mu1
    disc = beta
    mu = mu1
    while True:
        mu = mu_step(mu, r)
        yield disc * b, beta * max(mu, mu_lim)
        b *= mu
        disc *= beta


def gamma_from_b(mu1: float, beta: float, r: float, tol: float = 1e-10) -> float:
    """gamma_1 = sum_{k>=1} beta^k b_k(mu_1).

    ``r = 0`` (persistent type) is allowed only with beta < 1.
    """
    if beta == 0.0:
        return 0.0
    if beta >= 1.0 and r <= 0.0:
        raise DivergentSeries("gamma diverges for beta = 1 with r = 0")
    return certified_sum(_b_terms(mu1, beta, r), tol).gamma


@dataclass(frozen=True)
class MonotonicityReport:
    grid: tuple
    gammas: tuple
    strictly_decreasing: bool
    worst_adjacent_difference: float

    HEADER = ("mu1", "gamma")

    def rows(self):
        return zip(self.grid, self.gammas)


def monotonicity_scan(beta: float, r: float, grid, tol: float = 1e-12) -> MonotonicityReport:
    """Evaluate gamma_from_b over a strictly increasing grid of mu_1 values.

    ``worst_adjacent_difference`` is max(gamma_{i+1} - gamma_i); negative means
    strictly decreasing. At beta = 0 every gamma is 0 and the flag is false.
    """
    grid = tuple(float(g) for g in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if any(not 0.0 < g < 1.0 for g in grid):
        raise ValueError("grid points must lie in (0, 1)")
    gammas = tuple(gamma_from_b(m, beta, r, tol) for m in grid)
    diffs = [b - a for a, b in zip(gammas, gammas[1:])]
    worst = max(diffs) if diffs else float("nan")
    return MonotonicityReport(grid, gammas, bool(diffs) and worst < 0.0, worst)


@dataclass(frozen=True)
class PersistencePoint:
    r: float
    mu_star: float
    gamma: float
    a_star: float


def persistence_point(beta: float, cost: CostSpec, r: float) -> PersistencePoint:
    mu = mu_star_of(r)
    gamma = steady_state_gamma(mu, beta)
    return PersistencePoint(r, mu, gamma, marginal_cost_inverse(cost, gamma))


def persistence_limit_scan(beta: float, cost: CostSpec, r_seq) -> list:
    """Steady-state effort for each noise-to-shock ratio in ``r_seq``."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("persistence scan requires beta < 1")
    return [persistence_point(beta, cost, r).a_star for r in r_seq]
