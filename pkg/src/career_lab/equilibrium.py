"""Marginal benefit of effort, FOC inversion and equilibrium effort paths.

Every infinite series here is truncated with a certified tail bound. All
series share the structure term_{s+1} = term_s * beta * mu_s (or mu_{s+1}),
and mu_t is monotone in t with known limit, so after any term the tail is
bounded by term * q / (1 - q) with q = beta * max(current mu, limiting mu).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .beliefs import PrecisionPath, mu_limit, mu_of, precision_path, steady_state
from .errors import DivergentSeries, NotDivergentRegime, VariantRequiresPersistentType
from .model import CostSpec, ModelParams, marginal_cost_inverse


class FocVariant(enum.Enum):
    CORRECTED = "corrected"
    H10_AS_PUBLISHED = "h10"
    H21_AS_PUBLISHED = "h21"


class SeriesValue(NamedTuple):
    gamma: float
    tail_bound: float
    terms_used: int


def certified_sum(terms: Iterator[tuple], tol: float) -> SeriesValue:
    """Sum (term, q) pairs until term * q / (1 - q) drops below ``tol``.

    ``q`` must bound every later term-to-term ratio and be < 1.
    """
    total = 0.0
    n = 0
    for term, q in terms:
        total += term
        n += 1
        tail = term * q / (1.0 - q)
        if tail < tol:
            return SeriesValue(total, tail, n)
    raise AssertionError("series generator exhausted")  # pragma: no cover


def _check_regime(path: PrecisionPath, beta: float, tol: float):
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if beta == 1.0 and path.params.persistent_type:
        raise DivergentSeries(
            "marginal benefit diverges for beta = 1 with h_delta = inf; no finite effort solves the FOC"
        )


def _h_form_terms(t, path, beta):
    he = path.params.h_eps
    mu_lim = mu_limit(path.params)
    hs = path.iter_h(t)
    h_prev = next(hs)
    disc = prod = 1.0
    while True:
        # s = index of the current term; prod = prod_{j=t}^{s-2} h_{j+1} / (h_j + h_eps)
        disc *= beta
        term = disc * he / (h_prev + he) * prod
        h_s = next(hs)
        yield term, beta * max(mu_of(h_s, he), mu_lim)
        prod *= h_s / (h_prev + he)
        h_prev = h_s


def _mu_form_terms(t, path, beta, *, through_s=False):
    """(1 - mu_t) * beta^{s-t} * prod_{i=t+1}^{s-1} mu_i, or up to s when ``through_s``."""
    he = path.params.h_eps
    mu_lim = mu_limit(path.params)
    hs = path.iter_h(t + 1)
    coef = 1.0 - path.mu(t)
    if through_s:
        mu_next = mu_of(next(hs), he)
        coef *= mu_next
    while True:
        coef *= beta
        mu_next = mu_of(next(hs), he)
        yield coef, beta * max(mu_next, mu_lim)
        coef *= mu_next


def _h10_terms(t, path, beta):
    he = path.params.h_eps
    hs = path.iter_h(t)
    disc = 1.0
    for h in hs:
        # ratio of consecutive terms is beta * h_s / h_{s+1} <= beta
        yield disc * he / h, beta
        disc *= beta


def marginal_benefit(t: int, path: PrecisionPath, beta: float, tol: float = 1e-10) -> SeriesValue:
    """Discounted response of all future wages to one unit of effort at ``t``.

    Uses the precision form sum_{s>t} beta^{s-t} h_eps/(h_{s-1}+h_eps)
    prod_{j=t}^{s-2} h_{j+1}/(h_j+h_eps).
    """
    _check_regime(path, beta, tol)
    if beta == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    return certified_sum(_h_form_terms(t, path, beta), tol)


def marginal_benefit_mu_form(t: int, path: PrecisionPath, beta: float, tol: float = 1e-10) -> SeriesValue:
    """Same quantity in weight form (1 - mu_t) sum_{s>t} beta^{s-t} prod_{i=t+1}^{s-1} mu_i."""
    _check_regime(path, beta, tol)
    if beta == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    return certified_sum(_mu_form_terms(t, path, beta), tol)


def _erratum_series(variant: FocVariant, t: int, path: PrecisionPath, beta: float, tol: float) -> SeriesValue:
    variant = FocVariant(variant)
    if variant is FocVariant.CORRECTED:
        return marginal_benefit(t, path, beta, tol)
    if not 0.0 <= beta < 1.0:
        raise ValueError("erratum variants are compared only for beta < 1")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if variant is FocVariant.H10_AS_PUBLISHED:
        if not path.params.persistent_type:
            raise VariantRequiresPersistentType("the H10 formula presumes h_delta = inf")
        return certified_sum(_h10_terms(t, path, beta), tol)
    if beta == 0.0:
        return SeriesValue(0.0, 0.0, 0)
    return certified_sum(_mu_form_terms(t, path, beta, through_s=True), tol)


def marginal_benefit_erratum(
    variant: FocVariant, t: int, path: PrecisionPath, beta: float, tol: float = 1e-10
) -> float:
    """Evaluate a marginal-benefit formula by variant, including the two published errata.

    H10_AS_PUBLISHED starts the sum at s = t (persistent type only);
    H21_AS_PUBLISHED extends the weight product through mu_s.
    """
    return _erratum_series(variant, t, path, beta, tol).gamma


def steady_state_gamma(mu_star: float, beta: float) -> float:
    return beta * (1.0 - mu_star) / (1.0 - beta * mu_star)


def equilibrium_effort(t: int, path: PrecisionPath, params: ModelParams, cost: CostSpec, tol: float = 1e-10) -> float:
    gamma = marginal_benefit(t, path, params.beta, tol).gamma
    return marginal_cost_inverse(cost, gamma)


@dataclass(frozen=True)
class EquilibriumPath:
    path: PrecisionPath
    gamma_seq: tuple
    effort_seq: tuple
    terms_used: tuple
    tail_bounds: tuple

    def __len__(self):
        return len(self.gamma_seq)

    HEADER = ("t", "h_t", "mu_t", "gamma_t", "a_star_t", "terms_used", "tail_bound")

    def rows(self):
        for i in range(len(self.gamma_seq)):
            yield (
                i + 1,
                self.path.h_seq[i],
                self.path.mu_seq[i],
                self.gamma_seq[i],
                self.effort_seq[i],
                self.terms_used[i],
                self.tail_bounds[i],
            )


def equilibrium_path(
    params: ModelParams,
    cost: CostSpec,
    T: int,
    tol: float = 1e-10,
    *,
    variant: FocVariant = FocVariant.CORRECTED,
) -> EquilibriumPath:
    """Marginal benefits and efforts for t = 1..T.

    ``variant`` is a test hook for negative controls; production callers
    leave it at CORRECTED.
    """
    variant = FocVariant(variant)
    path = precision_path(params, T)
    vals = [_erratum_series(variant, t, path, params.beta, tol) for t in range(1, T + 1)]
    gammas = tuple(v.gamma for v in vals)
    efforts = tuple(marginal_cost_inverse(cost, g) for g in gammas)
    return EquilibriumPath(
        path,
        gammas,
        efforts,
        tuple(v.terms_used for v in vals),
        tuple(v.tail_bound for v in vals),
    )


def steady_state_effort(params: ModelParams, cost: CostSpec) -> float:
    ss = steady_state(params)
    return marginal_cost_inverse(cost, steady_state_gamma(ss.mu_star, params.beta))


def divergence_witness(params: ModelParams, bound: float, chunk: int = 1 << 20) -> int:
    """Smallest S with sum_{s=2}^{S} of the t = 1 marginal-benefit terms above ``bound``.

    Only defined in the divergent regime (beta = 1, h_delta = inf), where the
    terms reduce to h_eps / h_s with h_s = h1 + (s - 1) h_eps.
    """
    if not params.divergent_regime:
        raise NotDivergentRegime("divergence witness needs beta = 1 and h_delta = inf")
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    total = 0.0
    start = 2
    while True:
        s = np.arange(start, start + chunk, dtype=np.float64)
        partial = total + np.cumsum(params.h_eps / (params.h1 + (s - 1.0) * params.h_eps))
        hit = np.flatnonzero(partial > bound)
        if hit.size:
            return start + int(hit[0])
        total = float(partial[-1])
        start += chunk
