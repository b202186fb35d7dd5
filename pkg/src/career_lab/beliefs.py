"""Market belief dynamics: precision recursion, mean updating, steady state."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import NonFiniteSignal, NoSteadyState, PathTooShort
from .model import INF, ModelParams


@dataclass(frozen=True)
class BeliefState:
    m: float
    h: float


def precision_step(h: float, params: ModelParams) -> float:
    """Precision of next period's ability after one signal and one ability shock."""
    hp = h + params.h_eps
    if params.persistent_type:
        return hp
    return hp * params.h_delta / (hp + params.h_delta)


def posterior_precision(h: float, params: ModelParams) -> float:
    """Precision after observing the current output, before the ability shock."""
    return h + params.h_eps


def mu_of(h: float, h_eps: float) -> float:
    return h / (h + h_eps)


def mu_step(mu: float, r: float) -> float:
    """One step of the weight recursion mu' = 1 / (2 + r - mu).

    ``r = 0`` is accepted and corresponds to a persistent type.
    """
    return 1.0 / (2.0 + r - mu)


def mean_update(state: BeliefState, z: float, params: ModelParams) -> BeliefState:
    if not math.isfinite(z):
        raise NonFiniteSignal(f"signal must be a finite real, got {z}")
    h, he = state.h, params.h_eps
    m = (h * state.m + he * z) / (h + he)
    return BeliefState(m, precision_step(h, params))


@dataclass(frozen=True)
class PrecisionPath:
    """Deterministic precisions h_1..h_T and weights mu_t = h_t / (h_t + h_eps).

    Indexing through :meth:`h` and :meth:`mu` is 1-based, like the model's
    time index; both extend past the stored prefix on demand.
    """

    h_seq: tuple
    mu_seq: tuple
    params: ModelParams

    def __len__(self):
        return len(self.h_seq)

    def h(self, t: int) -> float:
        if t <= len(self.h_seq):
            return self.h_seq[t - 1]
        return _h_at(self.params, self.h_seq[-1], len(self.h_seq), t)

    def mu(self, t: int) -> float:
        if t <= len(self.mu_seq):
            return self.mu_seq[t - 1]
        return mu_of(self.h(t), self.params.h_eps)

    def iter_h(self, start: int) -> Iterator[float]:
        """Yield h_start, h_{start+1}, ... without bound."""
        n = len(self.h_seq)
        t = start
        while t <= n:
            yield self.h_seq[t - 1]
            t += 1
        if self.params.persistent_type:
            h1, he = self.params.h1, self.params.h_eps
            while True:
                yield h1 + (t - 1) * he
                t += 1
        h = self.h(t - 1)
        while True:
            h = precision_step(h, self.params)
            yield h

    def rows(self):
        for t, (h, mu) in enumerate(zip(self.h_seq, self.mu_seq), start=1):
            yield t, h, mu


def _h_at(params, h_last, t_last, t):
    if params.persistent_type:
        return params.h1 + (t - 1) * params.h_eps
    h = h_last
    for _ in range(t - t_last):
        h = precision_step(h, params)
    return h


def precision_path(params: ModelParams, T: int) -> PrecisionPath:
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    if params.persistent_type:
        # closed form avoids accumulating rounding over long horizons
        hs = [params.h1 + (t - 1) * params.h_eps for t in range(1, T + 1)]
    else:
        hs = [params.h1]
        for _ in range(T - 1):
            hs.append(precision_step(hs[-1], params))
    mus = [mu_of(h, params.h_eps) for h in hs]
    return PrecisionPath(tuple(hs), tuple(mus), params)


@dataclass(frozen=True)
class SteadyState:
    h_star: float
    mu_star: float
    r: float
    residual: float


def mu_star_of(r: float) -> float:
    """Root in (0, 1) of mu**2 - (2 + r) mu + 1 = 0, in cancellation-free form."""
    return 2.0 / (2.0 + r + math.sqrt(r * (4.0 + r)))


def steady_state(params: ModelParams) -> SteadyState:
    if params.persistent_type:
        raise NoSteadyState("a stationary belief precision requires finite h_delta")
    r = params.r
    root = math.sqrt(r * (4.0 + r))
    mu = 2.0 / (2.0 + r + root)
    # h* = h_eps mu / (1 - mu), with 1 - mu = (r + root) / (2 + r + root)
    h = 2.0 * params.h_eps / (r + root)
    return SteadyState(h, mu, r, abs(precision_step(h, params) - h))


def mu_limit(params: ModelParams) -> float:
    """Limit of mu_t along any path: mu* for finite h_delta, 1 for a persistent type."""
    return 1.0 if params.persistent_type else mu_star_of(params.r)


def impulse_response(t: int, k: int, path: PrecisionPath) -> float:
    """Effect of one extra unit of effort at t on the market mean m_{t+k}."""
    if t < 1 or k < 1:
        raise ValueError("t and k must be positive")
    if t + k - 1 > len(path):
        raise PathTooShort(f"need mu up to period {t + k - 1}, path has {len(path)}")
    out = 1.0 - path.mu_seq[t - 1]
    for i in range(1, k):
        out *= path.mu_seq[t + i - 1]
    return out
