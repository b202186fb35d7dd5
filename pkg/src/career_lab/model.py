"""Model primitives and the effort-cost families.

The ability-shock precision ``h_delta`` is either a positive float or the
``INF`` tag, which stands for a persistent type (no ability shocks).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .errors import (
    BetaOutOfRange,
    CostParamInvalid,
    InvalidModel,
    NegativeEffort,
    NegativeTarget,
    NonPositivePrecision,
    ParamError,
)


class Infinite(enum.Enum):
    INF = "inf"

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"


INF = Infinite.INF

Precision = Union[float, Infinite]


def parse_precision(value) -> Precision:
    """Map ``"inf"`` (any case) or ``math.inf`` to the ``INF`` tag, else a float."""
    if value is INF:
        return INF
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinite", "infinity"):
            return INF
        value = float(value)
    value = float(value)
    if math.isinf(value) and value > 0:
        return INF
    return value


@dataclass(frozen=True)
class ModelParams:
    m1: float = 0.0
    h1: float = 1.0
    h_eps: float = 1.0
    h_delta: Precision = INF
    beta: float = 0.9

    @property
    def persistent_type(self) -> bool:
        return self.h_delta is INF

    @property
    def r(self) -> float:
        """Noise-to-shock precision ratio h_eps / h_delta (0 for a persistent type)."""
        if self.persistent_type:
            return 0.0
        return self.h_eps / self.h_delta

    @property
    def divergent_regime(self) -> bool:
        return self.beta == 1.0 and self.persistent_type

    def to_dict(self) -> dict:
        return {
            "m1": self.m1,
            "h1": self.h1,
            "h_eps": self.h_eps,
            "h_delta": "inf" if self.persistent_type else self.h_delta,
            "beta": self.beta,
        }


# ---------------------------------------------------------------------------
# cost families


@dataclass(frozen=True)
class PowerCost:
    """g(a) = c * a**p / p.

    ``p`` must exceed 1 so that g'(0) = 0. For p in (1, 2) g' is continuous
    but g'' is unbounded at 0.
    """

    c: float = 1.0
    p: float = 2.0

    def cost(self, a: float) -> float:
        return self.c * a**self.p / self.p

    def marginal(self, a: float) -> float:
        return self.c * a ** (self.p - 1.0)

    def inverse(self, y: float) -> float:
        if y == 0.0:
            return 0.0
        return (y / self.c) ** (1.0 / (self.p - 1.0))

    def to_dict(self) -> dict:
        return {"type": "power", "c": self.c, "p": self.p}


@dataclass(frozen=True)
class FlatThenPowerCost:
    """g(a) = 0 on [0, k] and c * (a - k)**p / p beyond.

    Violates ``g'(a) = 0 => a = 0``: the marginal cost vanishes on all of [0, k].
    """

    k: float = 1.0
    c: float = 1.0
    p: float = 2.0

    def cost(self, a: float) -> float:
        if a <= self.k:
            return 0.0
        return self.c * (a - self.k) ** self.p / self.p

    def marginal(self, a: float) -> float:
        if a <= self.k:
            return 0.0
        return self.c * (a - self.k) ** (self.p - 1.0)

    def inverse(self, y: float) -> float:
        # y = 0 maps to k, the supremum of the zero set of g'
        if y == 0.0:
            return float(self.k)
        return self.k + (y / self.c) ** (1.0 / (self.p - 1.0))

    def to_dict(self) -> dict:
        return {"type": "flat_then_power", "k": self.k, "c": self.c, "p": self.p}


CostSpec = Union[PowerCost, FlatThenPowerCost]


def cost_from_dict(d: dict) -> CostSpec:
    kind = d.get("type")
    try:
        if kind == "power":
            return PowerCost(c=float(d["c"]), p=float(d["p"]))
        if kind == "flat_then_power":
            return FlatThenPowerCost(k=float(d["k"]), c=float(d["c"]), p=float(d["p"]))
    except KeyError as exc:
        raise CostParamInvalid(f"cost of type {kind!r} is missing field {exc.args[0]!r}") from None
    raise CostParamInvalid(f"unknown cost type {kind!r}")


def parse_cost(text: str) -> CostSpec:
    """Parse the compact form ``power:c:p`` or ``flat_then_power:k:c:p``."""
    kind, *nums = text.split(":")
    try:
        vals = [float(x) for x in nums]
    except ValueError:
        raise CostParamInvalid(f"non-numeric cost parameter in {text!r}") from None
    if kind == "power" and len(vals) == 2:
        return PowerCost(*vals)
    if kind == "flat_then_power" and len(vals) == 3:
        return FlatThenPowerCost(*vals)
    raise CostParamInvalid(f"cannot parse cost {text!r}; expected power:c:p or flat_then_power:k:c:p")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidatedModel:
    params: ModelParams
    cost: CostSpec
    divergent_regime: bool


def _cost_errors(c) -> list:
    errs = []
    if not isinstance(c, (PowerCost, FlatThenPowerCost)):
        return [CostParamInvalid(f"unsupported cost object {c!r}")]
    if not (math.isfinite(c.c) and c.c > 0):
        errs.append(CostParamInvalid(f"cost scale c must be positive, got {c.c}"))
    if not (math.isfinite(c.p) and c.p > 1):
        errs.append(CostParamInvalid(f"cost exponent p must exceed 1, got {c.p}"))
    if isinstance(c, FlatThenPowerCost) and not (math.isfinite(c.k) and c.k > 0):
        errs.append(CostParamInvalid(f"flat segment length k must be positive, got {c.k}"))
    return errs


def validate_params(p: ModelParams, c: CostSpec) -> ValidatedModel:
    """Check every constraint and raise ``InvalidModel`` listing all violations.

    beta = 1 with a persistent type is accepted but flagged as the divergent regime.
    """
    errs = []
    if not math.isfinite(p.m1):
        errs.append(ParamError(f"m1 must be finite, got {p.m1}"))
    for name in ("h1", "h_eps"):
        v = getattr(p, name)
        if not (math.isfinite(v) and v > 0):
            errs.append(NonPositivePrecision(f"{name} must be positive and finite, got {v}"))
    if p.h_delta is not INF and not (math.isfinite(p.h_delta) and p.h_delta > 0):
        errs.append(NonPositivePrecision(f"h_delta must be positive or inf, got {p.h_delta}"))
    if not (0.0 <= p.beta <= 1.0):
        errs.append(BetaOutOfRange(f"beta must lie in [0, 1], got {p.beta}"))
    errs.extend(_cost_errors(c))
    if errs:
        raise InvalidModel(errs)
    return ValidatedModel(p, c, p.divergent_regime)


def cost(c: CostSpec, a: float) -> float:
    if a < 0:
        raise NegativeEffort(f"effort must be nonnegative, got {a}")
    return c.cost(a)


def marginal_cost(c: CostSpec, a: float) -> float:
    if a < 0:
        raise NegativeEffort(f"effort must be nonnegative, got {a}")
    return c.marginal(a)


def marginal_cost_inverse(c: CostSpec, y: float) -> float:
    """Smallest a with g'(a) = y, except y = 0 under the flat family returns k."""
    if y < 0:
        raise NegativeTarget(f"marginal-cost target must be nonnegative, got {y}")
    return c.inverse(y)
