import math

import pytest
from hypothesis import given, strategies as st

from career_lab.errors import (
    BetaOutOfRange,
    CostParamInvalid,
    InvalidModel,
    NegativeEffort,
    NegativeTarget,
    NonPositivePrecision,
)
from career_lab.model import (
    INF,
    FlatThenPowerCost,
    ModelParams,
    PowerCost,
    cost,
    cost_from_dict,
    marginal_cost,
    marginal_cost_inverse,
    parse_cost,
    parse_precision,
    validate_params,
)

QUAD = PowerCost(1.0, 2.0)
FLAT = FlatThenPowerCost(1.0, 1.0, 2.0)
COSTS = [QUAD, PowerCost(2.0, 3.0), PowerCost(0.5, 1.5), FLAT, FlatThenPowerCost(0.3, 2.0, 2.5)]


def test_validate_ok():
    vm = validate_params(ModelParams(0.0, 1.0, 1.0, INF, 0.9), QUAD)
    assert not vm.divergent_regime


def test_validate_negative_precision():
    with pytest.raises(InvalidModel) as exc:
        validate_params(ModelParams(h1=-1.0), QUAD)
    assert any(isinstance(e, NonPositivePrecision) for e in exc.value.errors)


def test_validate_lists_every_violation():
    with pytest.raises(InvalidModel) as exc:
        validate_params(ModelParams(h1=0.0, h_eps=-2.0, h_delta=-1.0, beta=1.5), PowerCost(-1.0, 1.0))
    kinds = [type(e) for e in exc.value.errors]
    assert kinds.count(NonPositivePrecision) == 3
    assert kinds.count(BetaOutOfRange) == 1
    assert kinds.count(CostParamInvalid) == 2


def test_divergent_regime_flagged_but_valid():
    vm = validate_params(ModelParams(beta=1.0, h_delta=INF), QUAD)
    assert vm.divergent_regime
    assert not validate_params(ModelParams(beta=1.0, h_delta=2.0), QUAD).divergent_regime


def test_power_exponent_one_rejected():
    with pytest.raises(InvalidModel):
        validate_params(ModelParams(), PowerCost(1.0, 1.0))


@pytest.mark.parametrize("text", ["inf", "INF", " Infinity ", math.inf, INF])
def test_parse_precision_inf(text):
    assert parse_precision(text) is INF


def test_parse_precision_number():
    assert parse_precision("2.5") == 2.5


def test_cost_values():
    assert cost(QUAD, 0.0) == 0.0
    assert cost(QUAD, 2.0) == 2.0
    assert cost(FLAT, 0.5) == 0.0
    assert marginal_cost(QUAD, 0.0) == 0.0
    assert marginal_cost(QUAD, 0.847614) == pytest.approx(0.847614, abs=1e-15)
    assert marginal_cost(FLAT, 1.5) == pytest.approx(0.5, abs=1e-15)


def test_inverse_values():
    assert marginal_cost_inverse(QUAD, 0.0) == 0.0
    assert marginal_cost_inverse(QUAD, 1.0) == 1.0
    assert marginal_cost_inverse(FLAT, 0.0) == 1.0
    assert marginal_cost_inverse(PowerCost(2.0, 3.0), 8.0) == pytest.approx(2.0)


def test_negative_inputs():
    with pytest.raises(NegativeEffort):
        cost(QUAD, -0.1)
    with pytest.raises(NegativeEffort):
        marginal_cost(FLAT, -1.0)
    with pytest.raises(NegativeTarget):
        marginal_cost_inverse(QUAD, -1e-9)


@pytest.mark.parametrize("c", COSTS)
def test_finite_difference_matches_marginal(c):
    eps = 1e-5
    for i in range(1, 51):
        a = i / 10
        if isinstance(c, FlatThenPowerCost) and abs(a - c.k) < eps:
            continue  # g is only C^1 at the kink; see test_finite_difference_at_kink
        fd = (cost(c, a + eps) - cost(c, a - eps)) / (2 * eps)
        assert abs(fd - marginal_cost(c, a)) <= 1e-6


def test_finite_difference_at_kink():
    # straddling the kink, the central difference carries c * eps**(p-1) / (2p) of error
    eps = 1e-5
    for c in (FLAT, FlatThenPowerCost(0.3, 2.0, 2.5)):
        fd = (cost(c, c.k + eps) - cost(c, c.k - eps)) / (2 * eps)
        assert fd - marginal_cost(c, c.k) == pytest.approx(c.c * eps ** (c.p - 1) / (2 * c.p), rel=1e-6)


@pytest.mark.parametrize("c", COSTS)
def test_round_trip(c):
    for y in [1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0]:
        assert abs(marginal_cost(c, marginal_cost_inverse(c, y)) - y) <= 1e-12


@pytest.mark.parametrize("c", COSTS)
@given(a1=st.floats(0, 50), a2=st.floats(0, 50))
def test_monotone_and_convex(c, a1, a2):
    lo, hi = sorted((a1, a2))
    assert cost(c, hi) >= cost(c, lo)
    assert marginal_cost(c, hi) >= marginal_cost(c, lo)


def test_flat_violates_zero_marginal_implies_zero():
    assert marginal_cost(FLAT, 0.7) == 0.0
    assert marginal_cost(QUAD, 0.7) > 0.0


def test_cost_serialization_round_trip():
    for c in COSTS:
        assert cost_from_dict(c.to_dict()) == c
    assert parse_cost("power:1:2") == QUAD
    assert parse_cost("flat_then_power:1:1:2") == FLAT
    with pytest.raises(CostParamInvalid):
        parse_cost("cubic:1")
    with pytest.raises(CostParamInvalid):
        cost_from_dict({"type": "power", "c": 1})
