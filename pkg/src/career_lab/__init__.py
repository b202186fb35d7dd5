"""Numerical laboratory for the Gaussian career-concerns model."""

from .beliefs import (
    BeliefState,
    PrecisionPath,
    SteadyState,
    impulse_response,
    mean_update,
    mu_step,
    posterior_precision,
    precision_path,
    precision_step,
    steady_state,
)
from .equilibrium import (
    EquilibriumPath,
    FocVariant,
    divergence_witness,
    equilibrium_effort,
    equilibrium_path,
    marginal_benefit,
    marginal_benefit_erratum,
    marginal_benefit_mu_form,
    steady_state_effort,
    steady_state_gamma,
)
from .model import (
    INF,
    FlatThenPowerCost,
    ModelParams,
    PowerCost,
    cost,
    marginal_cost,
    marginal_cost_inverse,
    validate_params,
)
from .statics import (
    b_s,
    gamma_from_b,
    monotonicity_scan,
    persistence_limit_scan,
    transient_identity_residual,
)

__version__ = "0.1.0"
