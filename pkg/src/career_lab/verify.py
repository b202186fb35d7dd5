"""End-to-end verification suite combining analytic, deterministic and Monte-Carlo checks."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .beliefs import precision_path
from .equilibrium import (
    FocVariant,
    equilibrium_path,
    marginal_benefit,
    marginal_benefit_mu_form,
)
from .simulation import SimConfig, best_response, filter_calibration, mc_deviation, simulate, wage_consistency
from .statics import gamma_from_b, monotonicity_scan, transient_identity_residual

FOC_PERIODS = (1, 3, 10)
MU_GRID = tuple(i / 100 for i in range(1, 100))


@dataclass
class Check:
    name: str
    passed: bool
    details: dict

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "details": self.details}


def _floats(xs):
    return [float(x) for x in xs]


def run_verification(config: SimConfig, *, workers: int = 1, solver_variant=FocVariant.CORRECTED) -> dict:
    """Run every check and return a JSON-ready report.

    ``solver_variant`` swaps the formula used to build the strategy under test,
    so the suite can be shown to reject the published errata. The report
    contains no timings, so identical inputs give identical reports.
    """
    params, cost, tol = config.params, config.cost, config.tol
    beta = params.beta
    solver = equilibrium_path(params, cost, config.T, tol, variant=solver_variant)
    path = solver.path
    checks = []

    stats = simulate(config, workers=workers, efforts=solver.effort_seq)
    wage_flags = wage_consistency(stats)
    checks.append(Check("wage_consistency", not any(wage_flags), {
        "mean_resid": _floats(stats.mean_resid),
        "se_resid": _floats(stats.se_resid),
        "flagged_periods": [t for t, f in enumerate(wage_flags, 1) if f],
    }))

    cal = filter_calibration(stats)
    checks.append(Check("filter_calibration", not cal.flagged_periods, {
        "var_eta_minus_m": _floats(stats.var_err),
        "theory_var": _floats(stats.theory_var),
        "threshold": cal.threshold,
        "flagged_periods": cal.flagged_periods,
    }))

    # strategy under test vs an independently computed marginal benefit
    ref = [marginal_benefit_mu_form(t, path, beta, tol).gamma for t in range(1, config.T + 1)]
    diffs = [abs(a - b) for a, b in zip(solver.gamma_seq, ref)]
    checks.append(Check("solver_vs_mu_form", max(diffs) <= 2 * tol, {"max_abs_diff": max(diffs)}))
    if not params.persistent_type or beta < 1.0:
        g_b = gamma_from_b(path.mu(1), beta, params.r, tol)
        d = abs(g_b - solver.gamma_seq[0])
        checks.append(Check("solver_vs_b_decomposition", d <= 2 * tol, {"gamma_from_b": g_b, "abs_diff": d}))

    periods = [t for t in FOC_PERIODS if t <= config.T]
    br_details = []
    br_ok = True
    for t in periods:
        rep = best_response(t, path, params, cost, tol, gamma=solver.gamma_seq[t - 1], a_star=solver.effort_seq[t - 1])
        ok = rep.agrees and abs(rep.fd_derivative) <= 1e-6
        br_ok &= ok
        br_details.append({"t": t, "a_star": rep.a_star, "argmax": rep.argmax,
                           "fd_derivative": rep.fd_derivative, "flat_argmax_set": rep.flat_argmax_set})
    checks.append(Check("best_response", br_ok, {"periods": br_details}))

    if beta < 1.0:
        mc_details = []
        mc_ok = True
        for t in periods:
            a_hat = solver.effort_seq[t - 1] + 1.0
            r = mc_deviation(t, a_hat, config, workers=workers)
            g = solver.gamma_seq[t - 1]
            # paired draws make the slope nearly deterministic; allow the horizon truncation
            ok = abs(r.slope - g) <= 3.0 * r.slope_se + tol
            mc_ok &= ok
            mc_details.append({"t": t, "gamma": g, "mc_slope": r.slope, "mc_slope_se": r.slope_se,
                               "horizon": r.horizon, "wage_bound": r.wage_bound})
        checks.append(Check("mc_deviation_slope", mc_ok, {"periods": mc_details}))

    form_diffs = []
    for h1 in (0.1, 1.0, 10.0):
        for t in (1, 5):
            p = precision_path(replace(params, h1=h1), t)
            form_diffs.append(abs(marginal_benefit(t, p, beta, tol).gamma - marginal_benefit_mu_form(t, p, beta, tol).gamma))
    checks.append(Check("form_equivalence", max(form_diffs) <= 2 * tol, {"max_abs_diff": max(form_diffs)}))

    if beta > 0.0:
        scan = monotonicity_scan(beta, params.r, MU_GRID, min(tol, 1e-12))
        checks.append(Check("monotonicity", scan.strictly_decreasing,
                            {"worst_adjacent_difference": scan.worst_adjacent_difference}))

    resid = max(abs(transient_identity_residual(m, s, params.r)) for m in np.linspace(0.05, 0.95, 19) for s in range(1, 21))
    checks.append(Check("transient_identity", resid <= 1e-12, {"max_abs_residual": resid}))

    return {
        "params": params.to_dict(),
        "cost": cost.to_dict(),
        "T": config.T,
        "n_reps": config.n_reps,
        "master_seed": config.master_seed,
        "tol": tol,
        "solver_variant": FocVariant(solver_variant).value,
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
    }
