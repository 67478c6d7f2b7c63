"""Trading-band policies under proportional transaction costs.

Computes no-trade bands for a long-run mean-variance investor: the
exactly optimal band from a free-boundary problem, the band implied by
a fictitious frictionless shadow market, and a one-parameter family of
asymptotic band recipes.  Long-run mean, variance, and trading costs
of any band follow in closed form from the stationary law of the
risky fraction; a Monte Carlo engine cross-checks them pathwise.
"""

from .model import (
    Band,
    CaseTag,
    InvalidParams,
    MarketParams,
    NumericalError,
    RegimeError,
    band_from_pi,
    merton_fraction,
    pi_to_zeta,
    validate_band,
    zeta_to_pi,
)
from .asymptotics import (
    SeriesExpansion,
    StatsSeries,
    ThetaPolicy,
    k_of_theta,
    kappa,
    kappa_residual,
    optimal_boundaries_asym,
    optimal_boundary_series,
    optimal_esr_asym,
    optimal_stats_asym,
    risk_neutral_boundaries,
    shadow_boundaries_asym,
    shadow_boundary_series,
    shadow_stats_asym,
    theta_boundaries,
    theta_boundary_series,
    theta_esr_asym,
    theta_shift_coefficient,
)
from .shadow_fbp import (
    ShadowDynamics,
    ShadowSolution,
    merton_residual,
    phi,
    phi_prime,
    phi_second,
    shadow_band,
    shadow_g,
    solve_shadow_system,
)
from .optimal_fbp import (
    ValueFunction,
    ode_residual,
    optimal_esr_exact,
    solve_optimal_fbp,
)
from .perf import (
    PolicyStats,
    StationaryDensity,
    avg_transaction_costs,
    esr,
    esr_gap,
    long_run_mean,
    long_run_variance,
    policy_stats,
    stationary_density,
)
from .mc import (
    OccupationHistogram,
    SimConfig,
    SimResult,
    SwapDemoResult,
    simulate_policy,
    swap_demo,
)
from .compare import (
    ComparisonReport,
    ExponentFit,
    FrontierReport,
    FrontierRow,
    GapRow,
    fit_exponent,
    midpoint_shift_coefficient,
    run_frontier,
    run_gap_study,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CaseTag",
    "ComparisonReport",
    "ExponentFit",
    "FrontierReport",
    "FrontierRow",
    "GapRow",
    "InvalidParams",
    "MarketParams",
    "NumericalError",
    "OccupationHistogram",
    "PolicyStats",
    "RegimeError",
    "SeriesExpansion",
    "ShadowDynamics",
    "ShadowSolution",
    "SimConfig",
    "SimResult",
    "StationaryDensity",
    "StatsSeries",
    "SwapDemoResult",
    "ThetaPolicy",
    "ValueFunction",
    "avg_transaction_costs",
    "band_from_pi",
    "esr",
    "esr_gap",
    "fit_exponent",
    "k_of_theta",
    "kappa",
    "kappa_residual",
    "long_run_mean",
    "long_run_variance",
    "merton_fraction",
    "merton_residual",
    "midpoint_shift_coefficient",
    "ode_residual",
    "optimal_boundaries_asym",
    "optimal_boundary_series",
    "optimal_esr_asym",
    "optimal_esr_exact",
    "optimal_stats_asym",
    "pi_to_zeta",
    "phi",
    "phi_prime",
    "phi_second",
    "policy_stats",
    "risk_neutral_boundaries",
    "run_frontier",
    "run_gap_study",
    "shadow_band",
    "shadow_boundaries_asym",
    "shadow_boundary_series",
    "shadow_g",
    "shadow_stats_asym",
    "simulate_policy",
    "solve_optimal_fbp",
    "solve_shadow_system",
    "stationary_density",
    "swap_demo",
    "theta_boundaries",
    "theta_boundary_series",
    "theta_esr_asym",
    "theta_shift_coefficient",
    "validate_band",
    "zeta_to_pi",
]
