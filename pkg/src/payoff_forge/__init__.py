"""Payoff Forge: structure optimal payoffs from market quotes, views, and risk aversion.

Core objects live on a shared bucket mesh: market and believed distributions,
payoff curves, and risk-aversion profiles. Solvers turn risk aversion into
budget-normalized payoffs; diagnostics run the other way, implying and
auditing risk aversion from existing products.
"""

__version__ = "0.1.0"

from .errors import (
    AccumulationOverflowError,
    BracketError,
    BudgetError,
    InvalidInputError,
    MeshMismatchError,
    MonotonicityError,
    NonConvergenceError,
    ParseError,
    PayoffForgeError,
    RiskLovingInputError,
    SolverError,
)
from .growth import (
    OverlayCurve,
    PayoffCurve,
    allocation_to_payoff,
    growth_optimal_payoff,
    payoff_cost,
    payoff_to_allocation,
)
from .market import (
    Distribution,
    Mesh,
    Role,
    SecurityQuotes,
    ValidationOutcome,
    floor_weights,
    imply_market_distribution,
    quoted_returns,
    validate_distribution,
)
from .preferences import (
    RiskAversionProfile,
    UtilitySpec,
    absolute_from_relative,
    clamp_profile_min,
    log_return_conversion,
    one_param_profile,
    relative_risk_aversion,
)
from .solver import (
    ImpliedRiskAversion,
    SolveSettings,
    brute_force_oracle,
    calibrate_max_loss,
    implied_risk_aversion,
    one_param_payoff,
    relative_elasticity,
    shimko_oracle,
    shimko_payoff,
    solve_elasticity_profile,
    solve_elasticity_state_agnostic,
    solve_fixed_point,
)
from .validation import (
    CheckResult,
    ValidationReport,
    audit_product,
    check_bond_line,
    check_comonotonicity,
    check_state_agnostic,
)

__all__ = [
    "__version__",
    "AccumulationOverflowError",
    "BracketError",
    "BudgetError",
    "CheckResult",
    "Distribution",
    "ImpliedRiskAversion",
    "InvalidInputError",
    "Mesh",
    "MeshMismatchError",
    "MonotonicityError",
    "NonConvergenceError",
    "OverlayCurve",
    "ParseError",
    "PayoffCurve",
    "PayoffForgeError",
    "RiskAversionProfile",
    "RiskLovingInputError",
    "Role",
    "SecurityQuotes",
    "SolveSettings",
    "SolverError",
    "UtilitySpec",
    "ValidationOutcome",
    "ValidationReport",
    "absolute_from_relative",
    "allocation_to_payoff",
    "audit_product",
    "brute_force_oracle",
    "calibrate_max_loss",
    "check_bond_line",
    "check_comonotonicity",
    "check_state_agnostic",
    "clamp_profile_min",
    "floor_weights",
    "growth_optimal_payoff",
    "implied_risk_aversion",
    "imply_market_distribution",
    "log_return_conversion",
    "one_param_payoff",
    "one_param_profile",
    "payoff_cost",
    "payoff_to_allocation",
    "quoted_returns",
    "relative_elasticity",
    "relative_risk_aversion",
    "shimko_oracle",
    "shimko_payoff",
    "solve_elasticity_profile",
    "solve_elasticity_state_agnostic",
    "solve_fixed_point",
    "validate_distribution",
]
