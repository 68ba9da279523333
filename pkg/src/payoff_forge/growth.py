"""Growth-optimal (Kelly) accounting: payoffs, allocations, and cost.

Payoffs are return multiples per unit of invested capital against the
normalized market, so the riskless line sits exactly at 1 and a fairly
priced product satisfies sum(F * m) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, InvalidInputError
from .market import Distribution, Mesh, Role, SecurityQuotes, _readonly

# A payoff is budget-normalized when its cost is within this of unit capital.
BUDGET_TOL = 1e-10
# payoff_to_allocation absorbs solver round-off up to here, then errors.
ALLOCATION_COST_TOL = 1e-8


@dataclass(frozen=True)
class PayoffCurve:
    """Strictly positive per-bucket payoff values."""

    mesh: Mesh
    values: np.ndarray

    def __init__(self, mesh: Mesh, values):
        values = _readonly(values)
        if values.shape != (mesh.n_buckets,):
            raise InvalidInputError(
                f"expected {mesh.n_buckets} payoff values, got {values.size}"
            )
        bad = np.nonzero(~np.isfinite(values) | (values <= 0.0))[0]
        if bad.size:
            raise InvalidInputError(
                f"payoff value for bucket {int(bad[0])} is not a positive finite number"
            )
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "values", values)

    def cost(self, market: Distribution) -> float:
        return payoff_cost(self, market)

    def is_budget_normalized(self, market: Distribution, tol: float = BUDGET_TOL) -> bool:
        return abs(self.cost(market) - 1.0) <= tol


@dataclass(frozen=True)
class OverlayCurve:
    """Signed per-bucket overlay; a zero-cost product is funded as 1 + overlay."""

    mesh: Mesh
    values: np.ndarray

    def __init__(self, mesh: Mesh, values):
        values = _readonly(values)
        if values.shape != (mesh.n_buckets,):
            raise InvalidInputError(
                f"expected {mesh.n_buckets} overlay values, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("overlay values must be finite")
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "values", values)

    def funded(self) -> PayoffCurve:
        """Convert to a funded payoff (1 + overlay); requires positivity."""
        funded = 1.0 + self.values
        if np.any(funded <= 0.0):
            k = int(np.argmin(funded))
            raise InvalidInputError(
                f"funded payoff non-positive at bucket {k} (overlay {self.values[k]!r})"
            )
        return PayoffCurve(self.mesh, funded)


def growth_optimal_payoff(belief: Distribution, market: Distribution) -> PayoffCurve:
    """Payoff of the growth-optimizing investor: belief over market, per bucket.

    The result is budget-normalized by construction since the belief sums to one.
    """
    belief.mesh.require_same(market.mesh, "belief and market")
    return PayoffCurve(belief.mesh, belief.weights / market.weights)


def allocation_to_payoff(allocation: Distribution, quotes: SecurityQuotes) -> PayoffCurve:
    """Payoff bought by splitting unit capital across the binary securities."""
    allocation.mesh.require_same(quotes.mesh, "allocation and quotes")
    return PayoffCurve(allocation.mesh, allocation.weights * quotes.returns)


def payoff_to_allocation(payoff: PayoffCurve, market: Distribution) -> Distribution:
    """Capital split that replicates `payoff` against the normalized market.

    Requires the payoff cost to be within 1e-8 of unit capital; the small
    residual is renormalized away rather than silently accepted at any size.
    """
    payoff.mesh.require_same(market.mesh, "payoff and market")
    beta = payoff.values * market.weights
    cost = float(beta.sum())
    if abs(cost - 1.0) > ALLOCATION_COST_TOL:
        raise BudgetError(cost)
    return Distribution(payoff.mesh, beta / cost, Role.ALLOCATION)


def payoff_cost(payoff: PayoffCurve, market: Distribution) -> float:
    """Upfront cost of the payoff in units of invested capital."""
    payoff.mesh.require_same(market.mesh, "payoff and market")
    return float(np.dot(payoff.values, market.weights))
