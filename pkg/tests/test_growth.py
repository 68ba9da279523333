import numpy as np
import pytest

from payoff_forge import (
    BudgetError,
    Distribution,
    MeshMismatchError,
    PayoffCurve,
    Role,
    SecurityQuotes,
    allocation_to_payoff,
    growth_optimal_payoff,
    imply_market_distribution,
    payoff_cost,
    payoff_to_allocation,
)
from conftest import random_pair, unit_mesh


def dist(values, role=Role.BELIEF, mesh=None):
    values = np.asarray(values, dtype=float)
    return Distribution(mesh or unit_mesh(values.size), values, role)


class TestGrowthOptimal:
    def test_no_view_is_the_bond(self):
        m = dist([0.25, 0.35, 0.4], Role.MARKET)
        b = dist([0.25, 0.35, 0.4])
        np.testing.assert_allclose(growth_optimal_payoff(b, m).values, 1.0)

    def test_two_bucket_division(self):
        f = growth_optimal_payoff(dist([0.5, 0.5]), dist([0.25, 0.75], Role.MARKET))
        np.testing.assert_allclose(f.values, [2.0, 2.0 / 3.0])

    def test_budget_identity(self):
        m = dist([0.4, 0.6], Role.MARKET)
        f = growth_optimal_payoff(dist([0.6, 0.4]), m)
        np.testing.assert_allclose(f.values, [1.5, 2.0 / 3.0])
        assert payoff_cost(f, m) == pytest.approx(1.0, abs=1e-15)

    def test_mesh_mismatch(self):
        b = dist([0.5, 0.5])
        m = Distribution(unit_mesh(3), [0.2, 0.3, 0.5], Role.MARKET)
        with pytest.raises(MeshMismatchError):
            growth_optimal_payoff(b, m)


class TestAllocationToPayoff:
    def test_even_split_at_even_prices_is_bond(self):
        quotes = SecurityQuotes(unit_mesh(2), [0.5, 0.5])
        F = allocation_to_payoff(dist([0.5, 0.5], Role.ALLOCATION), quotes)
        np.testing.assert_allclose(F.values, [1.0, 1.0])

    def test_uneven_split(self):
        quotes = SecurityQuotes(unit_mesh(2), [0.5, 0.5])
        F = allocation_to_payoff(dist([0.25, 0.75], Role.ALLOCATION), quotes)
        np.testing.assert_allclose(F.values, [0.5, 1.5])

    def test_belief_weighted_split_recovers_growth_optimal(self, rng):
        mesh, market, belief = random_pair(rng, 6)
        quotes = SecurityQuotes(mesh, market.weights)  # prices sum to one
        F = allocation_to_payoff(
            Distribution(mesh, belief.weights, Role.ALLOCATION), quotes
        )
        f = growth_optimal_payoff(belief, imply_market_distribution(quotes))
        assert np.max(np.abs(F.values - f.values)) <= 1e-12


class TestPayoffToAllocation:
    def test_bond_allocation_is_market(self):
        m = dist([0.3, 0.45, 0.25], Role.MARKET)
        beta = payoff_to_allocation(PayoffCurve(unit_mesh(3), [1.0, 1.0, 1.0]), m)
        np.testing.assert_allclose(beta.weights, m.weights)
        assert beta.role is Role.ALLOCATION

    def test_inverse_of_growth_optimal_example(self):
        m = dist([0.25, 0.75], Role.MARKET)
        beta = payoff_to_allocation(PayoffCurve(unit_mesh(2), [2.0, 2.0 / 3.0]), m)
        np.testing.assert_allclose(beta.weights, [0.5, 0.5])

    def test_budget_violation_reports_cost(self):
        m = dist([0.5, 0.5], Role.MARKET)
        with pytest.raises(BudgetError) as err:
            payoff_to_allocation(PayoffCurve(unit_mesh(2), [2.0, 2.0]), m)
        assert err.value.cost == pytest.approx(2.0)


class TestPayoffCost:
    def test_growth_optimal_costs_one(self, rng):
        mesh, market, belief = random_pair(rng, 9)
        f = growth_optimal_payoff(belief, market)
        assert abs(payoff_cost(f, market) - 1.0) <= 1e-12

    def test_bond_costs_one(self):
        m = dist([0.3, 0.7], Role.MARKET)
        assert payoff_cost(PayoffCurve(unit_mesh(2), [1.0, 1.0]), m) == 1.0

    def test_plain_weighted_sum(self):
        m = dist([0.5, 0.5], Role.MARKET)
        assert payoff_cost(PayoffCurve(unit_mesh(2), [3.0, 1.0]), m) == pytest.approx(2.0)


class TestRoundTrips:
    def test_allocation_round_trip(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 10))
            mesh, market, belief = random_pair(rng, n)
            quotes = SecurityQuotes(mesh, market.weights)
            beta = Distribution(mesh, belief.weights, Role.ALLOCATION)
            back = payoff_to_allocation(
                allocation_to_payoff(beta, quotes), imply_market_distribution(quotes)
            )
            assert np.max(np.abs(back.weights - beta.weights)) <= 1e-12

    def test_bayesian_identity(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 10))
            _, market, belief = random_pair(rng, n)
            beta = payoff_to_allocation(growth_optimal_payoff(belief, market), market)
            assert np.max(np.abs(beta.weights - belief.weights)) <= 1e-12
