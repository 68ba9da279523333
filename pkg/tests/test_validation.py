import math

import numpy as np
import pytest

from payoff_forge import (
    Distribution,
    InvalidInputError,
    OverlayCurve,
    PayoffCurve,
    RiskAversionProfile,
    Role,
    audit_product,
    check_bond_line,
    check_comonotonicity,
    check_state_agnostic,
    growth_optimal_payoff,
    implied_risk_aversion,
    one_param_payoff,
    shimko_payoff,
    solve_elasticity_profile,
    solve_elasticity_state_agnostic,
)
from payoff_forge.fixtures import blended_view_fixture
from conftest import random_pair, random_pair_separated, unit_mesh


def curve(values):
    values = np.asarray(values, dtype=float)
    return PayoffCurve(unit_mesh(values.size), values)


def state_dependent_construction():
    """Payoff with equal reference values in two buckets but unequal payoffs.

    The reference repeats (f[0] == f[2]) while a per-edge profile treats the
    two edges differently, so the integrated payoff cannot be a function of
    the reference alone.
    """
    mesh = unit_mesh(4)
    market = Distribution(mesh, [0.25, 0.25, 0.25, 0.25], Role.MARKET)
    belief = Distribution(mesh, [0.15, 0.35, 0.15, 0.35], Role.BELIEF)
    f = growth_optimal_payoff(belief, market)
    assert f.values[0] == f.values[2]
    profile = RiskAversionProfile.per_edge([1.0, 3.0, 1.0])
    F = solve_elasticity_profile(f, profile, market)
    return mesh, market, belief, f, F


class TestComonotonicity:
    def test_identical_curves_pass(self, rng):
        _, market, belief = random_pair_separated(rng, 8)
        f = growth_optimal_payoff(belief, market)
        assert check_comonotonicity(f, f).status == "pass"

    def test_solver_output_passes(self, rng):
        _, market, belief = random_pair_separated(rng, 8)
        f = growth_optimal_payoff(belief, market)
        F = solve_elasticity_profile(
            f, RiskAversionProfile.per_edge(rng.uniform(0.2, 5.0, 7)), market
        )
        assert check_comonotonicity(F, f).status == "pass"

    def test_opposite_move_fails_with_edge(self):
        f = curve([1.0, 1.2, 1.4])
        F = curve([1.0, 0.9, 1.1])  # falls while the reference rises on edge 0
        result = check_comonotonicity(F, f)
        assert result.status == "fail"
        assert 0 in result.indices

    def test_equivalence_with_negative_implied(self, rng):
        for _ in range(40):
            n = int(rng.integers(3, 9))
            f = curve(rng.uniform(0.3, 3.0, n))
            F = curve(rng.uniform(0.3, 3.0, n))
            passes = check_comonotonicity(F, f).status == "pass"
            implied = implied_risk_aversion(F, f)
            finite = implied.values[np.isfinite(implied.values)]
            assert passes == (not np.any(finite < 0.0))


class TestStateAgnostic:
    def test_function_of_reference_passes(self, rng):
        _, market, belief = random_pair(rng, 9)
        f = growth_optimal_payoff(belief, market)
        scaled = f.values**0.5
        F = PayoffCurve(f.mesh, scaled / np.dot(market.weights, scaled))
        assert check_state_agnostic(F, f).status == "pass"

    def test_state_dependent_payoff_fails_with_pair(self):
        _, _, _, f, F = state_dependent_construction()
        result = check_state_agnostic(F, f)
        assert result.status == "fail"
        assert set(result.indices) == {0, 2}

    def test_constant_curves_pass(self):
        f = curve([1.0, 1.0, 1.0])
        F = curve([1.0, 1.0, 1.0])
        assert check_state_agnostic(F, f).status == "pass"


class TestBondLine:
    def test_identical_curves_inconclusive(self, rng):
        _, market, belief = random_pair_separated(rng, 6)
        f = growth_optimal_payoff(belief, market)
        assert check_bond_line(f, f).status == "inconclusive"

    def test_single_crossing_level(self):
        # Oracle: F = sqrt(f)/Z crosses f where sqrt(f)/Z = f, i.e. f = Z^-2,
        # and the common crossing level is that same value.
        mesh = unit_mesh(5)
        market = Distribution(mesh, np.full(5, 0.2), Role.MARKET)
        f_values = np.array([0.5, 0.8, 1.1, 1.5, 2.0])
        f_values = f_values / np.dot(market.weights, f_values)
        f = PayoffCurve(mesh, f_values)
        scale = float(np.dot(market.weights, f_values**0.5))
        F = PayoffCurve(mesh, f_values**0.5 / scale)
        result = check_bond_line(F, f, tol=1e-6)
        assert result.status == "pass"
        assert result.data["level"] == pytest.approx(scale**-2.0, rel=1e-3)

    def test_two_level_crossing_fails(self):
        # Fine-mesh analogue of the state-dependent construction: the payoff
        # crosses the reference twice, once on the way up through a
        # low-aversion stretch and once on the way down, at clearly
        # different levels. Small steps keep interpolation bands tight.
        steps = np.concatenate(
            [
                np.full(8, 0.08),  # reference rising, unit aversion
                np.full(8, 0.08),  # still rising, aversion 0.5
                np.full(8, -0.08),  # falling, unit aversion
                np.full(8, -0.08),  # falling, aversion 0.5
            ]
        )
        log_f = np.concatenate(([0.0], np.cumsum(steps)))
        n = log_f.size
        mesh = unit_mesh(n)
        market = Distribution(mesh, np.full(n, 1.0 / n), Role.MARKET)
        f_values = np.exp(log_f)
        f = PayoffCurve(mesh, f_values / np.dot(market.weights, f_values))
        profile = RiskAversionProfile.per_edge(
            np.concatenate([np.full(8, 1.0), np.full(8, 0.5), np.full(8, 1.0), np.full(8, 0.5)])
        )
        F = solve_elasticity_profile(f, profile, market)
        result = check_bond_line(F, f, tol=1e-6)
        assert result.status == "fail"
        assert len(result.data["levels"]) >= 2
        spread = max(result.data["levels"]) - min(result.data["levels"])
        assert spread > 0.1


class TestAuditProduct:
    def test_mean_variance_overlay_recovers_scale(self, rng):
        _, market, belief = random_pair_separated(rng, 9)
        overlay = shimko_payoff(belief, market, 2.5)
        report = audit_product(overlay, market, belief)
        assert report.classification == "consistent-risk-averse"
        assert report.rational
        assert report.input_kind == "overlay"
        assert report.recovered_risk_scale == pytest.approx(2.5, abs=1e-10)

    def test_blended_view_fixture_oscillates(self):
        _, market, belief, blended = blended_view_fixture()
        product = growth_optimal_payoff(blended, market)
        report = audit_product(product, market, belief)
        assert report.classification == "irrational-oscillation"
        assert not report.rational
        assert report.check("comonotonicity").status == "fail"
        assert len(report.check("comonotonicity").indices) >= 1
        finite = report.implied.finite_values
        assert np.any(finite < 0.0)
        assert np.sum(np.diff(np.sign(finite - 1.0)) != 0) >= 2

    def test_bond_is_consistent_with_note(self, rng):
        mesh, market, belief = random_pair_separated(rng, 7)
        bond = PayoffCurve(mesh, np.ones(7))
        report = audit_product(bond, market, belief)
        assert report.classification == "consistent-risk-averse"
        assert report.rational
        assert any("bond" in note for note in report.notes)
        assert np.all(np.isinf(report.implied.values))

    def test_state_dependent_classification(self):
        _, market, belief, _, F = state_dependent_construction()
        report = audit_product(F, market, belief)
        assert report.classification == "state-dependent"
        assert report.rational  # state dependence is a kind, not a defect

    def test_solver_outputs_never_risk_loving(self, rng):
        for _ in range(10):
            n = int(rng.integers(4, 12))
            _, market, belief = random_pair_separated(rng, n)
            f = growth_optimal_payoff(belief, market)
            F = solve_elasticity_profile(
                f, RiskAversionProfile.per_edge(rng.uniform(0.3, 6.0, n - 1)), market
            )
            report = audit_product(F, market, belief)
            assert report.classification not in (
                "risk-loving-segments",
                "irrational-oscillation",
            )
            assert report.rational

    def test_state_agnostic_solves_pass_at_tight_tolerance(self, rng):
        _, market, belief = random_pair(rng, 10)
        f = growth_optimal_payoff(belief, market)
        F = solve_elasticity_state_agnostic(
            f, RiskAversionProfile.of_payoff(lambda F: 1.0 + F), market
        )
        assert check_state_agnostic(F, f, tol=1e-8).status == "pass"

    def test_overlay_positivity_enforced(self, rng):
        mesh, market, belief = random_pair(rng, 4)
        overlay = OverlayCurve(mesh, np.array([-1.5, 0.5, 0.5, 0.5]))
        with pytest.raises(InvalidInputError, match="bucket 0"):
            audit_product(overlay, market, belief)

    def test_budget_violation_flagged(self, rng):
        mesh, market, belief = random_pair_separated(rng, 5)
        f = growth_optimal_payoff(belief, market)
        overpriced = PayoffCurve(mesh, 1.5 * f.values)
        report = audit_product(overpriced, market, belief)
        assert report.check("budget").status == "fail"
        assert not report.rational

    def test_report_document_shape(self, rng):
        _, market, belief = random_pair_separated(rng, 6)
        f = growth_optimal_payoff(belief, market)
        report = audit_product(one_param_payoff(f, 2.0), market, belief)
        doc = report.to_doc()
        assert doc["classification"] == "consistent-risk-averse"
        assert {c["name"] for c in doc["checks"]} == {
            "budget",
            "comonotonicity",
            "state_agnostic",
            "bond_line",
        }
        assert doc["recovered_risk_scale"] == pytest.approx(2.0, abs=1e-10)
        text = report.render_text()
        assert "consistent-risk-averse" in text
