"""Shared orchestration between the CLI and the HTTP service.

Normalizes the four ways of specifying risk (utility family, per-edge
profile, family dial, maximum acceptable loss) into one solve call and one
diagnostics bundle, so both front ends produce identical numbers.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .formats import ProductSpec, parse_family
from .growth import PayoffCurve, growth_optimal_payoff, payoff_cost
from .market import Distribution
from .preferences import RiskAversionProfile
from .solver import (
    ImpliedRiskAversion,
    SolveSettings,
    calibrate_max_loss,
    implied_risk_aversion,
    one_param_payoff,
    solve_elasticity_profile,
    solve_elasticity_state_agnostic,
)
from .validation import audit_product


@dataclass
class SolveOutcome:
    growth_optimal: PayoffCurve
    payoff: PayoffCurve
    implied: ImpliedRiskAversion
    market: Distribution
    belief: Distribution
    stats: dict
    risk_description: dict
    calibrated_strength: float | None


def settings_from_doc(doc: dict | None) -> SolveSettings:
    if not doc:
        return SolveSettings()
    known = {f.name for f in dataclasses.fields(SolveSettings)}
    unknown = set(doc) - known
    if unknown:
        raise InvalidInputError(f"unknown settings field(s): {', '.join(sorted(unknown))}")
    kwargs = dict(doc)
    if "shooting_bracket" in kwargs:
        bracket = kwargs["shooting_bracket"]
        if not (isinstance(bracket, (list, tuple)) and len(bracket) == 2):
            raise InvalidInputError("shooting_bracket must be a [low, high] pair")
        kwargs["shooting_bracket"] = (float(bracket[0]), float(bracket[1]))
    if "max_iterations" in kwargs:
        kwargs["max_iterations"] = int(kwargs["max_iterations"])
    for key in ("fixed_point_damping", "convergence_tol", "shooting_tol", "oracle_grid_step"):
        if key in kwargs:
            kwargs[key] = float(kwargs[key])
    return SolveSettings(**kwargs)


def settings_to_doc(settings: SolveSettings) -> dict:
    doc = dataclasses.asdict(settings)
    doc["shooting_bracket"] = list(doc["shooting_bracket"])
    return doc


def normalize_risk_request(doc: dict, product: ProductSpec) -> dict:
    """Validate that exactly one risk specification is present and tag its kind."""
    sources = []
    if doc.get("family"):
        sources.append({"kind": "family", "doc": doc["family"]})
    if doc.get("profile_values") is not None:
        sources.append({"kind": "profile", "values": doc["profile_values"]})
    if doc.get("strength") is not None:
        sources.append({"kind": "strength", "strength": float(doc["strength"])})
    if doc.get("max_loss") is not None:
        sources.append({"kind": "max_loss", "floor": float(doc["max_loss"])})
    inline = product.risk_specification()
    if inline is not None and not sources:
        if isinstance(inline, RiskAversionProfile):
            sources.append({"kind": "profile", "values": inline.values})
        else:
            sources.append({"kind": "family", "doc": dict(product.risk_doc)})
    if len(sources) != 1:
        raise InvalidInputError(
            "exactly one risk specification is required "
            "(family, profile, strength dial, max loss, or inline risk_profile); "
            f"got {len(sources)}"
        )
    return sources[0]


def run_solve(
    product: ProductSpec,
    risk: dict,
    settings: SolveSettings,
    allow_gambling: bool = False,
    floor_beliefs: bool = False,
) -> SolveOutcome:
    market = product.market
    belief = product.belief(floor_beliefs)
    reference = growth_optimal_payoff(belief, market)
    stats: dict = {}
    calibrated = None

    kind = risk["kind"]
    if kind == "profile":
        profile = RiskAversionProfile.per_edge(np.asarray(risk["values"], dtype=float))
        payoff = solve_elasticity_profile(
            reference, profile, market, allow_gambling=allow_gambling, stats=stats
        )
        description = {"kind": "profile", "edges": len(profile.values)}
    elif kind == "strength":
        strength = risk["strength"]
        payoff = one_param_payoff(reference, strength)
        stats.update(method="one_param_closed_form")
        description = {"kind": "strength", "strength": strength}
    elif kind == "max_loss":
        floor = risk["floor"]
        calibrated = calibrate_max_loss(reference, floor)
        payoff = one_param_payoff(reference, calibrated)
        stats.update(method="one_param_max_loss")
        description = {"kind": "max_loss", "floor": floor}
    elif kind == "family":
        spec_doc = risk["doc"]
        spec = parse_family(spec_doc) if isinstance(spec_doc, dict) else spec_doc
        payoff = solve_elasticity_state_agnostic(
            reference, spec, market, settings=settings, stats=stats
        )
        description = {"kind": "family", "family": spec.family}
        if spec.param is not None:
            description["parameter"] = spec.param
    else:
        raise InvalidInputError(f"unknown risk specification kind {kind!r}")

    stats["budget_residual"] = abs(payoff_cost(payoff, market) - 1.0)
    implied = implied_risk_aversion(payoff, reference)
    return SolveOutcome(
        growth_optimal=reference,
        payoff=payoff,
        implied=implied,
        market=market,
        belief=belief,
        stats=stats,
        risk_description=description,
        calibrated_strength=calibrated,
    )


def implied_series_doc(implied: ImpliedRiskAversion) -> dict:
    """Wire form of an implied profile: finite numbers plus a marker map.

    Non-finite diagnostics would choke chart libraries, so the numeric array
    stays finite (zero placeholders) and the markers map names the affected
    indices with "inf" or "indeterminate".
    """
    values = []
    markers = {}
    for i, value in enumerate(implied.values):
        if np.isnan(value):
            values.append(0.0)
            markers[str(i)] = "indeterminate"
        elif np.isinf(value):
            values.append(0.0)
            markers[str(i)] = "inf" if value > 0 else "-inf"
        else:
            values.append(float(value))
    return {
        "x": [float(x) for x in implied.edge_positions],
        "values": values,
        "markers": markers,
    }


def solve_manifest(outcome: SolveOutcome, settings: SolveSettings, extra: dict | None = None) -> dict:
    stats = dict(outcome.stats)
    manifest = {
        "method": stats.pop("method", "unknown"),
        "risk": outcome.risk_description,
        "settings": settings_to_doc(settings),
        "residuals": {"budget": stats.pop("budget_residual", 0.0)},
    }
    if "fixed_point_residual" in stats:
        manifest["residuals"]["fixed_point"] = stats.pop("fixed_point_residual")
    iteration_keys = [k for k in ("iterations", "bisection_iterations") if k in stats]
    if iteration_keys:
        manifest["iterations"] = {k: stats.pop(k) for k in iteration_keys}
    if outcome.calibrated_strength is not None:
        manifest["calibrated_strength"] = outcome.calibrated_strength
    if stats:
        manifest["stats"] = stats
    if extra:
        manifest.update(extra)
    return manifest


def validation_summary(outcome: SolveOutcome) -> dict:
    report = audit_product(outcome.payoff, outcome.market, outcome.belief)
    return report.to_doc()
