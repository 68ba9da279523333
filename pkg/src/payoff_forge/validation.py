"""Rationality and logic audits of proposed payoffs against a growth-optimal reference.

A product that is optimal for some positively risk-averse investor must move
with the growth-optimal payoff edge by edge; if its owner is state-agnostic,
the payoff must additionally be a single-valued function of the reference and
every crossing of the two curves must happen at a single common level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .growth import OverlayCurve, PayoffCurve, growth_optimal_payoff, payoff_cost
from .market import Distribution
from .solver import ImpliedRiskAversion, implied_risk_aversion

DEFAULT_TOL = 1e-6
DEFAULT_FLAT_TOL = 1e-12

CONSISTENT = "consistent-risk-averse"
RISK_LOVING = "risk-loving-segments"
STATE_DEPENDENT = "state-dependent"
OSCILLATING = "irrational-oscillation"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    indices: tuple[int, ...] = ()
    message: str = ""
    data: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status == "fail"


@dataclass(frozen=True)
class ValidationReport:
    """Structured audit outcome plus the implied risk-aversion diagnostic."""

    classification: str
    rational: bool
    checks: tuple[CheckResult, ...]
    implied: ImpliedRiskAversion
    cost: float
    recovered_risk_scale: float | None
    notes: tuple[str, ...]
    input_kind: str  # "payoff" | "overlay"

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_doc(self) -> dict:
        doc = {
            "classification": self.classification,
            "rational": self.rational,
            "input_kind": self.input_kind,
            "cost": self.cost,
            "notes": list(self.notes),
            "checks": [
                {
                    "name": c.name,
                    "status": c.status,
                    "indices": list(c.indices),
                    "message": c.message,
                    "data": dict(c.data),
                }
                for c in self.checks
            ],
        }
        if self.recovered_risk_scale is not None:
            doc["recovered_risk_scale"] = self.recovered_risk_scale
        return doc

    def render_text(self) -> str:
        lines = [
            f"classification: {self.classification}",
            f"rational: {'yes' if self.rational else 'no'}",
            f"cost: {self.cost!r}",
        ]
        for c in self.checks:
            suffix = f" [{', '.join(map(str, c.indices))}]" if c.indices else ""
            message = f" — {c.message}" if c.message else ""
            lines.append(f"  {c.name}: {c.status}{suffix}{message}")
        if self.recovered_risk_scale is not None:
            lines.append(f"recovered risk scale: {self.recovered_risk_scale!r}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def check_comonotonicity(
    payoff: PayoffCurve,
    growth_optimal: PayoffCurve,
    flat_tol: float = DEFAULT_FLAT_TOL,
) -> CheckResult:
    """Both curves must rise and fall together; opposite moves mean negative aversion."""
    payoff.mesh.require_same(growth_optimal.mesh, "payoff and reference")
    dF = np.diff(payoff.values)
    df = np.diff(growth_optimal.values)
    moving_F = np.abs(dF) > flat_tol * float(np.max(payoff.values))
    moving_f = np.abs(df) > flat_tol * float(np.max(growth_optimal.values))
    opposite = (dF * df < 0.0) & moving_F & moving_f
    edges = tuple(int(k) for k in np.nonzero(opposite)[0])
    if edges:
        return CheckResult(
            "comonotonicity",
            "fail",
            indices=edges,
            message=f"payoff moves against the reference on {len(edges)} edge(s)",
        )
    return CheckResult("comonotonicity", "pass")


def check_state_agnostic(
    payoff: PayoffCurve,
    growth_optimal: PayoffCurve,
    tol: float = DEFAULT_TOL,
) -> CheckResult:
    """Buckets with (near-)equal reference values must carry (near-)equal payoffs.

    A pair violating this cannot come from preferences that depend on the
    state only through the payoff level.
    """
    payoff.mesh.require_same(growth_optimal.mesh, "payoff and reference")
    f = growth_optimal.values
    F = payoff.values
    tol_f = tol * float(np.max(f))
    tol_F = tol * float(np.max(F))
    order = np.argsort(f, kind="stable")
    fs, Fs = f[order], F[order]
    start = 0
    for j in range(1, len(fs)):
        while fs[j] - fs[start] > tol_f:
            start += 1
        if start < j:
            window = Fs[start:j]
            lo = int(np.argmin(window)) + start
            hi = int(np.argmax(window)) + start
            for i in (lo, hi):
                if abs(Fs[j] - Fs[i]) > tol_F:
                    pair = (int(order[i]), int(order[j]))
                    gap = float(abs(Fs[j] - Fs[i]))
                    return CheckResult(
                        "state_agnostic",
                        "fail",
                        indices=pair,
                        message=(
                            f"buckets {pair[0]} and {pair[1]} have near-equal reference "
                            f"values but payoffs differing by {gap!r}"
                        ),
                        data={"payoff_gap": gap},
                    )
    return CheckResult("state_agnostic", "pass")


def check_bond_line(
    payoff: PayoffCurve,
    growth_optimal: PayoffCurve,
    tol: float = DEFAULT_TOL,
) -> CheckResult:
    """All transversal crossings of the two curves must sit at one common level.

    Crossing levels are located by linear interpolation in log space, which
    is exact for power-law relations but biased O(step^2) otherwise, so each
    level carries an uncertainty band of that size; two crossings disagree
    only when their bands cannot be reconciled. Identical curves and
    tangential touches are inconclusive: the property concerns genuine
    sign-changing intersections.
    """
    payoff.mesh.require_same(growth_optimal.mesh, "payoff and reference")
    log_F = np.log(payoff.values)
    log_f = np.log(growth_optimal.values)
    log_gap = log_F - log_f
    touching = np.abs(log_gap) <= tol
    if np.all(touching):
        return CheckResult(
            "bond_line", "inconclusive", message="curves are identical within tolerance"
        )
    levels: list[float] = []
    bands: list[float] = []
    sign = np.where(touching, 0.0, np.sign(log_gap))

    def edge_band(level: float, k: int) -> float:
        step = max(abs(log_f[k + 1] - log_f[k]), abs(log_F[k + 1] - log_F[k]))
        return 0.5 * level * step * step

    for k in range(len(sign) - 1):
        if sign[k] * sign[k + 1] < 0.0:
            t = log_gap[k] / (log_gap[k] - log_gap[k + 1])
            level = float(np.exp(log_F[k] + t * (log_F[k + 1] - log_F[k])))
            levels.append(level)
            bands.append(edge_band(level, k))
    # A touch bucket is a crossing if the curves change side around it.
    tangency = False
    for lo, hi in _runs(touching):
        left = sign[lo - 1] if lo > 0 else 0.0
        right = sign[hi] if hi < len(sign) else 0.0
        if left * right < 0.0:
            level = float(np.exp(np.mean(log_F[lo:hi])))
            levels.append(level)
            bands.append(edge_band(level, max(lo - 1, 0)))
        elif left * right > 0.0:
            tangency = True
    if not levels:
        message = "only tangential contact" if tangency else "curves never intersect"
        return CheckResult("bond_line", "inconclusive", message=message)
    worst = 0.0
    for i in range(len(levels)):
        for j in range(i + 1, len(levels)):
            gap = abs(levels[i] - levels[j]) - (bands[i] + bands[j])
            worst = max(worst, gap)
    if worst > tol * max(levels):
        return CheckResult(
            "bond_line",
            "fail",
            message=(
                f"crossings at distinct levels {min(levels)!r} and {max(levels)!r}"
            ),
            data={"levels": sorted(levels)},
        )
    common = float(np.median(levels))
    return CheckResult(
        "bond_line",
        "pass",
        message=f"common crossing level {common!r}",
        data={"level": common},
    )


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs


def audit_product(
    product: PayoffCurve | OverlayCurve,
    market: Distribution,
    belief: Distribution,
    tol: float = DEFAULT_TOL,
    flat_tol: float = DEFAULT_FLAT_TOL,
) -> ValidationReport:
    """Full audit of a proposed product through growth-optimizing eyes.

    Overlays are funded to 1 + overlay first (positivity required). The audit
    runs the implied risk-aversion diagnostic, the co-monotonicity,
    state-agnostic, and bond-line checks, and a budget check, then classifies
    the product. A product is `rational` when nothing contradicts positive
    risk aversion: no opposite-moving edges and an in-budget cost.
    State-dependence is reported but is a kind, not a defect.
    """
    input_kind = "payoff"
    if isinstance(product, OverlayCurve):
        input_kind = "overlay"
        payoff = product.funded()
    else:
        payoff = product
    payoff.mesh.require_same(market.mesh, "product and market")
    reference = growth_optimal_payoff(belief, market)

    cost = payoff_cost(payoff, market)
    budget = CheckResult(
        "budget",
        "pass" if abs(cost - 1.0) <= tol else "fail",
        message=f"cost {cost!r}",
        data={"cost": cost},
    )
    comono = check_comonotonicity(payoff, reference, flat_tol=flat_tol)
    agnostic = check_state_agnostic(payoff, reference, tol=tol)
    bond = check_bond_line(payoff, reference, tol=tol)
    implied = implied_risk_aversion(payoff, reference)

    finite = implied.finite_values
    has_negative = bool(np.any(finite < 0.0))
    crossings = int(np.sum(np.diff(np.sign(finite - 1.0)) != 0)) if finite.size > 1 else 0
    if has_negative:
        classification = OSCILLATING if crossings >= 2 else RISK_LOVING
    elif agnostic.failed or bond.failed:
        classification = STATE_DEPENDENT
    else:
        classification = CONSISTENT

    notes = []
    if float(np.max(np.abs(payoff.values - 1.0))) <= tol:
        notes.append("product is the bond: constant unit payoff")
    recovered = _recover_affine_scale(payoff.values, reference.values, tol)
    if recovered is not None:
        notes.append("payoff is affine in the growth-optimal reference")

    rational = not comono.failed and not budget.failed and not has_negative
    return ValidationReport(
        classification=classification,
        rational=rational,
        checks=(budget, comono, agnostic, bond),
        implied=implied,
        cost=cost,
        recovered_risk_scale=recovered,
        notes=tuple(notes),
        input_kind=input_kind,
    )


def _recover_affine_scale(F: np.ndarray, f: np.ndarray, tol: float) -> float | None:
    """Recover the family dial when payoff - 1 is proportional to reference - 1."""
    df = f - 1.0
    dF = F - 1.0
    scale = float(np.max(np.abs(df)))
    if scale == 0.0:
        return None
    significant = np.abs(df) > tol * scale
    if not np.any(significant):
        return None
    if np.any(np.abs(dF[significant]) <= tol * tol * scale):
        return None  # reference moves where the payoff is pinned: not affine
    estimates = df[significant] / dF[significant]
    center = float(np.median(estimates))
    if center <= 0.0:
        return None
    if float(np.max(np.abs(estimates - center))) > tol * abs(center):
        return None
    # Off-family buckets (the insignificant ones) must still sit on the line.
    residual = np.abs(dF - df / center)
    if float(np.max(residual)) > tol * max(1.0, float(np.max(np.abs(dF)))):
        return None
    return center
