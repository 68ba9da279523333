"""Forward and inverse payoff-elasticity solves plus independent oracles.

The engine's native object is the per-edge log recurrence
``ln(F[k+1]/F[k]) = ln(f[k+1]/f[k]) / R`` linking an optimal payoff F to the
growth-optimal payoff f through relative risk aversion R. Three routes are
provided and cross-checked:

* a closed-form accumulation when R is given per mesh edge,
* a state-agnostic solve when R is a function of the payoff level (run
  through the monotone transform ``phi(v) = integral of R(e^s) ds``, under
  which the recurrence telescopes exactly and the budget becomes a scalar
  root-find),
* a damped fixed-point iteration on the allocation itself.

Brute-force expected-utility maximization and a mean-variance overlay
stationarity solve act as independent desk-scale oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .errors import (
    AccumulationOverflowError,
    BracketError,
    InvalidInputError,
    MonotonicityError,
    NonConvergenceError,
    RiskLovingInputError,
)
from .growth import PayoffCurve, OverlayCurve
from .market import Distribution, Mesh, Role, SecurityQuotes, _readonly
from .preferences import RiskAversionProfile, UtilitySpec

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_PANEL_WIDTH = 0.25
_PANEL_MIN_WIDTH = 1e-12
_LOG_PAYOFF_LIMIT = 700.0  # exp() stays finite inside this
_VALUE_CHUNK = 65536


@dataclass(frozen=True)
class SolveSettings:
    """Numerical knobs shared by the solvers."""

    fixed_point_damping: float = 0.5
    convergence_tol: float = 1e-10
    max_iterations: int = 10000
    shooting_bracket: tuple[float, float] = (1e-6, 1e6)
    shooting_tol: float = 1e-12
    oracle_grid_step: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.fixed_point_damping <= 1.0):
            raise InvalidInputError("fixed_point_damping must be in (0, 1]")
        if self.convergence_tol <= 0 or self.shooting_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be at least 1")
        lo, hi = self.shooting_bracket
        if not (0.0 < lo < hi and math.isfinite(hi)):
            raise InvalidInputError("shooting_bracket must satisfy 0 < low < high")
        if not (0.0 < self.oracle_grid_step <= 0.5):
            raise InvalidInputError("oracle_grid_step must be in (0, 0.5]")


@dataclass(frozen=True)
class ImpliedRiskAversion:
    """Per-edge relative risk aversion read off a payoff against a reference.

    Values sit on the boundaries between adjacent buckets. ``+inf`` marks a
    frozen edge (cap or floor); ``nan`` marks an indeterminate edge where both
    curves are flat and the quotient carries no information. Negative finite
    values are genuine diagnostics, not errors.
    """

    mesh: Mesh
    values: np.ndarray

    def __init__(self, mesh: Mesh, values):
        values = _readonly(values)
        if values.shape != (mesh.n_buckets - 1,):
            raise InvalidInputError(
                f"expected {mesh.n_buckets - 1} edge values, got {values.size}"
            )
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "values", values)

    @property
    def edge_positions(self) -> np.ndarray:
        return self.mesh.interior_edges

    @property
    def is_indeterminate(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def finite_values(self) -> np.ndarray:
        return self.values[np.isfinite(self.values)]


# --------------------------------------------------------------------------
# Monotone log-payoff transform
# --------------------------------------------------------------------------


class _DomainEnd(Exception):
    """Internal: the transform's integrand stopped being valid."""


class _AnalyticBackend:
    """phi given in closed form, or synthesized by quadrature of `rate` alone."""

    def __init__(self, phi: Callable | None, rate: Callable):
        self._phi = phi
        self._rate = rate

    def rate(self, v: np.ndarray) -> np.ndarray:
        try:
            r = np.asarray(self._rate(np.asarray(v, dtype=float)), dtype=float)
        except MonotonicityError as exc:
            raise _DomainEnd from exc
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            raise _DomainEnd
        return r

    def panel(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Increment of phi over [a, b] as (sub-edges, per-subpanel increments)."""
        if self._phi is None:
            return _adaptive_panel(self.rate, a, b)
        try:
            lo = float(self._phi(np.array([a]))[0])
            hi = float(self._phi(np.array([b]))[0])
        except MonotonicityError as exc:
            raise _DomainEnd from exc
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise _DomainEnd
        return np.array([a, b]), np.array([hi - lo])

    def partial(self, lo: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self._phi is None:
            return _partial_gl(self.rate, lo, v)
        try:
            return np.asarray(self._phi(v), dtype=float) - np.asarray(
                self._phi(lo), dtype=float
            )
        except MonotonicityError as exc:
            raise _DomainEnd from exc


def _adaptive_panel(rate, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre with uniform refinement and a stall detector.

    Refinement stops when successive levels agree to 1e-14 relative, or when
    the gap stops shrinking geometrically: near a pole the integrand's own
    evaluation noise (catastrophic cancellation in user-supplied rate
    functions) puts a floor under the achievable agreement, and subdividing
    past that floor is pure waste. The accepted level's sub-edges and
    per-subpanel increments are returned so that later partial integrals can
    run one Gauss panel at a time and stay consistent with the table.
    """
    rate(np.array([a, b]))  # invalid endpoints fail before any quadrature
    prev = math.nan
    prev_gap = math.inf
    edges = np.array([a, b])
    incs = np.array([math.nan])
    for level in range(7):
        n = 2**level
        edges = np.linspace(a, b, n + 1)
        lo = edges[:-1]
        half = 0.5 * (edges[1:] - lo)
        nodes = lo[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)
        vals = rate(nodes.ravel()).reshape(n, _GL_NODES.size)
        incs = half * (vals @ _GL_WEIGHTS)
        total = float(np.sum(incs))
        if level:
            gap = abs(total - prev)
            if gap <= 1e-14 * max(1.0, abs(total)):
                break
            if level >= 3 and gap >= 0.25 * prev_gap:
                break  # refinement stalled at the noise floor
            prev_gap = gap
        prev = total
    return edges, incs


def _partial_gl(rate, lo: np.ndarray, v: np.ndarray) -> np.ndarray:
    half = 0.5 * (v - lo)
    nodes = lo[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)
    vals = rate(nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ _GL_WEIGHTS)


class _PhiTable:
    """Lazily extended node table of a strictly increasing transform phi.

    Extension halves its stride when the integrand's domain ends (marginal
    utility turning non-positive, risk aversion hitting zero, or the
    log-payoff magnitude limit), so the table creeps up to a singularity
    instead of stepping over it.
    """

    def __init__(self, backend, anchor: float = 0.0):
        self.backend = backend
        self.v = [float(anchor)]
        self.phi = [0.0]
        self._lo_done = False
        self._hi_done = False
        self._stride = {False: _PANEL_WIDTH, True: _PANEL_WIDTH}
        self.backend.rate(np.array([float(anchor)]))  # anchor must be valid

    def _extend(self, rightward: bool) -> tuple[float, float] | None:
        """Add one panel; returns (width, phi gain) or None when the side is done."""
        if rightward and self._hi_done:
            return None
        if not rightward and self._lo_done:
            return None
        if len(self.v) > 200_000:
            raise NonConvergenceError(
                math.nan, len(self.v), "transform table exceeded its panel budget"
            )
        # Start from roughly the last workable stride on this side: near a
        # singular domain edge the workable width only shrinks, and retrying
        # wide panels there wastes full quadrature budgets.
        h = min(_PANEL_WIDTH, 2.0 * self._stride[rightward])
        while h >= _PANEL_MIN_WIDTH:
            a = self.v[-1] if rightward else self.v[0] - h
            b = a + h
            if abs(a) > _LOG_PAYOFF_LIMIT or abs(b) > _LOG_PAYOFF_LIMIT:
                break
            try:
                edges, incs = self.backend.panel(a, b)
            except _DomainEnd:
                h *= 0.5
                continue
            self._stride[rightward] = h
            total = float(np.sum(incs))
            if rightward:
                base = self.phi[-1]
                self.v.extend(edges[1:].tolist())
                self.phi.extend((base + np.cumsum(incs)).tolist())
            else:
                base = self.phi[0]
                self.v[0:0] = edges[:-1].tolist()
                self.phi[0:0] = (base - np.cumsum(incs[::-1])[::-1]).tolist()
            return h, total
        if rightward:
            self._hi_done = True
        else:
            self._lo_done = True
        return None

    # Panels shrink geometrically toward a singular domain edge; stop creeping
    # once a step makes no useful progress for the quantity being covered.
    _DEAD_STRIDE = 1e-9

    def cover_v(self, lo: float, hi: float) -> None:
        while self.v[0] > lo:
            step = self._extend(False)
            if step is None or step[0] < self._DEAD_STRIDE:
                break
        while self.v[-1] < hi:
            step = self._extend(True)
            if step is None or step[0] < self._DEAD_STRIDE:
                break

    def cover_phi(self, lo: float, hi: float) -> None:
        while self.phi[0] > lo:
            step = self._extend(False)
            if step is None or (step[0] < self._DEAD_STRIDE and step[1] < self._DEAD_STRIDE):
                break
        while self.phi[-1] < hi:
            step = self._extend(True)
            if step is None or (step[0] < self._DEAD_STRIDE and step[1] < self._DEAD_STRIDE):
                break

    def value(self, v) -> np.ndarray:
        """phi at the given log-payoff points (clamped to the reachable domain)."""
        v = np.asarray(v, dtype=float)
        self.cover_v(float(v.min()), float(v.max()))
        va = np.asarray(self.v)
        pa = np.asarray(self.phi)
        v = np.clip(v, va[0], va[-1])
        out = np.empty_like(v)
        for start in range(0, v.size, _VALUE_CHUNK):
            chunk = v[start : start + _VALUE_CHUNK]
            j = np.clip(np.searchsorted(va, chunk) - 1, 0, va.size - 2)
            out[start : start + _VALUE_CHUNK] = pa[j] + self.backend.partial(va[j], chunk)
        return out

    def inverse(self, y, tol_iterations: int = 110) -> np.ndarray:
        """Log-payoff points where phi attains `y` (clamped to the reachable range).

        Safeguarded Newton per element; an element is converged when its phi
        residual meets tolerance or its bracket collapses to machine
        resolution (near a singularity the phi slope can exceed 1/ulp, so the
        residual target is not representable in the log-payoff variable).
        """
        y = np.asarray(y, dtype=float)
        self.cover_phi(float(y.min()), float(y.max()))
        va = np.asarray(self.v)
        pa = np.asarray(self.phi)
        y = np.clip(y, pa[0], pa[-1])
        j = np.clip(np.searchsorted(pa, y) - 1, 0, pa.size - 2)
        panel_lo = va[j]
        bracket_lo, bracket_hi = va[j].copy(), va[j + 1].copy()
        gain = np.maximum(pa[j + 1] - pa[j], 1e-300)
        v = panel_lo + (bracket_hi - bracket_lo) * (y - pa[j]) / gain
        tol = 1e-14 * np.maximum(1.0, np.abs(y))
        done = np.zeros(v.shape, dtype=bool)
        for _ in range(tol_iterations):
            resid = pa[j] + self.backend.partial(panel_lo, v) - y
            collapsed = (bracket_hi - bracket_lo) <= 4.0 * np.spacing(
                np.maximum(np.abs(bracket_lo), np.abs(bracket_hi))
            )
            done |= (np.abs(resid) <= tol) | collapsed
            if np.all(done):
                return v
            above = ~done & (resid > 0.0)
            below = ~done & (resid < 0.0)
            bracket_hi[above] = v[above]
            bracket_lo[below] = v[below]
            trial = v - resid / self.backend.rate(v)
            outside = (trial <= bracket_lo) | (trial >= bracket_hi)
            trial[outside] = 0.5 * (bracket_lo[outside] + bracket_hi[outside])
            v = np.where(done, v, trial)
        raise NonConvergenceError(
            float(np.max(np.abs(resid[~done]))), tol_iterations, "transform inversion stalled"
        )


def _backend_for(risk) -> tuple[object, str]:
    if isinstance(risk, UtilitySpec):
        if risk.family == "log":
            return _AnalyticBackend(lambda v: v, lambda v: np.ones_like(v)), "log"
        if risk.family == "constant_relative":
            coeff = risk.param
            return (
                _AnalyticBackend(lambda v: coeff * v, lambda v: np.full_like(v, coeff)),
                "constant_relative",
            )
        if risk.family == "constant_absolute_over_f":
            a = risk.param

            def phi(v):
                arg = 1.0 + a * np.expm1(v)
                if np.any(arg <= 0.0):
                    raise _DomainEnd
                return np.log(arg)

            def rate(v):
                level = np.exp(v)
                return a * level / (1.0 + a * (level - 1.0))

            return _AnalyticBackend(phi, rate), "constant_absolute_over_f"
        if risk.family == "custom":

            def phi(v):
                return v - np.log(risk.marginal(v))

            def rate(v):
                up = risk.marginal(v)
                return (up - risk.marginal_slope(v)) / up

            return _AnalyticBackend(phi, rate), "custom"
        raise InvalidInputError(f"unknown utility family {risk.family!r}")
    if isinstance(risk, RiskAversionProfile):
        if risk.kind != "function_of_F":
            raise InvalidInputError(
                "per-edge profiles are solved by solve_elasticity_profile"
            )
        fn = risk.fn

        def rate(v):
            return np.asarray(fn(np.exp(np.asarray(v, dtype=float))), dtype=float)

        return _AnalyticBackend(None, rate), "function_of_F"
    raise InvalidInputError(f"unsupported risk specification {type(risk).__name__}")


# --------------------------------------------------------------------------
# Forward solves
# --------------------------------------------------------------------------


def solve_elasticity_profile(
    growth_optimal: PayoffCurve,
    profile: RiskAversionProfile,
    market: Distribution,
    allow_gambling: bool = False,
    stats: dict | None = None,
) -> PayoffCurve:
    """Integrate the per-edge elasticity recurrence for an edge-wise profile.

    Each edge contributes ln(f[k+1]/f[k]) / R[k] to the log-payoff; an
    infinite R freezes the edge. The accumulated curve is then rescaled onto
    the unit budget, which is legal here because only log-differences enter
    the recurrence.
    """
    growth_optimal.mesh.require_same(market.mesh, "growth-optimal payoff and market")
    if profile.kind != "profile_of_x":
        raise InvalidInputError("solve_elasticity_profile needs a per-edge profile")
    values = profile.values
    n_edges = growth_optimal.mesh.n_buckets - 1
    if values.shape != (n_edges,):
        raise InvalidInputError(f"profile must supply {n_edges} edge values")
    if np.any(values == 0.0):
        raise InvalidInputError("zero risk aversion has no defined elasticity")
    if not allow_gambling and np.any(values < 0.0):
        k = int(np.nonzero(values < 0.0)[0][0])
        raise RiskLovingInputError(
            f"risk-loving input: profile is negative at edge {k}; "
            "pass allow_gambling to proceed"
        )
    f = growth_optimal.values
    deltas = np.log(f[1:] / f[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        steps = np.where(np.isinf(values), 0.0, deltas / values)
    cum = np.concatenate(([0.0], np.cumsum(steps)))
    if not np.all(np.isfinite(cum)) or float(np.max(np.abs(cum))) > _LOG_PAYOFF_LIMIT:
        raise AccumulationOverflowError(
            "elasticity accumulation overflowed; consider flooring the profile"
        )
    raw = np.exp(cum)
    scale = float(np.dot(raw, market.weights))
    payoff = PayoffCurve(growth_optimal.mesh, raw / scale)
    if stats is not None:
        stats.update(
            method="elasticity_profile",
            budget_residual=abs(payoff.cost(market) - 1.0),
        )
    return payoff


def solve_elasticity_state_agnostic(
    growth_optimal: PayoffCurve,
    risk,
    market: Distribution,
    settings: SolveSettings | None = None,
    stats: dict | None = None,
) -> PayoffCurve:
    """Solve for the optimal payoff when risk aversion depends only on payoff level.

    Under the transform phi(v) = integral of R(e^s) ds the per-edge recurrence
    telescopes to phi(ln F[k]) = y0 + ln(f[k]/f[0]) exactly, so the whole
    curve is parameterized by the scalar y0 and the budget constraint becomes
    a monotone one-dimensional root-find (bisection within the configured
    bracket). Accepts a UtilitySpec or a function_of_F profile; the transform
    is analytic for the named families and quadrature-built for profiles.
    """
    settings = settings or SolveSettings()
    growth_optimal.mesh.require_same(market.mesh, "growth-optimal payoff and market")
    backend, method = _backend_for(risk)
    try:
        table = _PhiTable(backend)
    except _DomainEnd:
        raise RiskLovingInputError(
            "risk-loving input: risk aversion is not positive at the riskless level"
        ) from None
    f = growth_optimal.values
    offsets = np.log(f / f[0])
    m = market.weights

    def cost_at(y0: float) -> tuple[float, np.ndarray]:
        F = np.exp(table.inverse(y0 + offsets))
        return float(np.dot(F, m)), F

    low, high = settings.shooting_bracket
    v_low = max(math.log(low), -_LOG_PAYOFF_LIMIT)
    v_high = min(math.log(high), _LOG_PAYOFF_LIMIT)
    table.cover_v(v_low, v_high)
    y_low = float(table.value(np.array([max(v_low, table.v[0])]))[0])
    y_high = float(table.value(np.array([min(v_high, table.v[-1])]))[0])
    cost_low, _ = cost_at(y_low)
    cost_high, _ = cost_at(y_high)
    if cost_low - 1.0 > 0.0 or cost_high - 1.0 < 0.0:
        raise BracketError(cost_low, cost_high)

    iterations = 0
    y_mid = 0.5 * (y_low + y_high)
    cost_mid, F = cost_at(y_mid)
    for iterations in range(1, 201):
        y_mid = 0.5 * (y_low + y_high)
        cost_mid, F = cost_at(y_mid)
        if abs(cost_mid - 1.0) <= settings.shooting_tol:
            break
        if cost_mid > 1.0:
            y_high = y_mid
        else:
            y_low = y_mid
    payoff = PayoffCurve(growth_optimal.mesh, F / np.dot(F, m))
    if stats is not None:
        stats.update(
            method=f"state_agnostic[{method}]",
            bisection_iterations=iterations,
            budget_residual=abs(payoff.cost(market) - 1.0),
        )
    return payoff


def solve_fixed_point(
    belief: Distribution,
    quotes: SecurityQuotes,
    spec: UtilitySpec,
    settings: SolveSettings | None = None,
    stats: dict | None = None,
) -> Distribution:
    """Damped self-consistent iteration for the optimal capital split.

    The update reweights the belief by marginal utility at the realized
    log-returns and renormalizes; damping is halved (at most four times) when
    the residual rises, after which a further rise raises NonConvergenceError.
    Log utility converges in a single step to the belief itself.
    """
    settings = settings or SolveSettings()
    belief.mesh.require_same(quotes.mesh, "belief and quotes")
    if not isinstance(spec, UtilitySpec):
        raise InvalidInputError("solve_fixed_point needs a state-independent UtilitySpec")
    returns = quotes.returns
    b = belief.weights
    beta = b.copy()
    theta = settings.fixed_point_damping
    halvings = 0
    prev_residual = math.inf
    iterations = 0
    for iterations in range(1, settings.max_iterations + 1):
        target = spec.marginal(np.log(beta * returns)) * b
        target /= target.sum()
        residual = float(np.max(np.abs(target - beta)))
        if residual > prev_residual:
            if halvings >= 4:
                raise NonConvergenceError(residual, iterations, "fixed point diverged")
            theta *= 0.5
            halvings += 1
        prev_residual = residual
        updated = (1.0 - theta) * beta + theta * target
        step = float(np.max(np.abs(updated - beta)))
        beta = updated
        if step < settings.convergence_tol:
            break
    else:
        raise NonConvergenceError(prev_residual, settings.max_iterations)
    if stats is not None:
        stats.update(
            method="fixed_point",
            iterations=iterations,
            fixed_point_residual=prev_residual,
            damping=theta,
        )
    return Distribution(belief.mesh, beta / beta.sum(), Role.ALLOCATION)


# --------------------------------------------------------------------------
# Inverse / diagnostic operations
# --------------------------------------------------------------------------


def implied_risk_aversion(
    payoff: PayoffCurve, growth_optimal: PayoffCurve
) -> ImpliedRiskAversion:
    """Read relative risk aversion off a payoff, edge by edge.

    A frozen payoff edge against a moving reference is +inf (cap or floor);
    both flat is indeterminate; anything else is the log-ratio quotient and
    may legitimately come out negative for incoherent products.
    """
    payoff.mesh.require_same(growth_optimal.mesh, "payoff and reference")
    F = payoff.values
    f = growth_optimal.values
    num = np.log(f[1:] / f[:-1])
    den = np.log(F[1:] / F[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = num / den
    values = np.where(den == 0.0, np.where(num == 0.0, np.nan, np.inf), quotient)
    return ImpliedRiskAversion(payoff.mesh, values)


def relative_elasticity(
    payoff_a: PayoffCurve,
    payoff_b: PayoffCurve,
    aversion_b: RiskAversionProfile,
) -> ImpliedRiskAversion:
    """Risk aversion of one payoff relative to another of known aversion.

    Per edge: R_a = R_b * ln-ratio(b) / ln-ratio(a), with the same extended
    conventions as implied_risk_aversion. With the growth-optimal payoff and
    unit aversion as the reference this reduces to implied_risk_aversion.
    """
    payoff_a.mesh.require_same(payoff_b.mesh, "the two payoffs")
    Fa, Fb = payoff_a.values, payoff_b.values
    n_edges = payoff_a.mesh.n_buckets - 1
    if aversion_b.kind == "profile_of_x":
        rb = np.asarray(aversion_b.values, dtype=float)
        if rb.shape != (n_edges,):
            raise InvalidInputError(f"reference profile must supply {n_edges} edge values")
    else:
        rb = aversion_b.rate(np.sqrt(Fb[1:] * Fb[:-1]))
    num = np.log(Fb[1:] / Fb[:-1])
    den = np.log(Fa[1:] / Fa[:-1])
    with np.errstate(invalid="ignore"):
        scaled = rb * num  # inf * 0 -> nan, deliberately indeterminate
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = scaled / den
    values = np.where(
        np.isnan(scaled),
        np.nan,
        np.where(den == 0.0, np.where(scaled == 0.0, np.nan, np.inf), quotient),
    )
    values = np.where(np.isinf(values), np.inf, values)  # frozen edges report +inf
    return ImpliedRiskAversion(payoff_a.mesh, values)


# --------------------------------------------------------------------------
# One-parameter family and overlay forms
# --------------------------------------------------------------------------


def one_param_payoff(growth_optimal: PayoffCurve, strength: float) -> PayoffCurve:
    """Scale the growth-optimal payoff around the riskless line by 1/strength.

    Budget-normalized by construction. Positivity bounds the admissible
    strength from below when the growth-optimal payoff dips under 1.
    """
    if not (strength > 0 and math.isfinite(strength)):
        raise InvalidInputError("family strength must be positive and finite")
    f = growth_optimal.values
    scaled = (f - 1.0) / strength + 1.0
    if np.any(scaled <= 0.0):
        smallest = 1.0 - float(f.min())
        raise InvalidInputError(
            f"strength {strength!r} drives the payoff non-positive; "
            f"smallest admissible strength is {smallest!r}"
        )
    return PayoffCurve(growth_optimal.mesh, scaled)


def calibrate_max_loss(growth_optimal: PayoffCurve, floor: float) -> float:
    """Family strength that pins the worst payoff bucket at `floor` of capital."""
    if not (0.0 < floor < 1.0):
        raise InvalidInputError("loss floor must lie strictly between 0 and 1")
    f_min = float(growth_optimal.values.min())
    if f_min >= 1.0:
        return 1.0
    return (1.0 - f_min) / (1.0 - floor)


def shimko_payoff(
    belief: Distribution, market: Distribution, risk_scale: float
) -> OverlayCurve:
    """Zero-cost overlay of the mean-variance family: (belief/market - 1) / scale."""
    belief.mesh.require_same(market.mesh, "belief and market")
    if not (risk_scale > 0 and math.isfinite(risk_scale)):
        raise InvalidInputError("risk scale must be positive and finite")
    f = belief.weights / market.weights
    return OverlayCurve(belief.mesh, (f - 1.0) / risk_scale)


def shimko_oracle(
    belief: Distribution, market: Distribution, risk_scale: float
) -> OverlayCurve:
    """Independent check of shimko_payoff via the stationarity system.

    Maximizes mean under the belief minus a market-weighted quadratic penalty
    subject to zero cost, by solving the exact linear system in the overlay
    and one multiplier; used only to cross-check the closed form.
    """
    belief.mesh.require_same(market.mesh, "belief and market")
    if not (risk_scale > 0 and math.isfinite(risk_scale)):
        raise InvalidInputError("risk scale must be positive and finite")
    n = belief.mesh.n_buckets
    m = market.weights
    system = np.zeros((n + 1, n + 1))
    system[:n, :n] = np.diag(risk_scale * m)
    system[:n, n] = -m
    system[n, :n] = m
    rhs = np.concatenate((belief.weights, [0.0]))
    solution = np.linalg.solve(system, rhs)
    return OverlayCurve(belief.mesh, solution[:n])


# --------------------------------------------------------------------------
# Brute-force oracle
# --------------------------------------------------------------------------

_ORACLE_MAX_BUCKETS = 5
_ORACLE_MAX_GRID = 600_000
_ORACLE_MIN_STEP = 1e-9


def brute_force_oracle(
    belief: Distribution,
    quotes: SecurityQuotes,
    spec: UtilitySpec,
    settings: SolveSettings | None = None,
    stats: dict | None = None,
) -> Distribution:
    """Directly maximize expected utility over the capital simplex.

    Desk-scale verification only: exhaustive interior grid search at the
    configured step (coarsened if the grid would exceed the point cap),
    followed by pairwise-transfer coordinate descent with the step halved
    down to 1e-9. Deliberately independent of every solver code path.
    """
    settings = settings or SolveSettings()
    belief.mesh.require_same(quotes.mesh, "belief and quotes")
    n = belief.mesh.n_buckets
    if n > _ORACLE_MAX_BUCKETS:
        raise InvalidInputError(
            f"brute-force oracle is capped at {_ORACLE_MAX_BUCKETS} buckets; "
            "use solve_fixed_point for larger meshes"
        )
    returns = quotes.returns
    b = belief.weights

    def objective_rows(grid: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            utilities = spec.log_utility(np.log(grid * returns))
        return utilities @ b

    def objective(beta: np.ndarray) -> float:
        return float(objective_rows(beta[None, :])[0])

    slots = max(n, int(round(1.0 / settings.oracle_grid_step)))
    while math.comb(slots - 1, n - 1) > _ORACLE_MAX_GRID:
        slots = int(slots * 0.9)
    cuts = np.array(list(combinations(range(1, slots), n - 1)), dtype=np.int64)
    bounded = np.hstack(
        (np.zeros((cuts.shape[0], 1), dtype=np.int64), cuts,
         np.full((cuts.shape[0], 1), slots, dtype=np.int64))
    )
    grid = np.diff(bounded, axis=1).astype(float) / slots
    best = int(np.argmax(objective_rows(grid)))
    beta = grid[best].copy()
    current = objective(beta)

    step = 1.0 / slots
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    while step > _ORACLE_MIN_STEP:
        improved = False
        for i, j in pairs:
            while beta[i] - step >= 1e-12:
                candidate = beta.copy()
                candidate[i] -= step
                candidate[j] += step
                gain = objective(candidate)
                if gain > current:
                    beta, current = candidate, gain
                    improved = True
                else:
                    break
        if not improved:
            step *= 0.5
    if stats is not None:
        stats.update(
            method="brute_force",
            grid_points=int(grid.shape[0]),
            grid_step=1.0 / slots,
            objective=current,
        )
    return Distribution(belief.mesh, beta / beta.sum(), Role.ALLOCATION)
