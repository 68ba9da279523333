"""Utility specifications and risk-aversion representations.

Utilities are expressed through the marginal utility of log-return,
u'(v) with v = ln(payoff). That is all the solvers ever need: relative
risk aversion at a payoff level F is (u' - u'') / u' evaluated at ln F,
and affine reparameterizations of the utility drop out of that ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError, MonotonicityError

# Central-difference step for u'' when no analytic slope is supplied.
_FD_SCALE = 1e-5


@dataclass(frozen=True)
class UtilitySpec:
    """A named utility family or a custom marginal utility of log-return.

    Families:
      log                       -- growth optimizer, u'(v) = 1
      constant_relative         -- constant relative risk aversion R > 0
      constant_absolute_over_f  -- absolute risk aversion a/f along the
                                   growth-optimal reference; one number a > 0
      custom                    -- caller supplies u'(v) (> 0), optionally u''(v)

    Custom callables must be pure and safe to call concurrently, and should
    accept numpy arrays (scalars are broadcast if they do not).
    """

    family: str
    param: float | None = None
    uprime: Callable | None = None
    uprime2: Callable | None = None

    @classmethod
    def log(cls) -> "UtilitySpec":
        return cls("log")

    @classmethod
    def constant_relative(cls, coefficient: float) -> "UtilitySpec":
        if not (coefficient > 0 and math.isfinite(coefficient)):
            raise InvalidInputError("constant_relative needs a positive finite coefficient")
        return cls("constant_relative", param=float(coefficient))

    @classmethod
    def constant_absolute_over_f(cls, strength: float) -> "UtilitySpec":
        if not (strength > 0 and math.isfinite(strength)):
            raise InvalidInputError("constant_absolute_over_f needs a positive finite strength")
        return cls("constant_absolute_over_f", param=float(strength))

    @classmethod
    def custom(cls, uprime: Callable, uprime2: Callable | None = None) -> "UtilitySpec":
        return cls("custom", uprime=uprime, uprime2=uprime2)

    # -- marginal utility surface used by the solvers --------------------

    def marginal(self, v):
        """u'(v); raises MonotonicityError if it evaluates non-positive."""
        v = np.asarray(v, dtype=float)
        if self.family == "log":
            out = np.ones_like(v)
        elif self.family == "constant_relative":
            out = np.exp((1.0 - self.param) * v)
        elif self.family == "constant_absolute_over_f":
            a = self.param
            out = np.exp(v) / (1.0 + a * np.expm1(v))
        elif self.family == "custom":
            out = np.asarray(_call_vectorized(self.uprime, v), dtype=float)
        else:
            raise InvalidInputError(f"unknown utility family {self.family!r}")
        if np.any(~np.isfinite(out) | (out <= 0.0)):
            raise MonotonicityError(
                f"marginal utility non-positive for family {self.family!r}"
            )
        return out

    def marginal_slope(self, v):
        """u''(v); analytic when known, else central finite difference."""
        v = np.asarray(v, dtype=float)
        if self.family == "log":
            return np.zeros_like(v)
        if self.family == "constant_relative":
            return (1.0 - self.param) * np.exp((1.0 - self.param) * v)
        if self.family == "constant_absolute_over_f":
            a = self.param
            denom = 1.0 + a * np.expm1(v)
            return np.exp(v) * (1.0 - a) / denom**2
        if self.uprime2 is not None:
            return np.asarray(_call_vectorized(self.uprime2, v), dtype=float)
        h = _FD_SCALE * np.maximum(1.0, np.abs(v))
        up = np.asarray(_call_vectorized(self.uprime, v + h), dtype=float)
        dn = np.asarray(_call_vectorized(self.uprime, v - h), dtype=float)
        return (up - dn) / (2.0 * h)

    def log_utility(self, v):
        """u(v) itself, needed only by the brute-force maximizer.

        Infeasible arguments (outside the utility's domain) map to -inf so a
        maximizer simply avoids them.
        """
        v = np.asarray(v, dtype=float)
        if self.family == "log":
            return v.copy()
        if self.family == "constant_relative":
            r = self.param
            if r == 1.0:
                return v.copy()
            return np.exp((1.0 - r) * v) / (1.0 - r)
        if self.family == "constant_absolute_over_f":
            a = self.param
            arg = 1.0 + a * np.expm1(v)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(arg > 0.0, np.log(np.maximum(arg, 1e-300)) / a, -np.inf)
            return out
        integral = self.__dict__.get("_integral_cache")
        if integral is None:
            integral = _integral_of_marginal(self)
            object.__setattr__(self, "_integral_cache", integral)
        return integral(v)


def _call_vectorized(fn, v):
    try:
        out = fn(v)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(v)).copy()
    except (TypeError, ValueError):
        return np.array([float(fn(float(x))) for x in np.atleast_1d(v)]).reshape(np.shape(v))


def _integral_of_marginal(spec: UtilitySpec):
    """Antiderivative of a custom u' via a cached composite Gauss-Legendre table.

    The constant of integration is irrelevant: affine shifts of the utility
    do not move the maximizer.
    """
    from .solver import _PhiTable, _AnalyticBackend  # shared quadrature machinery

    table = _PhiTable(
        _AnalyticBackend(phi=None, rate=lambda v: spec.marginal(v)), anchor=0.0
    )

    def u(v):
        arr = np.atleast_1d(np.asarray(v, dtype=float))
        out = table.value(arr.ravel()).reshape(arr.shape)
        return out.reshape(np.shape(v)) if np.shape(v) else float(out[0])

    return u


@dataclass(frozen=True)
class RiskAversionProfile:
    """Relative risk aversion, either per mesh edge or as a function of payoff.

    Per-edge values sit on the boundaries between adjacent buckets (length
    N-1) and may be +inf to freeze the payoff locally (caps and floors).
    Negative values are representable so that implied profiles can be carried
    around, but forward solvers reject them unless gambling is allowed.
    """

    kind: str  # "profile_of_x" | "function_of_F"
    values: np.ndarray | None = None
    fn: Callable | None = None

    @classmethod
    def per_edge(cls, values) -> "RiskAversionProfile":
        arr = np.array(values, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidInputError("per-edge profile needs a 1-D value array")
        if np.any(np.isnan(arr)):
            raise InvalidInputError("per-edge profile values must not be NaN")
        arr.setflags(write=False)
        return cls("profile_of_x", values=arr)

    @classmethod
    def of_payoff(cls, fn: Callable) -> "RiskAversionProfile":
        return cls("function_of_F", fn=fn)

    def rate(self, payoff_level):
        """Evaluate a function_of_F profile at the given payoff level(s)."""
        if self.kind != "function_of_F":
            raise InvalidInputError("rate() is only defined for function_of_F profiles")
        return _call_vectorized(self.fn, np.asarray(payoff_level, dtype=float))


def relative_risk_aversion(spec: UtilitySpec, payoff_level: float) -> float:
    """Relative risk aversion of the utility at payoff level F > 0."""
    if not (payoff_level > 0 and math.isfinite(payoff_level)):
        raise InvalidInputError("payoff level must be positive and finite")
    if spec.family == "log":
        return 1.0
    if spec.family == "constant_relative":
        return spec.param
    if spec.family == "constant_absolute_over_f":
        a = spec.param
        denom = 1.0 + a * (payoff_level - 1.0)
        if denom <= 0.0:
            raise MonotonicityError(
                f"payoff level {payoff_level!r} is below the family's total-loss point"
            )
        return a * payoff_level / denom
    return log_return_conversion(spec, payoff_level)[1]


def absolute_from_relative(relative: float, payoff_level: float) -> float:
    """Convert relative to absolute risk aversion at a payoff level (A = R/F)."""
    if not (payoff_level > 0 and math.isfinite(payoff_level)):
        raise InvalidInputError("payoff level must be positive and finite")
    if math.isinf(relative):
        return math.inf if relative > 0 else -math.inf
    return relative / payoff_level


def log_return_conversion(spec: UtilitySpec, payoff_level: float) -> tuple[float, float]:
    """Marginal utility of log-return and the implied relative risk aversion.

    Returns (u'(ln F), (u' - u'') / u' at ln F). Raises MonotonicityError if
    the marginal utility is not positive there.
    """
    if not (payoff_level > 0 and math.isfinite(payoff_level)):
        raise InvalidInputError("payoff level must be positive and finite")
    v = np.array([math.log(payoff_level)])
    up = float(spec.marginal(v)[0])
    upp = float(spec.marginal_slope(v)[0])
    return up, (up - upp) / up


def one_param_profile(strength: float) -> RiskAversionProfile:
    """Risk-aversion profile of the single-dial investor family.

    The dial scales the payoff affinely around the riskless line; expressed
    as a function of the payoff level it reads a*F / (1 + a*(F - 1)), which a
    state-agnostic solve maps back onto the affine family exactly.
    """
    if not (strength > 0 and math.isfinite(strength)):
        raise InvalidInputError("family strength must be positive and finite")
    a = float(strength)

    def rate(level):
        level = np.asarray(level, dtype=float)
        return a * level / (1.0 + a * (level - 1.0))

    return RiskAversionProfile.of_payoff(rate)


def clamp_profile_min(profile: RiskAversionProfile, floor: float) -> RiskAversionProfile:
    """Raise a profile to at least `floor` everywhere (infinities survive)."""
    if profile.kind == "profile_of_x":
        return RiskAversionProfile.per_edge(np.maximum(profile.values, floor))
    inner = profile.fn
    return RiskAversionProfile.of_payoff(
        lambda level: np.maximum(_call_vectorized(inner, np.asarray(level, dtype=float)), floor)
    )
