"""Discrete securities market: mesh, quotes, and bucket distributions.

The engine's state space is a strictly increasing partition of the
underlying's range. Every curve in the package is piecewise constant per
bucket; midpoints exist for plotting and for attaching per-edge diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError, MeshMismatchError

# Weights below this are treated as zero; zero-belief buckets must be merged
# by the caller or floored explicitly (silent flooring hides modeling errors).
WEIGHT_FLOOR = 1e-12
SUM_TOL = 1e-12


def _readonly(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class Role(str, Enum):
    MARKET = "market"
    BELIEF = "belief"
    ALLOCATION = "allocation"


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing bucket edges x_0 < x_1 < ... with at least two buckets."""

    edges: np.ndarray

    def __init__(self, edges):
        edges = _readonly(edges)
        if edges.ndim != 1 or edges.size < 3:
            raise InvalidInputError("mesh needs at least 3 edges (2 buckets)")
        if not np.all(np.isfinite(edges)):
            raise InvalidInputError("mesh edges must be finite")
        if not np.all(np.diff(edges) > 0):
            raise InvalidInputError("mesh edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)

    @property
    def n_buckets(self) -> int:
        return self.edges.size - 1

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def interior_edges(self) -> np.ndarray:
        """Coordinates of the boundaries between adjacent buckets (length N-1)."""
        return self.edges[1:-1]

    def matches(self, other: "Mesh") -> bool:
        return self.edges.size == other.edges.size and bool(
            np.array_equal(self.edges, other.edges)
        )

    def require_same(self, other: "Mesh", what: str = "inputs") -> None:
        if not self.matches(other):
            raise MeshMismatchError(f"{what} live on different meshes")


@dataclass(frozen=True)
class SecurityQuotes:
    """Prices of the per-bucket binary securities; returns are their reciprocals."""

    mesh: Mesh
    prices: np.ndarray

    def __init__(self, mesh: Mesh, prices):
        prices = _readonly(prices)
        if prices.shape != (mesh.n_buckets,):
            raise InvalidInputError(
                f"expected {mesh.n_buckets} prices, got {prices.size}"
            )
        bad = np.nonzero(~np.isfinite(prices) | (prices <= 0.0))[0]
        if bad.size:
            raise InvalidInputError(
                f"price for bucket {int(bad[0])} is not a positive finite number"
            )
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "prices", prices)

    @property
    def returns(self) -> np.ndarray:
        return 1.0 / self.prices


@dataclass(frozen=True)
class Distribution:
    """Positive bucket weights summing to one, tagged with their role."""

    mesh: Mesh
    weights: np.ndarray
    role: Role

    def __init__(self, mesh: Mesh, weights, role: Role = Role.BELIEF):
        weights = _readonly(weights)
        if weights.shape != (mesh.n_buckets,):
            raise InvalidInputError(
                f"expected {mesh.n_buckets} weights, got {weights.size}"
            )
        outcome = validate_distribution(weights, SUM_TOL)
        if not outcome.passed:
            raise InvalidInputError(f"invalid {Role(role).value} distribution: {outcome.message}")
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "role", Role(role))


@dataclass(frozen=True)
class ValidationOutcome:
    """Result of checking raw weights against the distribution invariants."""

    passed: bool
    sum_deviation: float
    min_weight: float
    offending: tuple[int, ...]
    message: str


def validate_distribution(weights, tolerance: float = SUM_TOL) -> ValidationOutcome:
    """Check weights for positivity (floor 1e-12) and unit sum within `tolerance`.

    Always returns a report; never raises. Accepts a Distribution or raw values.
    """
    if isinstance(weights, Distribution):
        weights = weights.weights
    w = np.asarray(weights, dtype=float)
    finite = np.isfinite(w)
    below = ~finite | (w < WEIGHT_FLOOR)
    offending = tuple(int(i) for i in np.nonzero(below)[0])
    total = float(np.sum(w[finite]))
    sum_dev = abs(total - 1.0)
    min_w = float(np.min(w)) if w.size and finite.all() else float("nan")
    problems = []
    if offending:
        problems.append(
            f"{len(offending)} weight(s) below the {WEIGHT_FLOOR:g} positivity floor "
            f"(first at bucket {offending[0]})"
        )
    if sum_dev > tolerance:
        problems.append(f"sum {total!r} deviates from 1 by {sum_dev:.3e}")
    return ValidationOutcome(
        passed=not problems,
        sum_deviation=sum_dev,
        min_weight=min_w,
        offending=offending,
        message="; ".join(problems) if problems else "ok",
    )


def floor_weights(weights, floor: float = WEIGHT_FLOOR) -> np.ndarray:
    """Clip weights up to `floor` and renormalize. Explicit opt-in only."""
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("cannot floor non-finite weights")
    w = np.maximum(w, floor)
    return w / w.sum()


def imply_market_distribution(quotes: SecurityQuotes) -> Distribution:
    """Normalize quoted prices into the market-implied bucket distribution."""
    m = quotes.prices / quotes.prices.sum()
    return Distribution(quotes.mesh, m, Role.MARKET)


def quoted_returns(quotes: SecurityQuotes) -> np.ndarray:
    """Per-bucket return multiple of each binary security (1/price)."""
    return quotes.returns
