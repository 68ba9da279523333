"""Committed desk fixtures: a skewed market and views derived from it.

The blended view reproduces a popular but flawed way of "being careful": take
a half-skew view and gently revert it to the market in the wings. Auditing
the resulting growth-optimal payoff exposes wildly oscillating, partly
negative implied risk aversion, which is why the engine ships it as a named
fixture for tests, demos, and the workbench diagnostics panel.
"""

from __future__ import annotations

import math

import numpy as np

from .market import Distribution, Mesh, Role

MESH_BUCKETS = 61
MESH_LOW = 0.5
MESH_HIGH = 2.0
LOG_CENTER = 0.05
LOG_WIDTH = 0.25
MARKET_SKEW = -3.0
BELIEF_SKEW = -1.5  # half the market's skew
WING_WIDTH = 0.45
WEIGHT_FLOOR = 1e-9  # keeps the far wings above the distribution invariant


def skewed_mesh(n_buckets: int = MESH_BUCKETS) -> Mesh:
    """Log-uniform bucket edges across the fixture's underlying range."""
    return Mesh(np.exp(np.linspace(math.log(MESH_LOW), math.log(MESH_HIGH), n_buckets + 1)))


def _skewed_density(log_levels: np.ndarray, skew: float) -> np.ndarray:
    z = (log_levels - LOG_CENTER) / LOG_WIDTH
    bell = np.exp(-0.5 * z * z)
    lean = 0.5 * (1.0 + np.array([math.erf(skew * x / math.sqrt(2.0)) for x in z]))
    w = bell * lean
    w = w / w.sum()
    w = np.maximum(w, WEIGHT_FLOOR)
    return w / w.sum()


def skewed_market(mesh: Mesh) -> Distribution:
    """Market-implied weights with a pronounced left skew in log-space."""
    w = _skewed_density(np.log(mesh.midpoints), MARKET_SKEW)
    return Distribution(mesh, w / w.sum(), Role.MARKET)


def half_skew_belief(mesh: Mesh) -> Distribution:
    """A view that the skew should be half of what the market shows."""
    w = _skewed_density(np.log(mesh.midpoints), BELIEF_SKEW)
    return Distribution(mesh, w / w.sum(), Role.BELIEF)


def wing_blended_belief(mesh: Mesh, belief: Distribution, market: Distribution) -> Distribution:
    """Revert a view back to the market in the wings with a smooth weight.

    Geometric blend belief^w * market^(1-w) with w falling from 1 near the
    center to 0 in the wings. Looks prudent; audits badly.
    """
    v = np.log(mesh.midpoints)
    w = np.exp(-((v / WING_WIDTH) ** 4))
    blended = belief.weights**w * market.weights ** (1.0 - w)
    return Distribution(mesh, blended / blended.sum(), Role.BELIEF)


def blended_view_fixture(n_buckets: int = MESH_BUCKETS):
    """(mesh, market, half-skew belief, wing-blended belief) for the oscillation demo."""
    mesh = skewed_mesh(n_buckets)
    market = skewed_market(mesh)
    belief = half_skew_belief(mesh)
    blended = wing_blended_belief(mesh, belief, market)
    return mesh, market, belief, blended


def write_fixture_files(directory: str) -> list[str]:
    """Write the committed fixture files (product documents and payoff curve)."""
    import os

    from .formats import write_curve_csv, write_json_doc
    from .growth import growth_optimal_payoff

    mesh, market, belief, blended = blended_view_fixture()
    os.makedirs(directory, exist_ok=True)
    written = []

    def product_doc(view: Distribution, name: str, notes: str) -> dict:
        return {
            "mesh": list(mesh.edges),
            "market": list(market.weights),
            "belief": list(view.weights),
            "metadata": {"name": name, "notes": notes},
        }

    path = os.path.join(directory, "half_skew_product.json")
    write_json_doc(path, product_doc(belief, "half-skew view", "half of the market skew"))
    written.append(path)

    path = os.path.join(directory, "blended_view_product.json")
    write_json_doc(
        path,
        product_doc(blended, "wing-blended view", "half-skew view reverted to market in the wings"),
    )
    written.append(path)

    # The audited product: growth-optimal payoff of the blended view, to be
    # validated against the half-skew product it tried to soften.
    payoff = growth_optimal_payoff(blended, market)
    path = os.path.join(directory, "blended_view_payoff.csv")
    write_curve_csv(path, mesh, payoff.values)
    written.append(path)
    return written


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    for name in write_fixture_files(target):
        print(name)
