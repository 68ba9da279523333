"""Shared deterministic fixture builders for the test suite."""

import numpy as np
import pytest

from payoff_forge import Distribution, Mesh, Role


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


def unit_mesh(n_buckets: int) -> Mesh:
    return Mesh(np.linspace(0.0, 1.0, n_buckets + 1))


def random_pair(rng, n_buckets: int):
    """Random (mesh, market, belief) with weights bounded away from zero."""
    mesh = unit_mesh(n_buckets)
    mw = rng.uniform(0.2, 1.0, n_buckets)
    bw = rng.uniform(0.2, 1.0, n_buckets)
    market = Distribution(mesh, mw / mw.sum(), Role.MARKET)
    belief = Distribution(mesh, bw / bw.sum(), Role.BELIEF)
    return mesh, market, belief


def random_pair_separated(rng, n_buckets: int, min_log_gap: float = 0.05):
    """Random pair whose growth-optimal payoff moves by at least `min_log_gap`
    per edge (log scale), keeping implied-aversion quotients well conditioned."""
    mesh = unit_mesh(n_buckets)
    mw = rng.uniform(0.2, 1.0, n_buckets)
    mw /= mw.sum()
    sizes = rng.uniform(min_log_gap, 0.6, n_buckets - 1)
    signs = rng.choice([-1.0, 1.0], n_buckets - 1)
    log_f = [0.0]
    for size, sign in zip(sizes, signs):
        step = size * sign
        if abs(log_f[-1] + step) > 3.0:  # bounce off +-3 to keep weights safe
            step = -step
        log_f.append(log_f[-1] + step)
    bw = np.exp(log_f) * mw
    bw /= bw.sum()
    market = Distribution(mesh, mw, Role.MARKET)
    belief = Distribution(mesh, bw, Role.BELIEF)
    return mesh, market, belief
