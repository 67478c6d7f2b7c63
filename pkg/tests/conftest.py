"""Shared parameter sets and cached solver results.

Solves are memoized per parameter set so the suite pays for each Newton
iteration once; MarketParams is frozen and hashable, which makes it a
usable cache key.
"""

from __future__ import annotations

import functools

import pytest

from tradeband import MarketParams, solve_optimal_fbp, solve_shadow_system

BASE = dict(mu=0.08, sigma=0.16, r=0.0)


def mk(gamma: float, epsilon: float, **over) -> MarketParams:
    kw = {**BASE, **over}
    return MarketParams(gamma=gamma, epsilon=epsilon, **kw)


# gamma giving pi* = 0.3 at the base mu, sigma
GAMMA_PI30 = 0.08 / (0.3 * 0.16 ** 2)


@functools.lru_cache(maxsize=None)
def cached_optimal(params: MarketParams):
    return solve_optimal_fbp(params)


@functools.lru_cache(maxsize=None)
def cached_shadow(params: MarketParams):
    return solve_shadow_system(params)


@pytest.fixture(scope="session")
def optimal_solve():
    return cached_optimal


@pytest.fixture(scope="session")
def shadow_solve():
    return cached_shadow
