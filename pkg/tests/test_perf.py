"""Long-run statistics from the stationary density."""

import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import oracles
from conftest import mk
from tradeband import Band, MarketParams
from tradeband.asymptotics import optimal_stats_asym
from tradeband.optimal_fbp import optimal_esr_exact
from tradeband.perf import (
    avg_transaction_costs,
    esr,
    esr_gap,
    long_run_mean,
    long_run_variance,
    policy_stats,
    stationary_density,
)

# (gamma, epsilon, mu) -> (atc, mean, variance) of the optimal band
FROZEN = {
    (5.0, 1e-3, 0.08): (2.5849862204690446e-05, 0.050030821956790456, 0.010015719769695132),
    (5.0, 1e-2, 0.08): (0.0001759551113495167, 0.050193200248325145, 0.010091688305975937),
    (5.0, 1e-5, 0.08): (8.849583229321859e-07, 0.05000114752289452, 0.010000620388697505),
    (0.4, 1e-3, 0.08): (0.011785260889312671, 0.5725002209660424, 1.3293903653729222),
    (2.0, 1e-2, 0.08): (0.00019402263330490387, 0.12287708762138883, 0.06054524995711527),
    (0.5, 1e-3, 0.08): (0.006527760038431987, 0.47036638178140594, 0.8941930298772501),
}


def _params(key):
    gamma, eps, mu = key
    return mk(gamma, eps, mu=mu)


@pytest.fixture(params=sorted(FROZEN, key=repr), ids=lambda k: f"g{k[0]:g}-e{k[1]:g}-m{k[2]:g}")
def frozen_case(request, optimal_solve):
    key = request.param
    band, _ = optimal_solve(_params(key))
    return key, band


class TestStationaryDensity:
    def test_unit_mass(self, frozen_case):
        key, band = frozen_case
        d = stationary_density(band, _params(key))
        mass, _ = quad(d.pdf, band.zeta_minus, band.zeta_plus)
        assert math.isclose(mass, 1.0, rel_tol=1e-12)

    def test_zero_outside_support(self, frozen_case):
        key, band = frozen_case
        d = stationary_density(band, _params(key))
        width = band.zeta_plus - band.zeta_minus
        assert d.pdf(band.zeta_minus - 0.1 * width) == 0.0
        assert d.pdf(band.zeta_plus + 0.1 * width) == 0.0

    def test_power_law_exponent(self, frozen_case):
        key, band = frozen_case
        p = _params(key)
        d = stationary_density(band, p)
        assert d.exponent == 2.0 * p.mu / p.sigma**2 - 2.0
        # pdf ratio across two interior points reproduces the power law
        z1 = band.zeta_minus + 0.25 * (band.zeta_plus - band.zeta_minus)
        z2 = band.zeta_minus + 0.75 * (band.zeta_plus - band.zeta_minus)
        expect = (abs(z2) / abs(z1)) ** d.exponent
        assert math.isclose(d.pdf(z2) / d.pdf(z1), expect, rel_tol=1e-12)

    def test_unit_mass_at_integer_exponents(self, optimal_solve):
        # q = 1 makes the density 1/|zeta|; q = 2 makes it uniform
        for mu in (0.0128, 0.0256):
            p = mk(5.0, 1e-3, mu=mu)
            band, _ = optimal_solve(p)
            d = stationary_density(band, p)
            mass, _ = quad(d.pdf, band.zeta_minus, band.zeta_plus)
            assert math.isclose(mass, 1.0, rel_tol=1e-12)

    def test_uniform_when_exponent_vanishes(self, optimal_solve):
        p = mk(5.0, 1e-3, mu=0.0256)
        band, _ = optimal_solve(p)
        d = stationary_density(band, p)
        width = band.zeta_plus - band.zeta_minus
        for frac in (0.1, 0.5, 0.9):
            assert math.isclose(d.pdf(band.zeta_minus + frac * width), 1.0 / width, rel_tol=1e-12)


class TestPolicyStats:
    def test_frozen_values(self, frozen_case):
        key, band = frozen_case
        atc_e, mean_e, var_e = FROZEN[key]
        st_ = policy_stats(band, _params(key))
        assert math.isclose(st_.atc, atc_e, rel_tol=1e-11)
        assert math.isclose(st_.mean, mean_e, rel_tol=1e-12)
        assert math.isclose(st_.variance, var_e, rel_tol=1e-12)

    def test_simpson_oracle(self, frozen_case):
        key, band = frozen_case
        p = _params(key)
        st_ = policy_stats(band, p)
        m_o, v_o = oracles.stats_simpson(band.zeta_minus, band.zeta_plus, p.mu, p.sigma, p.r)
        assert math.isclose(st_.mean, m_o, rel_tol=1e-12)
        assert math.isclose(st_.variance, v_o, rel_tol=1e-11)

    def test_esr_composition(self, frozen_case):
        key, band = frozen_case
        p = _params(key)
        st_ = policy_stats(band, p)
        assert math.isclose(st_.esr, st_.mean - 0.5 * p.gamma * st_.variance - st_.atc, rel_tol=1e-14)

    def test_esr_equals_buy_edge_closed_form(self, frozen_case):
        # the density-based rate and the boundary formula agree exactly
        key, band = frozen_case
        p = _params(key)
        assert math.isclose(esr(band, p), optimal_esr_exact(band, p), rel_tol=1e-13)

    def test_component_accessors_match(self, frozen_case):
        key, band = frozen_case
        p = _params(key)
        d = stationary_density(band, p)
        st_ = policy_stats(band, p)
        assert long_run_mean(d, p) == st_.mean
        assert long_run_variance(d, p) == st_.variance
        assert avg_transaction_costs(band, p) == st_.atc

    def test_degenerate_band(self):
        p = mk(5.0, 1e-2)
        bd = Band(5.0 / 3.0, 5.0 / 3.0)
        st_ = policy_stats(bd, p)
        assert st_.atc == 0.0
        assert math.isclose(st_.mean, 0.05, rel_tol=1e-15)
        assert math.isclose(st_.esr, 0.025, rel_tol=1e-12)


class TestEsrGap:
    def test_zero_on_identical_bands(self, optimal_solve):
        p = mk(5.0, 1e-3)
        band, _ = optimal_solve(p)
        assert esr_gap(band, band, p) == 0.0

    def test_antisymmetric(self, optimal_solve):
        p = mk(5.0, 1e-3)
        a, _ = optimal_solve(p)
        b, _ = optimal_solve(p.with_epsilon(5e-3))
        assert math.isclose(esr_gap(a, b, p), -esr_gap(b, a, p), rel_tol=1e-12)

    def test_matches_naive_subtraction_loosely(self, optimal_solve):
        p = mk(5.0, 1e-3)
        a, _ = optimal_solve(p)
        b, _ = optimal_solve(p.with_epsilon(5e-3))
        naive = esr(a, p) - esr(b, p)
        assert math.isclose(esr_gap(a, b, p), naive, rel_tol=1e-3, abs_tol=1e-15)

    def test_optimal_band_beats_nudged_bands(self, optimal_solve):
        p = mk(5.0, 1e-2)
        band, _ = optimal_solve(p)
        width = band.zeta_plus - band.zeta_minus
        for dm, dp in ((0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1), (0.05, -0.05)):
            nudged = Band(band.zeta_minus + dm * width, band.zeta_plus + dp * width)
            assert esr_gap(band, nudged, p) > 0.0


class TestSeriesAccuracy:
    """Measured remainder orders of the closed-form expansions."""

    EPS_GRID = (1e-5, 1e-4, 1e-3, 1e-2)

    def _residuals(self, optimal_solve, field):
        p0 = mk(5.0, 1e-3)
        series = optimal_stats_asym(p0)
        out = []
        for eps in self.EPS_GRID:
            band, _ = optimal_solve(p0.with_epsilon(eps))
            st_ = policy_stats(band, p0.with_epsilon(eps))
            out.append(getattr(st_, field) - getattr(series, field)(eps))
        return out

    def test_mean_and_variance_remainders_are_first_order(self, optimal_solve):
        for field in ("mean", "variance"):
            res = self._residuals(optimal_solve, field)
            slope = oracles.fit_loglog_slope(self.EPS_GRID, res)
            assert 0.85 <= slope <= 1.2

    def test_atc_and_esr_remainders_are_higher_order(self, optimal_solve):
        for field in ("atc", "esr"):
            res = self._residuals(optimal_solve, field)
            slope = oracles.fit_loglog_slope(self.EPS_GRID, res)
            assert 1.18 <= slope <= 1.6


@settings(max_examples=15, deadline=None)
@given(
    gamma=st.floats(0.35, 2.6) | st.floats(3.8, 20.0),
    eps=st.sampled_from([1e-4, 1e-3, 1e-2]),
)
def test_density_statistics_properties(gamma, eps):
    p = MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=gamma, epsilon=eps)
    from tradeband.optimal_fbp import solve_optimal_fbp

    band, _ = solve_optimal_fbp(p)
    d = stationary_density(band, p)
    mid = 0.5 * (band.zeta_minus + band.zeta_plus)
    assert d.pdf(mid) > 0.0
    st_ = policy_stats(band, p)
    pi_edges = sorted((band.pi_minus, band.pi_plus))
    assert p.r + p.mu * pi_edges[0] <= st_.mean <= p.r + p.mu * pi_edges[1]
    assert st_.variance > 0.0
    assert st_.atc > 0.0
