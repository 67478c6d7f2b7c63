"""Parameter and band plumbing."""

import math

import pytest
from hypothesis import given, strategies as st

from tradeband import (
    Band,
    CaseTag,
    InvalidParams,
    MarketParams,
    RegimeError,
    band_from_pi,
    merton_fraction,
    pi_to_zeta,
    validate_band,
    zeta_to_pi,
)

from conftest import mk


class TestMarketParams:
    def test_frozen_and_hashable(self):
        p = mk(5.0, 1e-3)
        assert hash(p) == hash(mk(5.0, 1e-3))
        with pytest.raises(AttributeError):
            p.gamma = 2.0

    @pytest.mark.parametrize("field,value", [
        ("sigma", 0.0),
        ("sigma", -0.1),
        ("epsilon", 1.0),
        ("epsilon", -1e-9),
        ("mu", 0.0),
        ("mu", -0.05),
        ("gamma", -1.0),
    ])
    def test_rejects_bad_numbers(self, field, value):
        kw = dict(mu=0.08, sigma=0.16, r=0.0, gamma=5.0, epsilon=1e-3)
        kw[field] = value
        with pytest.raises(InvalidParams):
            MarketParams(**kw)

    def test_epsilon_zero_is_frictionless_and_allowed(self):
        p = mk(5.0, 0.0)
        assert p.epsilon == 0.0

    def test_with_epsilon_returns_new_instance(self):
        p = mk(5.0, 1e-3)
        q = p.with_epsilon(1e-2)
        assert q.epsilon == 1e-2 and p.epsilon == 1e-3
        assert q.gamma == p.gamma

    def test_merton_fraction_values(self):
        assert merton_fraction(mk(5.0, 1e-3)) == pytest.approx(0.625, abs=1e-15)
        assert merton_fraction(mk(0.4, 1e-3)) == pytest.approx(7.8125, abs=1e-12)


class TestCoordinateMaps:
    def test_known_points(self):
        assert pi_to_zeta(0.5) == 1.0
        assert zeta_to_pi(1.0) == 0.5
        # levered branch: pi > 1 maps below -1
        assert pi_to_zeta(2.0) == -2.0
        assert zeta_to_pi(-2.0) == 2.0

    @given(st.floats(min_value=-50.0, max_value=50.0).filter(
        lambda pi: abs(pi - 1.0) > 1e-3))
    def test_round_trip(self, pi):
        assert zeta_to_pi(pi_to_zeta(pi)) == pytest.approx(pi, rel=1e-12)


class TestBand:
    def test_case_tags(self):
        assert Band(1.0, 2.0).case is CaseTag.UNLEVERED
        assert Band(-3.0, -2.0).case is CaseTag.LEVERED

    def test_rejects_mixed_signs_and_order(self):
        with pytest.raises(InvalidParams):
            Band(2.0, 1.0)
        with pytest.raises(InvalidParams):
            Band(-1.0, 1.0)

    def test_degenerate_band(self):
        b = Band(1.5, 1.5)
        assert b.is_degenerate
        assert not Band(1.0, 2.0).is_degenerate

    def test_band_from_pi_matches_manual_map(self):
        b = band_from_pi(0.6, 0.7)
        assert b.zeta_minus == pytest.approx(pi_to_zeta(0.6), abs=1e-15)
        assert b.zeta_plus == pytest.approx(pi_to_zeta(0.7), abs=1e-15)
        assert b.pi_minus == pytest.approx(0.6, rel=1e-14)
        assert b.pi_plus == pytest.approx(0.7, rel=1e-14)

    def test_band_from_pi_levered_ordering(self):
        # in the levered branch larger pi maps to larger (less negative) zeta
        b = band_from_pi(4.0, 8.0)
        assert b.case is CaseTag.LEVERED
        assert b.zeta_minus < b.zeta_plus < -1.0

    def test_band_from_pi_rejects_straddle(self):
        with pytest.raises(InvalidParams):
            band_from_pi(0.9, 1.1)
        with pytest.raises(InvalidParams):
            band_from_pi(0.7, 0.7)

    def test_validate_band_regime_error(self):
        p = mk(0.4, 0.2)  # cap 1/epsilon = 5 < pi* = 7.8125
        b = band_from_pi(7.0, 8.0)
        with pytest.raises(RegimeError):
            validate_band(b, p)

    def test_validate_band_passes_both_cases(self):
        assert validate_band(Band(1.3, 1.9), mk(5.0, 1e-2)) is CaseTag.UNLEVERED
        assert validate_band(Band(-1.33, -1.15), mk(0.4, 1e-2)) is CaseTag.LEVERED


@given(
    zm=st.floats(min_value=0.05, max_value=30.0),
    width=st.floats(min_value=1e-6, max_value=5.0),
)
def test_band_pi_zeta_consistency(zm, width):
    b = Band(zm, zm + width)
    assert b.pi_minus == pytest.approx(zeta_to_pi(b.zeta_minus), rel=1e-14)
    assert b.pi_plus == pytest.approx(zeta_to_pi(b.zeta_plus), rel=1e-14)
    assert b.pi_minus < b.pi_plus
