"""Long-run performance of a band policy from its stationary density.

Between trades the risky/safe ratio is a geometric Brownian motion, so
its log is a reflected Brownian motion on the band and the stationary
density in ratio space is a power law |zeta|^(q-2) with q = 2 mu/sigma^2.
Means and variances are quadratures against that density; the average
transaction-cost drain has a closed form driven by the density mass at
the sell edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import Band, CaseTag, InvalidParams, MarketParams, zeta_to_pi
from .shadow_fbp import pw

_QUAD_KW = dict(epsabs=1e-14, epsrel=1e-12, limit=200)


@dataclass(frozen=True)
class StationaryDensity:
    """Normalized power-law density of the ratio process on its band."""

    band: Band
    exponent: float
    normalizer: float

    def pdf(self, zeta):
        z = np.asarray(zeta, dtype=float)
        inside = (z >= self.band.zeta_minus) & (z <= self.band.zeta_plus)
        out = np.where(
            inside, np.abs(z) ** self.exponent / self.normalizer, 0.0
        )
        return float(out) if np.isscalar(zeta) else out

    __call__ = pdf


@dataclass(frozen=True)
class PolicyStats:
    """Long-run per-year statistics of wealth growth under a band policy."""

    mean: float
    variance: float
    atc: float
    esr: float


def _q(params: MarketParams) -> float:
    return 2.0 * params.mu / params.sigma ** 2


def stationary_density(band: Band, params: MarketParams) -> StationaryDensity:
    if band.is_degenerate:
        raise InvalidParams(
            "degenerate band has a point-mass stationary law, not a density"
        )
    t = _q(params) - 1.0
    if band.case is CaseTag.UNLEVERED:
        norm = band.zeta_minus ** t * pw(band.zeta_plus / band.zeta_minus, t)
    else:
        # zeta_- < zeta_+ < -1, so |zeta_-| > |zeta_+|
        norm = abs(band.zeta_plus) ** t \
            * pw(abs(band.zeta_minus) / abs(band.zeta_plus), t)
    return StationaryDensity(band, t - 1.0, norm)


def _expect(density: StationaryDensity, f) -> float:
    val, err = quad(
        lambda z: f(z) * density.pdf(z),
        density.band.zeta_minus, density.band.zeta_plus, **_QUAD_KW,
    )
    return val


def long_run_mean(density: StationaryDensity, params: MarketParams) -> float:
    """r + mu E[pi] under the stationary law."""
    return params.r + params.mu * _expect(density, zeta_to_pi)


def long_run_variance(density: StationaryDensity, params: MarketParams) -> float:
    """sigma^2 E[pi^2] under the stationary law."""
    return params.sigma ** 2 * _expect(density, lambda z: zeta_to_pi(z) ** 2)


def _edge_mass_ratio(t: float, L: float) -> float:
    # (q-1) / (1 - (zeta_-/zeta_+)^(q-1)) with L = log(zeta_-/zeta_+),
    # branch-selected so neither exp overflows
    if t == 0.0:
        return -1.0 / L
    u = t * L
    if u > 0.0:
        return -t * math.exp(-u) / (-math.expm1(-u))
    return t / (-math.expm1(u))


def avg_transaction_costs(band: Band, params: MarketParams) -> float:
    """Stationary rate of wealth lost to the spread, per year.

    Product of the reflection intensity (sigma^2/2 times edge density in
    log-ratio space) and the fractional cost of the sell-edge trade.
    """
    if band.is_degenerate:
        return 0.0
    eps = params.epsilon
    zp = band.zeta_plus
    fac = eps * zp / ((1.0 + zp) * (1.0 + (1.0 - eps) * zp))
    t = _q(params) - 1.0
    L = math.log(band.zeta_minus / band.zeta_plus)
    return 0.5 * params.sigma ** 2 * fac * _edge_mass_ratio(t, L)


def policy_stats(band: Band, params: MarketParams) -> PolicyStats:
    if band.is_degenerate:
        pi = band.pi_minus
        mean = params.r + params.mu * pi
        var = params.sigma ** 2 * pi ** 2
        return PolicyStats(mean, var, 0.0,
                           mean - 0.5 * params.gamma * var)
    dens = stationary_density(band, params)
    mean = long_run_mean(dens, params)
    var = long_run_variance(dens, params)
    atc = avg_transaction_costs(band, params)
    e = math.fsum([mean, -0.5 * params.gamma * var, -atc])
    return PolicyStats(mean, var, atc, e)


def esr(band: Band, params: MarketParams) -> float:
    """Equivalent safe rate: mean - (gamma/2) variance - costs."""
    return policy_stats(band, params).esr


def esr_gap(band_a: Band, band_b: Band, params: MarketParams) -> float:
    """esr(band_a) - esr(band_b), summed in one compensated pass."""
    sa = policy_stats(band_a, params)
    sb = policy_stats(band_b, params)
    return math.fsum([
        sa.mean, -0.5 * params.gamma * sa.variance, -sa.atc,
        -sb.mean, 0.5 * params.gamma * sb.variance, sb.atc,
    ])
