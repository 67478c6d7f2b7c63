"""Experiment harness comparing exact, shadow, and theta-family policies.

Two studies: a gap study across a spread grid (safe-rate gaps between the
optimal and shadow bands, the theta family pair, and series-vs-exact
residuals, all with fitted log-log growth exponents) and a mean-variance
frontier sweep showing the cost-adjusted drift peaking at finite
volatility.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st

from .model import (
    Band,
    InvalidParams,
    MarketParams,
    NumericalError,
    RegimeError,
    merton_fraction,
    band_from_pi,
)
from .asymptotics import optimal_esr_asym, theta_boundaries
from .optimal_fbp import solve_optimal_fbp
from .shadow_fbp import solve_shadow_system, shadow_band
from .perf import policy_stats, esr_gap

DEFAULT_EPSILON_GRID = (1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2)


@dataclass(frozen=True)
class ExponentFit:
    """OLS slope of log|y| against log(eps) with a 95% t-interval."""

    exponent: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float
    n_points: int


def fit_exponent(epsilons, values) -> ExponentFit:
    pairs = [(e, v) for e, v in zip(epsilons, values)
             if v is not None and v != 0.0 and math.isfinite(v)]
    if len(pairs) < 3:
        raise InvalidParams(
            f"exponent fit needs at least 3 nonzero points, got {len(pairs)}"
        )
    x = np.log([p[0] for p in pairs])
    y = np.log([abs(p[1]) for p in pairs])
    n = len(x)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sxx = float(np.sum((x - x.mean()) ** 2))
    se = math.sqrt(float(resid @ resid) / (n - 2) / sxx)
    tcrit = float(_st.t.ppf(0.975, n - 2))
    return ExponentFit(float(slope), float(intercept), se,
                       float(slope) - tcrit * se, float(slope) + tcrit * se, n)


@dataclass(frozen=True)
class GapRow:
    epsilon: float
    optimal_band: Band | None = None
    shadow_band_: Band | None = None
    theta_bands: dict | None = None
    esr_optimal: float | None = None
    esr_shadow: float | None = None
    esr_theta: dict | None = None
    esr_optimal_series: float | None = None
    esr_shadow_series: float | None = None
    gap_shadow: float | None = None
    gap_theta_pair: float | None = None
    series_residual_shadow: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    params: MarketParams
    epsilon_grid: tuple
    thetas: tuple
    rows: tuple
    fitted_exponents: dict


def _gap_row(params: MarketParams, eps: float, thetas) -> GapRow:
    p = params.with_epsilon(eps)
    try:
        band_o, _ = solve_optimal_fbp(p)
        band_s = shadow_band(solve_shadow_system(p))
        st_o = policy_stats(band_o, p)
        st_s = policy_stats(band_s, p)
        series = optimal_esr_asym(p)(eps)
        t_bands, t_esr = {}, {}
        for th in thetas:
            tb = band_from_pi(*theta_boundaries(p, th))
            t_bands[th] = tb
            t_esr[th] = policy_stats(tb, p).esr
        gap_pair = None
        if -1.0 in t_bands and 1.0 in t_bands:
            gap_pair = esr_gap(t_bands[-1.0], t_bands[1.0], p)
        return GapRow(
            epsilon=eps,
            optimal_band=band_o,
            shadow_band_=band_s,
            theta_bands=t_bands,
            esr_optimal=st_o.esr,
            esr_shadow=st_s.esr,
            esr_theta=t_esr,
            esr_optimal_series=series,
            esr_shadow_series=series,
            gap_shadow=esr_gap(band_o, band_s, p),
            gap_theta_pair=gap_pair,
            series_residual_shadow=math.fsum([
                st_s.mean, -0.5 * p.gamma * st_s.variance, -st_s.atc, -series,
            ]),
        )
    except (InvalidParams, NumericalError, RegimeError) as exc:
        return GapRow(epsilon=eps, error=f"{type(exc).__name__}: {exc}")


def run_gap_study(params: MarketParams, epsilon_grid=None,
                  thetas=(-1.0, 0.0, 1.0), threads: int = 1) -> ComparisonReport:
    """Safe-rate gap study across a spread grid.

    Solves both free boundary problems and the theta-family bands at each
    grid point; failures mark their row instead of aborting the study.
    The shadow safe-rate series reuses the optimal one (identical through
    the spread-linear term).
    """
    if params.gamma in (0.0, 1.0):
        raise InvalidParams(
            "gap study needs gamma outside {0, 1}; the theta family is "
            "degenerate there"
        )
    grid = tuple(sorted(epsilon_grid or DEFAULT_EPSILON_GRID))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(
                lambda e: _gap_row(params, e, thetas), grid))
    else:
        rows = tuple(_gap_row(params, e, thetas) for e in grid)
    ok = [r for r in rows if r.error is None]
    fits = {}
    if len(ok) >= 3:
        eps_ok = [r.epsilon for r in ok]
        fits["optimal_minus_shadow"] = fit_exponent(
            eps_ok, [r.gap_shadow for r in ok])
        fits["series_residual_shadow"] = fit_exponent(
            eps_ok, [r.series_residual_shadow for r in ok])
        if all(r.gap_theta_pair is not None for r in ok):
            fits["theta_best_minus_worst"] = fit_exponent(
                eps_ok, [r.gap_theta_pair for r in ok])
    return ComparisonReport(params, grid, tuple(thetas), rows, fits)


def midpoint_shift_coefficient(epsilons, bands, pi_star: float) -> float:
    """Leading eps^(2/3) coefficient of (band midpoint - pi_star).

    Richardson extrapolation on the two smallest spreads: the scaled
    shifts R(eps) = shift/eps^(2/3) differ from the coefficient by
    O(eps^(1/3)), which the two-point combination eliminates.
    """
    order = sorted(range(len(epsilons)), key=lambda i: epsilons[i])
    i1, i2 = order[0], order[1]
    e1, e2 = epsilons[i1], epsilons[i2]
    r1 = (0.5 * (bands[i1].pi_minus + bands[i1].pi_plus) - pi_star) / e1 ** (2 / 3)
    r2 = (0.5 * (bands[i2].pi_minus + bands[i2].pi_plus) - pi_star) / e2 ** (2 / 3)
    c1, c2 = e1 ** (1 / 3), e2 ** (1 / 3)
    return (r1 * c2 - r2 * c1) / (c2 - c1)


@dataclass(frozen=True)
class FrontierRow:
    gamma: float
    band: Band
    sigma_hat: float
    mean_hat: float
    atc: float
    net_drift: float
    esr: float


@dataclass(frozen=True)
class FrontierReport:
    params: MarketParams
    mode: str
    rows: tuple


def _frontier_row(band: Band, params: MarketParams, gamma: float) -> FrontierRow:
    st = policy_stats(band, params)
    return FrontierRow(
        gamma=gamma,
        band=band,
        sigma_hat=math.sqrt(st.variance),
        mean_hat=st.mean,
        atc=st.atc,
        net_drift=st.mean - params.r - st.atc,
        esr=st.esr,
    )


def run_frontier(params: MarketParams, gamma_grid=None,
                 band_grid=None) -> FrontierReport:
    """Transaction-cost frontier: (sigma_hat, mean_hat - r - ATC) rows.

    Exactly one sweep must be given: `gamma_grid` solves the optimal band
    per risk aversion at the fixed spread (a zero spread yields the
    frictionless point policies, tracing the straight line with slope
    mu/sigma), while `band_grid` evaluates given (pi_minus, pi_plus)
    pairs under the fixed parameters.
    """
    if (gamma_grid is None) == (band_grid is None):
        raise InvalidParams("give exactly one of gamma_grid or band_grid")
    rows = []
    if gamma_grid is not None:
        for g in gamma_grid:
            p = params.with_gamma(float(g))
            if p.epsilon == 0.0:
                pi = merton_fraction(p)
                z = pi / (1.0 - pi)
                band = Band(z, z)
            else:
                band, _ = solve_optimal_fbp(p)
            rows.append(_frontier_row(band, p, float(g)))
    else:
        for lo, hi in band_grid:
            band = band_from_pi(float(lo), float(hi))
            rows.append(_frontier_row(band, params, params.gamma))
    mode = "gamma_grid" if gamma_grid is not None else "band_grid"
    return FrontierReport(params, mode, tuple(rows))
