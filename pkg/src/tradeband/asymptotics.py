"""Small-spread expansions of boundaries, statistics, and safe rates.

Everything in here is a polynomial in epsilon^(1/3) (epsilon^(1/2) for the
risk-neutral regime) with coefficients that are explicit functions of the
market constants.  These series serve three purposes: standalone answers
for small spreads, initial guesses for the exact solvers, and the expected
values in order-of-accuracy tests against those solvers.

Sign conventions: odd roots of negative reals are taken as real roots, and
every two-thirds power is the square of a real cube root, so all series are
real for levered (pi* > 1) and unlevered (pi* < 1) parameter sets alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.optimize import brentq

from .model import InvalidParams, MarketParams, merton_fraction

ONE_THIRD = Fraction(1, 3)
ONE_HALF = Fraction(1, 2)


def real_cbrt(x: float) -> float:
    """Real cube root, negative for negative arguments."""
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def pow_two_thirds(x: float) -> float:
    """x^(2/3) as the square of the real cube root; nonnegative for real x."""
    return real_cbrt(x) ** 2


@dataclass(frozen=True)
class SeriesExpansion:
    """Truncated power series in epsilon with rational exponents.

    Term j has coefficient ``coefficients[j]`` and exponent
    ``base_power + j*step``.  ``order`` records the highest included
    power so residual-order tests know which decay rate to expect.
    """

    base_power: Fraction
    step: Fraction
    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise InvalidParams(f"series step must be positive, got {self.step}")
        if not self.coefficients:
            raise InvalidParams("series needs at least one coefficient")

    @property
    def order(self) -> Fraction:
        return self.base_power + (len(self.coefficients) - 1) * self.step

    def power(self, j: int) -> Fraction:
        return self.base_power + j * self.step

    def __call__(self, epsilon: float) -> float:
        if epsilon < 0:
            raise InvalidParams(f"epsilon must be nonnegative, got {epsilon}")
        terms = []
        for j, coef in enumerate(self.coefficients):
            if coef == 0.0:
                continue
            p = float(self.power(j))
            if epsilon == 0.0 and p < 0:
                raise InvalidParams("series has a negative power; cannot evaluate at 0")
            terms.append(coef * epsilon ** p)
        return math.fsum(terms)

    def truncate(self, order: Fraction | float | int) -> "SeriesExpansion":
        """Drop all terms with exponent above ``order``."""
        keep = [
            c for j, c in enumerate(self.coefficients)
            if self.power(j) <= Fraction(order)
        ]
        if not keep:
            raise InvalidParams(f"truncation to order {order} leaves no terms")
        return SeriesExpansion(self.base_power, self.step, tuple(keep))


@dataclass(frozen=True)
class StatsSeries:
    """Expansions of the four long-run policy statistics."""

    mean: SeriesExpansion
    variance: SeriesExpansion
    atc: SeriesExpansion
    esr: SeriesExpansion

    def at(self, epsilon: float) -> dict[str, float]:
        return {
            "mean": self.mean(epsilon),
            "variance": self.variance(epsilon),
            "atc": self.atc(epsilon),
            "esr": self.esr(epsilon),
        }


@dataclass(frozen=True)
class ThetaPolicy:
    """Interpolation parameter for the band family around the shadow policy.

    theta = 1 is the shadow policy itself; theta = -1 matches the optimal
    band through second order and is the best of the family at fourth order.
    """

    theta: float

    def boundaries(self, params: MarketParams, order: int = 2) -> tuple[float, float]:
        return theta_boundaries(params, self.theta, order=order)

    def esr_series(self, params: MarketParams) -> SeriesExpansion:
        return theta_esr_asym(params, self.theta)


def _cube_factor(params: MarketParams) -> float:
    """X = (gamma*pi*(pi*-1)/6)^(1/3), the recurring second-order scale."""
    p = merton_fraction(params)
    return real_cbrt(params.gamma * p * (p - 1.0) / 6.0)


def _check_order(order: int, top: int) -> int:
    if not isinstance(order, int) or order < 0 or order > top:
        raise InvalidParams(f"order must be an integer in [0, {top}], got {order!r}")
    return order


def _pi_boundary_series(
    params: MarketParams, sign: float, second_order_sign: float, order: int
) -> SeriesExpansion:
    p = merton_fraction(params)
    a1 = real_cbrt(3.0 / (4.0 * params.gamma) * p ** 2 * (p - 1.0) ** 2)
    b2 = second_order_sign * ((1.0 - params.gamma) * p / params.gamma) * _cube_factor(params)
    coeffs = (p, sign * a1, b2)
    return SeriesExpansion(Fraction(0), ONE_THIRD, coeffs[: order + 1])


def optimal_boundary_series(
    params: MarketParams, order: int = 2
) -> tuple[SeriesExpansion, SeriesExpansion]:
    """Expansions of the optimal buy/sell boundaries in risky-weight space."""
    _check_order(order, 2)
    lo = _pi_boundary_series(params, -1.0, -1.0, order)
    hi = _pi_boundary_series(params, +1.0, -1.0, order)
    return lo, hi


def optimal_boundaries_asym(params: MarketParams, order: int = 2) -> tuple[float, float]:
    """Optimal boundaries (pi_-, pi_+) evaluated at params.epsilon."""
    lo, hi = optimal_boundary_series(params, order)
    return lo(params.epsilon), hi(params.epsilon)


def shadow_boundary_series(
    params: MarketParams, order: int = 2
) -> tuple[SeriesExpansion, SeriesExpansion]:
    """Shadow-policy boundary expansions; the second-order term flips sign."""
    _check_order(order, 2)
    lo = _pi_boundary_series(params, -1.0, +1.0, order)
    hi = _pi_boundary_series(params, +1.0, +1.0, order)
    return lo, hi


def shadow_boundaries_asym(params: MarketParams, order: int = 2) -> tuple[float, float]:
    """Shadow boundaries (pi~_-, pi~_+) evaluated at params.epsilon."""
    lo, hi = shadow_boundary_series(params, order)
    return lo(params.epsilon), hi(params.epsilon)


def _zeta_boundary_series(
    params: MarketParams, sign: float, second_coef: float, order: int
) -> SeriesExpansion:
    p = merton_fraction(params)
    zeta_star = p / (1.0 - p)
    z1 = real_cbrt(3.0 / (4.0 * params.gamma)) * pow_two_thirds(p / (1.0 - p) ** 2)
    coeffs = (zeta_star, sign * z1, second_coef)
    return SeriesExpansion(Fraction(0), ONE_THIRD, coeffs[: order + 1])


def optimal_zeta_series(
    params: MarketParams, order: int = 2
) -> tuple[SeriesExpansion, SeriesExpansion]:
    """Optimal boundary expansions in ratio space; factor (5-2*gamma)."""
    _check_order(order, 2)
    p = merton_fraction(params)
    z2 = -((5.0 - 2.0 * params.gamma) * p / (2.0 * params.gamma * (1.0 - p) ** 2)) \
        * _cube_factor(params)
    lo = _zeta_boundary_series(params, -1.0, z2, order)
    hi = _zeta_boundary_series(params, +1.0, z2, order)
    return lo, hi


def optimal_zeta_asym(params: MarketParams, order: int = 2) -> tuple[float, float]:
    lo, hi = optimal_zeta_series(params, order)
    return lo(params.epsilon), hi(params.epsilon)


def shadow_zeta_series(
    params: MarketParams, order: int = 2
) -> tuple[SeriesExpansion, SeriesExpansion]:
    """Shadow boundary expansions in ratio space; factor (1+2*gamma).

    The first-order coefficient is the same as for the optimal band,
    (3/(4*gamma))^(1/3) * (pi*/(1-pi*)^2)^(2/3), as required by mapping the
    weight-space expansions through zeta = pi/(1-pi).
    """
    _check_order(order, 2)
    p = merton_fraction(params)
    z2 = -((1.0 + 2.0 * params.gamma) * p / (2.0 * params.gamma * (1.0 - p) ** 2)) \
        * _cube_factor(params)
    lo = _zeta_boundary_series(params, -1.0, z2, order)
    hi = _zeta_boundary_series(params, +1.0, z2, order)
    return lo, hi


def shadow_zeta_asym(params: MarketParams, order: int = 2) -> tuple[float, float]:
    lo, hi = shadow_zeta_series(params, order)
    return lo(params.epsilon), hi(params.epsilon)


def _delta_scale(params: MarketParams) -> float:
    """D with Delta = D * eps^(1/3); negative in the levered case."""
    p = merton_fraction(params)
    return real_cbrt(6.0 / (params.gamma * p * (1.0 - p)))


def _cs_series_raw(
    params: MarketParams, order: int
) -> tuple[SeriesExpansion, SeriesExpansion]:
    p = merton_fraction(params)
    g = params.gamma
    D = _delta_scale(params)
    cbar = (1.0 - p) / p
    c_delta = (
        cbar,
        (1.0 - p) / (2.0 * p),
        (1.0 - p) * (3.0 - p * (2.0 * g + 1.0)) / (12.0 * p),
        -(p - 1.0)
        * ((4.0 * g ** 2 + 22.0 * g + 1.0) * p ** 2 - 24.0 * (2.0 * g + 1.0) * p + 36.0)
        / (360.0 * p),
    )
    s_delta = (
        1.0,
        1.0,
        0.5,
        ((4.0 * g ** 2 - 8.0 * g + 1.0) * p ** 2 + 3.0 * (4.0 * g - 3.0) * p + 36.0)
        / 180.0,
        ((8.0 * g ** 2 - 26.0 * g + 2.0) * p ** 2 + 2.0 * (17.0 * g - 9.0) * p + 27.0)
        / 360.0,
    )
    c_coeffs = tuple(coef * D ** j for j, coef in enumerate(c_delta[: order + 1]))
    s_coeffs = tuple(coef * D ** j for j, coef in enumerate(s_delta[: order + 1]))
    return (
        SeriesExpansion(Fraction(0), ONE_THIRD, c_coeffs),
        SeriesExpansion(Fraction(0), ONE_THIRD, s_coeffs),
    )


def cs_expansion(
    params: MarketParams, order: int = 4
) -> tuple[SeriesExpansion, SeriesExpansion]:
    """Expansions of the reduced shadow unknowns (c, s) in epsilon^(1/3).

    The c series carries printed coefficients through the third power, the
    s series through the fourth; requesting more is an error.  The singular
    parameter sets gamma = 1/2 and 2*mu/sigma^2 = 1 are rejected here (the
    derivation behind these coefficients excludes them), although the exact
    solver handles them.
    """
    _check_order(order, 4)
    if params.gamma == 0:
        raise InvalidParams("cs_expansion requires gamma > 0")
    p = merton_fraction(params)
    if abs(params.gamma - 0.5) < 1e-12:
        raise InvalidParams(
            "singular hypothesis gamma = 1/2: the (c, s) series derivation "
            "excludes it; use solve_shadow_system directly"
        )
    if abs(2.0 * params.gamma * p - 1.0) < 1e-12:
        raise InvalidParams(
            "singular hypothesis 2*mu/sigma^2 = 1: the (c, s) series "
            "derivation excludes it; use solve_shadow_system directly"
        )
    c_series, s_series = _cs_series_raw(params, order)
    return c_series, s_series


def cs_seed(params: MarketParams, order: int = 4) -> tuple[float, float]:
    """Series seed for the exact (c, s) solver.

    Evaluates the same polynomial coefficients as `cs_expansion` but skips
    its formal singular-hypothesis check: the coefficients are polynomials
    in (gamma, pi*) and extend continuously to the excluded sets, which is
    all a Newton seed needs.
    """
    c_series, s_series = _cs_series_raw(params, _check_order(order, 4))
    return c_series(params.epsilon), s_series(params.epsilon)


def optimal_stats_asym(params: MarketParams) -> StatsSeries:
    """Expansions of the long-run statistics of the optimal policy.

    The mean's second-order bracket is (2*pi*-1); the variance bracket is
    (7*pi*-3); the cost series starts at epsilon^(2/3).
    """
    p = merton_fraction(params)
    g, sig, mu = params.gamma, params.sigma, params.mu
    X = _cube_factor(params)
    mean = SeriesExpansion(
        Fraction(0), ONE_THIRD,
        (params.r + mu * p, 0.0, -(mu * (2.0 * p - 1.0) / g) * X),
    )
    variance = SeriesExpansion(
        Fraction(0), ONE_THIRD,
        (mu ** 2 / (g ** 2 * sig ** 2), 0.0, -(sig ** 2 * p * (7.0 * p - 3.0) / (2.0 * g)) * X),
    )
    atc = SeriesExpansion(
        Fraction(0), ONE_THIRD,
        (0.0, 0.0, (3.0 * sig ** 2 / g) * X ** 4,
         -(mu * (g - 1.0) / (2.0 * g)) * p * (p - 1.0)),
    )
    return StatsSeries(mean=mean, variance=variance, atc=atc, esr=optimal_esr_asym(params))


def shadow_stats_asym(params: MarketParams) -> StatsSeries:
    """Expansions of the long-run statistics of the shadow policy.

    Mean bracket (2*gamma*pi*-1); variance bracket (pi*(8*gamma-1)-3).  The
    cost and safe-rate series coincide with the optimal ones through the
    printed orders.
    """
    p = merton_fraction(params)
    g, sig, mu = params.gamma, params.sigma, params.mu
    X = _cube_factor(params)
    mean = SeriesExpansion(
        Fraction(0), ONE_THIRD,
        (params.r + mu * p, 0.0, -(mu * (2.0 * g * p - 1.0) / g) * X),
    )
    variance = SeriesExpansion(
        Fraction(0), ONE_THIRD,
        (mu ** 2 / (g ** 2 * sig ** 2), 0.0,
         -(sig ** 2 * p * (p * (8.0 * g - 1.0) - 3.0) / (2.0 * g)) * X),
    )
    optimal = optimal_stats_asym(params)
    return StatsSeries(mean=mean, variance=variance, atc=optimal.atc, esr=optimal.esr)


def optimal_esr_asym(params: MarketParams) -> SeriesExpansion:
    """Expansion of the maximum equivalent safe rate, inclusive of r."""
    p = merton_fraction(params)
    g, sig, mu = params.gamma, params.sigma, params.mu
    esr0 = params.r + (g * sig ** 2 / 2.0) * p ** 2
    e2 = -(g * sig ** 2 / 2.0) * pow_two_thirds(
        3.0 / (4.0 * g) * p ** 2 * (p - 1.0) ** 2
    )
    e3 = (mu * (g - 1.0) / (2.0 * g)) * p * (p - 1.0)
    return SeriesExpansion(Fraction(0), ONE_THIRD, (esr0, 0.0, e2, e3))


def _require_theta_params(params: MarketParams) -> float:
    if params.gamma in (0.0, 1.0):
        raise InvalidParams(
            f"theta family requires gamma outside {{0, 1}}, got {params.gamma}"
        )
    return merton_fraction(params)


def theta_shift_coefficient(params: MarketParams) -> float:
    """Coefficient of (theta-1)*eps^(2/3) in the theta-family boundaries."""
    p = _require_theta_params(params)
    g = params.gamma
    return ((g - 1.0) * p ** 2 * (1.0 - p) / 6.0) * pow_two_thirds(
        6.0 / (g * p * (1.0 - p))
    )


def theta_boundary_series(
    params: MarketParams, theta: float, order: int = 2
) -> tuple[SeriesExpansion, SeriesExpansion]:
    _check_order(order, 2)
    shift = (theta - 1.0) * theta_shift_coefficient(params)
    lo, hi = shadow_boundary_series(params, 2)
    lo_c = list(lo.coefficients)
    hi_c = list(hi.coefficients)
    lo_c[2] += shift
    hi_c[2] += shift
    lo = SeriesExpansion(Fraction(0), ONE_THIRD, tuple(lo_c[: order + 1]))
    hi = SeriesExpansion(Fraction(0), ONE_THIRD, tuple(hi_c[: order + 1]))
    return lo, hi


def theta_boundaries(
    params: MarketParams, theta: float, order: int = 2
) -> tuple[float, float]:
    """Boundaries of the theta-family policy at params.epsilon."""
    lo, hi = theta_boundary_series(params, theta, order)
    return lo(params.epsilon), hi(params.epsilon)


def k_of_theta(params: MarketParams, theta: float) -> float:
    """Fourth-order performance multiplier; convex in theta, vertex at -1."""
    p = merton_fraction(params)
    g = params.gamma
    return -9.0 + 2.0 * p * (
        9.0 + p * (3.0 + 12.0 * g * (g - 2.0) + (10.0 * theta + 5.0 * theta ** 2) * (g - 1.0) ** 2)
    )


def theta_esr_asym(params: MarketParams, theta: float) -> SeriesExpansion:
    """Safe-rate expansion of the theta policy, including the eps^(4/3) term."""
    p = _require_theta_params(params)
    g, sig = params.gamma, params.sigma
    base = optimal_esr_asym(params)
    e4 = -(sig ** 2 * k_of_theta(params, theta) / (20.0 * g)) * pow_two_thirds(
        g * p * (1.0 - p) / 6.0
    )
    return SeriesExpansion(Fraction(0), ONE_THIRD, base.coefficients + (e4,))


def _kappa_equation(x: float) -> float:
    return 1.5 * x + math.log1p(-x)


@lru_cache(maxsize=1)
def kappa() -> float:
    """Root of (3/2)x + log(1-x) = 0 on (0, 1), excluding the trivial root 0.

    The equation is positive on (0, 1/3] and strictly decreasing afterwards,
    so bracketing away from 0 isolates the unique interior root.
    """
    return float(brentq(_kappa_equation, 0.05, 1.0 - 1e-12, xtol=1e-15, rtol=8.9e-16))


def kappa_residual() -> float:
    return abs(_kappa_equation(kappa()))


def risk_neutral_boundaries(params: MarketParams) -> tuple[float, float]:
    """Leading-order boundaries for the risk-neutral investor (gamma = 0).

    Both boundaries blow up like epsilon^(-1/2); their ratio tends to
    (1 - kappa).
    """
    if params.gamma != 0:
        raise InvalidParams(
            f"risk-neutral boundaries require gamma = 0, got {params.gamma}"
        )
    k = kappa()
    lead = math.sqrt(k * params.mu) / params.sigma
    scale = lead / math.sqrt(params.epsilon)
    return (1.0 - k) * scale + 1.0, scale + 1.0
