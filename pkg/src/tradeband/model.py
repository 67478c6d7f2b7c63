"""Market primitives: parameters, no-trade bands, and the frictionless target.

Positions are tracked through the ratio zeta = pi / (1 - pi) of risky to safe
wealth, where pi is the fraction of total wealth held in the risky asset.
A trading policy is a band [zeta_-, zeta_+] in which the investor does not
trade; reflection at the edges keeps the ratio inside.  Two regimes are
admissible: an unlevered band with 0 < zeta_- < zeta_+ (both positions
positive) and a levered band with zeta_- < zeta_+ < -1/(1-epsilon) (safe
position negative, pi > 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class InvalidParams(ValueError):
    """Raised when market parameters or band inputs fail validation."""


class NumericalError(RuntimeError):
    """Raised when an iterative solver fails to converge."""


class RegimeError(RuntimeError):
    """Raised when a solved band violates its case inequality.

    This is the symptom of a spread too large for the asymptotic regime:
    the levered constraint zeta_+ < -1/(1-epsilon) (or unlevered zeta_- > 0)
    stops holding and the stationary analysis behind the performance
    formulas no longer applies.
    """


class CaseTag(enum.Enum):
    """Which branch of the band dichotomy a policy lives on."""

    UNLEVERED = "unlevered"
    LEVERED = "levered"


@dataclass(frozen=True)
class MarketParams:
    """Market and preference constants.

    Parameters
    ----------
    mu : float
        Excess drift of the risky asset over the safe rate, mu > 0.
    sigma : float
        Volatility of the risky asset, sigma > 0.
    r : float
        Safe rate, r >= 0.
    gamma : float
        Risk aversion, gamma >= 0.  gamma == 0 selects the risk-neutral
        regime, where only `risk_neutral_boundaries` applies.
    epsilon : float
        Proportional cost on sales: the bid price is (1 - epsilon) times
        the ask.  0 <= epsilon < 1, zero meaning frictionless.
    """

    mu: float
    sigma: float
    r: float
    gamma: float
    epsilon: float

    def __post_init__(self) -> None:
        for name in ("mu", "sigma", "r", "gamma", "epsilon"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InvalidParams(f"{name} must be a finite number, got {v!r}")
        if self.mu <= 0:
            raise InvalidParams(f"mu must be positive, got {self.mu}")
        if self.sigma <= 0:
            raise InvalidParams(f"sigma must be positive, got {self.sigma}")
        if self.r < 0:
            raise InvalidParams(f"r must be nonnegative, got {self.r}")
        if self.gamma < 0:
            raise InvalidParams(f"gamma must be nonnegative, got {self.gamma}")
        if not (0.0 <= self.epsilon < 1.0):
            raise InvalidParams(
                f"epsilon must lie in [0, 1), got {self.epsilon}"
            )
        if self.gamma > 0 and self.mu == self.gamma * self.sigma ** 2:
            raise InvalidParams(
                "frictionless target fraction equals 1 (mu == gamma*sigma^2); "
                "the band construction degenerates there"
            )

    def with_epsilon(self, epsilon: float) -> "MarketParams":
        return replace(self, epsilon=epsilon)

    def with_gamma(self, gamma: float) -> "MarketParams":
        return replace(self, gamma=gamma)


def merton_fraction(params: MarketParams) -> float:
    """Frictionless optimal fraction of wealth in the risky asset.

    Returns mu / (gamma * sigma^2).  Raises for gamma == 0, where no
    finite target exists (see `risk_neutral_boundaries` for that regime).
    """
    if params.gamma == 0:
        raise InvalidParams(
            "no frictionless target for gamma == 0; "
            "use the risk-neutral boundary formulas instead"
        )
    return params.mu / (params.gamma * params.sigma ** 2)


def pi_to_zeta(pi: float) -> float:
    """Map a wealth fraction to the risky/safe ratio zeta = pi/(1-pi)."""
    if pi == 1.0:
        raise InvalidParams("pi == 1 has no finite risky/safe ratio")
    return pi / (1.0 - pi)


def zeta_to_pi(zeta: float) -> float:
    """Inverse of `pi_to_zeta`: pi = zeta/(1+zeta)."""
    if zeta == -1.0:
        raise InvalidParams("zeta == -1 corresponds to zero total wealth")
    return zeta / (1.0 + zeta)


@dataclass(frozen=True)
class Band:
    """No-trade band [zeta_minus, zeta_plus] in ratio coordinates.

    Construction enforces zeta_minus <= zeta_plus and the case dichotomy
    (zeta_minus > 0 or zeta_plus < -1).  The epsilon-dependent part of the
    levered inequality needs market params; solvers and performance
    evaluators re-check it via `validate_band`.  Equal endpoints describe
    the degenerate point policy used for frictionless limits.
    """

    zeta_minus: float
    zeta_plus: float

    def __post_init__(self) -> None:
        zm, zp = self.zeta_minus, self.zeta_plus
        if not (math.isfinite(zm) and math.isfinite(zp)):
            raise InvalidParams(f"band endpoints must be finite, got ({zm}, {zp})")
        if zm > zp:
            raise InvalidParams(
                f"band endpoints out of order: zeta_minus={zm} > zeta_plus={zp}"
            )
        if not (zm > 0.0 or zp < -1.0):
            raise InvalidParams(
                f"band ({zm}, {zp}) is neither unlevered (zeta_minus > 0) "
                f"nor levered (zeta_plus < -1); positions would pass through "
                f"a bankruptcy point"
            )

    @property
    def case(self) -> CaseTag:
        return CaseTag.UNLEVERED if self.zeta_minus > 0 else CaseTag.LEVERED

    @property
    def pi_minus(self) -> float:
        return zeta_to_pi(self.zeta_minus)

    @property
    def pi_plus(self) -> float:
        return zeta_to_pi(self.zeta_plus)

    @property
    def width(self) -> float:
        return self.zeta_plus - self.zeta_minus

    @property
    def is_degenerate(self) -> bool:
        return self.zeta_minus == self.zeta_plus


def band_from_pi(pi_minus: float, pi_plus: float) -> Band:
    """Build a band from wealth-fraction boundaries.

    pi_minus < pi_plus is required and both must sit on the same side
    of pi = 1 (same branch of the ratio map); otherwise the image is not
    an interval in zeta.
    """
    if not (math.isfinite(pi_minus) and math.isfinite(pi_plus)):
        raise InvalidParams(f"pi boundaries must be finite, got ({pi_minus}, {pi_plus})")
    if pi_minus == pi_plus:
        raise InvalidParams("empty no-trade region: pi_minus == pi_plus")
    if pi_minus > pi_plus:
        raise InvalidParams(
            f"pi boundaries out of order: {pi_minus} > {pi_plus}"
        )
    if (pi_minus - 1.0) * (pi_plus - 1.0) <= 0.0:
        raise InvalidParams(
            f"pi boundaries ({pi_minus}, {pi_plus}) straddle pi = 1; "
            f"no single band case covers them"
        )
    return Band(pi_to_zeta(pi_minus), pi_to_zeta(pi_plus))


def validate_band(band: Band, params: MarketParams) -> CaseTag:
    """Re-check the full band inequality, including the epsilon part.

    Returns the case tag on success.  Raises `RegimeError` when the
    levered constraint zeta_plus < -1/(1-epsilon) fails, which is how an
    epsilon too large for the asymptotic regime manifests.
    """
    if band.case is CaseTag.LEVERED:
        limit = -1.0 / (1.0 - params.epsilon)
        if not band.zeta_plus < limit:
            raise RegimeError(
                f"levered band upper edge {band.zeta_plus} is not below "
                f"-1/(1-epsilon) = {limit}; epsilon={params.epsilon} too "
                f"large for the asymptotic regime"
            )
    return band.case
