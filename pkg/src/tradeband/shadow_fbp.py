"""Exact shadow-price construction.

The shadow market replaces the bid-ask pair by a single fictitious price
g(pi)*S evolving inside the spread.  Requiring that the frictionless
optimizer of that market trades exactly at the band edges reduces the
problem to one scalar ODE whose solution phi is explicit, leaving a
two-variable nonlinear system for the scaled boundary pair

    c = 1/zeta_-,   s = zeta_+/zeta_-.

All closed forms are evaluated through the two kernels

    pw(x, t) = (x^t - 1)/t      (-> log x   as t -> 0)
    qr(y, t) = (1 + t*y)^(1/t)  (-> exp y   as t -> 0)

so the singular parameter sets gamma = 1/2 and 2*mu/sigma^2 = 1, where the
textbook exponent forms degenerate, are covered by the same code path: the
t = 0 limits ARE the logarithmic antiderivatives those cases call for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    Band,
    CaseTag,
    InvalidParams,
    MarketParams,
    NumericalError,
    RegimeError,
    merton_fraction,
    validate_band,
)
from .asymptotics import cs_seed

_EDGE_SLACK = 1e-9  # relative tolerance for band-edge queries


def pw(x: float, t: float) -> float:
    """(x^t - 1)/t for x > 0, continuous in t through t = 0 (= log x)."""
    if x <= 0.0:
        raise NumericalError(f"pw kernel needs a positive base, got x={x}")
    lx = math.log(x)
    if t == 0.0:
        return lx
    return math.expm1(t * lx) / t


def pw_prime(x: float, t: float) -> float:
    """d/dx pw(x, t) = x^(t-1)."""
    return x ** (t - 1.0)


def qr(y: float, t: float) -> float:
    """(1 + t*y)^(1/t), continuous in t through t = 0 (= exp y)."""
    if t == 0.0:
        return math.exp(y)
    u = t * y
    if u <= -1.0:
        raise NumericalError(
            f"radicand 1 + {t}*{y} of the closed-form root is nonpositive"
        )
    return math.exp(math.log1p(u) / t)


@dataclass(frozen=True)
class ShadowSolution:
    """Solved scaled boundary pair with its market parameters.

    c = 1/zeta_-, s = zeta_+/zeta_-.  The scaled ratio z = c*zeta runs over
    [1, s] (unlevered, s > 1) or [s, 1] (levered, s < 1); z > 0 throughout.
    """

    c: float
    s: float
    params: MarketParams
    case: CaseTag
    residual: tuple[float, float]
    iterations: int

    @property
    def z_interval(self) -> tuple[float, float]:
        return (min(1.0, self.s), max(1.0, self.s))

    @property
    def pi_minus(self) -> float:
        return 1.0 / (self.c + 1.0)

    @property
    def pi_plus(self) -> float:
        return self.s / (self.c + self.s)


@dataclass(frozen=True)
class ShadowDynamics:
    """Shadow price ratio and local market coefficients at one weight pi."""

    g_value: float
    g_prime: float
    g_second: float
    mu_tilde: float
    sigma_tilde: float
    pi_tilde: float


def _exponents(params: MarketParams) -> tuple[float, float]:
    """(a, b) = (1 - 2*gamma*pi*, 1 - 2*gamma); a = 0 and b = 0 are fine."""
    p = merton_fraction(params)
    return 1.0 - 2.0 * params.gamma * p, 1.0 - 2.0 * params.gamma


def _system(c: float, s: float, params: MarketParams) -> tuple[float, float]:
    """Residuals of the boundary system in regular-at-singular form.

    F1 carries an extra 1/(1 - 2*gamma) factor folded into the pw kernel
    so gamma = 1/2 needs no branch; F2 is untouched.  Roots are unchanged.
    """
    a, b = _exponents(params)
    eps = params.epsilon
    if c + 1.0 <= 0.0 or s <= 0.0:
        raise NumericalError(f"iterate left the domain: c={c}, s={s}")
    A = (c + (1.0 - eps) * s) / (c + 1.0)
    if A <= 0.0:
        raise NumericalError(
            f"expression (c+(1-eps)s)/(c+1) = {A} nonpositive at c={c}, s={s}"
        )
    f1 = pw(A, b) - pw(s, a) / (c + 1.0)
    f2 = A - (1.0 - eps) ** (1.0 / (2.0 * params.gamma)) * s ** merton_fraction(params)
    return f1, f2


def _system_jacobian(c: float, s: float, params: MarketParams):
    a, b = _exponents(params)
    eps = params.epsilon
    p = merton_fraction(params)
    A = (c + (1.0 - eps) * s) / (c + 1.0)
    dA_dc = (1.0 - (1.0 - eps) * s) / (c + 1.0) ** 2
    dA_ds = (1.0 - eps) / (c + 1.0)
    pwA = pw_prime(A, b)
    f1c = pwA * dA_dc + pw(s, a) / (c + 1.0) ** 2
    f1s = pwA * dA_ds - pw_prime(s, a) / (c + 1.0)
    f2c = dA_dc
    f2s = dA_ds - (1.0 - eps) ** (1.0 / (2.0 * params.gamma)) * p * s ** (p - 1.0)
    return f1c, f1s, f2c, f2s


def _newton_cs(params: MarketParams, c0: float, s0: float,
               tol: float = 1e-14, maxiter: int = 40):
    c, s = c0, s0
    f1, f2 = _system(c, s, params)
    norm = max(abs(f1), abs(f2))
    iterations = 0
    for _ in range(maxiter):
        if norm <= tol:
            break
        f1c, f1s, f2c, f2s = _system_jacobian(c, s, params)
        det = f1c * f2s - f1s * f2c
        if det == 0.0 or not math.isfinite(det):
            raise NumericalError(
                f"singular Jacobian at (c, s)=({c}, {s}), residual=({f1}, {f2})"
            )
        dc = -(f1 * f2s - f2 * f1s) / det
        ds = -(f2 * f1c - f1 * f2c) / det
        step = 1.0
        improved = False
        for _ in range(60):
            cn, sn = c + step * dc, s + step * ds
            try:
                g1, g2 = _system(cn, sn, params)
            except NumericalError:
                step *= 0.5
                continue
            if max(abs(g1), abs(g2)) < norm:
                c, s, f1, f2 = cn, sn, g1, g2
                norm = max(abs(f1), abs(f2))
                improved = True
                break
            step *= 0.5
        iterations += 1
        if not improved:
            break
    return c, s, (f1, f2), norm, iterations


def solve_shadow_system(params: MarketParams) -> ShadowSolution:
    """Solve the scaled boundary system by damped Newton from the series seed.

    Falls back to a short continuation in epsilon if the direct solve
    stalls.  The converged residual infinity-norm is below 1e-12 or a
    `NumericalError` carries the last iterate.
    """
    if params.gamma <= 0:
        raise InvalidParams("shadow construction requires gamma > 0")
    if params.epsilon == 0.0:
        raise InvalidParams(
            "epsilon = 0 is frictionless: the bid-ask interval is a point"
        )
    pi_star = merton_fraction(params)
    if pi_star > 1.0 and params.epsilon * pi_star >= 1.0:
        raise RegimeError(
            f"leveraged target fraction {pi_star} exceeds the solvency cap "
            f"1/epsilon = {1.0 / params.epsilon}; no band exists"
        )
    target = params.epsilon
    c0, s0 = cs_seed(params)
    try:
        c, s, resid, norm, its = _newton_cs(params, c0, s0)
    except NumericalError:
        norm, its = math.inf, 0
        c, s, resid = c0, s0, (math.nan, math.nan)
    if norm > 1e-12:
        # continuation: walk epsilon up from a smaller, easier spread
        c, s = None, None
        its_total = 0
        for frac in (1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0, 1.0):
            p_step = params.with_epsilon(target * frac)
            seed = cs_seed(p_step) if c is None else (c, s)
            c, s, resid, norm, its = _newton_cs(p_step, *seed)
            its_total += its
            if norm > 1e-12:
                raise NumericalError(
                    f"shadow system did not converge at epsilon="
                    f"{p_step.epsilon}: last iterate (c, s)=({c}, {s}), "
                    f"residuals={resid}"
                )
        its = its_total
    p = merton_fraction(params)
    case = CaseTag.UNLEVERED if p < 1.0 else CaseTag.LEVERED
    if (s > 1.0) != (case is CaseTag.UNLEVERED):
        raise NumericalError(
            f"solution (c, s)=({c}, {s}) landed on the wrong branch for "
            f"pi*={p}"
        )
    sol = ShadowSolution(c=c, s=s, params=params, case=case,
                         residual=resid, iterations=its)
    validate_band(shadow_band(sol), params)
    return sol


def _check_z(z: float, sol: ShadowSolution) -> float:
    z_lo, z_hi = sol.z_interval
    slack = _EDGE_SLACK * (z_hi - z_lo + 1.0)
    if z < z_lo - slack or z > z_hi + slack:
        raise InvalidParams(
            f"z={z} outside the scaled band [{z_lo}, {z_hi}]"
        )
    return min(max(z, z_lo), z_hi)


def phi(z: float, sol: ShadowSolution) -> float:
    """Closed-form solution of the reduced ODE on the scaled band."""
    z = _check_z(z, sol)
    a, b = _exponents(sol.params)
    c = sol.c
    return -c + (c + 1.0) * qr(pw(z, a) / (c + 1.0), b)


def phi_prime(z: float, sol: ShadowSolution) -> float:
    """First integral: phi' = ((c+phi)/(c+1))^(2*gamma) * z^(-2*gamma*pi*)."""
    z = _check_z(z, sol)
    a, b = _exponents(sol.params)
    c = sol.c
    u = (c + phi(z, sol)) / (c + 1.0)
    if u <= 0.0:
        raise NumericalError(f"c + phi nonpositive at z={z}")
    return u ** (1.0 - b) * z ** (a - 1.0)


def phi_second(z: float, sol: ShadowSolution) -> float:
    """Curvature from the ODE itself, using the closed-form value and slope."""
    z = _check_z(z, sol)
    gamma = sol.params.gamma
    p = merton_fraction(sol.params)
    val = phi(z, sol)
    slope = phi_prime(z, sol)
    return 2.0 * gamma * slope ** 2 / (sol.c + val) \
        - 2.0 * gamma * p * slope / z


def shadow_band(sol: ShadowSolution) -> Band:
    """Band (zeta_- = 1/c, zeta_+ = s/c) recovered from the scaled pair."""
    try:
        band = Band(1.0 / sol.c, sol.s / sol.c)
    except InvalidParams as exc:
        raise NumericalError(
            f"recovered band outside asymptotic regime: {exc}"
        ) from exc
    validate_band(band, sol.params)
    return band


def shadow_g(pi: float, sol: ShadowSolution) -> ShadowDynamics:
    """Shadow ratio g and market coefficients at risky weight pi.

    g(pi) = phi(z)/z at z = c*pi/(1-pi); derivatives come from the closed
    form and the ODE, not finite differences, so smooth pasting holds to
    full evaluation accuracy.
    """
    params = sol.params
    if pi == 1.0:
        raise InvalidParams("pi = 1 has no finite risky/safe ratio")
    zeta = pi / (1.0 - pi)
    z = sol.c * zeta
    z = _check_z(z, sol)

    val = phi(z, sol)
    slope = phi_prime(z, sol)
    curv = phi_second(z, sol)

    g = val / z
    # ratio-space derivatives of G(zeta) = phi(c*zeta)/(c*zeta)
    G1 = sol.c * (slope * z - val) / z ** 2
    G2 = sol.c ** 2 * (curv * z ** 2 - 2.0 * slope * z + 2.0 * val) / z ** 3
    dz_dpi = 1.0 / (1.0 - pi) ** 2
    d2z_dpi2 = 2.0 / (1.0 - pi) ** 3
    g1 = G1 * dz_dpi
    g2 = G2 * dz_dpi ** 2 + G1 * d2z_dpi2

    sig, mu = params.sigma, params.mu
    drift_shift = (
        g1 * (pi * (1.0 - pi) * mu + pi * (1.0 - pi) ** 2 * sig ** 2)
        + 0.5 * g2 * pi ** 2 * (1.0 - pi) ** 2 * sig ** 2
    ) / g
    mu_tilde = mu + drift_shift
    sigma_tilde = sig * (g + g1 * pi * (1.0 - pi)) / g
    pi_tilde = pi * g / ((1.0 - pi) + pi * g)
    return ShadowDynamics(
        g_value=g, g_prime=g1, g_second=g2,
        mu_tilde=mu_tilde, sigma_tilde=sigma_tilde, pi_tilde=pi_tilde,
    )


def merton_residual(pi: float, sol: ShadowSolution) -> float:
    """pi~ - mu~/(gamma sigma~^2); vanishes when the shadow market is built
    correctly, because phi solves the reduced ODE."""
    dyn = shadow_g(pi, sol)
    if dyn.sigma_tilde == 0.0:
        raise NumericalError(f"shadow volatility vanished at pi={pi}")
    return dyn.pi_tilde - dyn.mu_tilde / (sol.params.gamma * dyn.sigma_tilde ** 2)
