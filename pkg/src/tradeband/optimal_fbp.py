"""Exact optimal-policy free boundary problem.

The optimal band solves a linear second-order ODE for an auxiliary
function W on [zeta_-, zeta_+] with four boundary conditions: W and W'
vanish at the buy edge, and at the sell edge both must paste onto the
explicit spread function

    T(zeta) = epsilon / ((1+zeta)(1+(1-epsilon)zeta))

value- and slope-wise.  Integrating the ODE from the buy edge turns the
pasting mismatch into a smooth two-variable root problem G(zeta_-, zeta_+)
solved by damped Newton with a forward-difference Jacobian and a Broyden
fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import (
    Band,
    InvalidParams,
    MarketParams,
    NumericalError,
    RegimeError,
    merton_fraction,
    validate_band,
)
from .asymptotics import optimal_zeta_asym

_RTOL = 1e-13
_ATOL = 1e-20


def _ode_rhs(params: MarketParams):
    mu, sig, gamma = params.mu, params.sigma, params.gamma

    def rhs(z, y):
        w, wp = y
        forcing = (mu - gamma * sig ** 2 * z / (1.0 + z)) / (1.0 + z) ** 2
        wpp = (-(sig ** 2 + mu) * z * wp - mu * w + forcing) \
            / (0.5 * sig ** 2 * z ** 2)
        return (wp, wpp)

    return rhs


def _check_path(zeta_a: float, zeta_b: float) -> None:
    lo, hi = min(zeta_a, zeta_b), max(zeta_a, zeta_b)
    for sing in (0.0, -1.0):
        if lo <= sing <= hi:
            raise InvalidParams(
                f"integration path [{lo}, {hi}] crosses the singular point "
                f"zeta = {sing}"
            )


@dataclass(frozen=True)
class ValueFunction:
    """Dense numerical solution of the auxiliary ODE on the solved band."""

    zeta_minus: float
    zeta_plus: float
    params: MarketParams
    _dense: object = field(repr=False, compare=False)

    def W(self, zeta: float) -> float:
        return float(self._dense.sol(zeta)[0])

    def W_prime(self, zeta: float) -> float:
        return float(self._dense.sol(zeta)[1])


def integrate_W(zeta_minus: float, zeta_max: float, params: MarketParams):
    """Integrate from W(zeta_minus) = W'(zeta_minus) = 0 with dense output.

    Direction-agnostic: zeta_max may sit on either side of zeta_minus as
    long as the path avoids the singular points 0 and -1.
    """
    _check_path(zeta_minus, zeta_max)
    sol = solve_ivp(
        _ode_rhs(params), (zeta_minus, zeta_max), (0.0, 0.0),
        method="DOP853", rtol=_RTOL, atol=_ATOL, dense_output=True,
    )
    if not sol.success:
        raise NumericalError(
            f"ODE integration failed on [{zeta_minus}, {zeta_max}]: {sol.message}"
        )
    return sol


def sell_edge_value(zeta: float, params: MarketParams) -> float:
    """Target W(zeta_+): the spread function T at the sell edge."""
    eps = params.epsilon
    return eps / ((1.0 + zeta) * (1.0 + (1.0 - eps) * zeta))


def sell_edge_slope(zeta: float, params: MarketParams) -> float:
    """Target W'(zeta_+): T'(zeta), the smooth-pasting slope."""
    eps = params.epsilon
    return eps * (eps - 2.0 * (1.0 - eps) * zeta - 2.0) \
        / ((1.0 + zeta) ** 2 * (1.0 + (1.0 - eps) * zeta) ** 2)


def _terminal_gap(zm: float, zp: float, params: MarketParams) -> np.ndarray:
    sol = integrate_W(zm, zp, params)
    w, wp = sol.y[0, -1], sol.y[1, -1]
    return np.array([
        w - sell_edge_value(zp, params),
        wp - sell_edge_slope(zp, params),
    ])


def _fd_jacobian(x: np.ndarray, fx: np.ndarray, params: MarketParams) -> np.ndarray:
    scale = max(abs(x[0]), abs(x[1]), x[1] - x[0])
    h = 1e-7 * scale
    J = np.empty((2, 2))
    for j in range(2):
        xp = x.copy()
        xp[j] += h
        J[:, j] = (_terminal_gap(xp[0], xp[1], params) - fx) / h
    return J


def _newton_band(params: MarketParams, seed: np.ndarray,
                 tol: float = 1e-13, maxiter: int = 30):
    x = seed.copy()
    fx = _terminal_gap(x[0], x[1], params)
    norm = float(np.max(np.abs(fx)))
    J = None
    use_broyden = False
    iterations = 0
    for _ in range(maxiter):
        if norm <= tol:
            break
        if not use_broyden or J is None:
            J = _fd_jacobian(x, fx, params)
        try:
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            raise NumericalError(
                f"singular Jacobian at (zeta_-, zeta_+)={tuple(x)}, "
                f"residual={tuple(fx)}"
            )
        step = 1.0
        improved = False
        for _ in range(50):
            xn = x + step * dx
            if not xn[0] < xn[1]:
                step *= 0.5
                continue
            try:
                fn = _terminal_gap(xn[0], xn[1], params)
            except (InvalidParams, NumericalError):
                step *= 0.5
                continue
            nn = float(np.max(np.abs(fn)))
            if nn < norm:
                if use_broyden:
                    # rank-1 secant update of the Jacobian estimate
                    s = xn - x
                    y = fn - fx
                    J = J + np.outer(y - J @ s, s) / float(s @ s)
                x, fx, norm = xn, fn, nn
                improved = True
                break
            step *= 0.5
        iterations += 1
        if not improved:
            if not use_broyden:
                # retry the stalled point with secant updates
                use_broyden = True
                J = None
                continue
            break
    return x, fx, norm, iterations


def solve_optimal_fbp(params: MarketParams) -> tuple[Band, ValueFunction]:
    """Solve for the optimal band and its value function.

    Seeded by the ratio-space series; a short epsilon-continuation ladder
    handles spreads near the edge of the regime.  The terminal residual
    infinity-norm is required below 1e-10.
    """
    if params.gamma <= 0:
        raise InvalidParams("optimal band requires gamma > 0")
    if params.epsilon == 0.0:
        raise InvalidParams(
            "epsilon = 0 is frictionless: the band collapses to the target "
            "fraction, nothing to solve"
        )
    pi_star = merton_fraction(params)
    if pi_star > 1.0 and params.epsilon * pi_star >= 1.0:
        raise RegimeError(
            f"leveraged target fraction {pi_star} exceeds the solvency cap "
            f"1/epsilon = {1.0 / params.epsilon}; no band exists"
        )
    target = params.epsilon

    def attempt(p: MarketParams, seed: np.ndarray):
        try:
            return _newton_band(p, seed)
        except (NumericalError, InvalidParams):
            return seed, np.array([math.inf, math.inf]), math.inf, 0

    seed = np.array(optimal_zeta_asym(params), dtype=float)
    x, fx, norm, _ = attempt(params, seed)
    if norm > 1e-10:
        x = None
        for frac in (1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0, 1.0):
            p_step = params.with_epsilon(target * frac)
            seed = np.array(optimal_zeta_asym(p_step)) if x is None else x
            x, fx, norm, _ = attempt(p_step, np.asarray(seed, dtype=float))
            if norm > 1e-10:
                raise NumericalError(
                    f"optimal band solve diverged at epsilon={p_step.epsilon}: "
                    f"last iterate (zeta_-, zeta_+)=({x[0]}, {x[1]}), "
                    f"residuals=({fx[0]}, {fx[1]})"
                )
    try:
        band = Band(float(x[0]), float(x[1]))
    except InvalidParams as exc:
        raise NumericalError(
            f"solved band outside asymptotic regime: {exc}"
        ) from exc
    validate_band(band, params)
    dense = integrate_W(band.zeta_minus, band.zeta_plus, params)
    vf = ValueFunction(band.zeta_minus, band.zeta_plus, params, dense)
    return band, vf


def ode_residual(vf: ValueFunction, zeta: float) -> float:
    """Defect of the ODE at an interior point, with curvature from a
    central difference of the dense slope (an integrator self-check)."""
    params = vf.params
    h = 1e-6 * (vf.zeta_plus - vf.zeta_minus)
    lo = max(vf.zeta_minus, zeta - h)
    hi = min(vf.zeta_plus, zeta + h)
    wpp = (vf.W_prime(hi) - vf.W_prime(lo)) / (hi - lo)
    w, wp = vf.W(zeta), vf.W_prime(zeta)
    mu, sig, gamma = params.mu, params.sigma, params.gamma
    forcing = (mu - gamma * sig ** 2 * zeta / (1.0 + zeta)) / (1.0 + zeta) ** 2
    return 0.5 * sig ** 2 * zeta ** 2 * wpp + (sig ** 2 + mu) * zeta * wp \
        + mu * w - forcing


def optimal_esr_exact(band: Band, params: MarketParams) -> float:
    """Maximum equivalent safe rate from the buy boundary alone.

    r + mu*pi_- - (gamma sigma^2/2) pi_-^2; the r-free textbook variant is
    read as the excess over the safe rate.
    """
    pi_m = band.pi_minus
    return params.r + params.mu * pi_m \
        - 0.5 * params.gamma * params.sigma ** 2 * pi_m ** 2
