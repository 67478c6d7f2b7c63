"""Monte Carlo validation of band policies.

The log of the risky/safe ratio is simulated as a projected Euler scheme
on the band; boundary overshoots accumulate the regulator (local time)
that prices the sell-edge trades.  Estimates come with batch-means
standard errors.  A separate demo prices the one-sided volume of a
fixed-mesh rebalancing strategy to show it growing without bound as the
mesh refines.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import Band, CaseTag, InvalidParams, MarketParams

_CHUNK = 1 << 22
_N_FIELDS = 6  # steps, pi, pi*dW, pi^2*dW^2, up, down
_NBINS = 50


@dataclass(frozen=True)
class SimConfig:
    """Path layout for `simulate_policy`.

    horizon and burn_in are in years; burn_in is discarded before any
    tallying.  Batches are contiguous equal-length time segments, at
    least 40 in total across paths.
    """

    horizon: float
    dt: float
    seed: int = 0
    n_paths: int = 1
    burn_in: float = 0.0

    def __post_init__(self) -> None:
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise InvalidParams(f"horizon must be positive, got {self.horizon}")
        if not (0 < self.dt < self.horizon):
            raise InvalidParams(f"dt must lie in (0, horizon), got {self.dt}")
        if self.n_paths < 1:
            raise InvalidParams(f"n_paths must be >= 1, got {self.n_paths}")
        if not (0 <= self.burn_in < self.horizon):
            raise InvalidParams(
                f"burn_in must lie in [0, horizon), got {self.burn_in}"
            )


@dataclass(frozen=True)
class OccupationHistogram:
    """Time-fraction mass per ratio bin, edges ascending in zeta.

    time_fraction_se is the batch-means standard error per bin.
    """

    bin_edges: np.ndarray
    time_fraction: np.ndarray
    time_fraction_se: np.ndarray

    def density(self) -> np.ndarray:
        return self.time_fraction / np.diff(self.bin_edges)


@dataclass(frozen=True)
class SimResult:
    """Batch-means estimates; local times are cumulative normalized trade
    volumes (buy-edge and sell-edge tallies of relative turnover)."""

    mean_hat: float
    mean_se: float
    var_hat: float
    var_se: float
    atc_hat: float
    atc_se: float
    esr_hat: float
    esr_se: float
    local_time_up: float
    local_time_down: float
    occupation_histogram: OccupationHistogram
    n_batches: int
    horizon_used: float
    solvency_min: float


@njit(cache=True, nogil=True)
def _path_chunk(x, z, dt, sqdt, drift, sigma, x_lo, x_hi, levered,
                batch_len, step0, sums, hist, inv_binw):
    nbatch = sums.shape[0]
    nbins = hist.shape[1]
    for i in range(z.shape[0]):
        b = (step0 + i) // batch_len
        if b >= nbatch:
            b = nbatch - 1
        ex = math.exp(x)
        if levered:
            pi = ex / (ex - 1.0)
        else:
            pi = ex / (1.0 + ex)
        dW = sqdt * z[i]
        sums[b, 0] += 1.0
        sums[b, 1] += pi
        sums[b, 2] += pi * dW
        sums[b, 3] += pi * pi * dW * dW
        x = x + drift * dt + sigma * dW
        if x > x_hi:
            sums[b, 4] += x - x_hi
            x = x_hi
        elif x < x_lo:
            sums[b, 5] += x_lo - x
            x = x_lo
        k = int((x - x_lo) * inv_binw)
        if k >= nbins:
            k = nbins - 1
        elif k < 0:
            k = 0
        hist[b, k] += 1
    return x


def _x_interval(band: Band) -> tuple[float, float]:
    if band.case is CaseTag.UNLEVERED:
        return math.log(band.zeta_minus), math.log(band.zeta_plus)
    return math.log(-band.zeta_plus), math.log(-band.zeta_minus)


def _run_path(args):
    (seed_seq, x_lo, x_hi, levered, dt, drift, sigma, batch_len,
     batches, burn_steps) = args
    rng = np.random.default_rng(seed_seq)
    sqdt = math.sqrt(dt)
    inv_binw = _NBINS / (x_hi - x_lo)
    sums = np.zeros((batches, _N_FIELDS))
    hist = np.zeros((batches, _NBINS), dtype=np.int64)
    x = 0.5 * (x_lo + x_hi)
    left = burn_steps
    while left > 0:
        n = min(left, _CHUNK)
        z = rng.standard_normal(n)
        x = _path_chunk(x, z, dt, sqdt, drift, sigma, x_lo, x_hi, levered,
                        burn_steps + 1, 0, np.zeros((1, _N_FIELDS)),
                        np.zeros((1, _NBINS), dtype=np.int64), inv_binw)
        left -= n
    step = 0
    total = batch_len * batches
    while step < total:
        n = min(total - step, _CHUNK)
        z = rng.standard_normal(n)
        x = _path_chunk(x, z, dt, sqdt, drift, sigma, x_lo, x_hi, levered,
                        batch_len, step, sums, hist, inv_binw)
        step += n
    return sums, hist


def simulate_policy(band: Band, params: MarketParams,
                    config: SimConfig, threads: int = 1) -> SimResult:
    """Projected Euler simulation of the band policy.

    Returns batch-means estimates of the long-run mean, variance, and
    transaction-cost drain, with standard errors, boundary local times
    per year, and a 50-bin occupation histogram in ratio space.
    """
    if band.is_degenerate:
        raise InvalidParams("cannot simulate a degenerate band")
    x_lo, x_hi = _x_interval(band)
    if params.sigma * math.sqrt(config.dt) > (x_hi - x_lo):
        raise InvalidParams(
            f"Euler step sigma*sqrt(dt)={params.sigma * math.sqrt(config.dt):.3g}"
            f" exceeds the band width {x_hi - x_lo:.3g} in log-ratio space;"
            f" reduce dt"
        )
    levered = band.case is CaseTag.LEVERED
    drift = params.mu - 0.5 * params.sigma ** 2
    steps_per_path = int(round((config.horizon - config.burn_in) / config.dt))
    burn_steps = int(round(config.burn_in / config.dt))
    batches_per_path = -(-40 // config.n_paths)
    batch_len = steps_per_path // batches_per_path
    if batch_len < 1:
        raise InvalidParams(
            "horizon too short for 40 batches at this dt"
        )
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_paths)
    jobs = [
        (seeds[i], x_lo, x_hi, levered, config.dt, drift, params.sigma,
         batch_len, batches_per_path, burn_steps)
        for i in range(config.n_paths)
    ]
    if threads > 1 and config.n_paths > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_path, jobs))
    else:
        results = [_run_path(j) for j in jobs]

    sums = np.vstack([r[0] for r in results])
    hist = np.vstack([r[1] for r in results])
    t_b = sums[:, 0] * config.dt
    avg_pi = sums[:, 1] / sums[:, 0]
    mean_b = params.r + params.mu * avg_pi + params.sigma * sums[:, 2] / t_b
    var_b = params.sigma ** 2 * sums[:, 3] / t_b
    eps = params.epsilon
    zp = band.zeta_plus
    fac = abs(eps * zp / ((1.0 + zp) * (1.0 + (1.0 - eps) * zp)))
    sell_col = 5 if levered else 4
    buy_col = 4 if levered else 5
    atc_b = fac * sums[:, sell_col] / t_b
    esr_b = mean_b - 0.5 * params.gamma * var_b - atc_b

    def agg(v):
        k = len(v)
        return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(k))

    mean_hat, mean_se = agg(mean_b)
    var_hat, var_se = agg(var_b)
    atc_hat, atc_se = agg(atc_b)
    esr_hat, esr_se = agg(esr_b)
    t_total = float(np.sum(t_b))
    # x-displacement -> phi-volume via the reflection coefficients:
    # buy edge scales by |1 + zeta_-|, sell edge by |1 + (1-eps) zeta_+|
    up = float(np.sum(sums[:, buy_col])) / abs(1.0 + band.zeta_minus)
    down = float(np.sum(sums[:, sell_col])) / abs(1.0 + (1.0 - eps) * zp)

    edges_x = np.linspace(x_lo, x_hi, _NBINS + 1)
    frac_b = hist.astype(float) / float(batch_len)
    frac = frac_b.mean(axis=0)
    frac_se = frac_b.std(axis=0, ddof=1) / math.sqrt(frac_b.shape[0])
    if levered:
        edges = -np.exp(edges_x)[::-1]
        frac = frac[::-1]
        frac_se = frac_se[::-1]
    else:
        edges = np.exp(edges_x)
    # sell-edge zeta is the leverage peak; solvency at forced liquidation
    pi_peak = max(abs(band.pi_minus), abs(band.pi_plus))
    solvency_min = 1.0 - 1.01 * eps * pi_peak
    return SimResult(
        mean_hat=mean_hat, mean_se=mean_se,
        var_hat=var_hat, var_se=var_se,
        atc_hat=atc_hat, atc_se=atc_se,
        esr_hat=esr_hat, esr_se=esr_se,
        local_time_up=up, local_time_down=down,
        occupation_histogram=OccupationHistogram(edges, frac, frac_se),
        n_batches=len(mean_b),
        horizon_used=t_total / config.n_paths + config.burn_in,
        solvency_min=solvency_min,
    )


@dataclass(frozen=True)
class SwapDemoResult:
    mesh_sizes: tuple
    costs: tuple
    cost_ses: tuple
    fitted_growth_exponent: float


def swap_demo(params: MarketParams,
              mesh_sizes=(1_000, 10_000, 100_000, 1_000_000),
              horizon: float = 2.0, n_paths: int = 200,
              seed: int = 0) -> SwapDemoResult:
    """One-sided rebalancing volume on a fixed mesh over [0, horizon].

    Sums the positive single-period stock returns over an N-step mesh.
    The mean grows like sqrt(N): a strategy that trades every mesh point
    accumulates unbounded volume, so its spread cost diverges as the
    mesh refines.  Returns per-mesh Monte Carlo means, standard errors,
    and the fitted log-log growth exponent.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    costs, ses = [], []
    for n in mesh_sizes:
        step = horizon / n
        m = (params.mu + params.r - 0.5 * params.sigma ** 2) * step
        v = params.sigma * math.sqrt(step)
        per_path = np.empty(n_paths)
        for i in range(n_paths):
            z = rng.standard_normal(n)
            per_path[i] = np.maximum(np.expm1(m + v * z), 0.0).sum()
        costs.append(float(per_path.mean()))
        ses.append(float(per_path.std(ddof=1) / math.sqrt(n_paths)))
    slope = float(np.polyfit(np.log(np.asarray(mesh_sizes, dtype=float)),
                             np.log(costs), 1)[0])
    return SwapDemoResult(tuple(int(n) for n in mesh_sizes),
                          tuple(costs), tuple(ses), slope)
