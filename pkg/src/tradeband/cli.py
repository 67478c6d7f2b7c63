"""Command-line front end.

Each subcommand reads a JSON config, dispatches to one library call, and
emits a CSV or JSON table.  Every output embeds the fully resolved
config; numbers print with shortest round-trip precision so identical
runs are byte-identical.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 regime
error (spread too large for the band construction).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from .model import (
    Band,
    InvalidParams,
    MarketParams,
    NumericalError,
    RegimeError,
    merton_fraction,
    band_from_pi,
)
from . import asymptotics
from .asymptotics import (
    kappa,
    kappa_residual,
    optimal_boundaries_asym,
    shadow_boundaries_asym,
    theta_boundaries,
)
from .optimal_fbp import solve_optimal_fbp, sell_edge_value, sell_edge_slope
from .shadow_fbp import solve_shadow_system, shadow_band
from .perf import policy_stats
from .compare import run_frontier, run_gap_study

COMMANDS = ("boundaries", "stats", "simulate", "frontier", "gaps",
            "swap-demo", "kappa")

_SCHEMA_KEYS = {
    "mu", "sigma", "r", "gamma", "epsilon", "epsilon_grid", "theta",
    "sim", "order", "gamma_grid", "band_grid",
}
_SIM_KEYS = {"horizon", "dt", "seed", "n_paths", "burn_in"}

_ALLOWED = {
    "boundaries": {"mu", "sigma", "r", "gamma", "epsilon", "theta", "order"},
    "stats": {"mu", "sigma", "r", "gamma", "epsilon", "epsilon_grid", "theta"},
    "simulate": {"mu", "sigma", "r", "gamma", "epsilon", "sim"},
    "frontier": {"mu", "sigma", "r", "gamma", "epsilon", "gamma_grid", "band_grid"},
    "gaps": {"mu", "sigma", "r", "gamma", "epsilon_grid", "theta"},
    "swap-demo": {"mu", "sigma", "r", "sim"},
    "kappa": set(),
}
_REQUIRED = {
    "boundaries": {"mu", "sigma", "gamma", "epsilon"},
    "stats": {"mu", "sigma", "gamma"},
    "simulate": {"mu", "sigma", "gamma", "epsilon", "sim"},
    "frontier": {"mu", "sigma", "epsilon"},
    "gaps": {"mu", "sigma", "gamma"},
    "swap-demo": {"mu", "sigma"},
    "kappa": set(),
}


class ConfigError(ValueError):
    pass


def _num(data, key, default=None, required=False):
    if key not in data:
        if required:
            raise ConfigError(f"missing required config key '{key}'")
        return default
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"config key '{key}' must be a number, got {v!r}")
    return float(v)


def _num_list(data, key):
    if key not in data:
        return None
    v = data[key]
    if not isinstance(v, list) or not v or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise ConfigError(f"config key '{key}' must be a nonempty number list")
    return [float(x) for x in v]


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation: one command plus its resolved options."""

    command: str
    resolved: dict
    params: MarketParams | None = None
    epsilon_grid: tuple | None = None
    theta: tuple | None = None
    sim: dict | None = None
    order: int = 2
    gamma_grid: tuple | None = None
    band_grid: tuple | None = None


def parse_config(command: str, data) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _SCHEMA_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    extraneous = set(data) - _ALLOWED[command]
    if extraneous:
        raise ConfigError(
            f"config keys {sorted(extraneous)} are not accepted by "
            f"command '{command}'"
        )
    missing = _REQUIRED[command] - set(data)
    if missing:
        raise ConfigError(
            f"command '{command}' requires config keys {sorted(missing)}"
        )
    resolved: dict = {}
    params = None
    if command != "kappa":
        mu = _num(data, "mu", required=True)
        sigma = _num(data, "sigma", required=True)
        r = _num(data, "r", default=0.0)
        gamma = _num(data, "gamma")
        epsilon = _num(data, "epsilon")
        resolved.update(mu=mu, sigma=sigma, r=r)
        if gamma is not None:
            resolved["gamma"] = gamma
        if epsilon is not None:
            resolved["epsilon"] = epsilon

    eps_grid = _num_list(data, "epsilon_grid")
    if command == "stats":
        if (eps_grid is None) == (data.get("epsilon") is None):
            raise ConfigError(
                "stats needs exactly one of 'epsilon' or 'epsilon_grid'"
            )
    if command == "gaps" and eps_grid is None:
        from .compare import DEFAULT_EPSILON_GRID
        eps_grid = list(DEFAULT_EPSILON_GRID)
    if eps_grid is not None:
        resolved["epsilon_grid"] = eps_grid

    theta = _num_list(data, "theta")
    if command == "gaps" and theta is None:
        theta = [-1.0, 0.0, 1.0]
    if theta is not None:
        resolved["theta"] = theta

    order = data.get("order", 2)
    if command == "boundaries":
        if isinstance(order, bool) or not isinstance(order, int) \
                or not 0 <= order <= 2:
            raise ConfigError(f"'order' must be an integer in [0, 2], got {order!r}")
        resolved["order"] = order

    sim = None
    if "sim" in data:
        raw = data["sim"]
        if not isinstance(raw, dict):
            raise ConfigError("'sim' must be an object")
        unknown = set(raw) - _SIM_KEYS
        if unknown:
            raise ConfigError(f"unknown sim keys: {sorted(unknown)}")
        sim = {
            "horizon": _num(raw, "horizon",
                            required=(command == "simulate")),
            "dt": _num(raw, "dt", required=(command == "simulate")),
            "seed": raw.get("seed", 0),
            "n_paths": raw.get("n_paths", 1),
            "burn_in": _num(raw, "burn_in", default=0.0),
        }
        for k in ("seed", "n_paths"):
            if isinstance(sim[k], bool) or not isinstance(sim[k], int):
                raise ConfigError(f"sim key '{k}' must be an integer")
        sim = {k: v for k, v in sim.items() if v is not None}
        resolved["sim"] = sim
    elif command == "simulate":
        raise ConfigError("command 'simulate' requires the 'sim' block")

    gamma_grid = _num_list(data, "gamma_grid")
    band_grid = None
    if "band_grid" in data:
        v = data["band_grid"]
        ok = isinstance(v, list) and v and all(
            isinstance(b, list) and len(b) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in b)
            for b in v
        )
        if not ok:
            raise ConfigError(
                "'band_grid' must be a nonempty list of [pi_minus, pi_plus] pairs"
            )
        band_grid = [(float(a), float(b)) for a, b in v]
        resolved["band_grid"] = [[a, b] for a, b in band_grid]
    if gamma_grid is not None:
        resolved["gamma_grid"] = gamma_grid
    if command == "frontier":
        if (gamma_grid is None) == (band_grid is None):
            raise ConfigError(
                "frontier needs exactly one of 'gamma_grid' or 'band_grid'"
            )
        if band_grid is not None and "gamma" not in data:
            raise ConfigError("frontier band_grid mode requires 'gamma'")

    if command != "kappa":
        try:
            params = MarketParams(
                mu=resolved["mu"], sigma=resolved["sigma"], r=resolved["r"],
                gamma=resolved.get(
                    "gamma", gamma_grid[0] if gamma_grid else 1.0),
                epsilon=resolved.get("epsilon", 0.0),
            )
        except InvalidParams:
            raise
    return RunConfig(
        command=command, resolved=resolved, params=params,
        epsilon_grid=tuple(eps_grid) if eps_grid else None,
        theta=tuple(theta) if theta else None,
        sim=sim, order=order if isinstance(order, int) else 2,
        gamma_grid=tuple(gamma_grid) if gamma_grid else None,
        band_grid=tuple(band_grid) if band_grid else None,
    )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _table(columns, rows, config, command, extra=None, fmt="csv") -> str:
    if fmt == "json":
        doc = {"command": command, "config": config,
               "columns": list(columns),
               "rows": [[(None if isinstance(v, float) and math.isnan(v)
                          else v) for v in row] for row in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, sort_keys=True, indent=2,
                          allow_nan=False, default=float) + "\n"
    lines = ["# config: " + json.dumps(
        {"command": command, **config}, sort_keys=True,
        separators=(",", ":"))]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _pasting_residual(vf, params) -> float:
    zp = vf.zeta_plus
    return max(abs(vf.W(zp) - sell_edge_value(zp, params)),
               abs(vf.W_prime(zp) - sell_edge_slope(zp, params)))


def cmd_boundaries(cfg: RunConfig, fmt: str, threads: int) -> str:
    p = cfg.params
    if p.gamma == 0.0:
        raise InvalidParams(
            "gamma = 0 has no finite target fraction; use the risk-neutral "
            "expansion (asymptotics.risk_neutral_boundaries) instead"
        )
    cols = ("method", "pi_minus", "pi_plus", "zeta_minus", "zeta_plus",
            "residual")
    if p.epsilon == 0.0:
        pi = merton_fraction(p)
        z = pi / (1.0 - pi)
        rows = [("merton", pi, pi, z, z, 0.0)]
        return _table(cols, rows, cfg.resolved, "boundaries", fmt=fmt)
    band_o, vf = solve_optimal_fbp(p)
    sol = solve_shadow_system(p)
    band_s = shadow_band(sol)
    oa = optimal_boundaries_asym(p, cfg.order)
    sa = shadow_boundaries_asym(p, cfg.order)
    rows = [
        ("optimal-exact", band_o.pi_minus, band_o.pi_plus,
         band_o.zeta_minus, band_o.zeta_plus, _pasting_residual(vf, p)),
        ("optimal-asym", oa[0], oa[1],
         oa[0] / (1 - oa[0]), oa[1] / (1 - oa[1]),
         max(abs(oa[0] - band_o.pi_minus), abs(oa[1] - band_o.pi_plus))),
        ("shadow-exact", band_s.pi_minus, band_s.pi_plus,
         band_s.zeta_minus, band_s.zeta_plus,
         max(abs(x) for x in sol.residual)),
        ("shadow-asym", sa[0], sa[1],
         sa[0] / (1 - sa[0]), sa[1] / (1 - sa[1]),
         max(abs(sa[0] - band_s.pi_minus), abs(sa[1] - band_s.pi_plus))),
    ]
    for th in cfg.theta or ():
        lo, hi = theta_boundaries(p, th)
        rows.append((f"theta({th:g})", lo, hi,
                     lo / (1 - lo), hi / (1 - hi), None))
    return _table(cols, rows, cfg.resolved, "boundaries", fmt=fmt)


def cmd_stats(cfg: RunConfig, fmt: str, threads: int) -> str:
    cols = ("epsilon", "method", "pi_minus", "pi_plus", "mean", "variance",
            "atc", "esr")
    grid = cfg.epsilon_grid or (cfg.params.epsilon,)
    rows = []
    for eps in grid:
        p = cfg.params.with_epsilon(eps)
        band_o, _ = solve_optimal_fbp(p)
        band_s = shadow_band(solve_shadow_system(p))
        for name, band in (("optimal-exact", band_o), ("shadow-exact", band_s)):
            st = policy_stats(band, p)
            rows.append((eps, name, band.pi_minus, band.pi_plus,
                         st.mean, st.variance, st.atc, st.esr))
        for th in cfg.theta or ():
            tb = band_from_pi(*theta_boundaries(p, th))
            st = policy_stats(tb, p)
            rows.append((eps, f"theta({th:g})", tb.pi_minus, tb.pi_plus,
                         st.mean, st.variance, st.atc, st.esr))
    return _table(cols, rows, cfg.resolved, "stats", fmt=fmt)


def cmd_simulate(cfg: RunConfig, fmt: str, threads: int) -> str:
    from .mc import SimConfig, simulate_policy

    p = cfg.params
    band, _ = solve_optimal_fbp(p)
    st = policy_stats(band, p)
    sim = SimConfig(**cfg.sim)
    res = simulate_policy(band, p, sim, threads=threads)
    cols = ("seed", "horizon", "dt", "n_paths", "burn_in",
            "pi_minus", "pi_plus",
            "mean_hat", "mean_se", "mean_ref",
            "var_hat", "var_se", "var_ref",
            "atc_hat", "atc_se", "atc_ref",
            "esr_hat", "esr_se", "esr_ref",
            "local_time_up", "local_time_down", "n_batches", "solvency_min")
    rows = [(sim.seed, sim.horizon, sim.dt, sim.n_paths, sim.burn_in,
             band.pi_minus, band.pi_plus,
             res.mean_hat, res.mean_se, st.mean,
             res.var_hat, res.var_se, st.variance,
             res.atc_hat, res.atc_se, st.atc,
             res.esr_hat, res.esr_se, st.esr,
             res.local_time_up, res.local_time_down,
             res.n_batches, res.solvency_min)]
    extra = {"occupation_histogram": {
        "bin_edges": [float(x) for x in res.occupation_histogram.bin_edges],
        "time_fraction": [float(x)
                          for x in res.occupation_histogram.time_fraction],
        "time_fraction_se": [float(x)
                             for x in res.occupation_histogram.time_fraction_se],
    }}
    return _table(cols, rows, cfg.resolved, "simulate", extra=extra, fmt=fmt)


def cmd_frontier(cfg: RunConfig, fmt: str, threads: int) -> str:
    rep = run_frontier(cfg.params, gamma_grid=cfg.gamma_grid,
                       band_grid=cfg.band_grid)
    cols = ("gamma", "pi_minus", "pi_plus", "zeta_minus", "zeta_plus",
            "sigma_hat", "mean_hat", "atc", "net_drift", "esr")
    rows = [(r.gamma, r.band.pi_minus, r.band.pi_plus,
             r.band.zeta_minus, r.band.zeta_plus,
             r.sigma_hat, r.mean_hat, r.atc, r.net_drift, r.esr)
            for r in rep.rows]
    return _table(cols, rows, cfg.resolved, "frontier", fmt=fmt)


def cmd_gaps(cfg: RunConfig, fmt: str, threads: int) -> str:
    rep = run_gap_study(cfg.params, epsilon_grid=cfg.epsilon_grid,
                        thetas=cfg.theta, threads=threads)
    theta_cols = tuple(f"esr_theta({th:g})" for th in rep.thetas)
    cols = (("epsilon", "esr_optimal", "esr_shadow") + theta_cols
            + ("gap_optimal_minus_shadow", "gap_theta_best_minus_worst",
               "series_residual_shadow",
               "fit_gap_exponent", "fit_gap_ci_low", "fit_gap_ci_high",
               "error"))
    f = rep.fitted_exponents.get("optimal_minus_shadow")
    fe, flo, fhi = ((f.exponent, f.ci_low, f.ci_high) if f
                    else (float("nan"),) * 3)
    nan = float("nan")
    rows = []
    for r in rep.rows:
        if r.error is not None:
            rows.append((r.epsilon,) + (nan,) * (len(theta_cols) + 5)
                        + (fe, flo, fhi, r.error))
            continue
        rows.append((r.epsilon, r.esr_optimal, r.esr_shadow)
                    + tuple(r.esr_theta[th] for th in rep.thetas)
                    + (r.gap_shadow,
                       nan if r.gap_theta_pair is None else r.gap_theta_pair,
                       r.series_residual_shadow, fe, flo, fhi, ""))
    extra = {"fitted_exponents": {
        k: {"exponent": v.exponent, "stderr": v.stderr,
            "ci": [v.ci_low, v.ci_high], "n_points": v.n_points}
        for k, v in rep.fitted_exponents.items()}}
    return _table(cols, rows, cfg.resolved, "gaps", extra=extra, fmt=fmt)


def cmd_swap_demo(cfg: RunConfig, fmt: str, threads: int) -> str:
    from .mc import swap_demo

    sim = cfg.sim or {}
    res = swap_demo(cfg.params,
                    horizon=sim.get("horizon", 2.0),
                    n_paths=sim.get("n_paths", 200),
                    seed=sim.get("seed", 0))
    cols = ("n_steps", "cost", "se", "fitted_growth_exponent")
    rows = [(n, c, s, res.fitted_growth_exponent)
            for n, c, s in zip(res.mesh_sizes, res.costs, res.cost_ses)]
    return _table(cols, rows, cfg.resolved, "swap-demo", fmt=fmt)


def cmd_kappa(cfg: RunConfig, fmt: str, threads: int) -> str:
    cols = ("kappa", "residual")
    return _table(cols, [(kappa(), kappa_residual())], cfg.resolved, "kappa",
                  fmt=fmt)


_DISPATCH = {
    "boundaries": cmd_boundaries,
    "stats": cmd_stats,
    "simulate": cmd_simulate,
    "frontier": cmd_frontier,
    "gaps": cmd_gaps,
    "swap-demo": cmd_swap_demo,
    "kappa": cmd_kappa,
}


def _emit_error(code: int, exc: BaseException) -> int:
    doc = {"error": {"code": code, "type": type(exc).__name__,
                     "message": str(exc)}}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tradeband",
        description="Band policies under proportional transaction costs.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True,
                        help="path to the JSON configuration")
    parser.add_argument("--out", default=None,
                        help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (overrides TRADEBAND_THREADS)")
    args = parser.parse_args(argv)

    threads = args.threads
    if threads is None:
        raw = os.environ.get("TRADEBAND_THREADS", "1")
        try:
            threads = max(1, int(raw))
        except ValueError:
            return _emit_error(2, ConfigError(
                f"TRADEBAND_THREADS must be an integer, got {raw!r}"))

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _emit_error(2, exc)

    try:
        cfg = parse_config(args.command, data)
        out = _DISPATCH[args.command](cfg, args.format, threads)
    except (ConfigError, InvalidParams) as exc:
        return _emit_error(2, exc)
    except RegimeError as exc:
        return _emit_error(4, exc)
    except NumericalError as exc:
        return _emit_error(3, exc)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
