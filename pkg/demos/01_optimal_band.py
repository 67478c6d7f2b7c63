"""Solve the optimal no-trade band and inspect the value function.

The buy edge pastes smoothly to zero, the sell edge to the cost of one
round trip; between the edges the curvature ODE holds.  Run from the
repo root:

    python3 demos/01_optimal_band.py
"""

import numpy as np

from tradeband import (
    MarketParams,
    merton_fraction,
    ode_residual,
    optimal_boundaries_asym,
    optimal_esr_exact,
    policy_stats,
    solve_optimal_fbp,
)

CASES = [
    ("unlevered", MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=5.0, epsilon=1e-2)),
    ("levered", MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=0.4, epsilon=1e-2)),
]

for label, p in CASES:
    band, vf = solve_optimal_fbp(p)
    pi_star = merton_fraction(p)
    print(f"--- {label}: gamma={p.gamma}, epsilon={p.epsilon} ---")
    print(f"target fraction        {pi_star:.6f}")
    print(f"band in pi             [{band.pi_minus:.6f}, {band.pi_plus:.6f}]")
    print(f"band in zeta           [{band.zeta_minus:.6f}, {band.zeta_plus:.6f}]")

    lo, hi = optimal_boundaries_asym(p)
    print(f"series boundaries      [{lo:.6f}, {hi:.6f}]  "
          f"(error {max(abs(lo - band.pi_minus), abs(hi - band.pi_plus)):.2e})")

    # interior ODE residual, sampled away from the edges
    zs = np.linspace(band.zeta_minus, band.zeta_plus, 9)[1:-1]
    res = max(ode_residual(vf, z) for z in zs)
    print(f"max interior residual  {res:.2e}")
    print(f"W >= 0 on the band     {all(vf.W(z) >= -1e-15 for z in zs)}")

    st = policy_stats(band, p)
    print(f"esr (quadrature)       {st.esr:.12f}")
    print(f"esr (closed form)      {optimal_esr_exact(band, p):.12f}")
    print()
