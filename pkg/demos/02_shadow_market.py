"""Build the shadow market and verify it prices inside the spread.

The shadow price equals the ask at the buy edge and the bid at the sell
edge, with tangency at both; its own frictionless optimizer holds the
target fraction everywhere on the band.

    python3 demos/02_shadow_market.py
"""

import numpy as np

from tradeband import (
    MarketParams,
    merton_residual,
    shadow_band,
    shadow_g,
    solve_shadow_system,
)

for gamma in (5.0, 0.4, 0.5):
    p = MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=gamma, epsilon=1e-2)
    sol = solve_shadow_system(p)
    band = shadow_band(sol)
    print(f"--- gamma={gamma} ({band.case.name.lower()}) ---")
    print(f"reduced unknowns (c, s)  ({sol.c:.12f}, {sol.s:.12f})")
    print(f"iterations               {sol.iterations}")
    print(f"band in pi               [{band.pi_minus:.6f}, {band.pi_plus:.6f}]")

    lo = shadow_g(band.pi_minus, sol)
    hi = shadow_g(band.pi_plus, sol)
    print(f"g at buy edge            {lo.g_value:.15f}   (ask = 1)")
    print(f"g at sell edge           {hi.g_value:.15f}   (bid = {1 - p.epsilon})")
    print(f"tangency |g'| at edges   {abs(lo.g_prime):.2e}, {abs(hi.g_prime):.2e}")

    pis = np.linspace(band.pi_minus, band.pi_plus, 7)
    worst = max(abs(merton_residual(pi, sol)) for pi in pis)
    print(f"max merton residual      {worst:.2e}")
    print()
