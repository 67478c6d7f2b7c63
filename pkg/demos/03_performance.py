"""Exact long-run performance of a band policy.

The risky fraction has an explicit stationary law on the band, so mean,
variance, and average transaction costs come from one-dimensional
integrals.  The spread cuts the frictionless objective at rate
~ epsilon^(2/3); individual moments only move at rate ~ epsilon.

    python3 demos/03_performance.py
"""

from tradeband import (
    MarketParams,
    merton_fraction,
    policy_stats,
    solve_optimal_fbp,
    stationary_density,
)

base = MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=5.0, epsilon=1e-3)
pi_star = merton_fraction(base)
esr_frictionless = base.r + base.mu * pi_star - 0.5 * base.gamma * base.sigma ** 2 * pi_star ** 2
print(f"frictionless esr   {esr_frictionless:.12f}\n")

print("epsilon     mean         variance     atc          esr          penalty/eps^(2/3)")
for eps in (1e-5, 1e-4, 1e-3, 1e-2):
    p = base.with_epsilon(eps)
    band, _ = solve_optimal_fbp(p)
    st = policy_stats(band, p)
    scaled = (esr_frictionless - st.esr) / eps ** (2.0 / 3.0)
    print(f"{eps:8.0e}  {st.mean:.9f}  {st.variance:.9f}  {st.atc:.3e}  {st.esr:.9f}  {scaled:.6f}")

# the scaled penalty column converging shows the 2/3 power law

p = base.with_epsilon(1e-2)
band, _ = solve_optimal_fbp(p)
nu = stationary_density(band, p)
import scipy.integrate as si
mass, _ = si.quad(nu.pdf, band.zeta_minus, band.zeta_plus)
print(f"\ndensity mass on the band at eps=1e-2: {mass:.15f}")
