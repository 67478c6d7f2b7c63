"""How much performance does the shadow recipe give up?

The shadow band is cheap to compute but not optimal.  Its equivalent
safe rate trails the optimal one by O(epsilon^(4/3)) only, two orders
beyond the O(epsilon^(2/3)) cost of the friction itself.  The theta
family interpolates band recipes; theta=-1 matches the optimal series
and beats theta=+1 (the shadow series) at every spread.

    python3 demos/05_gap_study.py
"""

from tradeband import MarketParams, merton_fraction, midpoint_shift_coefficient, run_gap_study

p = MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=5.0, epsilon=1e-2)
rep = run_gap_study(p)

print("epsilon    esr_optimal      esr_shadow       gap            theta(-1) - theta(+1)")
for row in rep.rows:
    if row.error:
        print(f"{row.epsilon:8.0e}  failed: {row.error}")
        continue
    tgap = row.esr_theta[-1.0] - row.esr_theta[1.0]
    print(f"{row.epsilon:8.0e}  {row.esr_optimal:.12f}  {row.esr_shadow:.12f}  "
          f"{row.gap_shadow:.6e}  {tgap:+.6e}")

print()
for key, fit in rep.fitted_exponents.items():
    print(f"fit {key:28s} exponent {fit.exponent:.4f}  "
          f"ci [{fit.ci_low:.4f}, {fit.ci_high:.4f}]")

# both band midpoints shift from the target at rate eps^(2/3), in
# opposite directions and with the same magnitude
eps_pair = [r.epsilon for r in rep.rows[:2]]
pi_star = merton_fraction(p)
opt = midpoint_shift_coefficient(eps_pair, [r.optimal_band for r in rep.rows[:2]], pi_star)
sha = midpoint_shift_coefficient(eps_pair, [r.shadow_band_ for r in rep.rows[:2]], pi_star)
print(f"\nmidpoint shift coefficients: optimal {opt:+.6f}, shadow {sha:+.6f}")
