"""Friction as a modeling guardrail: rebalancing a swap ever finer.

A strategy that pockets the positive part of each increment looks like
a free lunch in a frictionless model: its cumulative value grows like
sqrt(N) with the rebalancing count, without bound.  Any proportional
cost kills it, which is the point of modeling the spread at all.

    python3 demos/07_swap_growth.py
"""

from tradeband import MarketParams, swap_demo

p = MarketParams(mu=0.08, sigma=0.16, r=0.0, gamma=1.0, epsilon=0.0)
res = swap_demo(p, n_paths=200, seed=0)

print("steps       mean cost     se         cost/sqrt(N)")
for n, c, s in zip(res.mesh_sizes, res.costs, res.cost_ses):
    print(f"{n:9d}  {c:10.4f}  {s:.4f}   {c / n ** 0.5:.6f}")

print(f"\nfitted growth exponent: {res.fitted_growth_exponent:.4f} (theory: 1/2)")
