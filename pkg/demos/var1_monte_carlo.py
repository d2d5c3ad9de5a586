"""
Monte Carlo study on a bivariate VAR(1)
=======================================

Simulate the sensitive series and the attacker's series jointly, privatize
each replicate and summarize privacy and utility.
"""

import json
import warnings

from tsflip import McConfig, riccati_var1, run_monte_carlo

# the VAR(1) is pinned down by its cross-correlation and innovation variance
spec = riccati_var1(0.7, 0.5)
print("Phi =\n", spec.phi.round(4))
print("Riccati residual:", spec.riccati_residual())

# 20 replicates keep this quick; the acceptance suite runs 100
warnings.simplefilter("ignore")
for rho in (0.1, 0.7):
    res = run_monte_carlo(McConfig(reps=20, T=200, rho=rho, seed=7))
    s = res.summary
    print(f"\nrho = {rho}")
    print("  mean LIP     ", round(s["mean_privacy"], 6))
    print("  D_path       ", json.dumps({k: round(v, 3) for k, v in s["d_path"].items()}))
    print("  D_ACF median ", f"{s['d_acf']['q50']:.2e}")

# with linear trends and a first-order design the trend survives privatization
res = run_monte_carlo(McConfig(reps=20, T=200, rho=0.1, delta=0.1, d=1,
                               trend=((30.0, 0.05), (10.0, 0.06)), seed=7))
print("\ntrend recovered within 2 s.e. in", res.summary["trend_recovered_within_2se"], "of replicates")
