"""
Mean squared error against total shots
======================================

The exact expansion is unbiased, so its MSE keeps falling as 1/s_tot. The
first-order baseline has a bias floor, but with l1 = 2/eps per operator its
variance hides that floor until the shot count is enormous.
"""

import math

from krausinterp.analysis import ADC_RHO0, loglog_slope, run_mse_sweep
from krausinterp.channels import AdcParams, make_adc
from krausinterp.scu import projector

gamma = 1.52e9
channel = make_adc(AdcParams(gamma, math.log(2) / gamma, 1.0))
grid = [10**2, 10**4, 10**6, 10**10, 10**14, 10**17]
rows = run_mse_sweep(channel, ADC_RHO0, projector(1, 2), shot_grid=grid, trials=50, seed=0)

print("method        eps      L      s_tot      MSE       bias^2")
for r in rows:
    print(f"{r['method']:12s} {r['epsilon']:5.2f} {r['L']:7.1f} {r['s_tot']:9.0e}"
          f"  {r['mse']:9.3e}  {r['bias_sq']:9.3e}")

exact = [r for r in rows if r["method"] == "exact"]
print("exact log-log slope:", round(loglog_slope([r["s_tot"] for r in exact], [r["mse"] for r in exact]), 3))
