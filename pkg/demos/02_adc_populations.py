"""
Sampled amplitude damping dynamics
==================================

Estimate excited-state populations of a decaying qubit with the
single-ancilla sampler and compare against the density-matrix result.
"""

from krausinterp.analysis import adc_time_grid, simulate_adc

gamma = 1.52e9  # 1/s
times = adc_time_grid(gamma, 10)

for lam in (1.0, 0.5):
    print(f"lambda_th = {lam}")
    print("   t (ns)   p1 exact   p1 est    sigma     L")
    for row in simulate_adc(gamma, lam, times, s_tot=2**11, seed=1):
        print(f"{row['t'] * 1e9:8.3f}  {row['p1_exact']:8.4f}  {row['p1_est']:8.4f}"
              f"  {row['predicted_sigma']:7.4f}  {row['L']:.3f}")
