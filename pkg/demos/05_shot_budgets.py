"""
Shot budgets for a target precision
===================================

Approximate methods must also shrink eps to keep the bias below the target,
which steepens their cost curves.
"""

from krausinterp.analysis import precision_exponent, required_shots

for method in ("exact-scu", "exact-lcu", "approx-scu", "approx-lcu"):
    shots = [required_shots(method, p, L=1.5, K=2) for p in (1e-1, 1e-2, 1e-3)]
    print(f"{method:10s} exponent {precision_exponent(method):+d}  shots at 1e-1..1e-3: {shots}")
