# Finite-n values of the iteration bounds.
#
# The improved bound approaches k/(k-1) * k^n / n only slowly: the ratio
# below is still far from 1 at a few hundred states.

from pibound import improved_bound, mansour_singh_bound
from pibound.bounds import asymptotic_ratio, improvement_threshold

for n in (10, 16, 20, 50, 100, 200):
    b = improved_bound(n, 2)
    ms = mansour_singh_bound(n, 2)
    print(f"n={n:4d}  improved={float(b.total_bound):.4g}  13*2^n/n={float(ms):.4g}  capped={b.fallback_used}")

for n in (50, 100, 200, 10 ** 3, 10 ** 5):
    print(f"n={n}: bound / (2 * 2^n / n) = {float(asymptotic_ratio(n, 2)):.4f}")

print("improved bound below Mansour-Singh for every n >=", improvement_threshold(2, 400), "(k = 2)")
