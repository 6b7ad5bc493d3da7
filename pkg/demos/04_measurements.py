"""Counting lattice points and measuring areas, then fitting the exponents.

Run: python demos/04_measurements.py [--csv sweep.csv]
"""
import argparse
import math

from sublevel import asym, empirics as em
from sublevel.polyparse import parse_map

ap = argparse.ArgumentParser()
ap.add_argument("--csv", help="write the x1*x2 count sweep here")
args = ap.parse_args()

f = parse_map("x1*x2", 2)
rs = [10 ** (k / 2) for k in range(4, 9)]
s = em.sweep(f, "LATTICE_COUNT", rs)
print("integer points with x1*x2 != 0 and |x1*x2| <= r")
for r, c in zip(s.r_values, s.measurements):
    R = math.floor(r)
    print(f"  r = {r:10.1f}   count = {c:8d}   4*sum floor(r/a) = {4 * sum(R // a for a in range(1, R + 1))}")
fit = em.fit_exponents(s, kappa=1)
print(f"  fitted theta {fit.theta_hat:.4f} with log exponent fixed at 1 (predicted {asym.lattice_profile(f).theta})")
if args.csv:
    with open(args.csv, "w") as fh:
        fh.write(s.to_csv())

print()
g = parse_map("x1^6 + x2^4", 2)
s = em.sweep(g, "VOLUME", [1e2, 1e3, 1e4, 1e5], method="MONTE_CARLO", samples=200000, seed=1)
print("area of |x1^6 + x2^4| <= r")
for r, v, e in zip(s.r_values, s.measurements, s.error_bars):
    print(f"  r = {r:8.0f}   area = {v:9.3f} +- {e:.3f}")
fit = em.fit_exponents(s, kappa=0)
print(f"  fitted theta {fit.theta_hat:.4f} (predicted {asym.volume_profile(g).theta} = {5 / 12:.4f})")
