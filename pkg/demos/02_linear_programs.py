"""The same exponents from a linear program over the vertex exponents.

max x1 + ... + xn  subject to  <x, alpha> <= 1 for every vertex alpha
(with x >= 0 for the lattice variant).  The optimal value is the growth
exponent and the dimension of the optimal face is the log exponent.

Run: python demos/02_linear_programs.py
"""
from sublevel import asym, lp
from sublevel.polyparse import parse_map

prog = lp.sup_sum_lp([(2, 1), (1, 2)])
sol = lp.solve(prog)
print("vertices (2,1), (1,2)")
print(f"  value {sol.value} at {tuple(map(str, sol.point))}, optimal face dim {sol.optimal_face_dim}")
print(f"  dual certificate {tuple(map(str, sol.dual))} verified: {lp.verify_certificate(prog, sol)}")
dual = lp.dual_of(prog)
print(f"  dual problem value {lp.solve(dual).value}")

prog = lp.sup_sum_lp([(1, 1)], nonneg=True)
sol = lp.solve(prog)
print("vertex (1,1), x >= 0")
print(f"  value {sol.value}, optimal face dim {sol.optimal_face_dim}  (count ~ r ln r)")

# Finiteness is a separate cone test: with x free the same program is still
# bounded here, yet the area of |x1*x2| <= r is infinite.
print(f"volume finite for x1*x2: {asym.analyze(parse_map('x1*x2', 2)).volume_finite}")

print()
for text in ["x1^2 + x2^2", "x1^6 + x2^4", "x1*x2 + x1^2*x2^3 + 1", "x1^4 + x2^2 + x3^6 + x1*x2*x3"]:
    n = 3 if "x3" in text else 2
    f = parse_map(text, n)
    for c in asym.lp_cross_check(f):
        print(f"{str(f):32} {c.kind:8} geometric theta={c.geometric_theta} log={c.geometric_log_exponent}"
              f"   LP value={c.lp_value} face dim={c.lp_face_dim}")
