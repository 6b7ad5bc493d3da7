"""Face-by-face search for common zeros, vertex constants and noise.

Run: python demos/03_nondegeneracy.py
"""
from sublevel import mgcheck as mg
from sublevel.polyparse import parse_map

for text in ["x1^2 + x2^2", "x1^2 - x2^2", "x1^2 - 2*x2^2", "x1-x2; x1+x2",
             "x1^4 - 4*x1^2*x2^2 + 4*x2^4", "x1^2*x2^2 - x2^4 + 1"]:
    f = parse_map(text, 2)
    v = mg.check_mg(f)[0]          # worst face first
    line = f"{text:30} {v.status.value:20} face dim {v.face.dim}"
    if v.witness is not None:
        line += f"  at {tuple(str(x) if not isinstance(x, float) else f'{x:.6g}' for x in v.witness)}"
    if v.bracket is not None:
        line += "  (sign change)"
    print(line)

# PASSED is a search result, not a proof.  Certified violations come with an
# exact rational zero or, for one polynomial, two points of opposite sign.

print()
f = parse_map("x1^2 + x1*x2 + x2^2", 2)
est = mg.estimate_constants(f)
print(f"max|f| / sum|vertex monomials| lies in [{est.c1_hat:.6f}, {est.c2_hat:.6f}] for {f}")

rep = mg.perturbation_probe(f, trials=30, epsilon="auto")
print(f"{rep.unfalsified}/{rep.trials} perturbations of size {rep.epsilon:.4f} still pass "
      f"(lattice points of 2*Gamma: {rep.eta})")
