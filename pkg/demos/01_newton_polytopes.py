"""Where the diagonal leaves the Newton polytope, and what that says about growth.

Run: python demos/01_newton_polytopes.py
"""
from sublevel import asym, geom
from sublevel.polyparse import parse_map

maps = ["x1^2 + x2^2", "x1^6 + x2^4", "x1*x2", "x1^2*x2; x1*x2^2", "x1*x2^2 + x1^3*x2^2 + x1^3"]

for text in maps:
    f = parse_map(text, 2)
    G = geom.newton_polytope(f)
    T = geom.downward_closure(G)
    print(f"f = {f}")
    print(f"  Newton polytope vertices   {[tuple(map(str, v)) for v in G.vertices]}")
    print(f"  downward closure vertices  {[tuple(map(str, v)) for v in T.vertices]}")

    # the diagonal point of the polytope sets the volume exponent, the one
    # of its closure sets the lattice exponent
    for name, P in (("polytope", G), ("closure", T)):
        dp = geom.diagonal_farthest(P)
        if dp is None:
            print(f"  {name}: diagonal misses it")
        else:
            print(f"  {name}: diagonal point d = {dp.d_value}, smallest face has dim {dp.containing_face.dim}")

    p = asym.analyze(f)
    if p.volume_finite:
        print(f"  volume  ~ r^{p.theta} (ln r)^{p.log_exp_volume}")
    else:
        print("  volume infinite")
    if p.lattice_finite:
        print(f"  count   ~ r^{p.theta_prime} (ln r)^{p.log_exp_lattice}")
    else:
        print("  count infinite")
    if p.volume_finite and p.lattice_finite:
        print(f"  same face on both sides: {asym.compare_profiles(p)}")
    print()

# The last map shows that equal exponents do not need equal faces: the
# closure stretches a horizontal edge through the diagonal point without
# moving the point itself.
