import random
from fractions import Fraction as F

import numpy as np
import pytest

from sublevel import geom, mgcheck as mg
from sublevel.errors import PreconditionError
from sublevel.exact import primitive
from sublevel.polyparse import Polynomial, PolynomialMap, evaluate, parse_map, parse_polynomial

from conftest import random_map

PASSED = mg.MGStatus.PASSED
CERTIFIED = mg.MGStatus.VIOLATION_CERTIFIED


def M(text, n=2):
    return parse_map(text, n)


def face_with(f, verts):
    return geom.face_of_vertices(geom.newton_polytope(f), verts)


# ---- face restriction and the squared lift

def test_face_restrict_examples():
    f = M("x1^2+x2^2")
    assert mg.face_restrict(f, face_with(f, [(2, 0)])).restricted == (parse_polynomial("x1^2", 2),)
    f = M("x1^2-x2^2")
    assert mg.face_restrict(f, face_with(f, [(2, 0), (0, 2)])).restricted == tuple(f)
    f = M("x1^6+x1^3*x2^2+x2^4")
    assert mg.face_restrict(f, face_with(f, [(0, 4)])).restricted == (parse_polynomial("x2^4", 2),)


def test_face_restrict_rejects_foreign_face():
    f, g = M("x1^2+x2^2"), M("x1^3+x2^2")
    with pytest.raises(ValueError):
        mg.face_restrict(f, face_with(g, [(3, 0)]))


def test_face_restrict_keeps_support_on_face():
    rng = random.Random(1)
    for _ in range(10):
        f = random_map(rng, 3, 2, 4)
        for face in geom.faces_all(geom.newton_polytope(f)):
            for p, h in zip(f, mg.face_restrict(f, face).restricted):
                assert set(h.terms) == {a for a in p.terms if face.contains(a)}
                assert all(h.coefficient(a) == p.coefficient(a) for a in h.terms)


def test_square_sum_lift_examples():
    assert mg.square_sum_lift(M("x1; x2")) == parse_polynomial("x1^2+x2^2", 2)
    assert mg.square_sum_lift(M("x1+x2")) == parse_polynomial("x1^2+2*x1*x2+x2^2", 2)
    F_ = mg.square_sum_lift(M("x1^2+x2^2"))
    assert geom.newton_polytope(PolynomialMap((F_,))) == geom.convex_hull([(4, 0), (0, 4)])


def test_claim_examples():
    f = M("x1+x2; x1-x2")
    assert mg.verify_claim_3_5(f, face_with(f, [(1, 0), (0, 1)]))
    f = M("x1^2+x2^2")
    lhs, rhs = mg.face_square_identity(f, face_with(f, [(2, 0)]))
    assert lhs == rhs == parse_polynomial("x1^4", 2)
    g = M("x1^3 - 2*x1*x2 + x2^2 + 1; x1*x2 - x2^3")
    G = geom.newton_polytope(g)
    assert mg.verify_claim_3_5(g, face_with(g, G.vertices))


def test_face_polynomials_are_quasi_homogeneous():
    rng = random.Random(4)
    for _ in range(10):
        f = random_map(rng, 2, 2, 4)
        for face in geom.faces_all(geom.newton_polytope(f)):
            q = primitive(face.weight()) if any(face.weight()) else None
            if q is None:
                continue
            d = sum(a * b for a, b in zip(q, face.vertices[0]))
            x = (F(rng.randint(1, 5), 3), F(-rng.randint(1, 5), 2))
            lam = F(2)
            for h in mg.face_restrict(f, face).restricted:
                scaled = tuple(lam ** int(qj) * xj for qj, xj in zip(q, x))
                assert evaluate(h, scaled) == lam ** int(d) * evaluate(h, x)


# ---- the checker

def test_check_mg_positive_sum():
    vs = mg.check_mg(M("x1^2+x2^2"))
    assert len(vs) == 3 and all(v.status == PASSED for v in vs)


def test_check_mg_certifies_difference_of_squares():
    v = mg.check_mg(M("x1^2-x2^2"))[0]
    assert v.status == CERTIFIED and v.face.dim == 1
    assert v.witness == (1, 1)
    assert all(evaluate(p, v.witness) == 0 for p in M("x1^2-x2^2"))


def test_check_mg_linear_pair_passes():
    vs = mg.check_mg(M("x1-x2; x1+x2"))
    assert mg.satisfies_mg(vs)


def test_check_mg_sign_change_certificate():
    v = mg.check_mg(M("x1^2-2*x2^2"))[0]
    assert v.status == CERTIFIED
    lo, hi = v.bracket
    p = M("x1^2-2*x2^2")[0]
    assert evaluate(p, lo) * evaluate(p, hi) < 0
    assert np.sign(lo[0]) == np.sign(hi[0]) and np.sign(lo[1]) == np.sign(hi[1])


def test_check_mg_suspects_irrational_double_root():
    v = mg.check_mg(M("x1^4 - 4*x1^2*x2^2 + 4*x2^4"))[0]
    assert v.status == mg.MGStatus.VIOLATION_SUSPECTED
    assert v.witness[0] ** 2 == pytest.approx(2 * v.witness[1] ** 2, rel=1e-6)


def test_check_mg_finds_zero_on_lower_face():
    # the full polygon is fine, but the top edge x1^2*x2^2 - x2^4 vanishes at (1, 1)
    vs = mg.check_mg(M("x1^2*x2^2 - x2^4 + 1"))
    assert vs[0].status == CERTIFIED and vs[0].face.dim == 1


def test_verdicts_ordered_worst_first():
    vs = mg.check_mg(M("x1^2*x2^2 - x2^4 + 1"))
    sev = [mg._SEVERITY[v.status] for v in vs]
    assert sev == sorted(sev)


def test_soundness_on_positive_even_maps():
    rng = random.Random(6)
    for _ in range(8):
        n = rng.choice([2, 3])
        comps = []
        for _ in range(rng.randint(1, 2)):
            t = {tuple(2 * rng.randint(0, 2) for _ in range(n)): rng.randint(1, 5) for _ in range(4)}
            comps.append(Polynomial(t, n))
        f = PolynomialMap(tuple(comps))
        vs = mg.check_mg(f, mg.SearchBudget(starts=2))
        assert all(v.status == PASSED for v in vs)
        # the face systems really are positive off the axes
        X = np.exp(np.random.default_rng(0).uniform(-3, 3, size=(10 ** 4, n)))
        X *= np.random.default_rng(1).choice([-1.0, 1.0], size=X.shape)
        for v in vs:
            hs = mg.face_restrict(f, v.face).restricted
            assert np.all(np.max([np.abs(h.evaluate_array(X)) for h in hs], axis=0) > 0)


def test_check_mg_threads_do_not_change_results():
    f = M("x1^2 + x1*x2 + x2^2 - x1 + 1")
    a = mg.check_mg(f, mg.SearchBudget(seed=3))
    b = mg.check_mg(f, mg.SearchBudget(seed=3, workers=4))
    assert [v.to_json() for v in a] == [v.to_json() for v in b]


# ---- constants

def test_estimate_constants_examples():
    e = mg.estimate_constants(M("x1^2+x2^2"), sample_count=2000)
    assert e.c1_hat == pytest.approx(1) and e.c2_hat == pytest.approx(1)
    e = mg.estimate_constants(M("x1^2+x1*x2+x2^2"), sample_count=5000)
    assert e.c1_hat == pytest.approx(0.5, abs=1e-9) and e.c2_hat == pytest.approx(1.5, abs=1e-9)
    e = mg.estimate_constants(M("x1^6+x2^4"), sample_count=2000)
    assert e.c1_hat <= 1 <= e.c2_hat and e.c2_hat == pytest.approx(1)


def test_estimate_constants_hold_out():
    f = M("x1^2*x2; x1*x2^2")
    e = mg.estimate_constants(f, sample_count=5000, seed=1)
    assert e.c1_hat <= e.c2_hat
    r = mg.sample_ratios(f, 20000, rho=e.rho, log_radius=e.log_radius, seed=77)
    assert r.min() >= e.c1_hat * (1 - 1e-6) and r.max() <= e.c2_hat * (1 + 1e-6)


def test_estimate_constants_precondition():
    f = M("x1^2-x2^2")
    with pytest.raises(PreconditionError):
        mg.estimate_constants(f, verdicts=mg.check_mg(f))


# ---- perturbations

def test_probe_example_fixed_epsilon():
    rep = mg.perturbation_probe(M("x1^2+x2^2"), trials=100, epsilon=0.1)
    assert rep.fraction_unfalsified == 1.0 and rep.smallest_violating_size is None


def test_probe_refuses_non_mg():
    with pytest.raises(PreconditionError):
        mg.perturbation_probe(M("x1^2-x2^2"), trials=3, epsilon=0.1)


def test_probe_refuses_vertex_cancelling_epsilon():
    with pytest.raises(PreconditionError):
        mg.perturbation_probe(M("x1^2+x2^2"), trials=3, epsilon=1.5)


def test_probe_auto_epsilon():
    f = M("x1^2+x2^2")
    rep = mg.perturbation_probe(f, trials=10, epsilon="auto")
    assert rep.eta == 5 and rep.epsilon == pytest.approx(rep.c1_hat / 10)
    assert rep.fraction_unfalsified == 1.0


def test_probe_reproducible_under_threads():
    f = M("x1^2+x1*x2+x2^2")
    a = mg.perturbation_probe(f, trials=6, epsilon=0.05, seed=5)
    b = mg.perturbation_probe(f, trials=6, epsilon=0.05, seed=5, workers=3)
    assert a == b


def test_perturb_keeps_newton_polytope():
    f = M("x1^3 + x2^2 - x1*x2")
    rng = np.random.Generator(np.random.Philox(0))
    g, size = mg.perturb(f, 0.01, rng)
    assert geom.newton_polytope(g) == geom.newton_polytope(f)
    assert 0 < size <= 0.01
    assert len(g[0]) == len(geom.integer_points(geom.newton_polytope(f)))
