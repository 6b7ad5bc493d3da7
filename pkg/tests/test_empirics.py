import math
import random
from itertools import product

import numpy as np
import pytest
from scipy.integrate import quad

from sublevel import asym, empirics as em, mgcheck as mg
from sublevel.errors import InfiniteMeasureError, NonTerminatedError, UnsupportedShapeError
from sublevel.polyparse import Polynomial, PolynomialMap, parse_map

from conftest import random_map


def M(text, n=2):
    return parse_map(text, n)


def divisor_oracle(r):
    R = math.floor(r)
    return 4 * sum(R // a for a in range(1, R + 1))


# ---- lattice counts

def test_count_examples():
    assert em.count_lattice(M("x1*x2"), 10) == 108 == divisor_oracle(10)
    assert em.count_lattice(M("x1^2+x2^2"), 2) == 4
    with pytest.raises(InfiniteMeasureError):
        em.count_lattice(M("x1^2"), 10)


def test_count_non_terminated_reports_partial():
    with pytest.raises(NonTerminatedError) as e:
        em.count_lattice(M("x1*x2"), 100, max_box=8)
    assert e.value.partial > 0 and e.value.box == 8


CORPUS = [
    ("x1*x2", 2, [10, 57, 150], 160),
    ("x1^2+x2^2", 2, [1, 50, 1000], 40),
    ("x1^6+x2^4", 2, [3, 100, 1000], 12),
    ("x1^2*x2; x1*x2^2", 2, [5, 100, 1000], 1001),
    ("x1^2 + x1*x2 + x2^2 - 3*x1", 2, [7, 300, 1000], 50),
    ("1/2*x1^3 - x2; x2^2 + x1", 2, [10, 400], 40),
    ("x1^2+x2^2+x3^2", 3, [3, 30, 200], 16),
    ("x1*x2*x3; x1^2 + x2^2 + x3^2", 3, [20, 150], 14),
]


@pytest.mark.parametrize("text,n,rs,box", CORPUS)
def test_count_matches_naive_enumeration(text, n, rs, box):
    f = M(text, n)
    for r in rs:
        assert em.count_lattice(f, r) == em.count_lattice_naive(f, r, box)


def test_count_random_maps_match_naive():
    # the shell test is only trusted for maps meeting the nondegeneracy condition
    rng = random.Random(31)
    done = 0
    while done < 6:
        f = random_map(rng, 2, rng.randint(1, 2), 4)
        if not (asym.lattice_profile(f).finite and asym.volume_profile(f).finite):
            continue
        if not mg.satisfies_mg(mg.check_mg(f)):
            continue
        try:
            c = em.count_lattice(f, 60, max_box=64)
        except NonTerminatedError:
            continue
        assert c == em.count_lattice_naive(f, 60, 130)
        done += 1


def test_count_nondecreasing_in_r():
    f = M("x1^2 - x1*x2 + 2*x2^2")
    counts = [em.count_lattice(f, r) for r in [0, 1, 2, 5, 10, 30, 100, 300]]
    assert counts == sorted(counts)


def test_count_sign_symmetry():
    # even exponents in x2: the two orthant halves have equal counts
    f = M("x1^4 + x1^3 + x1^2 + x2^4")
    r, box = 200, 20
    upper = lower = 0
    for x in product([a for a in range(-box, box + 1) if a], repeat=2):
        if abs(x[0] ** 4 + x[0] ** 3 + x[0] ** 2 + x[1] ** 4) <= r:
            if x[1] > 0:
                upper += 1
            else:
                lower += 1
    assert upper == lower and upper + lower == em.count_lattice(f, r)
    # and the count is invariant under substituting x1 -> -x1
    g = M("x1^4 - x1^3 + x1^2 + x2^4")
    assert em.count_lattice(g, r) == em.count_lattice(f, r)


def test_count_rational_coefficients_and_radius():
    f = M("1/3*x1^2 + 1/2*x2^2")
    want = sum(1 for a, b in product(range(-9, 10), repeat=2)
               if a and b and 2 * a * a + 3 * b * b <= 6 * 7.5)
    assert em.count_lattice(f, 7.5) == want


# ---- volumes

def test_disk_volume():
    v, se = em.estimate_volume(M("x1^2+x2^2"), 100)
    assert abs(v - math.pi * 100) <= max(se, 1e-9)
    assert se < 0.01 * v


def test_quartic_volume_against_quadrature():
    q = 4 * quad(lambda u: (1 - u ** 6) ** 0.25, 0, 1)[0]
    v, se = em.estimate_volume(M("x1^6+x2^4"), 1)
    assert abs(v - q) <= 0.01 * q


def test_zero_radius_volume():
    assert em.estimate_volume(M("x1^2+x2^2"), 0) == (0.0, 0.0)


def test_volume_refuses_infinite():
    with pytest.raises(InfiniteMeasureError):
        em.estimate_volume(M("x1*x2"), 10)


def test_volume_unsupported_shape():
    # finite volume, but the set contains both coordinate axes
    with pytest.raises(UnsupportedShapeError) as e:
        em.estimate_volume(M("x1^2*x2; x1*x2^2"), 10)
    assert "half_widths" in e.value.diagnostics


@pytest.mark.parametrize("text,n,r", [
    ("x1^2+x2^2", 2, 50),
    ("x1^6+x2^4", 2, 30),
    ("x1^2 + x1*x2 + x2^2", 2, 20),
    ("x1^4 + x2^2 - x1*x2", 2, 40),
    ("x1^2+x2^2+x3^2", 3, 10),
])
def test_grid_and_monte_carlo_agree(text, n, r):
    f = M(text, n)
    g, sg = em.estimate_volume(f, r, "GRID")
    m, sm = em.estimate_volume(f, r, "MONTE_CARLO", samples=400000, seed=4)
    assert abs(g - m) <= 3 * math.hypot(sg, sm)


def test_monte_carlo_deterministic():
    f = M("x1^2+x2^2")
    assert em.estimate_volume(f, 10, "MONTE_CARLO", samples=50000, seed=9) == \
        em.estimate_volume(f, 10, "MONTE_CARLO", samples=50000, seed=9)


# ---- sweeps

def test_sweep_counts_divisor_growth():
    s = em.sweep(M("x1*x2"), "LATTICE_COUNT", [1e2, 1e3, 1e4])
    assert list(s.measurements) == [divisor_oracle(r) for r in (1e2, 1e3, 1e4)]
    assert s.measurements[0] < s.measurements[1] < s.measurements[2]


def test_sweep_empty_schedule():
    s = em.sweep(M("x1*x2"), "LATTICE_COUNT", [])
    assert len(s) == 0 and s.measurements == ()


def test_sweep_disk_volumes():
    s = em.sweep(M("x1^2+x2^2"), "VOLUME", [10, 100, 1000])
    for r, v, e in zip(s.r_values, s.measurements, s.error_bars):
        assert abs(v - math.pi * r) <= e


def test_sweep_threads_bitwise_equal():
    f = M("x1^6+x2^4")
    a = em.sweep(f, "VOLUME", [10, 100, 1000, 1e4], method="MONTE_CARLO", samples=20000, seed=2)
    b = em.sweep(f, "VOLUME", [10, 100, 1000, 1e4], method="MONTE_CARLO", samples=20000, seed=2,
                 workers=4)
    assert a == b


def test_sweep_refuses_infinite():
    with pytest.raises(InfiniteMeasureError):
        em.sweep(M("x1*x2"), "VOLUME", [10])


def test_sweep_default_schedule_truncated_by_budget():
    s = em.sweep(M("x1^2+x2^2"), "LATTICE_COUNT", max_box=64)
    assert len(s) >= 4 and s.r_values[0] == 100
    assert all(r <= 64 ** 2 * 2 for r in s.r_values)


def test_csv_layout():
    s = em.sweep(M("x1*x2"), "LATTICE_COUNT", [100, 1000])
    lines = s.to_csv().splitlines()
    assert lines[0] == "r,measurement,stderr"
    assert lines[1] == f"100,{divisor_oracle(100)},"
    v = em.sweep(M("x1^2+x2^2"), "VOLUME", [1e-3, 1e5], method="MONTE_CARLO", samples=1000)
    for line in v.to_csv().splitlines()[1:]:
        assert "e" not in line.lower()


# ---- fitting

def test_fit_free_recovers_log_factor():
    r = np.logspace(2, 8, 13)
    fit = em.fit_exponents((r, 3 * r ** 0.5 * np.log(r)))
    assert abs(fit.theta_hat - 0.5) <= 0.02 and abs(fit.kappa_hat - 1) <= 0.02


def test_fit_fixed_power():
    r = np.logspace(2, 8, 7)
    fit = em.fit_exponents((r, 7 * r ** (2 / 3)), kappa=0)
    assert fit.theta_hat == pytest.approx(2 / 3, abs=1e-12) and fit.kappa_fixed


def test_fit_constant():
    r = np.logspace(2, 6, 5)
    fit = em.fit_exponents((r, np.full(5, 5.0)), kappa=0)
    assert abs(fit.theta_hat) < 1e-12


def test_fit_planted_exponents():
    rng = np.random.default_rng(0)
    r = np.logspace(2, 8, 15)
    for _ in range(20):
        theta = rng.uniform(0.1, 3)
        kappa = int(rng.integers(0, 3))
        M_ = rng.uniform(0.1, 10) * r ** theta * np.log(r) ** kappa
        free = em.fit_exponents((r, M_))
        fixed = em.fit_exponents((r, M_), kappa=kappa)
        assert abs(free.theta_hat - theta) <= 0.02 and abs(free.kappa_hat - kappa) <= 0.1
        assert abs(fixed.theta_hat - theta) <= 1e-9


def test_fit_errors():
    with pytest.raises(ValueError):
        em.fit_exponents(([10, 20, 30], [1, 2, 3]))
    with pytest.raises(ValueError):
        em.fit_exponents(([5, 20, 30, 40], [1, 2, 3, 4]))
    with pytest.raises(ValueError):
        em.fit_exponents(([100] * 5, [1, 2, 3, 4, 5]), kappa=0)
