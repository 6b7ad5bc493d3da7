"""Face-by-face testing of the Mikhailov-Gindikin condition.

The condition asks that for every face ``Delta`` of the Newton polytope
the face polynomials ``f_{i,Delta}`` have no common zero with all
coordinates nonzero.  There is no decision procedure behind this module:
``PASSED`` means "no zero found by a bounded multi-start search", while
a violation is only *certified* by an exact rational common zero or, for
a single nonzero face polynomial, by two exact rational points of the
same orthant where it takes opposite signs.

Search happens in logarithmic coordinates ``x_j = s_j * exp(t_j)``.  Face
polynomials are quasi-homogeneous, so their zero sets are invariant under
shifts of ``t`` orthogonal to the face; those directions are pinned by
fixing ``n - dim(face)`` of the ``t_j`` to zero.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from . import geom
from .errors import ConsistencyError, PreconditionError
from .exact import independent_rows, nullspace, sub
from .polyparse import Polynomial, PolynomialMap, evaluate


class MGStatus(str, Enum):
    PASSED = "PASSED"
    VIOLATION_CERTIFIED = "VIOLATION_CERTIFIED"
    VIOLATION_SUSPECTED = "VIOLATION_SUSPECTED"


_SEVERITY = {MGStatus.VIOLATION_CERTIFIED: 0, MGStatus.VIOLATION_SUSPECTED: 1, MGStatus.PASSED: 2}


@dataclass(frozen=True)
class SearchBudget:
    """Knobs for :func:`check_mg`.

    ``starts`` quasi-random starts per (face, orthant); ``log_radius`` is the
    half-width ``T`` of the search box in log coordinates; a scale-relative
    residual below ``threshold`` counts as a suspected zero.
    """

    starts: int = 8
    log_radius: float = 12.0
    threshold: float = 1e-9
    max_iter: int = 200
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class FaceSystem:
    face: geom.Face
    restricted: Tuple[Polynomial, ...]


@dataclass(frozen=True)
class MGVerdict:
    status: MGStatus
    face: geom.Face
    witness: Optional[Tuple] = None
    residual: Optional[float] = None
    samples_used: int = 0
    reason: str = ""
    bracket: Optional[Tuple[Tuple, Tuple]] = None

    def to_json(self):
        def pt(x):
            if x is None:
                return None
            return [[c.numerator, c.denominator] if isinstance(c, Fraction) else c for c in x]

        return {
            "status": self.status.value,
            "face_dim": self.face.dim,
            "face_vertices": [[[c.numerator, c.denominator] for c in v] for v in self.face.vertices],
            "witness": pt(self.witness),
            "bracket": None if self.bracket is None else [pt(p) for p in self.bracket],
            "residual": self.residual,
            "samples_used": self.samples_used,
            "reason": self.reason,
        }


def face_restrict(f: PolynomialMap, face: geom.Face) -> FaceSystem:
    """Keep, in every component, exactly the terms whose exponent lies on ``face``."""
    G = geom.newton_polytope(f)
    if G != face.parent:
        raise ValueError("face does not belong to the Newton polytope of this map")
    restricted = tuple(p.restrict(face.contains) for p in f)
    return FaceSystem(face, restricted)


def square_sum_lift(f: PolynomialMap) -> Polynomial:
    """``F = sum f_i^2``, checking that its Newton polytope is ``2 * Gamma(f)``."""
    F = Polynomial.zero(f.n)
    for p in f:
        F = F + p * p
    want = {tuple(2 * x for x in v) for v in geom.newton_polytope(f).vertices}
    got = set(geom.newton_polytope(PolynomialMap((F,))).vertices)
    if got != want:
        raise ConsistencyError(f"vertices of sum f_i^2 are not the doubled vertices of f: {got} vs {want}")
    return F


def face_square_identity(f: PolynomialMap, face: geom.Face):
    """``(F restricted to 2*face, sum_i (f_i restricted to face)^2)`` for ``F = sum f_i^2``."""
    F = square_sum_lift(f)
    GF = geom.newton_polytope(PolynomialMap((F,)))
    doubled = [tuple(2 * x for x in v) for v in face.vertices]
    face2 = geom.face_of_vertices(GF, doubled)
    if face2 is None:
        raise ConsistencyError("doubled face is not a face of the Newton polytope of F")
    lhs = F.restrict(face2.contains)
    rhs = Polynomial.zero(f.n)
    for h in face_restrict(f, face).restricted:
        rhs = rhs + h * h
    return lhs, rhs


def verify_claim_3_5(f: PolynomialMap, face: geom.Face) -> bool:
    """Exact check that squaring commutes with face restriction on ``face``."""
    lhs, rhs = face_square_identity(f, face)
    return lhs == rhs


# ----------------------------------------------------------- log evaluation

class _LogSystem:
    """Float evaluation of several polynomials at ``x = s * exp(t)``, rescaled to avoid overflow."""

    def __init__(self, polys: Sequence[Polynomial], reference=None):
        self.m = len(polys)
        self.n = polys[0].n
        E, C, comp = [], [], []
        for i, p in enumerate(polys):
            for mono, c in p.items():
                E.append(mono)
                C.append(float(c))
                comp.append(i)
        self.E = np.array(E, dtype=float).reshape(-1, self.n)
        self.C = np.array(C)
        self.comp = np.array(comp, dtype=int)
        self.ind = np.zeros((len(C), self.m))
        self.ind[np.arange(len(C)), self.comp] = 1.0
        self.R = None if reference is None else np.array(reference, dtype=float).reshape(-1, self.n)

    def signs(self, s):
        neg = (np.asarray(s) < 0).astype(float)
        return np.where((self.E @ neg) % 2 == 1, -1.0, 1.0)

    def values(self, T, s):
        """``(component values, scale)`` for rows of ``T``; both divided by a common ``exp(M)``."""
        T = np.atleast_2d(T)
        L = T @ self.E.T
        if self.R is not None:
            M = (T @ self.R.T).max(axis=1)
        else:
            M = L.max(axis=1)
        W = np.exp(L - M[:, None])
        vals = (W * (self.C * self.signs(s))) @ self.ind
        if self.R is not None:
            scale = np.exp(T @ self.R.T - M[:, None]).sum(axis=1)
        else:
            scale = (W * np.abs(self.C)).sum(axis=1)
        return vals, scale


def _exact_point(t, s):
    return tuple(Fraction(float(sj * np.exp(tj))) for tj, sj in zip(t, s))


def _certify_zero(polys, t, s, free):
    """Try small-denominator roundings of ``s*exp(t)`` that vanish exactly."""
    x = [float(sj * np.exp(tj)) for tj, sj in zip(t, s)]
    for den in (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 100, 1000, 10 ** 4, 10 ** 6):
        cand = tuple(Fraction(int(sj)) if j not in free else Fraction(x[j]).limit_denominator(den)
                     for j, sj in enumerate(s))
        if any(c == 0 for c in cand):
            continue
        if all(evaluate(p, cand) == 0 for p in polys):
            return cand
    return None


def _self_test_quasi_homogeneity(face, polys, rng):
    q = face.weight()
    if all(c == 0 for c in q):
        return
    d = sum(a * b for a, b in zip(q, face.vertices[0]))
    qf = np.array([float(c) for c in q])
    for p in polys:
        if p.is_zero():
            continue
        x = rng.uniform(0.5, 1.5, size=p.n) * rng.choice([-1.0, 1.0], size=p.n)
        lam = float(rng.uniform(1.1, 2.0))
        lhs = p.evaluate_array((lam ** qf * x)[None, :])[0]
        rhs = lam ** float(d) * p.evaluate_array(x[None, :])[0]
        E, C = p.arrays()
        scale = lam ** float(d) * float(np.sum(np.abs(C) * np.prod(np.abs(x) ** E, axis=1)))
        if abs(lhs - rhs) > 1e-9 * max(scale, 1e-300):
            raise ConsistencyError(f"face polynomial {p} is not quasi-homogeneous with weight {q}")


def _nonvanishing_reason(polys):
    for p in polys:
        if len(p) == 1:
            return "a face component is a single monomial"
        if all(c > 0 for _, c in p.items()) or all(c < 0 for _, c in p.items()):
            if all(e % 2 == 0 for m, _ in p.items() for e in m):
                return "a face component is sign-definite (even exponents, one-signed coefficients)"
    return None


def _pinning(face):
    """Coordinates to pin at ``t_j = 0`` so that each shift class has one representative."""
    n = face.parent.n
    base = face.vertices[0]
    diffs = [sub(v, base) for v in face.vertices[1:]]
    W = nullspace(diffs, n) if diffs else nullspace([], n)
    if not W:
        return [], list(range(n))
    rows = [tuple(w[j] for w in W) for j in range(n)]
    pinned = independent_rows(rows, len(W))
    free = [j for j in range(n) if j not in pinned]
    return pinned, free


def _search_orthant(polys, face, s, budget, seed):
    """Return ``(status, witness, residual, samples, reason, bracket)`` for one sign orthant."""
    n = face.parent.n
    pinned, free = _pinning(face)
    k = len(free)
    system = _LogSystem(polys)
    nonzero = [p for p in polys if not p.is_zero()]
    single = len(nonzero) == 1
    T = budget.log_radius
    rng = np.random.Generator(np.random.Philox(seed))

    def embed(u):
        t = np.zeros(n)
        t[free] = u
        return t

    def objective(u):
        # log of the squared relative residual: steep near multiple roots too
        vals, scale = system.values(embed(u), s)
        return float(np.log(np.sum(vals[0] ** 2) / scale[0] ** 2 + 1e-40))

    def residual(u):
        vals, scale = system.values(embed(u), s)
        return float(np.max(np.abs(vals[0])) / scale[0])

    starts = qmc.Halton(d=k, scramble=True, seed=rng).random(budget.starts) * 2 * T - T
    signs_seen = {}
    best = (np.inf, None)
    for u0 in starts:
        res = optimize.minimize(objective, u0, method="L-BFGS-B", bounds=[(-T, T)] * k,
                                options={"maxiter": budget.max_iter, "ftol": 1e-15, "gtol": 1e-12})
        for u in (u0, res.x):
            r = residual(u)
            if r < best[0]:
                best = (r, u)
            if single:
                xe = _exact_point(embed(u), s)
                v = evaluate(nonzero[0], xe)
                if v != 0:
                    signs_seen.setdefault(v > 0, xe)
    r_best, u_best = best
    wit = _certify_zero(polys, embed(u_best), s, set(free))
    if wit is not None:
        return MGStatus.VIOLATION_CERTIFIED, wit, r_best, len(starts), "exact rational common zero", None
    if r_best < budget.threshold:
        if single:
            # prefer a bracket close to the near-zero over one built from distant starts
            far, signs_seen = signs_seen, {}
            for h in (1e-6, 1e-4, 1e-2, 1e-1):
                for j in range(k):
                    for sg in (-1.0, 1.0):
                        u = np.array(u_best, dtype=float)
                        u[j] += sg * h
                        xe = _exact_point(embed(u), s)
                        v = evaluate(nonzero[0], xe)
                        if v != 0:
                            signs_seen.setdefault(v > 0, xe)
            if len(signs_seen) < 2:
                signs_seen = far
    if single and len(signs_seen) == 2:
        return (MGStatus.VIOLATION_CERTIFIED, None, r_best, len(starts),
                "sign change inside one orthant", (signs_seen[True], signs_seen[False]))
    if r_best < budget.threshold:
        wit = tuple(float(sj * np.exp(tj)) for tj, sj in zip(embed(u_best), s))
        return MGStatus.VIOLATION_SUSPECTED, wit, r_best, len(starts), "residual below threshold", None
    return MGStatus.PASSED, None, r_best, len(starts), "no zero found within budget", None


def _check_face(f, face, budget, face_index):
    fs = face_restrict(f, face)
    polys = fs.restricted
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([budget.seed, face_index, 7919])))
    _self_test_quasi_homogeneity(face, polys, rng)
    reason = _nonvanishing_reason(polys)
    if reason is not None:
        return MGVerdict(MGStatus.PASSED, face, None, None, 0, reason)
    worst = None
    total = 0
    for oi, s in enumerate(product((1, -1), repeat=f.n)):
        seed = np.random.SeedSequence([budget.seed, face_index, oi])
        status, wit, res, used, why, bracket = _search_orthant(polys, face, s, budget, seed)
        total += used
        v = MGVerdict(status, face, wit, res, 0, why, bracket)
        if worst is None or (_SEVERITY[v.status], v.residual) < (_SEVERITY[worst.status], worst.residual):
            worst = v
        if status == MGStatus.VIOLATION_CERTIFIED:
            break
    return replace(worst, samples_used=total)


def check_mg(f: PolynomialMap, budget: SearchBudget = SearchBudget()) -> List[MGVerdict]:
    """One verdict per face of the Newton polytope, worst first."""
    faces = geom.faces_all(geom.newton_polytope(f))
    jobs = list(enumerate(faces))
    if budget.workers > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as ex:
            verdicts = list(ex.map(lambda job: _check_face(f, job[1], budget, job[0]), jobs))
    else:
        verdicts = [_check_face(f, face, budget, i) for i, face in jobs]
    order = sorted(range(len(verdicts)), key=lambda i: (
        _SEVERITY[verdicts[i].status],
        np.inf if verdicts[i].residual is None else verdicts[i].residual,
        i))
    return [verdicts[i] for i in order]


def satisfies_mg(verdicts) -> bool:
    return all(v.status == MGStatus.PASSED for v in verdicts)


# -------------------------------------------------- two-sided vertex estimate

@dataclass(frozen=True)
class MGEstimate:
    c1_hat: float
    c2_hat: float
    rho: float
    sample_count: int
    log_radius: float = 8.0
    seed: int = 0

    def to_json(self):
        return {"c1_hat": self.c1_hat, "c2_hat": self.c2_hat, "rho": self.rho,
                "sample_count": self.sample_count, "log_radius": self.log_radius, "seed": self.seed}


def _ratio_system(f):
    G = geom.newton_polytope(f)
    return _LogSystem(list(f), reference=[tuple(float(c) for c in v) for v in G.vertices])


def _sample_log_points(n, count, rho, log_radius, rng):
    """Log-uniform points ``x = s*exp(t)``, ``t`` in ``[-T, T]^n``, kept when ``|x| > rho``."""
    out_t, out_s = [], []
    got = 0
    while got < count:
        batch = max(1024, 2 * (count - got))
        t = rng.uniform(-log_radius, log_radius, size=(batch, n))
        s = rng.choice(np.array([-1.0, 1.0]), size=(batch, n))
        keep = 0.5 * np.log(np.sum(np.exp(2 * t), axis=1)) > np.log(rho)
        out_t.append(t[keep])
        out_s.append(s[keep])
        got += int(keep.sum())
    return np.concatenate(out_t)[:count], np.concatenate(out_s)[:count]


def _ratios(system, T, S):
    out = np.empty(len(T))
    for key in {tuple(r) for r in S}:
        mask = np.all(S == np.array(key), axis=1)
        vals, scale = system.values(T[mask], np.array(key))
        out[mask] = np.max(np.abs(vals), axis=1) / scale
    return out


def sample_ratios(f: PolynomialMap, count: int, rho: float = 1.0, log_radius: float = 8.0,
                  seed: int = 0):
    """``max_i |f_i(x)| / N_f(x)`` at ``count`` fresh sample points."""
    rng = np.random.Generator(np.random.Philox(seed))
    T, S = _sample_log_points(f.n, count, rho, log_radius, rng)
    return _ratios(_ratio_system(f), T, S)


def estimate_constants(f: PolynomialMap, sample_count: int = 20000, rho: float = 1.0,
                       log_radius: float = 8.0, seed: int = 0, polish: int = 6,
                       verdicts=None) -> MGEstimate:
    """Empirical ``c1 <= max|f_i| / N_f <= c2`` for ``|x| > rho``.

    ``N_f`` sums the absolute vertex monomials.  Extremes over the sample
    are refined by bounded local optimisation from the ``polish`` best
    sample points on each side.
    """
    if verdicts is not None and not satisfies_mg(verdicts):
        raise PreconditionError("constants are meaningless for a map that fails the condition")
    system = _ratio_system(f)
    rng = np.random.Generator(np.random.Philox(seed))
    T, S = _sample_log_points(f.n, sample_count, rho, log_radius, rng)
    r = _ratios(system, T, S)
    if not np.all(np.isfinite(r)):
        raise ConsistencyError("vertex-monomial sum vanished at a sample point")
    lo, hi = float(r.min()), float(r.max())
    bounds = [(-log_radius, log_radius)] * f.n
    log_rho = np.log(rho)

    def ratio_at(t, s):
        if 0.5 * np.log(np.sum(np.exp(2 * np.asarray(t)))) <= log_rho:
            return None
        vals, scale = system.values(np.asarray(t), s)
        return float(np.max(np.abs(vals[0])) / scale[0])

    for sign, idx in ((1.0, np.argsort(r)[:polish]), (-1.0, np.argsort(-r)[:polish])):
        for i in idx:
            s = S[i]

            def obj(t, s=s):
                v = ratio_at(t, s)
                return np.inf if v is None else sign * v

            res = optimize.minimize(obj, T[i], method="Nelder-Mead", bounds=bounds,
                                    options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000})
            v = ratio_at(np.clip(res.x, -log_radius, log_radius), s)
            if v is not None:
                lo, hi = min(lo, v), max(hi, v)
    return MGEstimate(lo, hi, rho, sample_count, log_radius, seed)


# ----------------------------------------------------- openness under noise

@dataclass(frozen=True)
class ProbeReport:
    trials: int
    epsilon: float
    unfalsified: int
    eta: Optional[int] = None
    c1_hat: Optional[float] = None
    smallest_violating_size: Optional[float] = None
    seed: int = 0

    @property
    def fraction_unfalsified(self):
        return self.unfalsified / self.trials if self.trials else 1.0

    def to_json(self):
        return {"trials": self.trials, "epsilon": self.epsilon, "eta": self.eta,
                "c1_hat": self.c1_hat, "unfalsified": self.unfalsified,
                "fraction_unfalsified": self.fraction_unfalsified,
                "smallest_violating_size": self.smallest_violating_size, "seed": self.seed}


def lattice_count_doubled(f: PolynomialMap) -> int:
    """Number of integer points of ``2 * Gamma(f)``."""
    return len(geom.integer_points(geom.newton_polytope(f).scaled(2)))


def auto_epsilon(f: PolynomialMap, estimate: Optional[MGEstimate] = None):
    """``c1 / (2 eta)`` with ``eta`` the lattice-point count of ``2 Gamma``."""
    est = estimate or estimate_constants(f)
    eta = lattice_count_doubled(f)
    return est.c1_hat / (2 * eta), eta, est.c1_hat


def perturb(f: PolynomialMap, epsilon: float, rng) -> Tuple[PolynomialMap, float]:
    """Shift every coefficient at every lattice point of ``Gamma`` by ``U[-eps, eps]``."""
    G = geom.newton_polytope(f)
    pts = geom.integer_points(G)
    comps, biggest = [], 0.0
    for p in f:
        terms = p.terms
        for a in pts:
            d = float(rng.uniform(-epsilon, epsilon))
            biggest = max(biggest, abs(d))
            terms[a] = terms.get(a, Fraction(0)) + Fraction(d)
        comps.append(Polynomial(terms, f.n))
    g = PolynomialMap(tuple(comps))
    if geom.newton_polytope(g) != G:
        raise ConsistencyError("perturbation changed the Newton polytope")
    return g, biggest


def perturbation_probe(f: PolynomialMap, trials: int = 100, epsilon="auto",
                       budget: SearchBudget = SearchBudget(), seed: int = 0,
                       workers: int = 1) -> ProbeReport:
    """Run :func:`check_mg` on ``trials`` random coefficient perturbations of ``f``."""
    base = check_mg(f, budget)
    if not satisfies_mg(base):
        raise PreconditionError("perturbation probe needs a map that passes the condition")
    eta = c1 = None
    if epsilon == "auto":
        epsilon, eta, c1 = auto_epsilon(f)
    epsilon = float(epsilon)
    G = geom.newton_polytope(f)
    for v in G.vertices:
        if max(abs(float(p.coefficient(v))) for p in f) <= epsilon:
            raise PreconditionError(f"epsilon={epsilon} could cancel the vertex {tuple(map(int, v))}")

    def trial(i):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, i])))
        g, size = perturb(f, epsilon, rng)
        vs = check_mg(g, replace(budget, seed=budget.seed + i + 1, workers=1))
        return satisfies_mg(vs), size

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(trial, range(trials)))
    else:
        results = [trial(i) for i in range(trials)]
    bad = [size for ok, size in results if not ok]
    return ProbeReport(trials, epsilon, sum(ok for ok, _ in results), eta, c1,
                       min(bad) if bad else None, seed)
