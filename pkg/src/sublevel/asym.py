"""Growth exponents of sublevel-set volume and lattice-point counts.

For a polynomial map ``f`` with Newton polytope ``Gamma`` the volume of
``{max |f_i| <= r}`` grows like ``r^theta (ln r)^(n-k-1)`` and the number of
its lattice points with no zero coordinate like ``r^theta' (ln r)^(n-k'-1)``.
The exponents come from where the main diagonal leaves ``Gamma`` (volume)
or its downward closure (lattice count).  They are computed twice here:

* geometrically, from the farthest diagonal point and the smallest face
  containing it;
* as the optimal value and optimal-face dimension of the LP
  ``max x_1+...+x_n`` s.t. ``<x, alpha> <= 1`` over the vertices ``alpha``
  (with ``x >= 0`` for the lattice variant).

Any disagreement between the two routes is a bug and raises
:class:`ConsistencyError`.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from . import geom, lp
from .errors import ConsistencyError
from .polyparse import PolynomialMap


@dataclass(frozen=True)
class ExponentPair:
    finite: bool
    theta: Optional[Fraction] = None
    k: Optional[int] = None
    log_exponent: Optional[int] = None
    face: Optional[geom.Face] = field(default=None, compare=False, repr=False)
    diagonal: Optional[Fraction] = None


@dataclass(frozen=True)
class AsymptoticProfile:
    n: int
    volume_finite: bool
    theta: Optional[Fraction]
    log_exp_volume: Optional[int]
    k: Optional[int]
    lattice_finite: bool
    theta_prime: Optional[Fraction]
    log_exp_lattice: Optional[int]
    k_prime: Optional[int]
    faces_equal: bool
    degenerate: bool = False
    volume_face: Optional[Tuple] = None
    lattice_face: Optional[Tuple] = None

    def to_json(self):
        q = lambda x: None if x is None else [x.numerator, x.denominator]  # noqa: E731
        pts = lambda F: None if F is None else [[q(c) for c in v] for v in F]  # noqa: E731
        return {
            "n": self.n,
            "volume_finite": self.volume_finite,
            "theta": q(self.theta),
            "k": self.k,
            "log_exp_volume": self.log_exp_volume,
            "lattice_finite": self.lattice_finite,
            "theta_prime": q(self.theta_prime),
            "k_prime": self.k_prime,
            "log_exp_lattice": self.log_exp_lattice,
            "faces_equal": self.faces_equal,
            "degenerate_constant_map": self.degenerate,
            "volume_face_vertices": pts(self.volume_face),
            "lattice_face_vertices": pts(self.lattice_face),
        }


def _is_constant(G: geom.Polytope) -> bool:
    return G.vertices == (tuple(Fraction(0) for _ in range(G.n)),)


def _from_diagonal(P: geom.Polytope) -> ExponentPair:
    dp = geom.diagonal_farthest(P)
    if dp is None or dp.d_value == 0:
        raise ConsistencyError("finite measure but the diagonal meets the polytope only at the origin")
    k = dp.containing_face.dim
    return ExponentPair(True, 1 / dp.d_value, k, P.n - k - 1, dp.containing_face, dp.d_value)


def volume_profile(f: PolynomialMap) -> ExponentPair:
    """Finiteness of ``|G(r)|`` and ``(theta, k, n-k-1)`` when finite."""
    G = geom.newton_polytope(f)
    if _is_constant(G):
        return ExponentPair(False)
    ones = tuple(Fraction(1) for _ in range(f.n))
    if geom.cone_membership(G.vertices, ones) != geom.ConeMembership.INTERIOR:
        return ExponentPair(False)
    return _from_diagonal(G)


def lattice_profile(f: PolynomialMap) -> ExponentPair:
    """Finiteness of the nonzero-lattice-point count and ``(theta', k', n-k'-1)``."""
    G = geom.newton_polytope(f)
    if _is_constant(G):
        return ExponentPair(False)
    if not geom.cone_meets_open_orthant(G.vertices):
        return ExponentPair(False)
    return _from_diagonal(geom.downward_closure(G))


@dataclass(frozen=True)
class RouteComparison:
    kind: str
    geometric_theta: Fraction
    geometric_log_exponent: int
    lp_value: Fraction
    lp_face_dim: int
    lp_point: Tuple[Fraction, ...]

    @property
    def agree(self):
        return self.geometric_theta == self.lp_value and self.geometric_log_exponent == self.lp_face_dim

    def to_json(self):
        q = lambda x: [x.numerator, x.denominator]  # noqa: E731
        return {
            "kind": self.kind,
            "geometric": {"theta": q(self.geometric_theta), "log_exponent": self.geometric_log_exponent},
            "lp": {"value": q(self.lp_value), "optimal_face_dim": self.lp_face_dim,
                   "point": [q(x) for x in self.lp_point]},
            "agree": self.agree,
        }


def _lp_route(vertices, nonneg):
    prog = lp.sup_sum_lp(vertices, nonneg=nonneg)
    sol = lp.solve(prog)
    if sol.status != lp.Status.OPTIMAL:
        raise ConsistencyError(f"LP is {sol.status.value} although the measure is finite")
    if not lp.verify_certificate(prog, sol):
        raise ConsistencyError("LP dual certificate failed verification")
    return sol


def lp_cross_check(f: PolynomialMap, vol: Optional[ExponentPair] = None,
                   lat: Optional[ExponentPair] = None):
    """Solve both monomial-system LPs and compare with the geometric exponents.

    Returns a list of :class:`RouteComparison` (one per finite kind).
    Raises :class:`ConsistencyError` on any mismatch.
    """
    G = geom.newton_polytope(f)
    V = G.vertices
    vol = volume_profile(f) if vol is None else vol
    lat = lattice_profile(f) if lat is None else lat
    out = []
    for kind, pair, nonneg in (("volume", vol, False), ("lattice", lat, True)):
        if not pair.finite:
            continue
        sol = _lp_route(V, nonneg)
        cmp_ = RouteComparison(kind, pair.theta, pair.log_exponent, sol.value,
                               sol.optimal_face_dim, sol.point)
        if not cmp_.agree:
            raise ConsistencyError(
                f"{kind}: geometric (theta={pair.theta}, log={pair.log_exponent}) vs "
                f"LP (value={sol.value}, face dim={sol.optimal_face_dim}) for f = {f}")
        out.append(cmp_)
    return out


def analyze(f: PolynomialMap) -> AsymptoticProfile:
    vol = volume_profile(f)
    lat = lattice_profile(f)
    degenerate = _is_constant(geom.newton_polytope(f))
    if vol.finite and lat.finite:
        faces_equal = set(vol.face.vertices) == set(lat.face.vertices)
    else:
        faces_equal = False
    if vol.finite and lat.finite and lat.theta > vol.theta:
        raise ConsistencyError(f"theta' = {lat.theta} exceeds theta = {vol.theta}")
    return AsymptoticProfile(
        n=f.n,
        volume_finite=vol.finite, theta=vol.theta, log_exp_volume=vol.log_exponent, k=vol.k,
        lattice_finite=lat.finite, theta_prime=lat.theta, log_exp_lattice=lat.log_exponent,
        k_prime=lat.k, faces_equal=faces_equal, degenerate=degenerate,
        volume_face=vol.face.vertices if vol.face else None,
        lattice_face=lat.face.vertices if lat.face else None,
    )


def compare_profiles(profile: AsymptoticProfile) -> bool:
    """Whether the two diagonal faces coincide as vertex sets.

    Equal faces force equal exponent pairs; that implication is asserted.
    The converse can fail (a horizontal edge of ``Gamma`` through the
    diagonal point gets extended by the downward closure without changing
    either exponent), so it is not enforced.  An undefined side compares
    as not equal.
    """
    if not (profile.volume_finite and profile.lattice_finite):
        return False
    if profile.faces_equal and (profile.theta, profile.k) != (profile.theta_prime, profile.k_prime):
        raise ConsistencyError("equal diagonal faces but different exponent pairs")
    return profile.faces_equal
