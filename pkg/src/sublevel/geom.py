"""Exact rational polyhedral geometry.

Polytopes carry both descriptions: the vertex list and an irredundant
list of facet inequalities ``<q, x> <= d``.  A polytope that is not
full-dimensional also stores the equations of its affine hull; these
appear as pairs of opposite inequalities whenever the full half-space
description is requested (:meth:`Polytope.halfspaces`).

Facets are obtained from vertices with the double description method,
run on the homogenised cone of valid inequalities.  No floats are used.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import math
from itertools import product
from typing import FrozenSet, List, Optional, Sequence, Tuple

from . import lp as _lp
from .exact import (affine_rank, dot, independent_rows, inverse, nullspace,
                    primitive, rank, rref, sub, to_fraction, vec)

Point = Tuple[Fraction, ...]
Halfspace = Tuple[Point, Fraction]


# ------------------------------------------------------- double description

def extreme_rays(rows, d) -> List[Point]:
    """Extreme rays of the pointed cone ``{y in Q^d : <a, y> >= 0, a in rows}``."""
    A = [vec(a) for a in rows]
    basis = independent_rows(A, d)
    if len(basis) < d:
        raise ValueError("cone is not pointed (constraint matrix has rank < d)")
    Binv = inverse([A[i] for i in basis])
    rays = [primitive(tuple(Binv[r][c] for r in range(d))) for c in range(d)]
    zeros = [frozenset(basis[k] for k in range(d) if k != c) for c in range(d)]
    for i, a in enumerate(A):
        if i in basis:
            continue
        vals = [dot(a, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zer]
        new_zeros = [zeros[k] for k in pos] + [zeros[k] | {i} for k in zer]
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if len(common) < d - 2:
                    continue
                if any(k != p and k != q and common <= zeros[k] for k in range(len(rays))):
                    continue
                r = tuple(vals[p] * x - vals[q] * y for x, y in zip(rays[q], rays[p]))
                new_rays.append(primitive(r))
                new_zeros.append(common | {i})
        rays, zeros = new_rays, new_zeros
    return rays


# ---------------------------------------------------------------- polytopes

def _qjson(x):
    x = to_fraction(x)
    return [x.numerator, x.denominator]


def _unq(p):
    return Fraction(p[0], p[1])


@dataclass(frozen=True, eq=False)
class Polytope:
    """Bounded rational polytope with synchronised V- and H-representations."""

    n: int
    vertices: Tuple[Point, ...]
    facets: Tuple[Halfspace, ...]
    equations: Tuple[Halfspace, ...]
    affine_dim: int

    def halfspaces(self) -> Tuple[Halfspace, ...]:
        """Facet inequalities followed by each hull equation as a ``<=``/``>=`` pair."""
        out = list(self.facets)
        for q, d in self.equations:
            out.append((q, d))
            out.append((tuple(-x for x in q), -d))
        return tuple(out)

    def contains(self, x) -> bool:
        x = vec(x)
        return (all(dot(q, x) <= d for q, d in self.facets)
                and all(dot(q, x) == d for q, d in self.equations))

    def vertex_set(self) -> FrozenSet[Point]:
        return frozenset(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.n == other.n and self.vertex_set() == other.vertex_set()

    def __hash__(self):
        return hash((self.n, self.vertex_set()))

    def __repr__(self):
        vs = ", ".join("(" + ",".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope(dim={self.affine_dim}, vertices=[{vs}])"

    def scaled(self, c) -> "Polytope":
        c = to_fraction(c)
        return convex_hull([tuple(c * x for x in v) for v in self.vertices])

    def bounding_box(self):
        lo = tuple(min(v[j] for v in self.vertices) for j in range(self.n))
        hi = tuple(max(v[j] for v in self.vertices) for j in range(self.n))
        return lo, hi

    def to_json(self):
        return {
            "n": self.n,
            "affine_dim": self.affine_dim,
            "vertices": [[_qjson(x) for x in v] for v in self.vertices],
            "facets": [{"normal": [_qjson(x) for x in q], "offset": _qjson(d)}
                       for q, d in self.halfspaces()],
        }

    @classmethod
    def from_json(cls, d) -> "Polytope":
        pts = [tuple(_unq(x) for x in v) for v in d["vertices"]]
        return convex_hull(pts)


@dataclass(frozen=True)
class Face:
    """A nonempty face: the vertices of ``parent`` tight on ``tight_facets``."""

    parent: Polytope = field(compare=False, repr=False)
    tight_facets: FrozenSet[int]
    vertices: Tuple[Point, ...]
    dim: int

    def contains(self, x) -> bool:
        x = vec(x)
        if not self.parent.contains(x):
            return False
        return all(dot(self.parent.facets[j][0], x) == self.parent.facets[j][1]
                   for j in self.tight_facets)

    def weight(self) -> Point:
        """A vector ``q`` with ``<q, alpha>`` constant on the face and smaller elsewhere on the parent.

        Sum of the tight facet normals plus the affine-hull normals; for the
        parent itself only the hull normals remain (possibly zero).
        """
        q = [Fraction(0)] * self.parent.n
        for j in self.tight_facets:
            q = [a + b for a, b in zip(q, self.parent.facets[j][0])]
        for u, _ in self.parent.equations:
            q = [a + b for a, b in zip(q, u)]
        return tuple(q)


def convex_hull(points) -> Polytope:
    """Convex hull of a nonempty finite set of rational points."""
    pts = sorted({vec(p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("points of mixed dimension")
    p0 = pts[0]
    diffs = [sub(p, p0) for p in pts[1:]]
    k = rank(diffs, n) if diffs else 0
    equations = []
    for u in nullspace(diffs, n) if diffs else nullspace([], n):
        u = primitive(u)
        equations.append((u, dot(u, p0)))
    if k == 0:
        return Polytope(n, (p0,), (), tuple(equations), 0)

    _, piv = rref(diffs, n)
    proj = [tuple(p[j] for j in piv) for p in pts]
    rays = extreme_rays([(Fraction(1),) + y for y in proj], k + 1)
    facets_proj = []
    for r in rays:
        h0, h = r[0], r[1:]
        if all(x == 0 for x in h):
            continue
        facets_proj.append((tuple(-x for x in h), h0))
    facets_proj = sorted(set(facets_proj))

    verts = []
    for p, y in zip(pts, proj):
        tight = [q for q, d in facets_proj if dot(q, y) == d]
        if rank(tight, k) == k:
            verts.append(p)
    facets = []
    for q, d in facets_proj:
        full = [Fraction(0)] * n
        for j, c in zip(piv, q):
            full[j] = c
        facets.append((tuple(full), d))
    return Polytope(n, tuple(verts), tuple(facets), tuple(equations), k)


def newton_polytope(f) -> Polytope:
    """Convex hull of the union of the component supports of a polynomial map."""
    supp = f.support()
    if not supp:
        raise ValueError("the zero map has no Newton polytope")
    return convex_hull(supp)


def downward_closure(P: Polytope) -> Polytope:
    """All ``alpha >= 0`` dominated coordinatewise by some point of ``P``.

    Built as the hull of every vertex with every subset of its coordinates
    set to zero.
    """
    if any(x < 0 for v in P.vertices for x in v):
        raise ValueError("downward closure needs a polytope in the nonnegative orthant")
    cands = set()
    for v in P.vertices:
        for mask in product((False, True), repeat=P.n):
            cands.add(tuple(Fraction(0) if z else x for x, z in zip(v, mask)))
    return convex_hull(cands)


def is_dominated(P: Polytope, alpha) -> bool:
    """Membership oracle for the downward closure: ``alpha >= 0`` and ``alpha <= beta`` for some ``beta`` in ``P``.

    Decided by an exact feasibility LP over convex weights on the vertices.
    """
    alpha = vec(alpha)
    if any(a < 0 for a in alpha):
        return False
    if any(all(a <= x for a, x in zip(alpha, v)) for v in P.vertices):
        return True
    lo, hi = P.bounding_box()
    if any(a > h for a, h in zip(alpha, hi)):
        return False
    V = P.vertices
    s = len(V)
    cons = [(tuple(Fraction(1) for _ in V), _lp.EQ, 1)]
    for j in range(P.n):
        cons.append((tuple(v[j] for v in V), _lp.GE, alpha[j]))
    prog = _lp.LinearProgram(tuple(Fraction(0) for _ in V), tuple(cons), frozenset(range(s)))
    return _lp.solve(prog, face=False).status == _lp.Status.OPTIMAL


def in_hull_lp(points, x) -> bool:
    """Exact LP test of ``x in conv(points)``; independent of the facet computation."""
    pts = [vec(p) for p in points]
    x = vec(x)
    s = len(pts)
    cons = [(tuple(Fraction(1) for _ in pts), _lp.EQ, 1)]
    for j in range(len(x)):
        cons.append((tuple(p[j] for p in pts), _lp.EQ, x[j]))
    prog = _lp.LinearProgram(tuple(Fraction(0) for _ in pts), tuple(cons), frozenset(range(s)))
    return _lp.solve(prog, face=False).status == _lp.Status.OPTIMAL


# -------------------------------------------------------------------- faces

def _tight_vertex_sets(P: Polytope):
    return [frozenset(i for i, v in enumerate(P.vertices) if dot(q, v) == d) for q, d in P.facets]


def _face_from_vertex_ids(P, ids, facet_sets) -> Face:
    ids = frozenset(ids)
    tight = frozenset(j for j, fs in enumerate(facet_sets) if ids <= fs)
    verts = tuple(P.vertices[i] for i in sorted(ids))
    return Face(P, tight, verts, affine_rank(verts))


def smallest_face_at(P: Polytope, x) -> Face:
    """The face cut out by every facet tight at ``x``; ``x`` is in its relative interior."""
    x = vec(x)
    if not P.contains(x):
        raise ValueError(f"point {tuple(map(str, x))} is not in the polytope")
    tight = frozenset(j for j, (q, d) in enumerate(P.facets) if dot(q, x) == d)
    ids = [i for i, v in enumerate(P.vertices) if all(dot(P.facets[j][0], v) == P.facets[j][1] for j in tight)]
    verts = tuple(P.vertices[i] for i in ids)
    return Face(P, tight, verts, affine_rank(verts))


def faces_all(P: Polytope) -> List[Face]:
    """Every nonempty face, ``P`` included, ordered by dimension then vertices."""
    facet_sets = _tight_vertex_sets(P)
    family = {frozenset(range(len(P.vertices)))}
    for fs in facet_sets:
        family |= {S & fs for S in family}
    family.discard(frozenset())
    faces = [_face_from_vertex_ids(P, S, facet_sets) for S in family]
    return sorted(faces, key=lambda F: (F.dim, F.vertices))


def face_of_vertices(P: Polytope, verts) -> Optional[Face]:
    """The face of ``P`` whose vertex set is exactly ``verts``, if there is one."""
    want = {vec(v) for v in verts}
    ids = [i for i, v in enumerate(P.vertices) if v in want]
    if len(ids) != len(want):
        return None
    F = _face_from_vertex_ids(P, ids, _tight_vertex_sets(P))
    # the tight facets might cut out a larger vertex set
    cut = smallest_face_at(P, centroid(F.vertices))
    return F if set(cut.vertices) == want else None


def centroid(points) -> Point:
    pts = [vec(p) for p in points]
    k = len(pts)
    return tuple(sum(p[j] for p in pts) / k for j in range(len(pts[0])))


# ----------------------------------------------------- the diagonal point

@dataclass(frozen=True)
class DiagonalPoint:
    d_value: Fraction
    point: Point
    containing_face: Face


def diagonal_farthest(P: Polytope) -> Optional[DiagonalPoint]:
    """Largest ``d >= 0`` with ``(d, ..., d)`` in ``P``, solved as an exact LP."""
    cons = []
    for q, off in P.facets:
        cons.append(((sum(q, Fraction(0)),), _lp.LE, off))
    for u, e in P.equations:
        cons.append(((sum(u, Fraction(0)),), _lp.EQ, e))
    if not cons:
        cons.append(((Fraction(0),), _lp.LE, 0))
    prog = _lp.LinearProgram((Fraction(1),), tuple(cons), frozenset({0}))
    sol = _lp.solve(prog, face=False)
    if sol.status != _lp.Status.OPTIMAL:
        return None
    d = sol.value
    pt = tuple(d for _ in range(P.n))
    return DiagonalPoint(d, pt, smallest_face_at(P, pt))


# ------------------------------------------------------------------- cones

class ConeMembership(str, Enum):
    INTERIOR = "INTERIOR"
    BOUNDARY = "BOUNDARY"
    OUTSIDE = "OUTSIDE"


def in_cone(V, v) -> bool:
    """Exact LP test of ``v = sum lambda_i alpha_i`` with ``lambda >= 0``."""
    V = [vec(a) for a in V]
    v = vec(v)
    cons = tuple((tuple(a[j] for a in V), _lp.EQ, v[j]) for j in range(len(v)))
    prog = _lp.LinearProgram(tuple(Fraction(0) for _ in V), cons, frozenset(range(len(V))))
    return _lp.solve(prog, face=False).status == _lp.Status.OPTIMAL


def cone_facets(V) -> List[Point]:
    """Inward facet normals ``h`` (``<h, x> >= 0`` on the cone) of a full-dimensional ``cone(V)``."""
    V = [vec(a) for a in V]
    n = len(V[0])
    if rank(V, n) < n:
        raise ValueError("cone is not full-dimensional")
    return sorted(set(extreme_rays(V, n)))


def cone_membership(V, v) -> ConeMembership:
    V = [vec(a) for a in V]
    v = vec(v)
    n = len(v)
    if not in_cone(V, v):
        return ConeMembership.OUTSIDE
    if rank(V, n) < n:
        return ConeMembership.BOUNDARY
    if all(dot(h, v) > 0 for h in cone_facets(V)):
        return ConeMembership.INTERIOR
    return ConeMembership.BOUNDARY


def interior_witness(V, v) -> Fraction:
    """A rational ``eps > 0`` with ``v +- eps*e_j`` in ``cone(V)`` for every ``j``.

    Only valid when ``v`` is interior; raises otherwise.
    """
    if cone_membership(V, v) != ConeMembership.INTERIOR:
        raise ValueError("vector is not interior to the cone")
    v = vec(v)
    hs = cone_facets(V)
    if not hs:
        return Fraction(1)
    return min(dot(h, v) / max(abs(x) for x in h) for h in hs)


def cone_meets_open_orthant(V) -> bool:
    """Whether some convex combination of ``V`` has every coordinate > 0.

    LP: maximise ``t`` s.t. ``sum lambda_i alpha_i >= t*1``, ``sum lambda = 1``.
    """
    V = [vec(a) for a in V]
    n = len(V[0])
    s = len(V)
    # variables: lambda_1..lambda_s (>= 0), t (free)
    cons = [(tuple(Fraction(1) for _ in V) + (Fraction(0),), _lp.EQ, 1)]
    for j in range(n):
        cons.append((tuple(a[j] for a in V) + (Fraction(-1),), _lp.GE, 0))
    prog = _lp.LinearProgram((Fraction(0),) * s + (Fraction(1),), tuple(cons), frozenset(range(s)))
    sol = _lp.solve(prog, face=False)
    return sol.status == _lp.Status.OPTIMAL and sol.value > 0


# ------------------------------------------------------------------- polars

@dataclass(frozen=True)
class Halfspaces:
    """Polyhedron ``{x : <q_i, x> <= d_i}`` given only by inequalities (possibly unbounded)."""

    n: int
    inequalities: Tuple[Halfspace, ...]

    def contains(self, x) -> bool:
        x = vec(x)
        return all(dot(q, x) <= d for q, d in self.inequalities)

    def to_polytope(self) -> Polytope:
        """Vertex enumeration; raises ``ValueError`` if empty or unbounded."""
        rows = [(to_fraction(d),) + tuple(-x for x in q) for q, d in self.inequalities]
        rows.append((Fraction(1),) + (Fraction(0),) * self.n)
        try:
            rays = extreme_rays(rows, self.n + 1)
        except ValueError:
            raise ValueError("polyhedron contains a line (unbounded)") from None
        pts = []
        for r in rays:
            if r[0] == 0:
                raise ValueError("polyhedron is unbounded")
            pts.append(tuple(x / r[0] for x in r[1:]))
        if not pts:
            raise ValueError("polyhedron is empty")
        return convex_hull(pts)


def polar(P):
    """Polar set ``{y : <x, y> <= 1 for all x in P}``.

    For a :class:`Halfspaces` input ``{<q_i, x> <= d_i}`` with every
    ``d_i > 0`` the polar is the polytope ``conv{0, q_i/d_i}``.  For a
    :class:`Polytope` input the polar is ``{<v, y> <= 1 : v vertex}``,
    returned as a :class:`Polytope` when bounded (origin interior to ``P``)
    and as :class:`Halfspaces` otherwise.
    """
    if isinstance(P, Halfspaces):
        pts = [tuple(Fraction(0) for _ in range(P.n))]
        for q, d in P.inequalities:
            d = to_fraction(d)
            if all(x == 0 for x in q):
                if d < 0:
                    raise ValueError("empty polyhedron")
                continue
            if d <= 0:
                raise ValueError("origin must be interior to the polyhedron for a bounded polar")
            pts.append(tuple(to_fraction(x) / d for x in q))
        return convex_hull(pts)
    ineqs = tuple((v, Fraction(1)) for v in P.vertices if any(x != 0 for x in v))
    H = Halfspaces(P.n, ineqs)
    interior = P.affine_dim == P.n and all(d > 0 for _, d in P.facets)
    return H.to_polytope() if interior else H


def integer_points(P: Polytope) -> List[Tuple[int, ...]]:
    """All lattice points of ``P`` by a box scan with exact membership tests."""
    lo, hi = P.bounding_box()
    ranges = [range(math.ceil(a), math.floor(b) + 1) for a, b in zip(lo, hi)]
    return [p for p in product(*ranges) if P.contains(p)]
