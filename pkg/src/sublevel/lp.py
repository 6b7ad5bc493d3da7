"""Exact rational linear programming.

Two-phase tableau simplex with Bland's rule over ``fractions.Fraction``.
Every OPTIMAL answer carries a dual vector that certifies the bound, and
every UNBOUNDED answer carries an improving feasible ray.

The optimal face dimension is computed without trusting any particular
optimal basis: a constraint counts as tight on the optimal face only if
its slack cannot be made positive anywhere on that face (one auxiliary LP
per constraint).
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .exact import dot, rank, solve as linsolve, to_fraction

LE, GE, EQ = "<=", ">=", "="
_RELATIONS = (LE, GE, EQ)


class Status(str, Enum):
    OPTIMAL = "OPTIMAL"
    UNBOUNDED = "UNBOUNDED"
    INFEASIBLE = "INFEASIBLE"


@dataclass(frozen=True)
class Constraint:
    a: Tuple[Fraction, ...]
    rel: str
    b: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """Optimise ``<objective, x>`` subject to ``constraints``.

    ``nonneg_vars`` lists the variable indices constrained to be >= 0; the
    others are free.  ``minimize`` flips the sense (default is maximise).
    """

    objective: Tuple[Fraction, ...]
    constraints: Tuple[Constraint, ...]
    nonneg_vars: FrozenSet[int] = frozenset()
    minimize: bool = False

    def __post_init__(self):
        obj = tuple(to_fraction(c) for c in self.objective)
        cons = []
        for c in self.constraints:
            if not isinstance(c, Constraint):
                a, rel, b = c
                c = Constraint(tuple(a), rel, b)
            cons.append(Constraint(tuple(to_fraction(x) for x in c.a), c.rel, to_fraction(c.b)))
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(cons))
        object.__setattr__(self, "nonneg_vars", frozenset(self.nonneg_vars))
        if not cons:
            raise ValueError("constraint list must be nonempty")
        for c in cons:
            if len(c.a) != len(obj):
                raise ValueError(f"constraint of length {len(c.a)} vs objective of length {len(obj)}")
            if c.rel not in _RELATIONS:
                raise ValueError(f"unknown relation {c.rel!r}")
        if any(not 0 <= j < len(obj) for j in self.nonneg_vars):
            raise ValueError("nonneg_vars index out of range")

    @property
    def dim(self):
        return len(self.objective)

    def is_feasible(self, x) -> bool:
        x = tuple(x)
        if any(x[j] < 0 for j in self.nonneg_vars):
            return False
        for c in self.constraints:
            v = dot(c.a, x)
            if (c.rel == LE and v > c.b) or (c.rel == GE and v < c.b) or (c.rel == EQ and v != c.b):
                return False
        return True

    def to_json(self):
        q = lambda x: [x.numerator, x.denominator]  # noqa: E731
        return {
            "objective": [q(c) for c in self.objective],
            "sense": "min" if self.minimize else "max",
            "constraints": [{"a": [q(x) for x in c.a], "rel": c.rel, "b": q(c.b)}
                            for c in self.constraints],
            "nonneg_vars": sorted(self.nonneg_vars),
        }

    @classmethod
    def from_json(cls, d):
        f = lambda p: Fraction(p[0], p[1])  # noqa: E731
        return cls(tuple(f(c) for c in d["objective"]),
                   tuple(Constraint(tuple(f(x) for x in c["a"]), c["rel"], f(c["b"]))
                         for c in d["constraints"]),
                   frozenset(d.get("nonneg_vars", ())),
                   d.get("sense", "max") == "min")


@dataclass(frozen=True)
class LPSolution:
    status: Status
    value: Optional[Fraction] = None
    point: Optional[Tuple[Fraction, ...]] = None
    dual: Optional[Tuple[Fraction, ...]] = None
    ray: Optional[Tuple[Fraction, ...]] = None
    optimal_face_dim: Optional[int] = None
    tight_set: FrozenSet[int] = field(default_factory=frozenset)
    tight_bounds: FrozenSet[int] = field(default_factory=frozenset)


# ------------------------------------------------------------- simplex core

class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.T = rows
        self.b = rhs
        self.basis = basis
        self.r: List[Fraction] = []
        self.z = Fraction(0)

    def set_objective(self, c, allowed):
        T, basis = self.T, self.basis
        cb = [c[j] for j in basis]
        ncols = len(c)
        self.r = [c[j] - sum((cb[i] * T[i][j] for i in range(len(T)) if cb[i]), Fraction(0))
                  if allowed[j] else Fraction(0) for j in range(ncols)]
        self.z = sum((cb[i] * self.b[i] for i in range(len(T))), Fraction(0))
        self.allowed = allowed

    def pivot(self, i, j):
        T, b = self.T, self.b
        row = T[i]
        pv = row[j]
        if pv != 1:
            T[i] = row = [x / pv for x in row]
            b[i] = b[i] / pv
        for k in range(len(T)):
            if k != i:
                f = T[k][j]
                if f:
                    T[k] = [x - f * y for x, y in zip(T[k], row)]
                    b[k] -= f * b[i]
        f = self.r[j]
        if f:
            self.r = [x - f * y for x, y in zip(self.r, row)]
            self.z += f * b[i]
        self.basis[i] = j

    def run(self):
        """Bland's rule; returns ``None`` at optimum or the unbounded column."""
        while True:
            j = next((j for j, rj in enumerate(self.r) if rj > 0 and self.allowed[j]), None)
            if j is None:
                return None
            best = None
            for i, row in enumerate(self.T):
                if row[j] > 0:
                    key = (self.b[i] / row[j], self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return j
            self.pivot(best[1], j)


def _standard_form(lp: LinearProgram):
    """Columns: split/plain structural variables, then slacks, then artificials."""
    n = lp.dim
    colmap = []  # (original var, sign)
    for j in range(n):
        colmap.append((j, 1))
        if j not in lp.nonneg_vars:
            colmap.append((j, -1))
    c = lp.objective if not lp.minimize else tuple(-x for x in lp.objective)
    rows, rhs, signs, slack_cols = [], [], [], []
    nstruct = len(colmap)
    nslack = sum(1 for con in lp.constraints if con.rel != EQ)
    s_idx = nstruct
    for con in lp.constraints:
        row = [con.a[j] * sgn for j, sgn in colmap] + [Fraction(0)] * nslack
        if con.rel == LE:
            row[s_idx] = Fraction(1)
            slack_cols.append(s_idx)
            s_idx += 1
        elif con.rel == GE:
            row[s_idx] = Fraction(-1)
            slack_cols.append(s_idx)
            s_idx += 1
        else:
            slack_cols.append(None)
        sign = 1
        if con.b < 0:
            sign = -1
            row = [-x for x in row]
        rows.append(row)
        rhs.append(con.b * sign)
        signs.append(sign)
    cstd = [c[j] * sgn for j, sgn in colmap] + [Fraction(0)] * nslack
    return colmap, rows, rhs, signs, cstd


def _core(lp: LinearProgram) -> LPSolution:
    colmap, A, b, signs, cstd = _standard_form(lp)
    m = len(A)
    nreal = len(cstd)
    rows = [list(A[i]) + [Fraction(int(k == i)) for k in range(m)] for i in range(m)]
    tab = _Tableau(rows, list(b), [nreal + i for i in range(m)])
    ntot = nreal + m
    phase1 = [Fraction(0)] * nreal + [Fraction(-1)] * m
    tab.set_objective(phase1, [True] * ntot)
    tab.run()
    if tab.z < 0:
        return LPSolution(Status.INFEASIBLE)

    keep = list(range(m))
    i = 0
    while i < len(tab.T):
        if tab.basis[i] >= nreal:
            j = next((j for j in range(nreal) if tab.T[i][j] != 0), None)
            if j is None:
                del tab.T[i], tab.b[i], tab.basis[i], keep[i]
                continue
            tab.pivot(i, j)
        i += 1

    allowed = [True] * nreal + [False] * m
    tab.set_objective(cstd + [Fraction(0)] * m, allowed)
    col = tab.run()

    def to_original(z):
        x = [Fraction(0)] * lp.dim
        for k, (j, sgn) in enumerate(colmap):
            x[j] += sgn * z[k]
        return tuple(x)

    z = [Fraction(0)] * ntot
    for i, j in enumerate(tab.basis):
        z[j] = tab.b[i]
    point = to_original(z[:len(colmap)])

    if col is not None:
        d = [Fraction(0)] * ntot
        d[col] = Fraction(1)
        for i, j in enumerate(tab.basis):
            d[j] = -tab.T[i][col]
        return LPSolution(Status.UNBOUNDED, point=point, ray=to_original(d[:len(colmap)]))

    # dual: B^T y = c_B on the kept rows
    B_T = [[A[keep[i]][j] for i in range(len(keep))] for j in tab.basis]
    cb = [cstd[j] for j in tab.basis]
    y_kept = linsolve(B_T, cb) if B_T else ()
    y = [Fraction(0)] * m
    for i, yi in zip(keep, y_kept):
        y[i] = yi * signs[i]
    value = dot(lp.objective, point)
    return LPSolution(Status.OPTIMAL, value=value, point=point, dual=tuple(y))


def _face_analysis(lp: LinearProgram, sol: LPSolution):
    c, value = lp.objective, sol.value
    face_cons = lp.constraints + (Constraint(c, EQ, value),)
    tight, bounds = set(), set()
    normals = [c]
    for i, con in enumerate(lp.constraints):
        if con.rel == EQ:
            tight.add(i)
            normals.append(con.a)
            continue
        if dot(con.a, sol.point) != con.b:
            continue
        # slack of <= is b - a.x; of >= is a.x - b
        obj = tuple(-x for x in con.a) if con.rel == LE else con.a
        aux = _core(LinearProgram(obj, face_cons, lp.nonneg_vars))
        if aux.status == Status.OPTIMAL:
            slack = con.b + aux.value if con.rel == LE else aux.value - con.b
            if slack == 0:
                tight.add(i)
                normals.append(con.a)
    for j in sorted(lp.nonneg_vars):
        if sol.point[j] != 0:
            continue
        e = tuple(Fraction(int(k == j)) for k in range(lp.dim))
        aux = _core(LinearProgram(e, face_cons, lp.nonneg_vars))
        if aux.status == Status.OPTIMAL and aux.value == 0:
            bounds.add(j)
            normals.append(e)
    dim = lp.dim - rank(normals, lp.dim)
    return dim, frozenset(tight), frozenset(bounds)


def solve(lp: LinearProgram, face: bool = True) -> LPSolution:
    """Solve ``lp`` exactly.

    With ``face=True`` (default) an OPTIMAL solution also carries the
    dimension of the optimal face and the constraints tight on all of it.
    """
    sol = _core(lp)
    if sol.status != Status.OPTIMAL:
        return sol
    if not face:
        return sol
    dim, tight, bounds = _face_analysis(lp, sol)
    return LPSolution(sol.status, sol.value, sol.point, sol.dual, None, dim, tight, bounds)


def optimal_face_dimension(lp: LinearProgram, sol: LPSolution) -> int:
    """Dimension of ``{x feasible : <c, x> = optimum}``."""
    if sol.status != Status.OPTIMAL:
        raise ValueError(f"optimal face requested for a {sol.status.value} solution")
    if sol.optimal_face_dim is not None:
        return sol.optimal_face_dim
    return _face_analysis(lp, sol)[0]


def verify_certificate(lp: LinearProgram, sol: LPSolution) -> bool:
    """Check the stored certificate by direct arithmetic.

    OPTIMAL: primal feasibility, dual sign conditions, ``A^T y`` vs ``c``
    per variable type, and equal objective values.  UNBOUNDED: the ray is a
    recession direction that strictly improves the objective.
    """
    c = lp.objective if not lp.minimize else tuple(-x for x in lp.objective)
    if sol.status == Status.OPTIMAL:
        if not lp.is_feasible(sol.point) or sol.value != dot(lp.objective, sol.point):
            return False
        y = sol.dual
        for yi, con in zip(y, lp.constraints):
            if (con.rel == LE and yi < 0) or (con.rel == GE and yi > 0):
                return False
        for j in range(lp.dim):
            aty = sum((yi * con.a[j] for yi, con in zip(y, lp.constraints)), Fraction(0))
            if j in lp.nonneg_vars:
                if aty < c[j]:
                    return False
            elif aty != c[j]:
                return False
        bound = sum((yi * con.b for yi, con in zip(y, lp.constraints)), Fraction(0))
        return bound == dot(c, sol.point)
    if sol.status == Status.UNBOUNDED:
        d = sol.ray
        if dot(c, d) <= 0 or any(d[j] < 0 for j in lp.nonneg_vars):
            return False
        for con in lp.constraints:
            v = dot(con.a, d)
            if (con.rel == LE and v > 0) or (con.rel == GE and v < 0) or (con.rel == EQ and v != 0):
                return False
        return lp.is_feasible(sol.point)
    return True


# ----------------------------------------------------- the monomial-system LPs

def sup_sum_lp(exponents: Sequence[Sequence[int]], nonneg: bool = False) -> LinearProgram:
    """``max x_1+...+x_n`` s.t. ``<x, alpha> <= 1`` for every exponent ``alpha``.

    ``nonneg=True`` adds ``x >= 0`` (the lattice-count variant).
    """
    exps = [tuple(to_fraction(a) for a in e) for e in exponents]
    if not exps:
        raise ValueError("need at least one exponent vector")
    n = len(exps[0])
    ones = tuple(Fraction(1) for _ in range(n))
    cons = tuple(Constraint(e, LE, Fraction(1)) for e in exps)
    return LinearProgram(ones, cons, frozenset(range(n)) if nonneg else frozenset())


def dual_of(lp: LinearProgram) -> LinearProgram:
    """Dual of a :func:`sup_sum_lp` primal.

    Free primal variables give ``sum_i alpha^i_j u_i = 1`` rows, nonnegative
    ones give ``>= 1`` rows; always ``min u_1 + ... + u_s`` with ``u >= 0``.
    """
    n = lp.dim
    if lp.minimize or any(c != 1 for c in lp.objective):
        raise ValueError("unsupported primal shape: objective must be max x_1+...+x_n")
    if any(con.rel != LE or con.b != 1 for con in lp.constraints):
        raise ValueError("unsupported primal shape: rows must read <x, alpha> <= 1")
    if lp.nonneg_vars not in (frozenset(), frozenset(range(n))):
        raise ValueError("unsupported primal shape: variables all free or all nonnegative")
    rel = GE if lp.nonneg_vars else EQ
    s = len(lp.constraints)
    rows = tuple(Constraint(tuple(con.a[j] for con in lp.constraints), rel, Fraction(1))
                 for j in range(n))
    return LinearProgram(tuple(Fraction(1) for _ in range(s)), rows,
                         frozenset(range(s)), minimize=True)
