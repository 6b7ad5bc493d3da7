"""Small exact linear-algebra kernel over the rationals.

Everything here works on lists of ``Fraction`` (ints are accepted and
promoted).  Matrices are lists of rows.  Sizes in this package are tiny
(a few dozen rows, at most ~10 columns), so plain Gaussian elimination
is the right tool.
"""
from fractions import Fraction
from math import gcd


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def vec(xs):
    return tuple(to_fraction(x) for x in xs)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def scale(c, u):
    return tuple(c * a for a in u)


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows and
    ``pivots[i]`` is the pivot column of ``R[i]``.
    """
    m = [list(map(to_fraction, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of ``{x : A x = 0}`` as a list of vectors."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for i, pc in enumerate(piv):
            x[pc] = -R[i][fc]
        basis.append(tuple(x))
    return basis


def solve(A, b):
    """One solution of ``A x = b`` or ``None`` when inconsistent."""
    ncols = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(piv):
        x[pc] = R[i][ncols]
    return tuple(x)


def independent_rows(rows, ncols=None):
    """Indices of a maximal linearly independent subset, chosen greedily."""
    chosen = []
    basis = []
    for i, r in enumerate(rows):
        if rank(basis + [r], ncols) > len(basis):
            basis.append(r)
            chosen.append(i)
    return chosen


def inverse(M):
    n = len(M)
    aug = [list(M[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [tuple(row[n:]) for row in R[:n]]


def primitive(v):
    """Scale a rational vector to the primitive integer vector on its ray."""
    v = [to_fraction(x) for x in v]
    if all(x == 0 for x in v):
        return tuple(Fraction(0) for _ in v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = gcd(g, abs(k))
    return tuple(Fraction(k // g) for k in ints)


def affine_rank(points):
    """Affine dimension of a finite point set (-1 for the empty set)."""
    pts = list(points)
    if not pts:
        return -1
    p0 = pts[0]
    return rank([sub(p, p0) for p in pts[1:]], len(p0))
