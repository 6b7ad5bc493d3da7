"""Desk-scale measurements of sublevel sets, for checking predicted exponents.

``count_lattice`` is exact: integer arithmetic throughout.  Volumes are
estimates, either a midpoint-rule grid or plain Monte Carlo over a box.
Both need a box that contains the sublevel set; it is found by doubling
until a boundary shell holds no members, which is a heuristic (a set can
come back after an empty shell) rather than a guarantee.
"""
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence

import numpy as np

from . import asym
from .errors import InfiniteMeasureError, NonTerminatedError, UnsupportedShapeError
from .polyparse import PolynomialMap


class Kind(str, Enum):
    LATTICE_COUNT = "LATTICE_COUNT"
    VOLUME = "VOLUME"


class Method(str, Enum):
    GRID = "GRID"
    MONTE_CARLO = "MONTE_CARLO"


def _decimal(x):
    return np.format_float_positional(float(x), trim="-")


@dataclass(frozen=True)
class SweepResult:
    kind: Kind
    r_values: tuple
    measurements: tuple
    error_bars: Optional[tuple] = None
    seed: int = 0
    method: Optional[str] = None

    def __len__(self):
        return len(self.r_values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "measurement", "stderr"])
        errs = self.error_bars or (None,) * len(self.r_values)
        for r, m, e in zip(self.r_values, self.measurements, errs):
            w.writerow([_decimal(r), _decimal(m) if self.kind == Kind.VOLUME else str(int(m)),
                        "" if e is None else _decimal(e)])
        return buf.getvalue()

    def to_json(self):
        return {
            "kind": self.kind.value,
            "method": self.method,
            "seed": self.seed,
            "r_values": [float(r) for r in self.r_values],
            "measurements": [int(m) if self.kind == Kind.LATTICE_COUNT else float(m)
                             for m in self.measurements],
            "stderr": None if self.error_bars is None else [float(e) for e in self.error_bars],
        }


# ------------------------------------------------------------ lattice counts

def _integer_system(f: PolynomialMap, r):
    """Clear denominators: ``|f_i| <= r`` iff ``|D_i f_i| <= floor(r D_i)`` on integers."""
    r = Fraction(r)
    comps = []
    for p in f:
        D = 1
        for _, c in p.items():
            D = D * c.denominator // math.gcd(D, c.denominator)
        terms = [(mono[:-1], mono[-1], int(c * D)) for mono, c in p.items()]
        comps.append((terms, math.floor(r * D)))
    return comps


def _line_coeffs(terms, prefix):
    """Coefficients in the last variable after fixing the other coordinates."""
    coeffs = {}
    for head, e, c in terms:
        v = c
        for a, k in zip(prefix, head):
            if k:
                v *= a ** k
        coeffs[e] = coeffs.get(e, 0) + v
    deg = max((e for e, v in coeffs.items() if v), default=0)
    return [coeffs.get(e, 0) for e in range(deg + 1)]


def _peval(c, y):
    v = 0
    for a in reversed(c):
        v = v * y + a
    return v


def _ceil_div(a, b):
    return -((-a) // b)


def _monotone_piece(c, R, lo, hi):
    """Integer interval of ``[lo, hi]`` with ``|g| <= R``, ``g`` monotone there."""
    g_lo, g_hi = _peval(c, lo), _peval(c, hi)
    inc = g_hi >= g_lo
    # first y with g(y) inside [-R, R] coming from the low end and last one
    def first(pred):
        a, b = lo, hi
        if not pred(b):
            return None
        while a < b:
            mid = (a + b) // 2
            if pred(mid):
                b = mid
            else:
                a = mid + 1
        return a

    def last(pred):
        a, b = lo, hi
        if not pred(a):
            return None
        while a < b:
            mid = (a + b + 1) // 2
            if pred(mid):
                a = mid
            else:
                b = mid - 1
        return a

    if inc:
        a = first(lambda y: _peval(c, y) >= -R)
        b = last(lambda y: _peval(c, y) <= R)
    else:
        a = first(lambda y: _peval(c, y) <= R)
        b = last(lambda y: _peval(c, y) >= -R)
    if a is None or b is None or a > b:
        return None
    return (a, b)


def _intervals_1d(c, R, lo, hi):
    """Sorted disjoint integer intervals in ``[lo, hi]`` where ``|g(y)| <= R``."""
    if lo > hi:
        return []
    if len(c) == 1:
        return [(lo, hi)] if abs(c[0]) <= R else []
    if len(c) == 2:
        c0, c1 = c
        if c1 > 0:
            a, b = _ceil_div(-R - c0, c1), (R - c0) // c1
        else:
            a, b = _ceil_div(R - c0, c1), (-R - c0) // c1
        a, b = max(a, lo), min(b, hi)
        return [(a, b)] if a <= b else []
    # split at (approximate) critical points, widened so every piece between
    # two non-adjacent breakpoints is monotone
    if len(c) == 3:
        crit = [Fraction(-c[1], 2 * c[2])]
    else:
        deriv = [k * c[k] for k in range(len(c) - 1, 0, -1)]
        crit = [z.real for z in np.roots(np.array(deriv, dtype=float)) if abs(z.imag) < 1e-6 * (1 + abs(z))]
    cuts = {lo, hi}
    for z in crit:
        if not math.isfinite(float(z)):
            continue
        base = math.floor(z)
        for y in range(base - 2, base + 4):
            if lo <= y <= hi:
                cuts.add(y)
    cuts = sorted(cuts)
    pieces = []
    for y in cuts:
        if abs(_peval(c, y)) <= R:
            pieces.append((y, y))
    for a, b in zip(cuts, cuts[1:]):
        if b - a > 1:
            iv = _monotone_piece(c, R, a + 1, b - 1)
            if iv:
                pieces.append(iv)
    return _merge(pieces)


def _merge(pieces):
    pieces.sort()
    out = []
    for a, b in pieces:
        if out and a <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _intersect(A, B):
    out, i, j = [], 0, 0
    while i < len(A) and j < len(B):
        a, b = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
        if a <= b:
            out.append((a, b))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def _length_in(ivs, lo, hi):
    return sum(max(0, min(b, hi) - max(a, lo) + 1) for a, b in ivs)


def _count_box(system, n, B, shell_from):
    """``(members of [-B,B]^n, members with some |x_j| >= shell_from)``, no zero coordinates."""
    total = shell = 0
    axis = [a for a in range(-B, B + 1) if a != 0]
    for prefix in product(axis, repeat=n - 1):
        ivs = [(-B, B)]
        for terms, R in system:
            ivs = _intersect(ivs, _intervals_1d(_line_coeffs(terms, prefix), R, -B, B))
            if not ivs:
                break
        if not ivs:
            continue
        line = _length_in(ivs, -B, -1) + _length_in(ivs, 1, B)
        total += line
        if any(abs(a) >= shell_from for a in prefix):
            shell += line
        else:
            shell += _length_in(ivs, -B, -shell_from) + _length_in(ivs, shell_from, B)
    return total, shell


def _require_finite_lattice(f):
    if not asym.lattice_profile(f).finite:
        raise InfiniteMeasureError("the sublevel set has infinitely many lattice points off the axes")


def count_lattice(f: PolynomialMap, r, max_box: int = 1 << 20, check: bool = True) -> int:
    """Exact number of integer points with no zero coordinate and ``max |f_i| <= r``."""
    if check:
        _require_finite_lattice(f)
    if r < 0:
        return 0
    system = _integer_system(f, r)
    B = 1
    while True:
        width = max(1, B // 8)
        total, shell = _count_box(system, f.n, B, B - width + 1)
        if shell == 0:
            return total
        if 2 * B > max_box:
            raise NonTerminatedError(f"boundary shell still occupied at box {B}", partial=total, box=B)
        B *= 2


def count_lattice_naive(f: PolynomialMap, r, box: int) -> int:
    """Full enumeration of ``[-box, box]^n`` minus the axes; no shell shortcut."""
    system = _integer_system(f, r)
    axis = [a for a in range(-box, box + 1) if a != 0]
    count = 0
    for x in product(axis, repeat=f.n):
        ok = True
        for terms, R in system:
            v = 0
            for head, e, c in terms:
                t = c * x[-1] ** e
                for a, k in zip(x, head):
                    t *= a ** k
                v += t
            if abs(v) > R:
                ok = False
                break
        count += ok
    return count


# ------------------------------------------------------------------ volumes

def _require_finite_volume(f):
    if not asym.volume_profile(f).finite:
        raise InfiniteMeasureError("the sublevel set has infinite volume")


def _member(f_arrays, X, r):
    ok = np.ones(len(X), dtype=bool)
    for E, C in f_arrays:
        v = np.zeros(len(X))
        for e, c in zip(E, C):
            v += c * np.prod(X ** e, axis=1)
        ok &= np.abs(v) <= r
    return ok


def _arrays(f):
    return [tuple(a for a in p.arrays()) for p in f]


def _box_for(f, r, max_extent=1e6, probe=33):
    """Per-axis half-widths, each doubled while its outer slab holds members."""
    n = f.n
    arrs = _arrays(f)
    half = np.ones(n)
    rounds = 0
    while True:
        grew = False
        for j in range(n):
            axes = [np.linspace(-h, h, probe) for h in half]
            axes[j] = np.concatenate([np.linspace(-half[j], -7 / 8 * half[j], 5),
                                      np.linspace(7 / 8 * half[j], half[j], 5)])
            X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
            if _member(arrs, X, r).any():
                half[j] *= 2
                grew = True
        rounds += 1
        if not grew:
            return half
        if half.max() > max_extent:
            raise UnsupportedShapeError(
                "sublevel set reaches the extent cap; box methods cannot bound it",
                {"half_widths": half.tolist(), "rounds": rounds, "r": float(r)})


def _grid_volume(arrs, half, r, cells, shift=0.0, chunk=1 << 18):
    n = len(half)
    h = 2 * half / cells
    mids = [-half[j] + h[j] * (np.arange(cells) + 0.5 + shift) for j in range(n)]
    inside = 0
    # fixed accumulation order over the leading axis keeps the sum reproducible
    rest = [np.stack(np.meshgrid(*mids[1:], indexing="ij"), axis=-1).reshape(-1, n - 1)] if n > 1 else None
    per = max(1, chunk // max(1, cells ** (n - 1)))
    for start in range(0, cells, per):
        lead = mids[0][start:start + per]
        if n == 1:
            X = lead[:, None]
        else:
            R = rest[0]
            X = np.concatenate([np.repeat(lead, len(R))[:, None], np.tile(R, (len(lead), 1))], axis=1)
        inside += int(_member(arrs, X, r).sum())
    return inside * float(np.prod(h))


def estimate_volume(f: PolynomialMap, r, method=Method.GRID, resolution: Optional[int] = None,
                    samples: int = 10 ** 6, seed: int = 0, check: bool = True,
                    max_extent: float = 1e6):
    """``(estimate, stderr)`` for the volume of ``{max |f_i| <= r}``.

    GRID uses ``resolution`` cells per axis; its error is the larger
    discrepancy against a half-resolution grid and against the same grid
    shifted by half a cell.  MONTE_CARLO draws
    ``samples`` uniform points in the box and reports the binomial error.
    """
    if check:
        _require_finite_volume(f)
    method = Method(method)
    if r <= 0:
        return 0.0, 0.0
    half = _box_for(f, r, max_extent=max_extent)
    arrs = _arrays(f)
    box_vol = float(np.prod(2 * half))
    if method == Method.GRID:
        cells = resolution or {1: 20000, 2: 1600, 3: 128}.get(f.n, 24)
        cells += cells % 2
        fine = _grid_volume(arrs, half, r, cells)
        coarse = _grid_volume(arrs, half, r, cells // 2)
        shifted = _grid_volume(arrs, half, r, cells, shift=0.5)
        return fine, max(abs(fine - coarse), abs(fine - shifted))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    hits = 0
    left = samples
    while left:
        k = min(left, 1 << 18)
        X = rng.uniform(-half, half, size=(k, f.n))
        hits += int(_member(arrs, X, r).sum())
        left -= k
    p = hits / samples
    return p * box_vol, box_vol * math.sqrt(p * (1 - p) / samples)


# ------------------------------------------------------------------- sweeps

def default_schedule(kind: Kind, top: float = 6.0):
    if Kind(kind) == Kind.LATTICE_COUNT:
        return [10 ** (k / 2) for k in range(4, int(2 * top) + 1)]
    return [10 ** (k / 2) for k in range(4, 11)]


def sweep(f: PolynomialMap, kind, r_schedule: Optional[Sequence[float]] = None, seed: int = 0,
          method=Method.GRID, max_box: int = 1 << 17, resolution=None, samples: int = 10 ** 6,
          workers: int = 1) -> SweepResult:
    """Measure ``f`` at every ``r`` of the schedule (counts or volumes)."""
    kind = Kind(kind)
    if kind == Kind.LATTICE_COUNT:
        _require_finite_lattice(f)
    else:
        _require_finite_volume(f)
    rs = list(default_schedule(kind) if r_schedule is None else r_schedule)
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError("r schedule must be strictly increasing")
    if not rs:
        return SweepResult(kind, (), (), None if kind == Kind.LATTICE_COUNT else (), seed)

    def item(i):
        r = rs[i]
        if kind == Kind.LATTICE_COUNT:
            return count_lattice(f, r, max_box=max_box, check=False), None
        item_seed = np.random.SeedSequence([seed, i]).generate_state(1)[0]
        return estimate_volume(f, r, method, resolution, samples, int(item_seed), check=False)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futures = [ex.submit(item, i) for i in range(len(rs))]
            out = []
            for fu in futures:
                try:
                    out.append(fu.result())
                except (NonTerminatedError, UnsupportedShapeError):
                    if r_schedule is not None:
                        raise
                    break
    else:
        out = []
        for i in range(len(rs)):
            try:
                out.append(item(i))
            except (NonTerminatedError, UnsupportedShapeError):
                # a default schedule is cut where the box budget runs out
                if r_schedule is not None:
                    raise
                break
    rs = rs[:len(out)]
    meas = tuple(m for m, _ in out)
    errs = None if kind == Kind.LATTICE_COUNT else tuple(e for _, e in out)
    return SweepResult(kind, tuple(float(r) for r in rs), meas, errs, seed,
                       None if kind == Kind.LATTICE_COUNT else Method(method).value)


# ------------------------------------------------------------------ fitting

@dataclass(frozen=True)
class ExponentFit:
    theta_hat: float
    kappa_hat: float
    kappa_fixed: bool
    stderr_theta: float
    r_squared: float
    intercept: float = 0.0

    def to_json(self):
        return {"theta_hat": self.theta_hat, "kappa_hat": self.kappa_hat,
                "kappa_fixed": self.kappa_fixed, "stderr_theta": self.stderr_theta,
                "r_squared": self.r_squared, "intercept": self.intercept}


def fit_exponents(s, kappa: Optional[int] = None) -> ExponentFit:
    """Least squares on ``log M = theta log r + kappa log log r + c``.

    ``kappa`` fixes the log exponent; ``None`` fits it too.  ``s`` is a
    :class:`SweepResult` or a pair ``(r_values, measurements)``.
    """
    if isinstance(s, SweepResult):
        r, M = np.asarray(s.r_values, float), np.asarray(s.measurements, float)
    else:
        r, M = (np.asarray(a, float) for a in s)
    if len(r) < 4:
        raise ValueError("need at least 4 points to fit")
    if np.any(r < math.e ** 2):
        raise ValueError("every r must be at least e^2 so that log log r > 0")
    if np.any(M <= 0):
        raise ValueError("measurements must be positive to take logs")
    lr, llr, y = np.log(r), np.log(np.log(r)), np.log(M)
    if kappa is None:
        X = np.column_stack([lr, llr, np.ones_like(lr)])
    else:
        X = np.column_stack([lr, np.ones_like(lr)])
        y = y - kappa * llr
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ValueError("singular design matrix (r values do not vary enough)")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    dof = len(y) - X.shape[1]
    rss = float(resid @ resid)
    sigma2 = rss / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(X.T @ X)
    yc = np.log(M) - np.log(M).mean()
    tss = float(yc @ yc)
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    if kappa is None:
        return ExponentFit(float(beta[0]), float(beta[1]), False, float(math.sqrt(cov[0, 0])), r2, float(beta[2]))
    return ExponentFit(float(beta[0]), float(kappa), True, float(math.sqrt(cov[0, 0])), r2, float(beta[1]))
