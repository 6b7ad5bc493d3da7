"""Exact multivariate polynomials and polynomial maps.

Grammar accepted by :func:`parse_map` (whitespace is ignored)::

    map    := expr (';' expr)*
    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := rational | var ('^' uint)?
    rational := uint ('/' uint)? | uint '.' digits
    var    := 'x' uint            (x1 .. xn)

Multiplication must be explicit: ``2x1`` is a syntax error, ``2*x1`` is not.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Monomial = Tuple[int, ...]


class ParseError(ValueError):
    """Syntax error in polynomial text; ``pos`` is a 0-based character offset."""

    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def _grlex_key(mono):
    return (sum(mono), mono)


class Polynomial:
    """Polynomial in ``n`` variables with exact rational coefficients.

    Immutable.  Terms are kept in graded-lex order, highest first, which is
    also the order used by ``str``.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object], n: int):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n:
                raise ValueError(f"monomial {mono} has length {len(mono)}, expected {n}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = Fraction(c)
            if c != 0:
                clean[mono] = clean.get(mono, Fraction(0)) + c
        ordered = sorted(((m, c) for m, c in clean.items() if c != 0),
                         key=lambda mc: _grlex_key(mc[0]), reverse=True)
        self.n = n
        self._terms = tuple(ordered)
        self._hash = None

    @classmethod
    def zero(cls, n):
        return cls({}, n)

    @classmethod
    def constant(cls, c, n):
        return cls({(0,) * n: c}, n)

    @classmethod
    def monomial(cls, exponents, coeff=1):
        exponents = tuple(exponents)
        return cls({exponents: coeff}, len(exponents))

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return iter(self._terms)

    def coefficient(self, mono) -> Fraction:
        return dict(self._terms).get(tuple(mono), Fraction(0))

    def is_zero(self):
        return not self._terms

    def degree(self):
        return max((sum(m) for m, _ in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self._terms))
        return self._hash

    def _check(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.n)
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        return other

    def __add__(self, other):
        other = self._check(other)
        acc = dict(self._terms)
        for m, c in other._terms:
            acc[m] = acc.get(m, Fraction(0)) + c
        return Polynomial(acc, self.n)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms}, self.n)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        acc: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms:
            for m2, c2 in other._terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2
        return Polynomial(acc, self.n)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = Polynomial.constant(1, self.n)
        for _ in range(k):
            out = out * self
        return out

    def restrict(self, keep) -> "Polynomial":
        """Sub-polynomial made of the terms whose monomial satisfies ``keep``."""
        return Polynomial({m: c for m, c in self._terms if keep(m)}, self.n)

    def evaluate(self, x):
        return evaluate(self, x)

    def __call__(self, x):
        return evaluate(self, x)

    def arrays(self):
        """``(exponents, coefficients)`` as float64 numpy arrays."""
        if not self._terms:
            return np.zeros((0, self.n)), np.zeros(0)
        E = np.array([m for m, _ in self._terms], dtype=float)
        C = np.array([float(c) for _, c in self._terms])
        return E, C

    def evaluate_array(self, X):
        """Vectorised float evaluation at the rows of ``X`` (shape ``(N, n)``)."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0])
        for m, c in self._terms:
            term = np.full(X.shape[0], float(c))
            for j, e in enumerate(m):
                if e:
                    term *= X[:, j] ** e
            out += term
        return out

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, n={self.n})"


def _format_coeff(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_polynomial(p: Polynomial) -> str:
    """Canonical text form; ``parse_polynomial(format_polynomial(p)) == p``."""
    if p.is_zero():
        return "0"
    parts = []
    for i, (m, c) in enumerate(p.items()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        factors = [f"x{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(m) if e]
        if not factors:
            body = _format_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(a)] + factors)
        if i == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def support(p: Polynomial):
    """The multi-indices carrying a nonzero coefficient."""
    return frozenset(m for m, _ in p.items())


def evaluate(p: Polynomial, x):
    """Value of ``p`` at ``x``: exact for int/Fraction input, float otherwise."""
    x = tuple(x)
    if len(x) != p.n:
        raise ValueError(f"point has dimension {len(x)}, polynomial has {p.n}")
    exact = all(isinstance(v, (int, Fraction)) for v in x)
    total = Fraction(0) if exact else 0.0
    for m, c in p.items():
        term = c if exact else float(c)
        for v, e in zip(x, m):
            if e:
                term *= v ** e
        total += term
    return total


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


@dataclass(frozen=True)
class PolynomialMap:
    """A tuple ``(f_1, ..., f_m)`` of polynomials in the same ``n`` variables."""

    components: Tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a polynomial map needs at least one component")
        dims = {p.n for p in comps}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")
        if all(p.is_zero() for p in comps):
            raise ValueError("at least one component must be nonzero")

    @property
    def n(self):
        return self.components[0].n

    @property
    def m(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def support(self):
        """Union of the component supports."""
        out = set()
        for p in self.components:
            out |= support(p)
        return frozenset(out)

    def map(self, fn) -> "PolynomialMap":
        return PolynomialMap(tuple(fn(p) for p in self.components))

    def __str__(self):
        return "; ".join(format_polynomial(p) for p in self.components)


# ---------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, got {got!r}", self.pos)
        self.pos += 1

    def uint(self):
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            got = self.text[start] if start < len(self.text) else "end of input"
            raise ParseError(f"expected a nonnegative integer, got {got!r}", start)
        return int(self.text[start:self.pos]), start

    def expr(self):
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        acc = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            acc = acc * self.factor()
        return acc

    def factor(self):
        ch = self.peek()
        if ch == "x":
            start = self.pos
            self.pos += 1
            if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                raise ParseError("expected variable index after 'x'", self.pos)
            idx, _ = self.uint()
            if not 1 <= idx <= self.n:
                raise ParseError(f"variable x{idx} out of range 1..{self.n}", start)
            exp = 1
            if self.peek() == "^":
                self.pos += 1
                if self.peek() == "-":
                    raise ParseError("negative exponent", self.pos)
                exp, _ = self.uint()
            mono = [0] * self.n
            mono[idx - 1] = exp
            node = Polynomial.monomial(mono)
        elif ch.isdigit():
            num, start = self.uint()
            value = Fraction(num)
            if self.pos < len(self.text) and self.text[self.pos] == "/":
                self.pos += 1
                den, dpos = self.uint()
                if den == 0:
                    raise ParseError("zero denominator", dpos)
                value = Fraction(num, den)
            elif self.pos < len(self.text) and self.text[self.pos] == ".":
                self.pos += 1
                s = self.pos
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
                value = Fraction(self.text[start:self.pos] if self.pos > s else self.text[start:s - 1])
            node = Polynomial.constant(value, self.n)
        else:
            got = ch or "end of input"
            raise ParseError(f"expected a number or variable, got {got!r}", self.pos)
        nxt = self.pos < len(self.text) and self.text[self.pos]
        if nxt and (nxt.isalnum() or nxt in "(."):
            raise ParseError(f"unexpected {nxt!r} (multiplication must be explicit)", self.pos)
        return node


def parse_polynomial(text: str, n: int) -> Polynomial:
    p = _Parser(text, n)
    out = p.expr()
    if p.peek():
        raise ParseError(f"unexpected {p.peek()!r}", p.pos)
    return out


def parse_map(text: str, n: int) -> PolynomialMap:
    """Parse ``"f1; f2; ..."`` into an exact :class:`PolynomialMap`."""
    if n < 1:
        raise ValueError("n must be >= 1")
    comps = []
    offset = 0
    for chunk in text.split(";"):
        try:
            comps.append(parse_polynomial(chunk, n))
        except ParseError as e:
            raise ParseError(str(e).rsplit(" at position", 1)[0], e.pos + offset) from None
        offset += len(chunk) + 1
    return PolynomialMap(tuple(comps))


def from_monomials(exponents: Iterable[Sequence[int]], coeffs=None) -> PolynomialMap:
    """Monomial map ``(c_1 x^a_1, ..., c_s x^a_s)``."""
    exps = [tuple(e) for e in exponents]
    coeffs = [1] * len(exps) if coeffs is None else list(coeffs)
    return PolynomialMap(tuple(Polynomial.monomial(e, c) for e, c in zip(exps, coeffs)))
