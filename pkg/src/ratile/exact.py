"""Exact rational matrices and the certified expanding-matrix test.

The expanding test never touches floating point: it runs a Schur-Cohn
recursion over Q on the reversed characteristic polynomial, so eigenvalues
sitting exactly on the unit circle are classified as "not expanding".
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .polynomials import QPoly


class QMatrix:
    __slots__ = ("rows", "cols", "entries", "_pow_cache")

    def __init__(self, entries):
        self.entries = tuple(tuple(Fraction(x) for x in row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")
        self._pow_cache = {}

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_strings(cls, rows):
        return cls([[Fraction(s) for s in row] for row in rows])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"QMatrix({[[str(x) for x in r] for r in self.entries]})"

    def is_square(self):
        return self.rows == self.cols

    def __add__(self, other):
        return QMatrix([[a + b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return QMatrix([[a - b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.entries, other.entries)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QMatrix([[x * other for x in row] for row in self.entries])
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return QMatrix([[sum(self.entries[i][k] * other.entries[k][j]
                             for k in range(self.cols))
                         for j in range(other.cols)] for i in range(self.rows)])

    __rmul__ = __mul__

    def matvec(self, v):
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(self.entries[i][j] * Fraction(v[j])
                         for j in range(self.cols)) for i in range(self.rows))

    def transpose(self):
        return QMatrix(list(zip(*self.entries)))

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        sign = 1
        d = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            d *= a[k][k]
            inv = 1 / a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] * inv
                if f:
                    for j in range(k, n):
                        a[i][j] -= f * a[k][j]
        return sign * d

    def inverse(self):
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        a = [list(r) + [Fraction(1) if i == j else Fraction(0)
                        for j in range(n)] for i, r in enumerate(self.entries)]
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                raise ValueError("singular matrix")
            a[k], a[piv] = a[piv], a[k]
            inv = 1 / a[k][k]
            a[k] = [x * inv for x in a[k]]
            for i in range(n):
                if i != k and a[i][k]:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return QMatrix([row[n:] for row in a])

    def power(self, k):
        """A^k with memoization; k may be negative for invertible A."""
        if k in self._pow_cache:
            return self._pow_cache[k]
        if k == 0:
            out = QMatrix.identity(self.rows)
        elif k > 0:
            out = self.power(k - 1) * self
        else:
            out = self.power(k + 1) * self.inverse()
        self._pow_cache[k] = out
        return out

    def denominator_lcm(self):
        m = 1
        for row in self.entries:
            for x in row:
                m = lcm(m, x.denominator)
        return m

    def columns(self):
        return [[self.entries[i][j] for i in range(self.rows)]
                for j in range(self.cols)]

    def to_float(self):
        return [[float(x) for x in row] for row in self.entries]


def char_poly(a: QMatrix) -> QPoly:
    """Monic characteristic polynomial det(tI - A), Faddeev-LeVerrier."""
    if not a.is_square():
        raise ValueError("characteristic polynomial of non-square matrix")
    n = a.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = QMatrix.identity(n)
    for k in range(1, n + 1):
        am = a * m
        tr = sum(am.entries[i][i] for i in range(n))
        c = -tr / k
        coeffs[n - k] = c
        m = am + c * QMatrix.identity(n)
    return QPoly(coeffs)


def min_poly(a: QMatrix) -> QPoly:
    """Monic minimal polynomial: least d with I, A, ..., A^d dependent."""
    if not a.is_square():
        raise ValueError("minimal polynomial of non-square matrix")
    n = a.rows
    powers = [QMatrix.identity(n)]
    for d in range(1, n + 1):
        powers.append(powers[-1] * a)
        # solve sum c_i A^i = -A^d over Q (flattened least-structure solve)
        cols = []
        for p in powers[:-1]:
            cols.append([p.entries[i][j] for i in range(n) for j in range(n)])
        rhs = [powers[-1].entries[i][j] for i in range(n) for j in range(n)]
        sol = _solve_rational(cols, rhs)
        if sol is not None:
            return QPoly([-c for c in sol] + [Fraction(1)])
    raise AssertionError("minimal polynomial must exist with degree <= n")


def _solve_rational(cols, rhs):
    """Solve sum x_j cols[j] = rhs over Q; None if inconsistent."""
    m = len(cols)
    rows = len(rhs)
    a = [[Fraction(cols[j][i]) for j in range(m)] + [Fraction(rhs[i])]
         for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if a[i][m] != 0:
            return None
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = a[i][m]
    return x


def all_roots_in_open_unit_disk(p: QPoly) -> bool:
    """Exact Schur-Cohn test: every complex root of p has modulus < 1.

    A degree-0 nonzero polynomial passes vacuously.  Roots exactly on the
    circle make the test fail (the strict inequality |lead| > |const| breaks).
    """
    if p.is_zero():
        raise ValueError("zero polynomial has no root locus")
    f = p
    while f.degree > 0:
        a0 = f.coeffs[0]
        an = f.leading()
        if abs(an) <= abs(a0):
            return False
        # g = an*f - a0*reversed(f) is divisible by t; recurse on g/t
        g = an * f - a0 * f.reversed()
        if g.coeffs and g.coeffs[0] != 0:
            raise AssertionError("Schur transform must kill the constant term")
        f = QPoly(list(g.coeffs[1:]))
        if f.is_zero():
            raise AssertionError("Schur transform degenerated unexpectedly")
    return True


def is_expanding(a: QMatrix) -> bool:
    """True iff every eigenvalue of A has modulus strictly greater than 1."""
    if not a.is_square():
        raise ValueError("expanding test needs a square matrix")
    chi = char_poly(a)
    if chi.evaluate(Fraction(0)) == 0:
        raise ValueError("singular matrix rejected")
    # roots of the reversed polynomial are the reciprocals of the eigenvalues
    return all_roots_in_open_unit_disk(chi.reversed())


def all_eigenvalues_outside(a: QMatrix, r) -> bool:
    """True iff every eigenvalue has modulus > r (rational r > 0), exactly."""
    chi = char_poly(a)
    # chi(r*t) has roots lambda/r; compare against the unit circle
    scaled = chi.shift_compose_scale(Fraction(r))
    if scaled.evaluate(Fraction(0)) == 0:
        raise ValueError("singular matrix rejected")
    return all_roots_in_open_unit_disk(scaled.reversed())


def min_eigenvalue_lower_bound(a: QMatrix, iterations=30) -> Fraction:
    """Certified rational lower bound on min |eigenvalue| of an expanding A.

    Bisects on r with the exact scaled Schur-Cohn test; always returns a
    value > 1 for expanding input.
    """
    if not is_expanding(a):
        raise ValueError("matrix is not expanding")
    lo = Fraction(1)
    hi = Fraction(2)
    while all_eigenvalues_outside(a, hi):
        lo = hi
        hi *= 2
        if hi > 2 ** 40:
            break
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if all_eigenvalues_outside(a, mid):
            lo = mid
        else:
            hi = mid
        lo = lo.limit_denominator(10 ** 12)
    return lo
