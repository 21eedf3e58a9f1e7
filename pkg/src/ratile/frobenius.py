"""Invariant factors of a rational matrix and the quotient counts a, b.

a counts the residues of the A-generated module modulo A, b the same on the
B = A^-1 side; both come from the primitive integer forms of the invariant
factors and satisfy a/b = |det A| exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import QMatrix, char_poly
from .polynomials import QPoly, reciprocal_int


def _poly_matrix_smith(entries):
    """Diagonalize a square matrix over Q[t] into Smith form.

    entries: list of lists of QPoly. Returns the diagonal as a list of QPoly,
    monic where nonzero, in divisibility order.
    """
    n = len(entries)
    m = [[p for p in row] for row in entries]

    def height(p):
        return max((abs(c.numerator) + abs(c.denominator) for c in p.coeffs),
                   default=0)

    for k in range(n):
        while True:
            # pick the nonzero entry of smallest degree (then height)
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    p = m[i][j]
                    if p.is_zero():
                        continue
                    key = (p.degree, height(p))
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is None:
                return [m[i][i] for i in range(n)]
            _, bi, bj = best
            if bi != k:
                m[k], m[bi] = m[bi], m[k]
            if bj != k:
                for row in m:
                    row[k], row[bj] = row[bj], row[k]
            piv = m[k][k]
            dirty = False
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    q = m[i][k] // piv
                    for j in range(k, n):
                        m[i][j] = m[i][j] - q * m[k][j]
                    if not m[i][k].is_zero():
                        dirty = True
            for j in range(k + 1, n):
                if not m[k][j].is_zero():
                    q = m[k][j] // piv
                    for i in range(k, n):
                        m[i][j] = m[i][j] - q * m[i][k]
                    if not m[k][j].is_zero():
                        dirty = True
            if dirty:
                continue
            # pivot must divide every remaining entry for the Smith chain
            offender = None
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    if not (m[i][j] % piv).is_zero():
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(k, n):
                m[k][j] = m[k][j] + m[offender][j]
    return [m[i][i].monic() if not m[i][i].is_zero() else m[i][i]
            for i in range(n)]


def _companion(p: QPoly) -> QMatrix:
    d = p.degree
    mono = p.monic()
    rows = [[Fraction(0)] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = Fraction(1)
    for i in range(d):
        rows[i][d - 1] = -mono.coeffs[i]
    return QMatrix(rows)


@dataclass(frozen=True)
class InvariantFactorization:
    factors: tuple            # monic QPoly, divisibility order
    primitive_factors: tuple  # integer coefficient lists, constant first
    reciprocals: tuple        # reciprocal integer coefficient lists
    frobenius_blocks: tuple   # companion QMatrix per factor


@dataclass(frozen=True)
class QuotientCounts:
    a: int
    b: int


def invariant_factors(a: QMatrix) -> InvariantFactorization:
    """Nonconstant invariant factors of A via Smith form of tI - A over Q[t]."""
    if not a.is_square():
        raise ValueError("invariant factors of non-square matrix")
    n = a.rows
    entries = [[QPoly([-a.entries[i][j], 1]) if i == j
                else QPoly([-a.entries[i][j]])
                for j in range(n)] for i in range(n)]
    diag = _poly_matrix_smith(entries)
    diag = [p.monic() for p in diag if not p.is_zero()]
    if len(diag) != n:
        raise ValueError("tI - A is singular over Q[t]; input not square/valid")
    diag.sort(key=lambda p: p.degree)
    factors = tuple(p for p in diag if p.degree > 0)
    # sanity: product of all diagonal entries is the characteristic polynomial
    prod = QPoly.one()
    for p in factors:
        prod = prod * p
    if prod != char_poly(a):
        raise AssertionError("invariant factor product != characteristic poly")
    for p, q in zip(factors, factors[1:]):
        if not (q % p).is_zero():
            raise AssertionError("invariant factor divisibility chain broken")
    prims = tuple(tuple(p.primitive_int()) for p in factors)
    recips = tuple(tuple(reciprocal_int(list(q))) for q in prims)
    blocks = tuple(_companion(p) for p in factors)
    return InvariantFactorization(factors, prims, recips, blocks)


def quotient_counts(a: QMatrix) -> QuotientCounts:
    """a = prod |q_i(0)|, b = prod |q_i*(0)|, certified against |det A|."""
    det = a.det()
    if det == 0:
        raise ValueError("singular matrix has no quotient counts")
    fac = invariant_factors(a)
    ca = 1
    cb = 1
    for q, qs in zip(fac.primitive_factors, fac.reciprocals):
        ca *= abs(q[0])
        cb *= abs(qs[0])
    if Fraction(ca, cb) != abs(det):
        raise AssertionError(
            f"count consistency failed: a/b = {ca}/{cb}, |det| = {abs(det)}")
    return QuotientCounts(ca, cb)
