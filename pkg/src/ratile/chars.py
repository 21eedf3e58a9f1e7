"""Characters of R^n x Z^n((B)): dual lattices and exact phase evaluation.

A character of the series factor is indexed by a value s on the transpose
side; its phase at y is the rational number S_s(y), a finite sum of scalar
products of fractional parts against the digits of s.  Everything here is
exact: phases are Fractions and angle arithmetic happens mod 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, lcm

from . import badic
from .badic import TruncatedBAdic
from .errors import InvariantError, PreconditionError
from .exact import QMatrix
from .lattices import IntLattice, ScaledLattice
from .zmodule import Base


def _span_intersection(n, ma, mb, seed_cols, cap):
    """The lattice (span of M_a-powers of the seed) ∩ (same for M_b).

    Both spans are increasing unions of lattices; their intersection is a
    lattice, so the chain stabilizes.  Stability over n+1 consecutive steps
    is required before accepting the limit.
    """
    sa = ScaledLattice.from_rational_columns(n, seed_cols)
    sb = ScaledLattice.from_rational_columns(n, seed_cols)
    cur = sa.intersect(sb)
    stable = 0
    for t in range(1, cap + 1):
        pa = ma.power(t)
        pb = mb.power(t)
        sa = sa.sum(ScaledLattice.from_rational_columns(
            n, [pa.matvec(c) for c in seed_cols]))
        sb = sb.sum(ScaledLattice.from_rational_columns(
            n, [pb.matvec(c) for c in seed_cols]))
        nxt = sa.intersect(sb)
        if nxt == cur:
            stable += 1
            if stable > n:
                return cur
        else:
            stable = 0
            cur = nxt
    raise PreconditionError("span intersection lattice did not stabilize")


class DualContext:
    """Dual-side data for character evaluation.

    Holds the full intersection lattice (lam), its integer dual (lam_star),
    the scaled dual gamma = N * lam_star whose transpose-side span
    intersection lands back inside lam_star, and the digit alphabet estar
    for the transpose-side expansions.
    """

    def __init__(self, base: Base, cap=64):
        if base.counts.b < 2:
            raise PreconditionError(
                "b = 1: the series factor is trivial, no characters")
        self.base = base
        n = base.n
        ident = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        self.lam = _span_intersection(n, base.A, base.B, ident, cap)
        if self.lam.lattice.rank != n:
            raise InvariantError("intersection lattice is rank deficient")
        # integer dual: contains Z^n-duality scaled back by the denominator
        dual = self.lam.lattice.dual()
        cols = [[x * self.lam.scale for x in col]
                for col in dual.lattice.basis]
        star = ScaledLattice(IntLattice(n, cols), dual.scale).reduced()
        if star.scale != 1:
            raise InvariantError("dual of a superlattice of Z^n "
                                 "must be integral")
        self.lam_star = star.lattice
        a_star = base.A.transpose()
        b_star = base.B.transpose()
        star_cols = [[Fraction(x) for x in col]
                     for col in self.lam_star.basis]
        inner = _span_intersection(n, a_star, b_star, star_cols, cap)
        self.scale_factor = self._containment_scale(inner)
        gamma_cols = [[self.scale_factor * x for x in col]
                      for col in self.lam_star.basis]
        self.gamma = IntLattice(n, gamma_cols)
        self.gmat = QMatrix([[Fraction(self.gamma.basis[j][i])
                              for j in range(n)] for i in range(n)])
        self._ginv = self.gmat.inverse()
        # transpose-side machinery in gamma coordinates
        self.base_star = Base(self._ginv * a_star * self.gmat)
        self.star_ctx = badic._context_for(self.base_star)
        self.estar = tuple(tuple(int(x) for x in self.gmat.matvec(u))
                           for u in self.star_ctx.alphabet)
        self._verify(inner)

    def _containment_scale(self, inner):
        """Least N with N * inner inside lam_star."""
        n = self.base.n
        basis_mat = QMatrix([[Fraction(self.lam_star.basis[j][i])
                              for j in range(n)] for i in range(n)])
        inv = basis_mat.inverse()
        scale = 1
        for col in inner.rational_basis():
            coords = inv.matvec(col)
            for x in coords:
                scale = lcm(scale, Fraction(x).denominator)
        return scale

    def _verify(self, inner):
        """Constructive containment and alphabet checks."""
        n = self.base.n
        for col in self.lam.rational_basis():
            for x in self.lam_star.basis:
                pair = sum(Fraction(a) * b for a, b in zip(col, x))
                if pair.denominator != 1:
                    raise InvariantError("dual pairing left a fraction")
        # gamma's transpose-side span intersection must land in lam_star
        scaled = [[self.scale_factor * x for x in col]
                  for col in inner.rational_basis()]
        for col in scaled:
            vec = []
            for x in col:
                q = Fraction(x)
                if q.denominator != 1:
                    raise InvariantError("gamma span intersection "
                                         "is not integral")
                vec.append(int(q))
            if not self.lam_star.contains(vec):
                raise InvariantError("gamma span intersection escapes "
                                     "the dual lattice")
        if len(self.estar) != self.base.counts.b:
            raise InvariantError("transpose-side digit count mismatch")
        if (0,) * n not in self.estar:
            raise InvariantError("transpose-side digits must contain 0")
        for v in self.estar:
            if not self.gamma.contains(v):
                raise InvariantError("transpose-side digit outside gamma")

    def character_index(self, valuation, digit_vectors, depth=None,
                        exact=True) -> TruncatedBAdic:
        """Canonical transpose-side value from digits given as Z^n vectors.

        Each digit must be an element of estar; internally the value is kept
        in gamma coordinates.
        """
        coords = []
        for v in digit_vectors:
            u = self._ginv.matvec(v)
            cu = []
            for x in u:
                if x.denominator != 1:
                    raise PreconditionError(f"digit {v} is not in gamma")
                cu.append(int(x))
            if tuple(cu) not in self.star_ctx._alphabet_index:
                raise PreconditionError(f"digit {v} is not a canonical "
                                        "transpose-side digit")
            coords.append(tuple(cu))
        if depth is None:
            depth = valuation + len(coords)
        while coords and not any(coords[0]):
            coords = coords[1:]
            valuation += 1
        if not coords:
            return TruncatedBAdic.zero(self.star_ctx, depth)
        return TruncatedBAdic(self.star_ctx, valuation, coords, depth, exact)

    def star_digit(self, s: TruncatedBAdic, j):
        """Digit s_j as a Z^n vector (an element of estar)."""
        u = s.digit_at(j)
        return tuple(int(x) for x in self.gmat.matvec(u))


def _require_digits(name, t: TruncatedBAdic, upto):
    """All digits of t at indices < upto must be known."""
    if t.valuation is None or t.exact:
        return
    if upto > t.depth:
        raise PreconditionError(
            f"{name} needs digits up to index {upto - 1} but is only known "
            f"to depth {t.depth}; required look-back exceeds truncation")


def S(s: TruncatedBAdic, y: TruncatedBAdic, ctx: DualContext) -> Fraction:
    """Exact phase sum_j <{B^j y}_B, s_j> of the character indexed by s.

    The j-th term pairs the fractional part of B^j y against the j-th digit
    of s; terms vanish once B^j y has no negative-index digits, so the sum
    is finite whenever both truncations cover the needed look-back.
    """
    if s.context != ctx.star_ctx:
        raise PreconditionError("s does not belong to this dual context")
    if y.context != badic._context_for(ctx.base):
        raise PreconditionError("y does not belong to this base")
    if s.valuation is None or y.valuation is None:
        return Fraction(0)
    jlo = s.valuation
    jhi = -y.valuation          # terms with j >= -nu(y) vanish
    if jhi <= jlo:
        return Fraction(0)
    _require_digits("s", s, jhi)
    _require_digits("y", y, -jlo)
    apow = ctx.base.A
    total = Fraction(0)
    for j in range(jlo, jhi):
        sj = ctx.star_digit(s, j)
        if not any(sj):
            continue
        # value of {B^j y}_B: digits of y at indices i < -j, shifted by j
        frac = [Fraction(0)] * ctx.base.n
        for i in range(y.valuation, -j):
            yi = y.digit_at(i)
            if not any(yi):
                continue
            v = apow.power(-(i + j)).matvec(yi)
            frac = [a + b for a, b in zip(frac, v)]
        total += sum(a * b for a, b in zip(frac, sj))
    return total


def S_dual_form(s: TruncatedBAdic, y: TruncatedBAdic,
                ctx: DualContext) -> Fraction:
    """The same phase computed from the other side: sum_k <y_k, {B*^k s}*_B>."""
    if s.valuation is None or y.valuation is None:
        return Fraction(0)
    klo = y.valuation
    khi = -s.valuation
    if khi <= klo:
        return Fraction(0)
    _require_digits("y", y, khi)
    _require_digits("s", s, -klo)
    astar = ctx.base.A.transpose()
    total = Fraction(0)
    for k in range(klo, khi):
        yk = y.digit_at(k)
        if not any(yk):
            continue
        frac = [Fraction(0)] * ctx.base.n
        for j in range(s.valuation, -k):
            sj = ctx.star_digit(s, j)
            if not any(sj):
                continue
            v = astar.power(-(j + k)).matvec(sj)
            frac = [a + b for a, b in zip(frac, v)]
        total += sum(a * b for a, b in zip(yk, frac))
    return total


def mod1(value: Fraction) -> Fraction:
    """Reduce an exact phase to a fraction of a turn in [0, 1)."""
    return value - floor(value)


def multiplicativity_check(s, y, yp, ctx: DualContext) -> int:
    """S(s,y) + S(s,y') - S(s,y+y'), asserted to be an exact integer."""
    total = badic.add(y, yp)
    defect = S(s, y, ctx) + S(s, yp, ctx) - S(s, total, ctx)
    if defect.denominator != 1:
        raise InvariantError(
            f"multiplicativity defect {defect} is not an integer")
    return int(defect)


def character_angle(r, x, s, y, ctx: DualContext) -> Fraction:
    """Angle of the combined character: <x, r> + S_s(y) as a turn in [0,1).

    r is a rational vector indexing the real-factor character, x the real
    coordinate of the point.
    """
    real = sum(Fraction(a) * Fraction(b) for a, b in zip(x, r))
    return mod1(real + S(s, y, ctx))
