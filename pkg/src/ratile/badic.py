"""Truncated arithmetic in Z^n((B)): valuation, metric, canonical digits.

A value is expanded as sum_{j >= nu} B^j e_j with digits e_j drawn from the
B-side residue system E.  Truncations are cylinders, never points: every
derived quantity carries an exact/bounded flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, InvariantError, PreconditionError
from .zmodule import Base, ModuleElement

_VALUATION_CAP = 10000


@dataclass(frozen=True)
class Bound:
    """A nonnegative quantity that is either exact or an upper bound."""
    value: Fraction
    exact: bool

    def __le__(self, other):
        return self.value <= (other.value if isinstance(other, Bound) else other)


class BAdicContext:
    """Digit alphabet and carry solver for one base."""

    def __init__(self, base: Base):
        if base.counts.b < 2:
            raise PreconditionError(
                "b = 1: the series factor is trivial, no digit expansions")
        self.base = base
        self.residues = base.residues("B")
        zero = (0,) * base.n
        rest = sorted(v for v in self.residues.representatives if v != zero)
        self.alphabet = (zero,) + tuple(rest)
        self._alphabet_index = {v: i for i, v in enumerate(self.alphabet)}
        self.b = base.counts.b

    def digit_index(self, vec):
        return self._alphabet_index[tuple(vec)]

    def digit_for(self, vec):
        """The unique e ∈ E congruent to vec modulo Z^n ∩ B Z^n[B]."""
        return self.residues.representative(vec)

    def __eq__(self, other):
        return isinstance(other, BAdicContext) and self.base == other.base

    def __hash__(self):
        return hash(self.base)

    def digit_stream(self, coefficients):
        """Canonical digits from a map {B-exponent: integer vector}.

        Yields (index, digit) in increasing index order; the stream ends when
        all remaining digits are provably zero.  Carries move strictly
        upward.  Elements whose whole tail is zero exist even for nonzero
        input (integer-stable directions are invisible to the series
        factor); they are detected by a lattice-closure certificate.
        """
        pending = {int(i): list(v) for i, v in coefficients.items()
                   if any(v)}
        emitted = 0
        zero_run = 0
        idx = min(pending) if pending else 0
        while pending:
            if emitted > _VALUATION_CAP:
                raise InvariantError("digit stream exceeded safety cap")
            v = tuple(pending.pop(idx, (0,) * self.base.n))
            e = self.digit_for(v)
            rem = tuple(x - y for x, y in zip(v, e))
            if any(rem):
                # rem ∈ Z^n ∩ B Z^n[B]; push it into higher positions
                for t, u in enumerate(self.base.decompose(rem, "B"), start=1):
                    if any(u):
                        cur = pending.setdefault(idx + t, [0] * self.base.n)
                        for i in range(self.base.n):
                            cur[i] += u[i]
            yield idx, tuple(e)
            emitted += 1
            idx += 1
            zero_run = 0 if any(e) else zero_run + 1
            if zero_run and zero_run % 32 == 0 and pending:
                if self._tail_provably_zero(list(pending.values())):
                    return

    def _tail_provably_zero(self, vectors):
        """Certificate: every future digit is zero.

        True when the lattice spanned by the pending carries is contained in
        the B-side kernel and closed under the carry map; the closure chain
        is ascending in Z^n, so it stabilizes.
        """
        from .lattices import IntLattice
        nb = self.base.kernel_lattice("B").lattice
        lat = IntLattice(self.base.n, [tuple(v) for v in vectors])
        for _ in range(512):
            if not all(nb.contains(col) for col in lat.basis):
                return False
            carries = []
            for col in lat.basis:
                for u in self.base.decompose(col, "B"):
                    carries.append(u)
            grown = IntLattice(self.base.n, list(lat.basis) + carries)
            if grown == lat:
                return True
            lat = grown
        return False


class TruncatedBAdic:
    """Cylinder sum_{j=nu}^{depth-1} B^j e_j (+ unknown tail unless exact)."""

    __slots__ = ("context", "valuation", "digits", "depth", "exact")

    def __init__(self, context, valuation, digits, depth, exact):
        self.context = context
        self.valuation = valuation          # None encodes the zero marker
        self.digits = tuple(tuple(d) for d in digits)
        self.depth = depth
        self.exact = exact
        if valuation is None:
            if self.digits:
                raise InvariantError("zero marker cannot carry digits")
        elif self.digits:
            if not any(self.digits[0]):
                raise InvariantError("leading digit must be nonzero")
            for d in self.digits:
                if tuple(d) not in context._alphabet_index:
                    raise InvariantError("digit outside the alphabet")
            if valuation + len(self.digits) > depth:
                raise InvariantError("digits exceed depth")

    @classmethod
    def zero(cls, context, depth):
        return cls(context, None, (), depth, True)

    def is_zero_marker(self):
        return self.valuation is None

    def digit_at(self, j):
        if self.valuation is None:
            return (0,) * self.context.base.n
        i = j - self.valuation
        if 0 <= i < len(self.digits):
            return self.digits[i]
        return (0,) * self.context.base.n

    def value(self) -> ModuleElement:
        """Exact value of the digits as an element of Z^n(B).

        Only meaningful as the true value when exact is set; otherwise it is
        the canonical representative of the cylinder.
        """
        base = self.context.base
        if self.valuation is None:
            return base.zero_element()
        support = {}
        for i, d in enumerate(self.digits):
            j = self.valuation + i
            if any(d):
                support[-j] = d
        return ModuleElement(base, support)

    def shift(self, k):
        """Multiply by B^k (k may be negative)."""
        if self.valuation is None:
            return TruncatedBAdic(self.context, None, (), self.depth + k,
                                  self.exact)
        return TruncatedBAdic(self.context, self.valuation + k, self.digits,
                              self.depth + k, self.exact)

    def __neg__(self):
        if self.valuation is None:
            return self
        coeff = {}
        for i, d in enumerate(self.digits):
            coeff[self.valuation + i] = tuple(-x for x in d)
        return _from_coefficients(self.context, coeff, self.depth,
                                  start_exact=self.exact)

    def __eq__(self, other):
        return isinstance(other, TruncatedBAdic) \
            and self.context == other.context \
            and self.valuation == other.valuation \
            and self.digits == other.digits and self.depth == other.depth

    def __hash__(self):
        return hash((self.valuation, self.digits, self.depth))

    def to_string(self):
        if self.valuation is None:
            return "ν=inf;d="
        parts = "|".join(",".join(str(x) for x in d) for d in self.digits)
        return f"ν={self.valuation};d={parts}"

    @classmethod
    def from_string(cls, context, text, depth=None, exact=False):
        try:
            nu_part, d_part = text.split(";d=", 1)
            nu_text = nu_part.split("=", 1)[1]
            if nu_text == "inf":
                return cls.zero(context, depth if depth is not None else 0)
            nu = int(nu_text)
            digits = []
            if d_part:
                for chunk in d_part.split("|"):
                    digits.append(tuple(int(x) for x in chunk.split(",")))
        except (ValueError, IndexError) as err:
            raise ConfigError(f"bad digit string {text!r}: {err}") from err
        if depth is None:
            depth = nu + len(digits)
        return cls(context, nu, digits, depth, exact)

    def __repr__(self):
        flag = "exact" if self.exact else "cyl"
        return f"TruncatedBAdic({self.to_string()}, depth={self.depth}, {flag})"


def _coefficients(y: ModuleElement):
    """Support of y reindexed by B-exponent."""
    return {-j: v for j, v in y.support}


def valuation(y: ModuleElement):
    """min k with y ∈ B^k Z^n[B] \\ B^(k+1) Z^n[B]; None (infinity) for 0.

    Nonzero Laurent elements can also have infinite valuation when they sit
    in an integer-stable direction; they are at distance zero from 0 in the
    series metric.
    """
    if y.is_zero():
        return None
    ctx = _context_for(y.base)
    for idx, digit in ctx.digit_stream(_coefficients(y)):
        if any(digit):
            return idx
    return None


_context_cache = {}


def _context_for(base: Base) -> BAdicContext:
    key = base.A
    if key not in _context_cache:
        _context_cache[key] = BAdicContext(base)
    return _context_cache[key]


def _from_coefficients(ctx, coeff, depth, start_exact=True):
    """Stream raw coefficients into a canonical truncated value."""
    nu = None
    digits = []
    ended = True
    for idx, digit in ctx.digit_stream(coeff):
        if nu is None:
            if not any(digit):
                continue
            nu = idx
        if idx >= depth:
            ended = False
            break
        digits.append(digit)
    if nu is None:
        return TruncatedBAdic.zero(ctx, depth)
    if nu >= depth:
        digits = []
    return TruncatedBAdic(ctx, nu, digits, depth, ended and start_exact)


def normalize(y: ModuleElement, depth) -> TruncatedBAdic:
    """Canonical E-digit expansion of y to the given depth."""
    ctx = _context_for(y.base)
    if y.is_zero():
        return TruncatedBAdic.zero(ctx, depth)
    # a nonzero element may still normalize to the zero marker: elements of
    # the integer-stable directions have all-zero digit tails
    return _from_coefficients(ctx, _coefficients(y), depth)


def add(left: TruncatedBAdic, right: TruncatedBAdic,
        negate_right=False) -> TruncatedBAdic:
    """Digit-wise sum renormalized; result depth = min of the depths."""
    if left.context != right.context:
        raise PreconditionError("operands from different contexts")
    ctx = left.context
    depth = min(left.depth, right.depth)
    coeff = {}

    def feed(t, sign):
        if t.valuation is None:
            return
        for i, d in enumerate(t.digits):
            j = t.valuation + i
            cur = coeff.setdefault(j, [0] * ctx.base.n)
            for q in range(ctx.base.n):
                cur[q] += sign * d[q]

    feed(left, 1)
    feed(right, -1 if negate_right else 1)
    return _from_coefficients(ctx, coeff, depth,
                              start_exact=left.exact and right.exact)


def metric(y: TruncatedBAdic, yp: TruncatedBAdic) -> Bound:
    """d_B(y, y') = b^(-valuation of the difference), exact when resolvable."""
    if y.context != yp.context:
        raise PreconditionError("operands from different contexts")
    b = y.context.b
    depth = min(y.depth, yp.depth)
    lows = [t.valuation for t in (y, yp) if t.valuation is not None]
    if not lows:
        return Bound(Fraction(0), y.exact and yp.exact)
    start = min(lows)
    both_exact = y.exact and yp.exact
    if both_exact:
        ends = [t.valuation + len(t.digits) for t in (y, yp)
                if t.valuation is not None]
        limit = max(ends + [depth])
    else:
        limit = depth
    for j in range(start, limit):
        if y.digit_at(j) != yp.digit_at(j):
            return Bound(Fraction(b) ** (-j), True)
    if both_exact:
        return Bound(Fraction(0), True)
    return Bound(Fraction(b) ** (-depth), False)


def frac_part(y: TruncatedBAdic) -> ModuleElement:
    """sum_{j=nu}^{-1} B^j e_j, a finite element of Z^n[A]."""
    base = y.context.base
    if y.valuation is None or y.valuation >= 0:
        return base.zero_element()
    support = {}
    for j in range(y.valuation, 0):
        d = y.digit_at(j)
        if any(d):
            support[-j] = d
    return ModuleElement(base, support)


def int_part(y: TruncatedBAdic) -> TruncatedBAdic:
    """Digits from index 0 on, as a truncated value."""
    if y.valuation is None or y.valuation >= 0:
        return y
    digits = [y.digit_at(j) for j in range(0, y.depth)]
    nu = None
    for i, d in enumerate(digits):
        if any(d):
            nu = i
            break
    if nu is None:
        return TruncatedBAdic.zero(y.context, y.depth)
    return TruncatedBAdic(y.context, nu, digits[nu:], y.depth, y.exact)


def embed_real(y: TruncatedBAdic) -> float:
    """Injective-on-cylinders embedding into [0, 1) for display."""
    if y.valuation is None:
        return 0.0
    ctx = y.context
    total = Fraction(0)
    for i, d in enumerate(y.digits):
        j = y.valuation + i
        total += Fraction(ctx.digit_index(d), ctx.b ** (j - y.valuation + 1))
    return float(total)
