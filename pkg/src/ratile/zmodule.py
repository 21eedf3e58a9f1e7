"""The module Z^n(B) generated from Z^n by an expanding rational matrix.

Provides Laurent elements sum_j A^j z_j, the kernel lattices
Z^n ∩ A Z^n[A] and Z^n ∩ B Z^n[B] with an index-certified stopping rule,
residue enumeration, digit systems and digit expansions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from .errors import InvariantError, PreconditionError
from .exact import QMatrix, is_expanding
from .frobenius import QuotientCounts, quotient_counts
from .lattices import (IntLattice, ScaledLattice, prepare_solver,
                       smith_normal_form, solve_integer, solve_prepared)


@dataclass(frozen=True)
class KernelLattice:
    side: str                    # "A" or "B"
    lattice: IntLattice
    stabilization_depth: int
    index: int


class ResidueSystem:
    """Transversal of Z^n modulo a kernel lattice, 0 included."""

    def __init__(self, side, representatives, kernel, u_rows, diag):
        self.side = side
        self.representatives = tuple(tuple(v) for v in representatives)
        self.kernel = kernel
        self._u_rows = u_rows        # unimodular U with U*basis diagonalized
        self._diag = diag
        self._by_key = {}
        for rep in self.representatives:
            key = self.key(rep)
            if key in self._by_key:
                raise InvariantError("residue representatives collide")
            self._by_key[key] = rep
        if len(self.representatives) != kernel.index:
            raise InvariantError("residue count does not match lattice index")
        if (0,) * kernel.lattice.n not in self.representatives:
            raise InvariantError("residue system must contain 0")

    def key(self, vec):
        """Canonical coset label of an integer vector modulo the kernel."""
        return tuple(sum(r[i] * vec[i] for i in range(len(vec))) % d if d else
                     sum(r[i] * vec[i] for i in range(len(vec)))
                     for r, d in zip(self._u_rows, self._diag))

    def representative(self, vec):
        return self._by_key[self.key(vec)]

    def __len__(self):
        return len(self.representatives)


class Base:
    """Analysis context for one expanding rational matrix A (B = A^-1)."""

    def __init__(self, a: QMatrix, iteration_cap=64):
        if not a.is_square():
            raise PreconditionError("matrix must be square")
        if a.det() == 0:
            raise PreconditionError("matrix must be nonsingular")
        if not is_expanding(a):
            raise PreconditionError("matrix must be expanding")
        self.A = a
        self.B = a.inverse()
        self.n = a.rows
        self.iteration_cap = iteration_cap

    @cached_property
    def counts(self) -> QuotientCounts:
        return quotient_counts(self.A)

    @cached_property
    def m(self):
        """Denominator lcm of A (the paper-side scaling integer)."""
        return self.A.denominator_lcm()

    def _matrix(self, side):
        return self.A if side == "A" else self.B

    def _target_index(self, side):
        return self.counts.a if side == "A" else self.counts.b

    def kernel_lattice(self, side) -> KernelLattice:
        """Z^n ∩ M Z^n[M] via the stabilizing chain, certified by its index."""
        if side not in ("A", "B"):
            raise ValueError("side must be 'A' or 'B'")
        cache = self.__dict__.setdefault("_kernel_cache", {})
        if side in cache:
            return cache[side]
        mat = self._matrix(side)
        target = self._target_index(side)
        chain = None
        for k in range(1, self.iteration_cap + 1):
            power_cols = mat.power(k).columns()
            step = ScaledLattice.from_rational_columns(self.n, power_cols)
            chain = step if chain is None else chain.sum(step)
            nk = chain.intersect_zn()
            if nk.is_full_rank() and nk.det() == target:
                out = KernelLattice(side, nk, k, target)
                cache[side] = out
                return out
        raise PreconditionError(
            f"kernel chain did not stabilize within {self.iteration_cap} steps")

    def residues(self, side) -> ResidueSystem:
        cache = self.__dict__.setdefault("_residue_cache", {})
        if side in cache:
            return cache[side]
        kernel = self.kernel_lattice(side)
        basis = kernel.lattice.basis_matrix()
        u, s, _ = smith_normal_form(basis)
        diag = [s[i][i] for i in range(self.n)]
        u_inv = QMatrix(u).inverse()
        reps = []
        counters = [0] * self.n
        while True:
            rep = u_inv.matvec(counters)
            if any(x.denominator != 1 for x in rep):
                raise InvariantError("unimodular inverse was not integral")
            reps.append(tuple(int(x) for x in rep))
            for i in range(self.n):
                counters[i] += 1
                if counters[i] < diag[i]:
                    break
                counters[i] = 0
            else:
                break
        out = ResidueSystem(side, reps, kernel, [list(r) for r in u], diag)
        cache[side] = out
        return out

    def decompose(self, vec, side):
        """Write v ∈ Z^n ∩ M Z^n[M] as sum_{i=1..K} M^i u_i, integer u_i."""
        kernel = self.kernel_lattice(side)
        mat_c, den, k = self._decompose_data(side)
        rhs = [int(Fraction(x) * den) for x in vec]
        if any(Fraction(x) * den != int(Fraction(x) * den) for x in vec):
            raise InvariantError("decompose expects an integer vector")
        sol = solve_prepared(mat_c, rhs)
        if sol is None:
            raise InvariantError("kernel decomposition infeasible")
        return [tuple(sol[i * self.n:(i + 1) * self.n]) for i in range(k)]

    def _decompose_data(self, side):
        cache = self.__dict__.setdefault("_decompose_cache", {})
        if side in cache:
            return cache[side]
        mat = self._matrix(side)
        k = self.kernel_lattice(side).stabilization_depth
        cols = []
        for i in range(1, k + 1):
            cols.extend(mat.power(i).columns())
        den = 1
        for c in cols:
            for x in c:
                den = lcm(den, x.denominator)
        int_rows = [[int(c[i] * den) for c in cols] for i in range(self.n)]
        cache[side] = (prepare_solver(int_rows), den, k)
        return cache[side]

    def element(self, support) -> "ModuleElement":
        return ModuleElement(self, support)

    def from_vector(self, vec) -> "ModuleElement":
        return ModuleElement(self, {0: tuple(int(x) for x in vec)})

    def zero_element(self) -> "ModuleElement":
        return ModuleElement(self, {})

    def __eq__(self, other):
        return isinstance(other, Base) and self.A == other.A

    def __hash__(self):
        return hash(self.A)


class ModuleElement:
    """Finite Laurent combination sum_j A^j z_j with integer vectors z_j.

    The support is a witness only; identity is the exact rational value, so
    two different Laurent spellings of the same element compare equal.
    """

    __slots__ = ("base", "support", "_value")

    def __init__(self, base: Base, support):
        self.base = base
        cleaned = {}
        for j, vec in dict(support).items():
            tup = tuple(int(x) for x in vec)
            if any(tup):
                cleaned[int(j)] = tup
        self.support = tuple(sorted(cleaned.items()))
        self._value = None

    @property
    def value(self):
        """Exact rational vector sum_j A^j z_j."""
        if self._value is None:
            acc = [Fraction(0)] * self.base.n
            for j, vec in self.support:
                col = self.base.A.power(j).matvec(vec)
                acc = [x + y for x, y in zip(acc, col)]
            self._value = tuple(acc)
        return self._value

    def coefficient(self, j):
        for exp, vec in self.support:
            if exp == j:
                return vec
        return (0,) * self.base.n

    def is_zero(self):
        return all(x == 0 for x in self.value)

    @property
    def min_exp(self):
        return self.support[0][0] if self.support else 0

    @property
    def max_exp(self):
        return self.support[-1][0] if self.support else 0

    def has_nonnegative_support(self):
        return not self.support or self.min_exp >= 0

    def shift(self, k):
        """Multiply by A^k (k < 0 multiplies by powers of B)."""
        return ModuleElement(self.base, {j + k: v for j, v in self.support})

    def __add__(self, other):
        self._check(other)
        out = {j: list(v) for j, v in self.support}
        for j, v in other.support:
            cur = out.setdefault(j, [0] * self.base.n)
            for i in range(self.base.n):
                cur[i] += v[i]
        return ModuleElement(self.base, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ModuleElement(self.base,
                             {j: tuple(-x for x in v) for j, v in self.support})

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.base == other.base \
            and self.value == other.value

    def __hash__(self):
        return hash((self.base.A, self.value))

    def __repr__(self):
        return f"ModuleElement({dict(self.support)!r})"

    def serialize(self):
        return [[j, list(v)] for j, v in self.support]

    def _check(self, other):
        if self.base != other.base:
            raise ValueError("elements from different bases")


class DigitSystem:
    """A digit set D ⊂ Z^n[A] of size a with 0 ∈ D."""

    def __init__(self, base: Base, digits):
        self.base = base
        self.digits = tuple(digits)
        if len(self.digits) != base.counts.a:
            raise PreconditionError(
                f"digit set must have size a = {base.counts.a}, "
                f"got {len(self.digits)}")
        for d in self.digits:
            if not d.has_nonnegative_support():
                raise PreconditionError("digits must lie in Z^n[A]")
        if not any(d.is_zero() for d in self.digits):
            raise PreconditionError("digit set must contain 0")
        res = base.residues("A")
        keys = [res.key(d.coefficient(0)) for d in self.digits]
        self.standard = len(set(keys)) == len(keys)
        self._keys = keys

    @classmethod
    def standard_from_residues(cls, base: Base):
        res = base.residues("A")
        return cls(base, [base.from_vector(v) for v in res.representatives])

    def digit_key(self, i):
        return self._keys[i]


def expand_step(x: ModuleElement, system: DigitSystem):
    """All (d, x') with x = d + A x', d ∈ D and x' ∈ Z^n[A]."""
    if not x.has_nonnegative_support():
        raise PreconditionError("expansion input must lie in Z^n[A]")
    base = system.base
    res = base.residues("A")
    xkey = res.key(x.coefficient(0))
    out = []
    for i, d in enumerate(system.digits):
        if system.digit_key(i) != xkey:
            continue
        z = x - d
        z0 = z.coefficient(0)
        if not base.kernel_lattice("A").lattice.contains(z0):
            raise InvariantError("residue key matched but kernel test failed")
        carries = base.decompose(z0, "A")
        rewritten = {j: v for j, v in z.support if j != 0}
        shifted = ModuleElement(base, rewritten)
        for i2, u in enumerate(carries, start=1):
            shifted = shifted + ModuleElement(base, {i2: u})
        xprime = shifted.shift(-1)
        if not xprime.has_nonnegative_support():
            raise InvariantError("quotient left Z^n[A]")
        out.append((d, xprime))
    return out


@dataclass(frozen=True)
class Expansion:
    digits: tuple
    status: str                  # finite | eventually-periodic | truncated
    preperiod: int = 0           # | stuck | branching
    period: int = 0


def expand(x: ModuleElement, system: DigitSystem, max_steps=64,
           policy="first") -> Expansion:
    """Run the digit expansion x = d0 + A d1 + ... with cycle detection.

    policy "first" always follows the first matching digit; "detect-branching"
    stops with status branching when several digits match a step.
    """
    digits = []
    seen = {x.value: 0}
    cur = x
    for step in range(max_steps):
        if cur.is_zero():
            return Expansion(tuple(digits), "finite")
        options = expand_step(cur, system)
        if not options:
            return Expansion(tuple(digits), "stuck")
        if len(options) > 1 and policy == "detect-branching":
            return Expansion(tuple(digits), "branching")
        d, cur = options[0]
        digits.append(d)
        if cur.value in seen:
            first = seen[cur.value]
            return Expansion(tuple(digits), "eventually-periodic",
                             preperiod=first, period=step + 1 - first)
        seen[cur.value] = step + 1
    return Expansion(tuple(digits), "truncated")


def full_rank_residues(base: Base, t_bound=64):
    """B-side residue system whose representatives span R^n, plus 0.

    When b < n + 1 the construction switches to a power of the matrix so the
    residue count is large enough; the returned tuple is
    (residues, base_used, power) with power = 1 when no switch happened.
    """
    if base.counts.b == 1:
        raise PreconditionError("b = 1: the B-side quotient is trivial")
    power = 1
    work = base
    while work.counts.b < base.n + 1:
        power += 1
        if power > 8:
            raise PreconditionError("no reasonable power reaches b >= n+1")
        work = Base(base.A.power(power))
    res = work.residues("B")
    n = work.n
    kernel = res.kernel.lattice
    nonzero = [r for r in res.representatives if any(r)]
    chosen = []
    for r in nonzero:
        chosen.append(r)
        if len(chosen) == n:
            break
    negated = {r: tuple(-x for x in r) for r in res.representatives}
    mB = work.B.denominator_lcm()
    bmat = work.B
    t = 0
    while True:
        t += mB
        if t > t_bound * mB:
            raise PreconditionError("no spanning adjustment found in bound")
        cand = []
        ok = True
        for j, c in enumerate(chosen):
            ej = [0] * n
            ej[j] = 1
            shift = bmat.matvec(ej)
            shift = tuple(x * t for x in shift)
            if any(x.denominator != 1 for x in shift):
                ok = False
                break
            shift = tuple(int(x) for x in shift)
            if not kernel.contains(shift):
                ok = False
                break
            cand.append(tuple(s - c[i] for i, s in enumerate(shift)))
        if not ok:
            continue
        span = QMatrix([[cand[j][i] for j in range(n)] for i in range(n)])
        if span.det() != 0:
            break
    reps = []
    for r in res.representatives:
        if r in chosen:
            reps.append(cand[chosen.index(r)])
        else:
            reps.append(negated[r])
    out = ResidueSystem("B", reps, res.kernel, res._u_rows, res._diag)
    # same coset multiset as the plain enumeration, by construction; verify
    if set(out._by_key) != set(res._by_key):
        raise InvariantError("adjusted residues changed the coset set")
    return out, work, power
