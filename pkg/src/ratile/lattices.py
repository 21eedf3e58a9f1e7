"""Integer lattice algebra: Hermite/Smith normal forms, sums, intersections,
indices and duals.

Lattices are subgroups of Z^n given by integer basis columns.  Every lattice
is stored through its unique column-style Hermite normal form, so two lattices
are equal iff their stored bases are equal.  Rational lattices (needed for
chains like B Z^n + B^2 Z^n + ...) are handled by `ScaledLattice`, an integer
lattice divided by a positive integer scale.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _mat_copy(m):
    return [list(row) for row in m]


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def _transpose(m):
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def det_int(m):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = _mat_copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def row_hnf(mat):
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U*mat = H, H in row echelon form with
    positive pivots and entries above each pivot reduced into [0, pivot).
    """
    if not mat:
        return [], []
    rows, cols = len(mat), len(mat[0])
    h = _mat_copy(mat)
    u = _identity(rows)
    pivot_row = 0
    for col in range(cols):
        if pivot_row >= rows:
            break
        # clear the column below pivot_row by gcd steps
        while True:
            nz = [i for i in range(pivot_row, rows) if h[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(h[i][col]))
            if i0 != pivot_row:
                h[pivot_row], h[i0] = h[i0], h[pivot_row]
                u[pivot_row], u[i0] = u[i0], u[pivot_row]
            done = True
            for i in range(pivot_row + 1, rows):
                if h[i][col] != 0:
                    q = h[i][col] // h[pivot_row][col]
                    for j in range(cols):
                        h[i][j] -= q * h[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if h[pivot_row][col] != 0:
            if h[pivot_row][col] < 0:
                h[pivot_row] = [-x for x in h[pivot_row]]
                u[pivot_row] = [-x for x in u[pivot_row]]
            p = h[pivot_row][col]
            for i in range(pivot_row):
                q = h[i][col] // p
                if q:
                    for j in range(cols):
                        h[i][j] -= q * h[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
            pivot_row += 1
    return h, u


def column_hnf(mat):
    """Column-style HNF of an integer matrix given as rows.

    Returns (H, V) with mat*V = H; the nonzero columns of H are the canonical
    basis of the column span.  Zero columns are moved to the end.
    """
    ht, u = row_hnf(_transpose(mat))
    return _transpose(ht), _transpose(u)


def smith_normal_form(mat):
    """Smith normal form.  Returns (U, S, V) with U*mat*V = S diagonal,
    U and V unimodular, and the diagonal entries d1 | d2 | ... nonnegative."""
    if not mat:
        return [], [], []
    rows, cols = len(mat), len(mat[0])
    s = _mat_copy(mat)
    u = _identity(rows)
    v = _identity(cols)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_op(i, j, q):
        # row i -= q * row j
        for t in range(cols):
            s[i][t] -= q * s[j][t]
        for t in range(rows):
            u[i][t] -= q * u[j][t]

    def col_op(i, j, q):
        # col i -= q * col j
        for r in s:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    t = 0
    while t < min(rows, cols):
        # find a nonzero pivot in the trailing block
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if s[i][j] != 0 and (best is None or abs(s[i][j]) < best):
                    best = abs(s[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            reduced = True
            for i in range(t + 1, rows):
                if s[i][t] != 0:
                    q = s[i][t] // s[t][t]
                    row_op(i, t, q)
                    if s[i][t] != 0:
                        swap_rows(t, i)
                        reduced = False
            for j in range(t + 1, cols):
                if s[t][j] != 0:
                    q = s[t][j] // s[t][t]
                    col_op(j, t, q)
                    if s[t][j] != 0:
                        swap_cols(t, j)
                        reduced = False
            if reduced and all(s[i][t] == 0 for i in range(t + 1, rows)) \
                    and all(s[t][j] == 0 for j in range(t + 1, cols)):
                break
        # pivot must divide the rest of the block
        p = s[t][t]
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % p != 0:
                    bad = (i, j)
                    break
            if bad:
                break
        if bad:
            # add offending row to pivot row and restart this step
            i, _ = bad
            for j2 in range(cols):
                s[t][j2] += s[i][j2]
            for j2 in range(rows):
                u[t][j2] += u[i][j2]
            continue
        if p < 0:
            for j2 in range(cols):
                s[t][j2] = -s[t][j2]
            for j2 in range(rows):
                u[t][j2] = -u[t][j2]
        t += 1
    return u, s, v


def prepare_solver(mat):
    """Precompute the column HNF of mat for repeated solve_integer calls."""
    h, vt = column_hnf(mat)
    return h, vt, len(mat), len(mat[0])


def solve_prepared(prep, target):
    """solve_integer against a prepare_solver result."""
    h, vt, rows, m = prep
    y = [0] * m
    r = list(target)
    for j in range(m):
        pr = None
        for i in range(rows):
            if h[i][j] != 0:
                pr = i
                break
        if pr is None:
            continue
        if r[pr] % h[pr][j] != 0:
            return None
        q = r[pr] // h[pr][j]
        y[j] = q
        for i in range(rows):
            r[i] -= q * h[i][j]
    if any(x != 0 for x in r):
        return None
    return [sum(vt[i][j] * y[j] for j in range(m)) for i in range(m)]


def solve_integer(mat, target):
    """One integer solution x of mat @ x = target, or None.

    mat is a list of rows (n x m), target a length-n integer vector.
    """
    if not mat:
        return [] if all(t == 0 for t in target) else None
    h, vt = column_hnf(mat)
    rows, m = len(mat), len(mat[0])
    y = [0] * m
    r = list(target)
    for j in range(m):
        # pivot row of column j = first nonzero entry
        pr = None
        for i in range(rows):
            if h[i][j] != 0:
                pr = i
                break
        if pr is None:
            continue
        if r[pr] % h[pr][j] != 0:
            return None
        q = r[pr] // h[pr][j]
        y[j] = q
        for i in range(rows):
            r[i] -= q * h[i][j]
    if any(x != 0 for x in r):
        return None
    return [sum(vt[i][j] * y[j] for j in range(m)) for i in range(m)]


def integer_nullspace(mat):
    """Basis (list of columns) of {x in Z^m : mat @ x = 0}."""
    if not mat:
        return []
    h, vt = column_hnf(mat)
    rows = len(mat)
    m = len(mat[0])
    basis = []
    for j in range(m):
        if all(h[i][j] == 0 for i in range(rows)):
            basis.append([vt[i][j] for i in range(m)])
    return basis


class IntLattice:
    """A subgroup of Z^n with canonical column-HNF basis."""

    __slots__ = ("n", "basis", "rank", "_prep")

    def __init__(self, n, columns):
        """columns: iterable of length-n integer vectors (may be redundant)."""
        self.n = n
        self._prep = None
        cols = [list(c) for c in columns if any(x != 0 for x in c)]
        if not cols:
            self.basis = ()
            self.rank = 0
            return
        mat = [[c[i] for c in cols] for i in range(n)]
        h, _ = column_hnf(mat)
        keep = []
        for j in range(len(cols)):
            col = [h[i][j] for i in range(n)]
            if any(x != 0 for x in col):
                keep.append(tuple(col))
        self.basis = tuple(keep)
        self.rank = len(keep)

    @classmethod
    def zn(cls, n):
        return cls(n, [[1 if i == j else 0 for i in range(n)] for j in range(n)])

    @classmethod
    def zero(cls, n):
        return cls(n, [])

    def basis_matrix(self):
        """n x rank matrix whose columns are the basis."""
        return [[self.basis[j][i] for j in range(self.rank)] for i in range(self.n)]

    def __eq__(self, other):
        return isinstance(other, IntLattice) and self.n == other.n \
            and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"IntLattice(n={self.n}, basis={self.basis})"

    def is_full_rank(self):
        return self.rank == self.n

    def det(self):
        if not self.is_full_rank():
            raise ValueError("determinant requires a full-rank lattice")
        return abs(det_int(self.basis_matrix()))

    def _solver(self):
        if self._prep is None:
            self._prep = prepare_solver(self.basis_matrix())
        return self._prep

    def contains(self, vec):
        if self.rank == 0:
            return all(x == 0 for x in vec)
        return solve_prepared(self._solver(), list(vec)) is not None

    def coords(self, vec):
        """Integer coordinates of vec in the basis, or None."""
        if self.rank == 0:
            return [] if all(x == 0 for x in vec) else None
        return solve_prepared(self._solver(), list(vec))

    def sum(self, other):
        self._check(other)
        return IntLattice(self.n, list(self.basis) + list(other.basis))

    def intersect(self, other):
        self._check(other)
        if self.rank == 0 or other.rank == 0:
            return IntLattice.zero(self.n)
        # solve B1 x = B2 y; nullspace of [B1 | -B2]
        b1 = self.basis_matrix()
        b2 = other.basis_matrix()
        stacked = [b1[i] + [-x for x in b2[i]] for i in range(self.n)]
        null = integer_nullspace(stacked)
        cols = []
        for vec in null:
            x = vec[:self.rank]
            cols.append([sum(b1[i][j] * x[j] for j in range(self.rank))
                         for i in range(self.n)])
        return IntLattice(self.n, cols)

    def index_in(self, super_lattice):
        """[super : self] for full-rank lattices with self <= super."""
        self._check(super_lattice)
        if not (self.is_full_rank() and super_lattice.is_full_rank()):
            raise ValueError("index requires full-rank lattices")
        for col in self.basis:
            if not super_lattice.contains(col):
                raise ValueError("index query without containment")
        q, r = divmod(self.det(), super_lattice.det())
        if r != 0:
            raise AssertionError("containment held but determinants do not divide")
        return q

    def dual(self):
        """Dual lattice {x : <x, z> in Z for all z in self}, full rank only.

        Returned as a ScaledLattice since the dual usually has fractional
        coordinates.
        """
        if not self.is_full_rank():
            raise ValueError("dual requires a full-rank lattice")
        m = self.basis_matrix()
        d = det_int(m)
        # columns of (M^T)^{-1} = adj(M^T) / det
        adj = _adjugate(_transpose(m))
        return ScaledLattice(IntLattice(self.n, _columns(adj)), abs(d)).reduced()

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("dimension mismatch")


def _columns(mat):
    return [[mat[i][j] for i in range(len(mat))] for j in range(len(mat[0]))]


def _adjugate(m):
    n = len(m)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            adj[j][i] = (-1) ** (i + j) * det_int(minor)
    return adj


class ScaledLattice:
    """(1/scale) * L for an integer lattice L; keeps all arithmetic integral."""

    __slots__ = ("lattice", "scale")

    def __init__(self, lattice, scale):
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.lattice = lattice
        self.scale = scale

    @classmethod
    def from_rational_columns(cls, n, columns):
        """Build from columns of Fractions."""
        den = 1
        for c in columns:
            for x in c:
                den = lcm(den, Fraction(x).denominator)
        int_cols = [[int(Fraction(x) * den) for x in c] for c in columns]
        return cls(IntLattice(n, int_cols), den).reduced()

    @classmethod
    def zn(cls, n):
        return cls(IntLattice.zn(n), 1)

    @property
    def n(self):
        return self.lattice.n

    def reduced(self):
        """Canonical form: divide out common content of basis and scale."""
        if self.lattice.rank == 0:
            return ScaledLattice(self.lattice, 1)
        g = self.scale
        for col in self.lattice.basis:
            for x in col:
                g = gcd(g, x)
        if g > 1:
            cols = [[x // g for x in col] for col in self.lattice.basis]
            return ScaledLattice(IntLattice(self.n, cols), self.scale // g)
        return self

    def rescaled(self, new_scale):
        """Same lattice with the given (multiple) scale."""
        if new_scale % self.scale != 0:
            raise ValueError("new scale must be a multiple")
        f = new_scale // self.scale
        cols = [[x * f for x in col] for col in self.lattice.basis]
        return ScaledLattice(IntLattice(self.n, cols), new_scale)

    def common(self, other):
        s = lcm(self.scale, other.scale)
        return self.rescaled(s), other.rescaled(s)

    def sum(self, other):
        a, b = self.common(other)
        return ScaledLattice(a.lattice.sum(b.lattice), a.scale).reduced()

    def intersect(self, other):
        a, b = self.common(other)
        return ScaledLattice(a.lattice.intersect(b.lattice), a.scale).reduced()

    def intersect_zn(self):
        """Z^n  ∩  self, as a plain IntLattice."""
        zn_scaled = ScaledLattice(IntLattice.zn(self.n), 1)
        out = self.intersect(zn_scaled)
        # result is a sublattice of Z^n; scale must reduce to 1
        out = out.reduced()
        if out.lattice.rank and out.scale != 1:
            raise AssertionError("intersection with Z^n left a nontrivial scale")
        return out.lattice

    def contains(self, vec):
        """vec: rational vector."""
        scaled = []
        for x in vec:
            q = Fraction(x) * self.scale
            if q.denominator != 1:
                return False
            scaled.append(int(q))
        return self.lattice.contains(scaled)

    def rational_basis(self):
        return [[Fraction(x, self.scale) for x in col] for col in self.lattice.basis]

    def __eq__(self, other):
        if not isinstance(other, ScaledLattice):
            return NotImplemented
        a, b = self.reduced(), other.reduced()
        return a.scale == b.scale and a.lattice == b.lattice

    def __hash__(self):
        r = self.reduced()
        return hash((r.scale, r.lattice))

    def __repr__(self):
        return f"ScaledLattice(1/{self.scale} * {self.lattice!r})"


def hnf(columns, n=None):
    """Canonical lattice from integer basis columns (zero columns dropped)."""
    cols = [list(c) for c in columns]
    if n is None:
        if not cols:
            raise ValueError("dimension required for empty input")
        n = len(cols[0])
    return IntLattice(n, cols)
