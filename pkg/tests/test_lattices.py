"""Lattice algebra tests: normal forms, solvers, sums, intersections, duals.

Oracles: Fraction-exact determinants via QMatrix, brute-force membership
enumeration on small lattices, and sympy's Smith normal form.
"""

import random
from fractions import Fraction

import pytest

from ratile.exact import QMatrix
from ratile.lattices import (IntLattice, ScaledLattice, column_hnf, det_int,
                             integer_nullspace, prepare_solver, row_hnf,
                             smith_normal_form, solve_integer, solve_prepared)


def _rand_mat(rng, rows, cols, bound=6):
    return [[rng.randint(-bound, bound) for _ in range(cols)]
            for _ in range(rows)]


def _is_unimodular(m):
    return abs(det_int(m)) == 1


def _mat_mul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b)))
             for j in range(len(b[0]))] for i in range(len(a))]


def test_det_int_matches_fraction_determinant():
    rng = random.Random(1)
    for _ in range(50):
        n = rng.randint(1, 4)
        m = _rand_mat(rng, n, n)
        assert det_int(m) == QMatrix(m).det()


def test_row_hnf_is_unimodular_transform():
    rng = random.Random(2)
    for _ in range(40):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = _rand_mat(rng, rows, cols)
        h, u = row_hnf(m)
        assert _is_unimodular(u)
        assert _mat_mul(u, m) == h
        # echelon: pivot columns strictly increase, pivots positive
        last = -1
        for row in h:
            nz = [j for j, x in enumerate(row) if x]
            if not nz:
                continue
            assert nz[0] > last
            assert row[nz[0]] > 0
            last = nz[0]


def test_column_hnf_transform_identity():
    rng = random.Random(3)
    for _ in range(40):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = _rand_mat(rng, rows, cols)
        h, v = column_hnf(m)
        assert _is_unimodular(v)
        assert _mat_mul(m, v) == h


def test_smith_normal_form_properties():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(1, 3)
        m = _rand_mat(rng, n, n)
        u, s, v = smith_normal_form(m)
        assert _is_unimodular(u) and _is_unimodular(v)
        assert _mat_mul(_mat_mul(u, m), v) == s
        diag = [s[i][i] for i in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j:
                    assert s[i][j] == 0
        for d1, d2 in zip(diag, diag[1:]):
            if d1:
                assert d2 % d1 == 0
            else:
                assert d2 == 0
        assert all(d >= 0 for d in diag)


def test_smith_diagonal_matches_sympy():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form as snf
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 3)
        m = _rand_mat(rng, n, n)
        _, s, _ = smith_normal_form(m)
        ref = snf(sympy.Matrix(m))
        got = sorted(abs(s[i][i]) for i in range(n))
        want = sorted(abs(int(ref[i, i])) for i in range(n))
        assert got == want


def test_solve_integer_roundtrip_and_prepared_equivalence():
    rng = random.Random(6)
    for _ in range(100):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = _rand_mat(rng, rows, cols)
        x = [rng.randint(-5, 5) for _ in range(cols)]
        target = [sum(m[i][j] * x[j] for j in range(cols)) for i in range(rows)]
        sol = solve_integer(m, target)
        assert sol is not None
        assert [sum(m[i][j] * sol[j] for j in range(cols))
                for i in range(rows)] == target
        prep = prepare_solver(m)
        assert solve_prepared(prep, target) == sol
        # an arbitrary right-hand side must agree on solvability
        t2 = [rng.randint(-9, 9) for _ in range(rows)]
        s1 = solve_integer(m, t2)
        s2 = solve_prepared(prep, t2)
        assert (s1 is None) == (s2 is None)
        if s1 is not None:
            assert [sum(m[i][j] * s2[j] for j in range(cols))
                    for i in range(rows)] == t2


def test_solve_integer_detects_infeasible():
    # 2Z does not contain odd targets
    assert solve_integer([[2]], [3]) is None
    assert solve_integer([[2, 0], [0, 2]], [1, 0]) is None
    assert solve_integer([[1, 0], [0, 1]], [7, -3]) == [7, -3]


def test_integer_nullspace_spans_kernel():
    rng = random.Random(7)
    for _ in range(40):
        rows = rng.randint(1, 3)
        cols = rng.randint(1, 4)
        m = _rand_mat(rng, rows, cols, bound=4)
        basis = integer_nullspace(m)
        for v in basis:
            assert all(sum(m[i][j] * v[j] for j in range(cols)) == 0
                       for i in range(rows))
        # brute-force kernel vectors in a small box must be spanned
        lat_rows = [[b[i] for b in basis] for i in range(cols)] if basis else []
        import itertools
        for vec in itertools.product(range(-2, 3), repeat=cols):
            in_kernel = all(sum(m[i][j] * vec[j] for j in range(cols)) == 0
                            for i in range(rows))
            if not in_kernel:
                continue
            if not basis:
                assert all(x == 0 for x in vec)
            else:
                assert solve_integer(lat_rows, list(vec)) is not None


def test_intlattice_canonical_under_generator_shuffle():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(1, 3)
        cols = [_rand_col(rng, n) for _ in range(rng.randint(1, 4))]
        lat = IntLattice(n, cols)
        shuffled = list(cols)
        rng.shuffle(shuffled)
        # adding a lattice combination must not change the canonical basis
        combo = [a + b for a, b in zip(cols[0], cols[-1])]
        assert IntLattice(n, shuffled + [combo]) == lat


def _rand_col(rng, n):
    return [rng.randint(-5, 5) for _ in range(n)]


def test_contains_and_coords_agree():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(1, 3)
        lat = IntLattice(n, [_rand_col(rng, n) for _ in range(n)])
        coeffs = [rng.randint(-4, 4) for _ in range(lat.rank)]
        vec = [sum(lat.basis[j][i] * coeffs[j] for j in range(lat.rank))
               for i in range(n)]
        assert lat.contains(vec)
        c = lat.coords(vec)
        assert c is not None
        rebuilt = [sum(lat.basis[j][i] * c[j] for j in range(lat.rank))
                   for i in range(n)]
        assert rebuilt == vec


def test_sum_and_intersect_membership_oracle():
    import itertools
    rng = random.Random(10)
    for _ in range(25):
        n = 2
        l1 = IntLattice(n, [_rand_col(rng, n), _rand_col(rng, n)])
        l2 = IntLattice(n, [_rand_col(rng, n), _rand_col(rng, n)])
        s = l1.sum(l2)
        meet = l1.intersect(l2)
        for vec in itertools.product(range(-4, 5), repeat=n):
            both = l1.contains(vec) and l2.contains(vec)
            assert meet.contains(vec) == both
            if l1.contains(vec) or l2.contains(vec):
                assert s.contains(vec)
        for col in meet.basis:
            assert l1.contains(col) and l2.contains(col)


def test_index_in_scaled_sublattice():
    for k in (1, 2, 3, 5):
        sub = IntLattice(2, [[k, 0], [0, k]])
        assert sub.index_in(IntLattice.zn(2)) == k * k
    with pytest.raises(ValueError):
        IntLattice(2, [[1, 0], [0, 1]]).index_in(IntLattice(2, [[2, 0], [0, 2]]))


def test_dual_involution_and_pairing():
    rng = random.Random(11)
    assert IntLattice.zn(3).dual() == ScaledLattice(IntLattice.zn(3), 1)
    for _ in range(20):
        n = rng.randint(1, 3)
        lat = IntLattice(n, [_rand_col(rng, n) for _ in range(n + 1)])
        if not lat.is_full_rank():
            continue
        dual = lat.dual()
        # pairing <dual basis, lattice basis> is integral
        for dcol in dual.rational_basis():
            for col in lat.basis:
                val = sum(Fraction(a) * b for a, b in zip(dcol, col))
                assert val.denominator == 1
        # dual of the dual comes back to the original: the dual of
        # (1/s)L is s * dual(L), so dualize the integer part and rescale
        dd = dual.lattice.dual()
        restored = ScaledLattice.from_rational_columns(
            n, [[x * dual.scale for x in col] for col in dd.rational_basis()])
        assert restored == ScaledLattice(lat, 1)


def test_scaled_lattice_reduction_and_equality():
    half_twos = ScaledLattice(IntLattice(1, [[2]]), 2)
    assert half_twos.reduced() == ScaledLattice(IntLattice(1, [[1]]), 1)
    a = ScaledLattice.from_rational_columns(2, [[Fraction(1, 2), 0],
                                                [0, Fraction(1, 3)]])
    b = ScaledLattice.from_rational_columns(2, [[Fraction(3, 6), 0],
                                                [0, Fraction(2, 6)]])
    assert a == b
    assert a.contains([Fraction(1, 2), Fraction(1, 3)])
    assert not a.contains([Fraction(1, 4), 0])


def test_intersect_zn_worked_values():
    # (1/2)Z ∩ Z = Z;  (3/2)Z ∩ Z = 3Z
    half = ScaledLattice(IntLattice(1, [[1]]), 2)
    assert half.intersect_zn() == IntLattice(1, [[1]])
    three_halves = ScaledLattice(IntLattice(1, [[3]]), 2)
    assert three_halves.intersect_zn() == IntLattice(1, [[3]])
