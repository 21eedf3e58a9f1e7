"""Geometry of R^n x Z^n((B)): embedding, distances, lattice operations.

Worked values: the 1-d series norm closed form and the 1/m^K minimum
distance bound, both checked against direct computation.
"""

import random
from fractions import Fraction

import pytest

from ratile import badic, space
from ratile.errors import PreconditionError
from ratile.exact import QMatrix
from ratile.space import (MetricContext, PointKA, dist, fundamental_reduce,
                          lattice_min_distance_bound, lattice_nearest, phi)
from ratile.zmodule import Base


@pytest.fixture(scope="module")
def base1d():
    return Base(QMatrix.from_strings([["3/2"]]))


@pytest.fixture(scope="module")
def base2d():
    return Base(QMatrix.from_strings([["2", "1"], ["0", "5/3"]]))


def test_phi_worked_value(base1d):
    p = phi(base1d.from_vector([3]), 6)
    assert p.real_part == (Fraction(3),)
    assert p.badic_part.valuation == 0
    assert p.badic_part.digits == ((1,),) * 6


def test_dist_exact_components(base1d):
    p = phi(base1d.from_vector([3]), 8)
    q = phi(base1d.from_vector([1]), 8)
    d = dist(p, q)
    assert d.real_sq == 4
    # 3 - 1 = 2 has valuation 1, so d_B = 2^-1
    assert d.badic.value == Fraction(1, 2) and d.badic.exact
    assert d.at_least(2) and d.at_most(2)
    # q has a finite (exact) digit tail, so self-distance is certified zero;
    # p's cylinder only agrees with itself to depth
    assert dist(q, q).is_zero()
    assert not dist(p, p).is_zero()
    assert dist(p, p).badic.value == Fraction(1, 2 ** 8)


def test_series_norm_closed_form(base1d):
    # rho = 5/4: sum (5/6)^k = 6 exactly
    ctx = MetricContext(base1d, rho=Fraction(5, 4))
    lo, hi = ctx.series_norm([1])
    assert lo <= 6.0 <= hi
    assert hi - lo < 1e-6
    assert ctx.series_norm([0]) == (0.0, 0.0)


def test_metric_context_parameters(base1d, base2d):
    for base in (base1d, base2d):
        ctx = MetricContext(base)
        assert 1 < ctx.rho < ctx.sigma
        assert 0 < ctx.kappa < 1
    with pytest.raises(PreconditionError):
        MetricContext(base1d, rho=Fraction(7, 4))   # >= sigma bound


def test_ell_dist_dominates_badic(base1d):
    ctx = MetricContext(base1d)
    p = phi(base1d.from_vector([2]), 8)
    q = phi(base1d.from_vector([0]), 8)
    lo, hi = ctx.ell_dist(p, q)
    d = badic.metric(p.badic_part, q.badic_part)
    assert hi >= float(d.value)
    assert lo <= hi


def test_lattice_min_distance_bound_1d(base1d):
    # m = 2, K = 1 so the bound is 1/2
    assert lattice_min_distance_bound(base1d) == Fraction(1, 2)


def test_lattice_min_distance_respected(base1d, base2d):
    rng = random.Random(61)
    for base in (base1d, base2d):
        bound = lattice_min_distance_bound(base)
        for _ in range(40):
            s1 = {j: tuple(rng.randint(-6, 6) for _ in range(base.n))
                  for j in range(0, 3)}
            s2 = {j: tuple(rng.randint(-6, 6) for _ in range(base.n))
                  for j in range(0, 3)}
            z1 = base.element(s1)
            z2 = base.element(s2)
            if z1 == z2:
                continue
            d = dist(phi(z1, 10), phi(z2, 10))
            assert d.at_least(bound)


def test_lattice_nearest_within_two(base1d, base2d):
    rng = random.Random(62)
    for base in (base1d, base2d):
        ctx = badic._context_for(base)
        for _ in range(25):
            real = tuple(Fraction(rng.randint(-50, 50), 7)
                         for _ in range(base.n))
            support = {j: tuple(rng.randint(-4, 4) for _ in range(base.n))
                       for j in range(-2, 2)}
            yb = badic.normalize(base.element(support), 10)
            p = PointKA(real, yb)
            z, d = lattice_nearest(p)
            assert z.has_nonnegative_support()          # z in Z^n[A]
            assert d.at_most(2)


def test_fundamental_reduce(base2d):
    rng = random.Random(63)
    for _ in range(25):
        real = tuple(Fraction(rng.randint(-30, 30), 11) for _ in range(2))
        support = {j: tuple(rng.randint(-4, 4) for _ in range(2))
                   for j in range(-2, 2)}
        yb = badic.normalize(base2d.element(support), 10)
        p = PointKA(real, yb)
        reduced, z = fundamental_reduce(p)
        assert all(0 <= x < 1 for x in reduced.real_part)
        assert reduced.badic_part.valuation is None \
            or reduced.badic_part.valuation >= 0
        # congruence: p - reduced = phi(z) on the real factor
        diff = [a - b for a, b in zip(p.real_part, reduced.real_part)]
        assert tuple(diff) == tuple(Fraction(x) for x in z.value)
