"""The product space R^n x Z^n((B)): points, metrics and lattice geometry.

Real coordinates stay exact rationals end to end; doubles appear only in
interval endpoints and exports.  The contraction metric ell uses the series
norm sum_k rho^k ||B^k x|| evaluated as an interval with a certified
geometric tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import badic
from .badic import Bound, TruncatedBAdic
from .errors import PreconditionError
from .exact import QMatrix, min_eigenvalue_lower_bound
from .zmodule import Base, ModuleElement


@dataclass(frozen=True)
class PointKA:
    real_part: tuple            # exact rational vector
    badic_part: TruncatedBAdic

    def __sub__(self, other):
        return PointKA(tuple(a - b for a, b in
                             zip(self.real_part, other.real_part)),
                       badic.add(self.badic_part, other.badic_part,
                                 negate_right=True))

    def real_floats(self):
        return [float(x) for x in self.real_part]


def phi(z: ModuleElement, depth) -> PointKA:
    """Diagonal embedding x -> (x, x)."""
    return PointKA(tuple(z.value), badic.normalize(z, depth))


@dataclass(frozen=True)
class Dist:
    """max(Euclidean, B-adic) distance with exact ingredients."""
    real_sq: Fraction           # squared Euclidean distance, exact
    badic: Bound

    def float_value(self):
        return max(math.sqrt(float(self.real_sq)), float(self.badic.value))

    def at_least(self, r):
        """Certified: the distance is >= r."""
        r = Fraction(r)
        if self.real_sq >= r * r:
            return True
        return self.badic.exact and self.badic.value >= r

    def at_most(self, r):
        """Certified: the distance is <= r (B-adic part uses its bound)."""
        r = Fraction(r)
        return self.real_sq <= r * r and self.badic.value <= r

    def is_zero(self):
        return self.real_sq == 0 and self.badic.value == 0 and self.badic.exact


def dist(p: PointKA, q: PointKA) -> Dist:
    real_sq = sum((a - b) ** 2 for a, b in zip(p.real_part, q.real_part))
    return Dist(real_sq, badic.metric(p.badic_part, q.badic_part))


class MetricContext:
    """Data for the contraction metric ell with factor kappa < 1."""

    def __init__(self, base: Base, rho=None, series_tolerance=1e-12,
                 block_cap=64):
        self.base = base
        sigma = min_eigenvalue_lower_bound(base.A)
        if rho is None:
            rho = (1 + sigma) / 2
        rho = Fraction(rho)
        if not 1 < rho < sigma:
            raise PreconditionError(
                f"rho must satisfy 1 < rho < {sigma} (certified bound)")
        self.rho = rho
        self.sigma = sigma
        self.kappa = max(1 / rho, Fraction(1, base.counts.b))
        self.series_tolerance = series_tolerance
        # find a block length J with rho^J * ||B^J||_F < 1/2 so the geometric
        # tail decays quickly
        j = 1
        best = None
        while True:
            fro_sq = sum(x * x for row in base.B.power(j).entries for x in row)
            c_sq = rho ** (2 * j) * fro_sq
            if c_sq < 1:
                best = (j, c_sq)
                if c_sq < Fraction(1, 4):
                    break
            j += 1
            if j > block_cap:
                if best is None:
                    raise PreconditionError(
                        "series norm does not contract; rho too close to bound")
                j, c_sq = best
                break
        j, c_sq = best if best else (j, c_sq)
        self.block_len = j
        self.block_factor = math.sqrt(float(c_sq))

    def series_norm(self, vec):
        """Interval (lo, hi) containing ||vec||' = sum rho^k ||B^k vec||."""
        vec = [Fraction(x) for x in vec]
        if all(x == 0 for x in vec):
            return 0.0, 0.0
        j = self.block_len
        c = self.block_factor
        block_sum = 0.0
        total = 0.0
        cur = vec
        rho = float(self.rho)
        blocks = 1
        # accumulate whole blocks until the tail bound is small enough
        k = 0
        first_block = None
        while True:
            block = 0.0
            for _ in range(j):
                norm = math.sqrt(sum(float(x) * float(x) for x in cur))
                block += (rho ** k) * norm
                cur = self.base.B.matvec(cur)
                k += 1
            total += block
            if first_block is None:
                first_block = block
            tail = (c ** blocks) / (1 - c) * first_block
            if tail <= self.series_tolerance * max(total, 1.0) \
                    or blocks > 200:
                lo = total * (1 - 1e-9)
                hi = (total + tail) * (1 + 1e-9)
                return lo, hi
            blocks += 1

    def ell_dist(self, p: PointKA, q: PointKA):
        """Interval (lo, hi) for max(||x-x'||', d_B(y, y'))."""
        delta = [a - b for a, b in zip(p.real_part, q.real_part)]
        lo, hi = self.series_norm(delta)
        db = badic.metric(p.badic_part, q.badic_part)
        dbv = float(db.value)
        if db.exact:
            return max(lo, dbv), max(hi, dbv)
        return lo, max(hi, dbv)


def lattice_min_distance_bound(base: Base) -> Fraction:
    """r = 1/m^K: certified minimum distance of distinct points of the
    embedded lattice, m the denominator lcm of A and K the A-side depth."""
    k = base.kernel_lattice("A").stabilization_depth
    return Fraction(1, base.m ** k)


def lattice_nearest(p: PointKA):
    """z in Z^n[A] with dist(p, phi(z)) <= 2, by the constructive rounding."""
    base = p.badic_part.context.base
    zf = badic.frac_part(p.badic_part)
    offset = [x - v for x, v in zip(p.real_part, zf.value)]
    rounded = [int(Fraction(x).__round__()) for x in offset]
    z = zf + base.from_vector(rounded)
    d = dist(p, phi(z, p.badic_part.depth))
    return z, d


def fundamental_reduce(p: PointKA):
    """Translate by the embedded lattice into [0,1)^n x (valuation >= 0)."""
    base = p.badic_part.context.base
    zf = badic.frac_part(p.badic_part)
    offset = [x - v for x, v in zip(p.real_part, zf.value)]
    floors = [int(math.floor(x)) for x in offset]
    z = zf + base.from_vector(floors)
    reduced = p - phi(z, p.badic_part.depth)
    return reduced, z
