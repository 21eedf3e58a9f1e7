"""Module arithmetic, kernel lattices, residues, digit systems, expansions.

Oracles: brute-force membership of Z ∩ M Z[M] via divisibility for the 1-d
base, exhaustive coset checks for residue systems, and exact replay of the
per-step expansion identity x = d + A x'.
"""

import random
from fractions import Fraction

import pytest

from ratile.errors import PreconditionError
from ratile.exact import QMatrix
from ratile.zmodule import (Base, DigitSystem, ModuleElement, expand,
                            expand_step, full_rank_residues)


@pytest.fixture(scope="module")
def base1d():
    return Base(QMatrix.from_strings([["3/2"]]))


@pytest.fixture(scope="module")
def base2d():
    return Base(QMatrix.from_strings([["2", "1"], ["0", "5/3"]]))


PAPER_D = [(i, y) for i in (0, 1) for y in (0, 1, 2, 3, 9)]
PAPER_DT = [(i, y) for i in (0, 2) for y in (0, 1, 2, 3, 9)]


def test_base_rejects_bad_matrices():
    with pytest.raises(PreconditionError):
        Base(QMatrix([[1, 2]]))
    with pytest.raises(PreconditionError):
        Base(QMatrix([[0]]))
    with pytest.raises(PreconditionError):
        Base(QMatrix([[1]]))


def test_kernel_lattices_1d(base1d):
    na = base1d.kernel_lattice("A")
    nb = base1d.kernel_lattice("B")
    assert na.lattice.basis == ((3,),)
    assert nb.lattice.basis == ((2,),)
    assert na.index == 3 and nb.index == 2
    # oracle: z ∈ Z ∩ (3/2) Z[3/2] iff 3 | z, because z/(3/2) must land in
    # Z[1/2] and 2-powers cannot produce the factor 3
    for z in range(-15, 16):
        assert na.lattice.contains([z]) == (z % 3 == 0)
        assert nb.lattice.contains([z]) == (z % 2 == 0)


def test_kernel_lattices_2d_indices(base2d):
    assert base2d.kernel_lattice("A").index == 10 == base2d.counts.a
    assert base2d.kernel_lattice("B").index == 3 == base2d.counts.b
    assert base2d.m == 3


def test_residues_are_transversals(base1d, base2d):
    for base, side in ((base1d, "A"), (base1d, "B"),
                       (base2d, "A"), (base2d, "B")):
        res = base.residues(side)
        kernel = base.kernel_lattice(side)
        assert len(res) == kernel.index
        assert (0,) * base.n in res.representatives
        # distinct cosets: no two representatives differ by a kernel vector
        reps = res.representatives
        for i, r1 in enumerate(reps):
            for r2 in reps[i + 1:]:
                diff = [a - b for a, b in zip(r1, r2)]
                assert not kernel.lattice.contains(diff)
        # every small vector reduces to its own coset representative
        rng = random.Random(41)
        for _ in range(30):
            v = [rng.randint(-8, 8) for _ in range(base.n)]
            rep = res.representative(v)
            diff = [a - b for a, b in zip(v, rep)]
            assert kernel.lattice.contains(diff)


def test_residues_1d_worked_values(base1d):
    assert sorted(base1d.residues("B").representatives) == [(0,), (1,)]
    a_reps = sorted(v[0] % 3 for v in base1d.residues("A").representatives)
    assert a_reps == [0, 1, 2]


def test_residues_2d_b_side_cosets(base2d):
    res = base2d.residues("B")
    kernel = base2d.kernel_lattice("B").lattice
    for target in [(0, 0), (0, 1), (0, 2)]:
        rep = res.representative(target)
        assert kernel.contains([a - b for a, b in zip(target, rep)])


def test_decompose_replays_exactly(base2d):
    rng = random.Random(42)
    kernel = base2d.kernel_lattice("A")
    for _ in range(40):
        coeffs = [rng.randint(-6, 6) for _ in range(2)]
        vec = [sum(kernel.lattice.basis[j][i] * coeffs[j] for j in range(2))
               for i in range(2)]
        parts = base2d.decompose(vec, "A")
        acc = [Fraction(0), Fraction(0)]
        for i, u in enumerate(parts, start=1):
            img = base2d.A.power(i).matvec(u)
            acc = [x + y for x, y in zip(acc, img)]
        assert tuple(acc) == tuple(Fraction(x) for x in vec)


def test_module_element_value_identity(base2d):
    # two spellings of the same element compare equal
    e1 = base2d.element({1: (1, 0)})             # A*(1,0) = (2,0)
    e2 = base2d.element({0: (2, 0)})
    assert e1 == e2
    assert hash(e1) == hash(e2)
    e3 = base2d.element({-1: (0, 3)})            # B*(0,3) = (-9/10*... )
    assert e3.value == base2d.B.matvec([0, 3])
    assert (e1 + e3 - e1) == e3
    assert e1.shift(2).value == base2d.A.power(2).matvec(e1.value)


def test_digit_system_classification(base2d):
    d_std = DigitSystem(base2d, [base2d.from_vector(v) for v in PAPER_D])
    assert d_std.standard
    d_non = DigitSystem(base2d, [base2d.from_vector(v) for v in PAPER_DT])
    assert not d_non.standard
    assert DigitSystem.standard_from_residues(base2d).standard


def test_digit_system_preconditions(base2d):
    with pytest.raises(PreconditionError):
        DigitSystem(base2d, [base2d.zero_element()])     # wrong size
    digits = [base2d.from_vector(v) for v in PAPER_D[1:]]
    digits.append(base2d.from_vector((7, 7)))            # no zero digit
    with pytest.raises(PreconditionError):
        DigitSystem(base2d, digits)


def test_expand_step_identity(base2d):
    system = DigitSystem(base2d, [base2d.from_vector(v) for v in PAPER_D])
    rng = random.Random(43)
    for _ in range(50):
        support = {j: (rng.randint(-10, 10), rng.randint(-10, 10))
                   for j in range(rng.randint(1, 3))}
        x = base2d.element(support)
        options = expand_step(x, system)
        assert len(options) == 1                         # standard system
        d, xp = options[0]
        lhs = tuple(Fraction(v) for v in x.value)
        rhs = tuple(a + b for a, b in
                    zip(d.value, base2d.A.matvec(xp.value)))
        assert lhs == rhs
        assert xp.has_nonnegative_support()


def test_expand_1d_worked_value(base1d):
    system = DigitSystem.standard_from_residues(base1d)
    result = expand(base1d.from_vector([4]), system)
    assert result.status in ("finite", "eventually-periodic")
    # replay: 4 = sum A^j d_j exactly when finite
    if result.status == "finite":
        acc = Fraction(0)
        for j, d in enumerate(result.digits):
            acc += base1d.A.power(j).matvec(d.value)[0]
        assert acc == 4
    else:
        assert result.period > 0


def test_expand_policies(base2d):
    # duplicate digits make the step branch; detect-branching must stop
    digits = [base2d.from_vector(v) for v in PAPER_D[:-1]]
    digits.append(base2d.from_vector(PAPER_D[1]))
    system = DigitSystem(base2d, digits)
    x = base2d.from_vector(PAPER_D[1])
    result = expand(x, system, policy="detect-branching")
    assert result.status == "branching"


def test_full_rank_residues_2d(base2d):
    res, work, power = full_rank_residues(base2d)
    n = base2d.n
    reps = [r for r in res.representatives if any(r)]
    mat = QMatrix([[Fraction(reps[j][i]) for j in range(n)]
                   for i in range(n)])
    assert mat.det() != 0
    plain = work.residues("B")
    assert set(res._by_key) == set(plain._by_key)


def test_full_rank_residues_degenerate():
    base = Base(QMatrix.from_strings([["2", "1/2"], ["0", "3"]]))
    with pytest.raises(PreconditionError):
        full_rank_residues(base)
