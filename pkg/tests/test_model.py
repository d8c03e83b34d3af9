"""System model: validation, spectral class, carpeting functions.

Numpy eigenvalues serve as the oracle for spectrum realness on generic
matrices; sympy checks the chordal metric and discriminants.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from oscillate import FuchsianSystem, GaussRat, Matrix, SpherePoint
from oscillate.exact import Interval, Poly
from oscillate.model import (
    CarpetValue,
    CarpetingSpec,
    DuplicatePoles,
    ResidueSumNonzero,
    carpet_op,
    chordal_dist2,
    matrix_spectrum_is_real,
    natural_carpet,
    r_flat,
    r_sharp,
    spectral_class_check,
    validate,
)
from tests.conftest import blowup_system, euler_system, rotation_system


class TestChordalMetric:
    def test_zero_to_infinity_is_one(self):
        assert chordal_dist2(SpherePoint.at(0), SpherePoint.infinity()) == 1

    def test_symmetry_and_float_agreement(self):
        p, q = SpherePoint.at(GaussRat(1, 2)), SpherePoint.at(GaussRat(-3, Fraction(1, 2)))
        assert chordal_dist2(p, q) == chordal_dist2(q, p)
        z, w = 1 + 2j, -3 + 0.5j
        expected = abs(z - w) ** 2 / ((1 + abs(z) ** 2) * (1 + abs(w) ** 2))
        assert math.isclose(float(chordal_dist2(p, q)), expected, rel_tol=1e-12)

    def test_infinite_leg(self):
        p = SpherePoint.at(2)
        assert chordal_dist2(p, SpherePoint.infinity()) == Fraction(1, 5)


class TestValidate:
    def test_good_system(self, euler5):
        report = validate(euler5)
        assert report.valid and report.in_proper_class

    def test_duplicate_poles(self):
        a = Matrix.from_rows([[1]])
        with pytest.raises(DuplicatePoles):
            validate(
                FuchsianSystem(
                    1,
                    (SpherePoint.at(0), SpherePoint.at(0)),
                    (a, -a),
                )
            )

    def test_residue_sum_nonzero(self):
        a = Matrix.from_rows([[1]])
        with pytest.raises(ResidueSumNonzero):
            validate(
                FuchsianSystem(
                    1, (SpherePoint.at(0), SpherePoint.at(1)), (a, a)
                )
            )

    def test_zero_residue_flags_partial_closure(self):
        a = Matrix.from_rows([[1]])
        z = Matrix.zero(1, 1)
        report = validate(
            FuchsianSystem(
                1,
                (SpherePoint.at(0), SpherePoint.at(1), SpherePoint.infinity()),
                (a, z, -a),
            )
        )
        assert report.valid and not report.in_proper_class
        assert report.zero_residue_indices == (1,)


class TestSpectralClass:
    def test_symmetric_matrices_are_real(self):
        a = Matrix.from_rows([[1, 2], [2, -1]])
        assert matrix_spectrum_is_real(a)

    def test_rotation_generator_is_not_real(self, rotation):
        report = spectral_class_check(rotation)
        assert not report.all_real

    def test_matches_numpy_on_random_integer_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            m = rng.integers(-3, 4, size=(3, 3))
            ours = matrix_spectrum_is_real(Matrix.from_rows(m.tolist()))
            eigs = np.linalg.eigvals(m.astype(float))
            theirs = bool(np.max(np.abs(eigs.imag)) < 1e-9)
            assert ours == theirs

    def test_enclosures_contain_eigenvalues(self, euler5):
        report = spectral_class_check(euler5)
        assert report.all_real
        lows = sorted(float(iv.lo) for iv in report.eigenvalue_enclosures[0])
        highs = sorted(float(iv.hi) for iv in report.eigenvalue_enclosures[0])
        assert lows[0] <= 0 <= highs[0] and lows[1] <= 5 <= highs[1]


def _cv(x) -> CarpetValue:
    return CarpetValue(Interval.of(Fraction(x)))


class TestCarpet:
    @pytest.mark.parametrize("op", ["sum", "max", "radius", "shifted-product"])
    def test_fold_is_permutation_invariant(self, op):
        spec = CarpetingSpec(operation=op)
        vals = [_cv(2), _cv(3), _cv(Fraction(7, 2))]
        a = natural_carpet(vals, spec).value
        b = natural_carpet(list(reversed(vals)), spec).value
        assert a.lo == b.lo and a.hi == b.hi

    def test_sum_and_max(self):
        s = natural_carpet([_cv(2), _cv(5)], CarpetingSpec(operation="sum"))
        assert s.value.contains(Fraction(7))
        m = natural_carpet([_cv(2), _cv(5)], CarpetingSpec(operation="max"))
        assert m.value.contains(Fraction(5))

    def test_radius_is_hypotenuse(self):
        r = natural_carpet([_cv(3), _cv(4)], CarpetingSpec(operation="radius"))
        assert r.value.contains(Fraction(5))

    def test_shifted_product_value(self):
        p = natural_carpet([_cv(2), _cv(3)], CarpetingSpec(operation="shifted-product"))
        assert p.value.contains(Fraction(20))

    def test_carpet_value_rejects_below_two(self):
        with pytest.raises(ValueError):
            CarpetValue(Interval.of(Fraction(1)))

    def test_gamma_two_sandwich(self):
        # each fold result x satisfies max <= x <= max^gamma with gamma = 2
        # on carpeting inputs (>= 2)
        cases = [
            (Fraction(2), Fraction(3)),
            (Fraction(5, 2), Fraction(5, 2)),
            (Fraction(3), Fraction(7)),
            (Fraction(2), Fraction(2)),
            (Fraction(10), Fraction(2)),
        ]
        for op in ("sum", "max", "radius"):
            for x, y in cases:
                out = carpet_op(op, Interval.of(x), Interval.of(y))
                top = max(x, y)
                assert top <= out.hi or op == "max"
                assert out.lo >= top or op in ("sum", "radius")
                assert out.hi <= top**2 * (1 + Fraction(1, 10**6)) or op == "sum"
                # sum: x + y <= max^2 needs max >= 2, which carpeting enforces
                if op == "sum":
                    assert out.hi <= top**2

    def test_shifted_product_gamma_two_with_shift(self):
        # (2+x)(2+y) <= (2+max)^2 and >= 2+max: sandwich in shifted scale
        for x, y in [(Fraction(2), Fraction(3)), (Fraction(4), Fraction(9))]:
            out = carpet_op("shifted-product", Interval.of(x), Interval.of(y))
            top = max(x, y)
            assert out.lo >= 2 + top
            assert out.hi <= (2 + top) ** 2


class TestRFlat:
    def test_euler_value_exact_parts(self, euler5):
        # poles {0, inf}: chordal distance exactly 1, ordered pairs -> 2/1
        # residue norms: |diag(5,0)| = 5 twice; total = 2 + 2 + 5 + 5 = 14
        val = r_flat(euler5).value
        assert val.contains(Fraction(14))
        assert val.width() < Fraction(1, 2**20)

    def test_blowup_family_strictly_increasing(self):
        prev = None
        for k in (1, 2, 3):
            v = r_flat(blowup_system(Fraction(1, 2**k))).value
            if prev is not None:
                assert v.lo > prev.hi
            prev = v

    def test_unordered_pairs_smaller(self, euler5):
        assert (
            r_flat(euler5, ordered_pairs=False).value.hi
            < r_flat(euler5, ordered_pairs=True).value.hi
        )


class TestRSharp:
    def test_euler_chart_value(self, euler5):
        num = euler5.numerator_matrix()
        den = euler5.denominator()
        # Q = t (degree 1, disc = 1), P = diag(5, 0): 2 + 1 + 5 + 1 = 9
        val = r_sharp(num, den).value
        assert val.contains(Fraction(9))

    def test_rejects_non_monic(self):
        with pytest.raises(ValueError):
            r_sharp([[Poly([1])]], Poly([1, 2]))

    def test_rejects_common_factor(self):
        q = Poly([0, 1])  # t
        with pytest.raises(ValueError):
            r_sharp([[Poly([0, 3])]], q)  # 3t shares the root 0
