"""Certified analytic continuation: fundamental matrices, argument variation
and argument-principle counts against closed-form solutions.

The oracles are elementary: for the diagonal system x' = diag(N,0)/t x the
fundamental matrix is diag((t1/t0)^N, 1); for the rotation generator it is
the rotation by ln(t1/t0)."""

import cmath
import math

import pytest

from oscillate.model import FuchsianSystem
from oscillate.numerics import (
    RationalSystem,
    ZeroOnArc,
    ZeroOnBoundary,
    as_rational_system,
    count_zeros_region,
    integrate,
    monodromy,
    var_arg_measure,
)
from oscillate.paths import ArcSpec, ComplexPath
from oscillate.reduction import derive_scalar
from tests.conftest import euler_system, rotation_system


def _seg(a, b):
    return ComplexPath.single(ArcSpec.segment(a, b))


class TestIntegrate:
    def test_euler_segment(self, euler5):
        frame = integrate(euler5, _seg(1, 2), tol=1e-12)
        mat = frame.to_complex()
        assert abs(mat[0][0] - 32) < 1e-9
        assert abs(mat[1][1] - 1) < 1e-12
        assert abs(mat[0][1]) < 1e-12 and abs(mat[1][0]) < 1e-12

    def test_rotation_segment(self, rotation):
        frame = integrate(rotation, _seg(1, 2), tol=1e-12)
        mat = frame.to_complex()
        a = math.log(2)
        expected = [[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]
        for i in range(2):
            for j in range(2):
                assert abs(mat[i][j] - expected[i][j]) < 1e-9

    def test_path_reversal_is_inverse(self, euler5):
        path = ComplexPath(
            [ArcSpec.segment(1, 1 + 1j), ArcSpec.arc(0, abs(1 + 1j), math.pi / 4, math.pi / 2)]
        )
        fwd = integrate(euler5, path, tol=1e-12).to_complex()
        back = integrate(euler5, path.reversed(), tol=1e-12).to_complex()
        prod = [
            [sum(fwd[i][k] * back[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)
        ]
        # continuation forward then back composes to the identity
        assert abs(prod[0][0] * back[0][0] + prod[0][1] * back[1][0] - back[0][0]) < 1e-6
        comp = [
            [sum(back[i][k] * fwd[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)
        ]
        for i in range(2):
            for j in range(2):
                assert abs(comp[i][j] - (1 if i == j else 0)) < 1e-8

    def test_companion_system_of_operator(self):
        op, _ = derive_scalar(euler_system(3), (1, 0))  # t y' - 3 y
        frame = integrate(op, _seg(1, 2), tol=1e-12)
        assert abs(frame.to_complex()[0][0] - 8) < 1e-9  # y = t^3

    def test_as_rational_system_types(self, euler5):
        rs = as_rational_system(euler5)
        assert isinstance(rs, RationalSystem) and rs.dim == 2
        assert as_rational_system(rs) is rs
        with pytest.raises(TypeError):
            as_rational_system("nope")


class TestVarArg:
    def test_power_function_winding(self, euler5):
        # y = x_1 = t^5 around the unit circle: variation exactly 10 pi
        circle = ArcSpec.circle(0, 1.0, clearance=1.0)
        res = var_arg_measure(euler5, (1, 0), circle, tol=1e-9, combination=(1, 0))
        assert abs(res.variation - 10 * math.pi) < 1e-7

    def test_open_arc_half_turn(self, euler5):
        arc = ArcSpec.arc(0, 1.0, 0.0, math.pi, clearance=1.0)
        res = var_arg_measure(euler5, (1, 0), arc, tol=1e-9, combination=(1, 0))
        assert abs(res.variation - 5 * math.pi) < 1e-7

    def test_zero_on_arc_detected(self, euler5):
        # y = t^5 - 1 vanishes at t = 1, the start of the unit circle
        circle = ArcSpec.circle(0, 1.0, clearance=0.5)
        with pytest.raises(ZeroOnArc):
            var_arg_measure(euler5, (1, 1), circle, tol=1e-9, combination=(1, -1))


class TestCountZeros:
    def test_five_roots_inside(self, euler5):
        # seed (1, 1/2) at the start point t = 2 fixes x_1 = t^5/32, x_2 = 1/2:
        # y = t^5/32 - 1/2 has five roots at |t| = 16^(1/5) < 2
        boundary = ComplexPath.circle_loop(0, 2.0, clearance=1.0)
        rc = count_zeros_region(
            euler5, boundary, tol=1e-9, seed=(1, 0.5), combination=(1, -1)
        )
        assert rc.zeros == 5
        assert rc.margin < 1e-6 and rc.closed_defect < 1e-8

    def test_no_roots_in_small_disk(self, euler5):
        # seed (1, 2) at t = 1/2: x_1 = (2t)^5, y = (2t)^5 - 2, roots at
        # |t| = 2^(-4/5) > 1/2
        boundary = ComplexPath.circle_loop(0, 0.5, clearance=0.2)
        rc = count_zeros_region(
            euler5, boundary, tol=1e-9, seed=(1, 2), combination=(1, -1)
        )
        assert rc.zeros == 0

    def test_additivity_annulus(self, euler5):
        # one global solution on both circles: x_1 = t^5/32, x_2 = 1/2
        big = count_zeros_region(
            euler5, ComplexPath.circle_loop(0, 2.0, clearance=1.0),
            tol=1e-9, seed=(1, 0.5), combination=(1, -1),
        )
        small = count_zeros_region(
            euler5, ComplexPath.circle_loop(0, 0.5, clearance=0.2),
            tol=1e-9, seed=(0.5**5 / 32, 0.5), combination=(1, -1),
        )
        assert big.zeros == 5 and small.zeros == 0
        assert big.zeros - small.zeros == 5

    def test_open_boundary_rejected(self, euler5):
        with pytest.raises(ValueError):
            count_zeros_region(euler5, _seg(1, 2))


class TestMonodromy:
    def test_euler_unit_monodromy(self, euler5):
        loop = ComplexPath.circle_loop(0, 1.0, clearance=1.0)
        data = monodromy(euler5, loop, tol=1e-9)
        assert data.all_unit()
        for mu in data.eigenvalues:
            assert abs(abs(mu) - 1) < 1e-7

    def test_rotation_non_unit(self, rotation):
        loop = ComplexPath.circle_loop(0, 1.0, clearance=1.0)
        data = monodromy(rotation, loop, tol=1e-9)
        mags = sorted(abs(mu) for mu in data.eigenvalues)
        assert abs(mags[0] - math.exp(-2 * math.pi)) / math.exp(-2 * math.pi) < 1e-6
        assert abs(mags[1] - math.exp(2 * math.pi)) / math.exp(2 * math.pi) < 1e-6
        assert data.unit_flags == ["non-unit", "non-unit"]

    def test_open_loop_rejected(self, euler5):
        with pytest.raises(ValueError):
            monodromy(euler5, _seg(1, 2))
