"""Bound engine: lower-bound lemma domination, variation-of-argument bounds
against measured variations, slit-plan geometry, certificate assembly."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from oscillate.bounds import (
    TWO_PI_HI,
    TWO_PI_LO,
    Annulus,
    Constants,
    SpectralClassViolation,
    VarArgBound,
    assemble_bound,
    build_slit_plan,
    lower_bound_away_from_zeros,
    relative_lower_bound,
    var_arg_bound_arc,
    var_arg_bound_small_circle,
)
from oscillate.exact import GaussRat, Poly
from oscillate.numerics import var_arg_measure
from oscillate.paths import ArcSpec
from oscillate.reduction import derive_scalar, normalize_chart
from oscillate.roots import distance_lower_bound
from tests.conftest import euler_system, rotation_system


def _poly(coeffs):
    return Poly([GaussRat.of(c) for c in coeffs])


class TestTwoPi:
    def test_enclosure(self):
        assert float(TWO_PI_LO) < 2 * math.pi < float(TWO_PI_HI)

    def test_turns(self):
        arc = ArcSpec.segment(0, 1)
        assert VarArgBound(arc, Fraction(7), {}).turns() == 2
        assert VarArgBound(arc, Fraction(0), {}).turns() == 0
        with pytest.raises(ValueError):
            VarArgBound(arc, Fraction(-1), {})


class TestLowerBound:
    @pytest.mark.parametrize("seed", range(40))
    def test_dominated_by_true_value(self, seed):
        rng = np.random.default_rng(seed)
        deg = int(rng.integers(1, 7))
        coeffs = [int(c) for c in rng.integers(-4, 5, size=deg + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = 1
        p = _poly(coeffs)
        t = GaussRat(
            Fraction(int(rng.integers(-7, 8)), 4), Fraction(int(rng.integers(-7, 8)), 4)
        )
        R = Fraction(2)
        if t.norm2() > R * R or not p.eval(t):
            return
        lb = lower_bound_away_from_zeros(p, t, R)
        true = abs(p.eval_complex(complex(t.to_complex())))
        assert float(lb) <= true * (1 + 1e-12)

    def test_requires_r_at_least_two(self):
        with pytest.raises(ValueError):
            relative_lower_bound(_poly([1, 1]), Fraction(1, 2), Fraction(1))

    def test_relative_bound_scale_invariant(self):
        p = _poly([1, 0, 1])
        a = relative_lower_bound(p, Fraction(1, 4), Fraction(2))
        b = relative_lower_bound(p * GaussRat(7), Fraction(1, 4), Fraction(2))
        assert a == b


class TestVarArgBounds:
    def test_arc_bound_dominates_measured(self):
        # operator t y' - 5 y (solutions c t^5): measured variation along a
        # quarter of the unit circle is exactly 5 pi / 2
        op, _ = derive_scalar(euler_system(5), (1, 0))
        arc = ArcSpec.arc(0, 1.0, 0.1, 0.1 + math.pi / 2, clearance=1.0)
        clearance = distance_lower_bound(op.a0, GaussRat(1))
        vb = var_arg_bound_arc(op, arc, Fraction(1, 2), Fraction(2))
        measured = var_arg_measure(op, (cmath.exp(0.1j) ** 5,), arc, tol=1e-9)
        assert abs(measured.variation - 5 * math.pi / 2) < 1e-6
        assert Fraction(measured.variation).__abs__() <= vb.bound

    def test_small_circle_bound_positive_and_scaling(self):
        op, _ = derive_scalar(euler_system(5), (1, 0))
        vb = var_arg_bound_small_circle(op, GaussRat(0), Fraction(1, 2), Fraction(2))
        assert vb.bound > 0
        # rho_max is recorded and lies in (0, 1/2]
        rho = Fraction(vb.inputs["rho_max"])
        assert 0 < rho <= Fraction(1, 2)

    def test_zero_clearance_rejected(self):
        op, _ = derive_scalar(euler_system(2), (1, 0))
        arc = ArcSpec.segment(1, 2)
        from oscillate.bounds import ArcTooClose

        with pytest.raises(ArcTooClose):
            var_arg_bound_arc(op, arc, Fraction(0), Fraction(2))


class TestSlitPlan:
    def _plan(self, N=5):
        _, moved = normalize_chart(euler_system(N))
        op, _ = derive_scalar(moved, (1, -1))
        poles = [p.finite for p in moved.poles]
        radius = max(
            Fraction(2),
            max(Fraction(math.ceil(abs(p.to_complex()))) for p in poles) + 1,
        )
        return build_slit_plan(op, poles, radius), poles

    def test_circle_radii_in_band(self):
        plan, poles = self._plan()
        assert len(plan.circles) == len(poles)
        for c in plan.circles:
            assert 0.25 <= c.rho <= 0.5

    def test_segments_reach_outer_boundary(self):
        plan, _ = self._plan()
        rr = float(plan.disk_radius)
        for seg in plan.segments:
            assert abs(abs(seg.endpoint) - rr) < 1e-6

    def test_positive_clearance(self):
        plan, _ = self._plan()
        assert plan.clearance > 0
        assert plan.region_count == len(plan.circles) + 1

    def test_keyhole_boundary_closed(self):
        plan, _ = self._plan()
        path = plan.punctured_disk_boundary(0)
        assert path.is_closed()


class TestAssemble:
    def test_euler_certificate_structure(self, euler5):
        cert = assemble_bound(euler5, (1, -1))
        assert cert.total >= 1
        assert cert.total >= sum(rb.bound for rb in cert.region_bounds) or cert.total == sum(
            rb.bound for rb in cert.region_bounds
        )
        assert len(cert.region_bounds) == cert.plan.region_count
        assert cert.closed_form_holds()
        assert cert.combination == (GaussRat(1), GaussRat(-1))

    def test_spectral_violation_raised(self, rotation):
        with pytest.raises(SpectralClassViolation):
            assemble_bound(rotation, (1, 0))

    def test_determinism(self, euler5):
        a = assemble_bound(euler5, (1, -1))
        b = assemble_bound(euler5, (1, -1))
        assert a.total == b.total
        assert a.plan.direction == b.plan.direction

    def test_constants_dict_recorded(self, euler5):
        cert = assemble_bound(euler5, (1, -1), constants=Constants(c_vp=Fraction(5)))
        assert cert.constants["C_VP"] == "5"


class TestAnnulus:
    def test_radii_order_enforced(self):
        with pytest.raises(ValueError):
            Annulus(0, 2.0, 1.0)
        a = Annulus(1j, 0.25, 1.0)
        assert a.inner == 0.25
