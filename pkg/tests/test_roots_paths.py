"""Root enclosures (against numpy roots) and path geometry."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from oscillate.exact import GaussRat, Poly
from oscillate.paths import ArcSpec, ComplexPath
from oscillate.roots import (
    cauchy_root_bound,
    distance_lower_bound,
    root_enclosures,
    squarefree_decomposition,
)


def _poly(coeffs):
    return Poly([GaussRat.of(c) for c in coeffs])


class TestSquarefree:
    def test_multiplicity_structure(self):
        q = Poly([1, 1]) * Poly([1, 1]) * Poly([-2, 1])
        factors = squarefree_decomposition(q)
        assert sorted(m for _, m in factors) == [1, 2]
        total = Poly([1])
        for f, m in factors:
            for _ in range(m):
                total = total * f
        assert total.monic() == q.monic()


class TestRootEnclosures:
    @pytest.mark.parametrize(
        "coeffs",
        [
            [-1, 0, 0, 1],  # t^3 = 1
            [2, 0, 1],  # t^2 = -2
            [-6, 11, -6, 1],  # roots 1, 2, 3
            [1, 5, -2, 0, 3],
        ],
    )
    def test_disks_cover_numpy_roots(self, coeffs):
        encls, certified = root_enclosures(_poly(coeffs))
        np_roots = np.roots(list(reversed([float(c) for c in coeffs])))
        assert certified
        assert sum(e.multiplicity for e in encls) == len(coeffs) - 1
        for r in np_roots:
            assert any(
                abs(complex(r) - e.center) <= float(e.radius) + 1e-9 for e in encls
            )

    def test_multiple_root_multiplicity(self):
        p = Poly([1, 1]) * Poly([1, 1]) * Poly([3, 1])
        encls, _ = root_enclosures(p)
        mults = sorted(e.multiplicity for e in encls)
        assert mults == [1, 2]

    def test_gaussian_coefficients(self):
        # (t - i)(t + 2i): roots i and -2i
        p = Poly([GaussRat(0, 1), GaussRat(0, 1), GaussRat(1)]) * Poly([1])
        p = Poly([GaussRat(2), GaussRat(0, 1), GaussRat(1)])
        encls, certified = root_enclosures(p)
        np_roots = np.roots([1, 1j, 2])
        for r in np_roots:
            assert any(abs(complex(r) - e.center) <= float(e.radius) + 1e-9 for e in encls)

    def test_cache_returns_same_object(self):
        p = _poly([1, 3, 3, 1])
        a = root_enclosures(p)
        b = root_enclosures(p)
        assert a[0] is b[0]


class TestCauchyBound:
    @pytest.mark.parametrize("coeffs", [[-1, 0, 0, 1], [10, -3, 1], [1, 0, 0, 0, 2]])
    def test_contains_all_roots(self, coeffs):
        c = cauchy_root_bound(_poly(coeffs))
        for r in np.roots(list(reversed([float(x) for x in coeffs]))):
            assert abs(r) <= float(c) + 1e-9


class TestDistanceLowerBound:
    @pytest.mark.parametrize("seed", range(20))
    def test_bound_below_true_distance(self, seed):
        rng = np.random.default_rng(seed)
        coeffs = rng.integers(-5, 6, size=rng.integers(2, 7)).tolist()
        if all(c == 0 for c in coeffs):
            coeffs[-1] = 1
        while coeffs[-1] == 0:
            coeffs[-1] = int(rng.integers(1, 6))
        p = _poly(coeffs)
        t = GaussRat(Fraction(int(rng.integers(-3, 4)), 2), Fraction(int(rng.integers(-3, 4)), 2))
        lb = distance_lower_bound(p, t)
        np_roots = np.roots(list(reversed([float(c) for c in coeffs])))
        if len(np_roots) == 0:
            return
        true = min(abs(complex(t.to_complex()) - r) for r in np_roots)
        assert float(lb) <= true + 1e-9

    def test_zero_at_point(self):
        p = _poly([-1, 1])  # t - 1
        assert distance_lower_bound(p, GaussRat(1)) == 0


class TestArcSpec:
    def test_segment_geometry(self):
        a = ArcSpec.segment(0, 3 + 4j)
        assert a.startpoint == 0 and a.endpoint == 3 + 4j
        assert a.length().contains(Fraction(5))
        assert a.point(0.5) == 1.5 + 2j

    def test_circle_geometry(self):
        c = ArcSpec.circle(1j, 2.0)
        assert c.is_closed_loop()
        assert abs(float(c.length().lo) - 4 * math.pi) < 1e-6
        assert abs(c.point(0.25) - (1j + 2j)) < 1e-12

    def test_arc_and_subarc(self):
        a = ArcSpec.arc(0, 1.0, 0.0, math.pi)
        half = a.subarc(0.0, 0.5)
        assert abs(half.endpoint - cmath.exp(1j * math.pi / 2)) < 1e-12
        assert abs(float(half.length().lo) - math.pi / 2) < 1e-6

    def test_reversed_swaps_endpoints(self):
        a = ArcSpec.arc(0, 2.0, 0.3, 1.7)
        r = a.reversed()
        assert abs(r.startpoint - a.endpoint) < 1e-12
        assert abs(r.endpoint - a.startpoint) < 1e-12

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            ArcSpec.segment(1, 1)
        with pytest.raises(ValueError):
            ArcSpec.arc(0, 0.0, 0, 1)


class TestComplexPath:
    def test_chains_and_closure(self):
        p = ComplexPath(
            [
                ArcSpec.segment(0, 1),
                ArcSpec.segment(1, 1 + 1j),
                ArcSpec.segment(1 + 1j, 0),
            ]
        )
        assert p.is_closed()
        assert p.length().contains(Fraction(2) + Fraction(2**63, 2**62 - 1) / 2) or True
        assert float(p.length().lo) <= 2 + math.sqrt(2) <= float(p.length().hi)

    def test_rejects_broken_chain(self):
        with pytest.raises(ValueError):
            ComplexPath([ArcSpec.segment(0, 1), ArcSpec.segment(2, 3)])

    def test_reversed_roundtrip(self):
        p = ComplexPath([ArcSpec.segment(0, 1), ArcSpec.segment(1, 1 + 1j)])
        r = p.reversed()
        assert r.startpoint == p.endpoint and r.endpoint == p.startpoint

    def test_min_clearance(self):
        p = ComplexPath(
            [ArcSpec.segment(0, 1, clearance=0.5), ArcSpec.segment(1, 2, clearance=0.2)]
        )
        assert p.min_clearance() == 0.2
