"""Scalar reduction: derived operators against closed-form oracles, local
Taylor-series annihilation checks, chart normalization, slope machinery.

The annihilation oracle is test-local: solution derivatives at a point come
from the plain Cauchy-product recurrence on the partial-fraction form of the
system, implemented here in complex floats, independent of the library's
exact reduction.
"""

import math
from fractions import Fraction

import pytest

from oscillate import FuchsianSystem, GaussRat, Matrix, SpherePoint
from oscillate import random_combination, random_system
from oscillate.reduction import (
    derive_scalar,
    log2_enclosure,
    normalize_chart,
    nu_default,
    slope,
    verify_slope_bound,
)
from tests.conftest import euler_system, rotation_system


class TestIndicialOracles:
    def test_rotation_gives_t2_y2_t_y1_y(self, rotation):
        op, trace = derive_scalar(rotation, (1, 0))
        assert op.order == 2 and not trace.degenerate
        coeffs = [p.coeffs for p in op.coefficients]
        # t^2 y'' + t y' + y
        assert coeffs == [
            (GaussRat(0), GaussRat(0), GaussRat(1)),
            (GaussRat(0), GaussRat(1)),
            (GaussRat(1),),
        ]

    @pytest.mark.parametrize("N", [2, 3, 7])
    def test_euler_sum_combination(self, N):
        op, _ = derive_scalar(euler_system(N), (1, 1))
        # t y'' - (N-1) y'
        assert [p.coeffs for p in op.coefficients] == [
            (GaussRat(0), GaussRat(1)),
            (GaussRat(-(N - 1)),),
            (),
        ]

    def test_euler_first_component(self):
        op, _ = derive_scalar(euler_system(3), (1, 0))
        # t y' - 3 y
        assert [p.coeffs for p in op.coefficients] == [
            (GaussRat(0), GaussRat(1)),
            (GaussRat(-3),),
        ]

    def test_degenerate_combination_drops_order(self):
        # y = x_2 is constant for the Euler system: y' = 0, order 1 < n
        op, trace = derive_scalar(euler_system(4), (0, 1))
        assert trace.degenerate and op.order == 1
        assert [p.coeffs for p in op.coefficients] == [(GaussRat(1),), ()]

    def test_rejects_zero_combination(self, euler5):
        with pytest.raises(ValueError):
            derive_scalar(euler5, (0, 0))


def _series_solution(system, comb, t0, seed_vec, order):
    """Taylor coefficients of y = comb . x at t0, x seeded at t0, via the
    partial-fraction recurrence in complex floats."""
    n = system.n
    finite = [
        (complex(p.finite.to_complex()), system.residues[i])
        for i, p in enumerate(system.poles)
        if not p.is_infinite
    ]
    mats = []
    for k in range(order):
        m = [[0j] * n for _ in range(n)]
        for tau, a in finite:
            u = t0 - tau
            w = (-1) ** k / u ** (k + 1)
            for r in range(n):
                for c in range(n):
                    m[r][c] += w * complex(a[r, c].to_complex())
        mats.append(m)
    xs = [list(seed_vec)]
    for k in range(order - 1):
        acc = [0j] * n
        for i in range(k + 1):
            m = mats[i]
            v = xs[k - i]
            for r in range(n):
                acc[r] += sum(m[r][c] * v[c] for c in range(n))
        xs.append([a / (k + 1) for a in acc])
    cf = [complex(c.to_complex()) for c in comb]
    return [sum(cf[i] * x[i] for i in range(n)) for x in xs]


class TestAnnihilation:
    @pytest.mark.parametrize("seed", range(12))
    def test_operator_annihilates_series_solution(self, seed):
        system = random_system(3100 + seed)
        _, system = normalize_chart(system)
        comb = random_combination(seed, system.n)
        op, _ = derive_scalar(system, comb)
        k = op.order
        import random

        rng = random.Random(seed)
        t0 = complex(rng.uniform(-0.4, 0.4), rng.uniform(1.5, 2.5))
        vec = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(system.n)]
        ys = _series_solution(system, comb, t0, vec, k + 2)
        derivs = [math.factorial(i) * ys[i] for i in range(k + 1)]
        total = 0j
        scale = 0.0
        for j, a in enumerate(op.coefficients):
            term = a.eval_complex(t0) * derivs[k - j]
            total += term
            scale = max(scale, abs(term))
        if scale == 0:
            scale = 1.0
        assert abs(total) / scale < 1e-9


class TestTraceInvariants:
    def test_degrees_and_xi(self, euler5):
        op, trace = derive_scalar(euler5, (1, -1))
        n, m = 2, 2
        for a in op.coefficients:
            assert a.degree() <= n * n * m
        for k, row in enumerate(trace.alpha):
            for p in row:
                assert p.degree() <= k * m
        # xi_0 is the combination itself
        xi0 = trace.xi(0)
        assert [x.num.coeffs for x in xi0] == [(GaussRat(1),), (GaussRat(-1),)]

    def test_leading_coefficient_monic(self, euler5):
        op, _ = derive_scalar(euler5, (1, -1))
        assert op.coefficients[0].leading() == GaussRat(1)


class TestNormalizeChart:
    def test_identity_when_already_separated(self):
        a = Matrix.from_rows([[1, 0], [0, -1]])
        sysm = FuchsianSystem(2, (SpherePoint.at(0), SpherePoint.at(2)), (a, -a))
        chart, moved = normalize_chart(sysm)
        assert chart.is_identity() and moved is sysm or moved.poles == sysm.poles

    def test_moves_infinite_pole(self, euler5):
        chart, moved = normalize_chart(euler5)
        assert all(not p.is_infinite for p in moved.poles)
        assert moved.residues == euler5.residues

    def test_separates_clustered_poles(self):
        a = Matrix.from_rows([[1, 0], [0, -1]])
        sysm = FuchsianSystem(
            2,
            (SpherePoint.at(0), SpherePoint.at(GaussRat(Fraction(1, 10)))),
            (a, -a),
        )
        chart, moved = normalize_chart(sysm)
        assert not chart.is_identity()
        d2 = (moved.poles[0].finite - moved.poles[1].finite).norm2()
        assert d2 >= 1

    @pytest.mark.parametrize("seed", range(8))
    def test_random_systems_pairwise_separated(self, seed):
        sysm = random_system(3300 + seed)
        _, moved = normalize_chart(sysm)
        pts = [p.finite for p in moved.poles]
        assert all(p is not None for p in pts)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                assert (pts[i] - pts[j]).norm2() >= 1


class TestSlope:
    def test_euler_slope_value(self):
        op, _ = derive_scalar(euler_system(3), (1, 0))
        s = slope(op)  # |a_1| / |a_0| = 3 / |t|
        assert s.contains(Fraction(3))

    def test_nu_default_formula(self):
        assert nu_default(2, 2) == Fraction(2**32)
        assert nu_default(1, 2, c=1) == Fraction(4)

    def test_log2_enclosure(self):
        enc = log2_enclosure(Fraction(8))
        assert enc.lo <= 3 <= enc.hi and enc.width() < Fraction(1, 10**6)
        enc = log2_enclosure(Fraction(1, 3))
        assert float(enc.lo) <= math.log2(1 / 3) <= float(enc.hi)

    def test_verify_slope_bound_on_euler(self, euler5):
        from oscillate.model import r_flat

        op, _ = derive_scalar(euler5, (1, -1))
        assert verify_slope_bound(op, r_flat(euler5), nu_default(2, 2))
