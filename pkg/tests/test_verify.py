"""Certificate verification: deterministic counts on named systems, inward
boundary perturbation, report structure."""

import math
from fractions import Fraction

import pytest

from oscillate.bounds import assemble_bound
from oscillate.verify import (
    RegionVerification,
    ZeroCountReport,
    _shrunk_plan,
    _witness_seed,
    verify_certificate,
)
from tests.conftest import euler_system


@pytest.fixture(scope="module")
def euler5_cert():
    return assemble_bound(euler_system(5), (1, -1))


class TestVerifyCertificate:
    def test_euler_dominated(self, euler5_cert):
        report = verify_certificate(euler5_cert, tol=1e-8)
        assert report.dominated
        assert [r.name for r in report.regions] == ["main", "disk-0", "disk-1"]
        for r in report.regions:
            assert r.numeric_count <= r.structural_bound
            assert r.winding_margin < 1e-5
            assert r.branch_defect < 1e-6
            assert 0 <= r.perturbation_step <= 8

    def test_determinism(self, euler5_cert):
        a = verify_certificate(euler5_cert, tol=1e-8)
        b = verify_certificate(euler5_cert, tol=1e-8)
        assert [r.numeric_count for r in a.regions] == [
            r.numeric_count for r in b.regions
        ]

    def test_counts_match_solution_structure(self, euler5_cert):
        # the witness solution is a combination c1 phi^5 + c2 with phi a
        # Moebius map, so no single region can hold more than five zeros
        report = verify_certificate(euler5_cert, tol=1e-8)
        for r in report.regions:
            assert r.numeric_count <= 5


class TestWitnessSeed:
    def test_deterministic(self):
        a = _witness_seed(3, [1, 2, 3], 2)
        b = _witness_seed(3, [1, 2, 3], 2)
        assert a == b

    def test_pairing_nonzero(self):
        for k in range(6):
            comb = [1 + 0j, -1 + 0j]
            seed = _witness_seed(2, comb, k)
            pairing = sum(c * s for c, s in zip(comb, seed))
            assert abs(pairing) > 0

    def test_varies_with_step(self):
        assert _witness_seed(2, [1, 1], 0) != _witness_seed(2, [1, 1], 1)


class TestShrunkPlan:
    def test_geometry_moves_inward(self, euler5_cert):
        plan = euler5_cert.plan
        shrunk = _shrunk_plan(plan, 1e-3)
        assert float(shrunk.disk_radius) < float(plan.disk_radius)
        for c0, c1 in zip(plan.circles, shrunk.circles):
            assert c1.rho > c0.rho
        assert shrunk.direction != plan.direction

    def test_segments_still_reach_boundary(self, euler5_cert):
        shrunk = _shrunk_plan(euler5_cert.plan, 1e-3)
        rr = float(shrunk.disk_radius)
        for seg in shrunk.segments:
            assert abs(abs(seg.endpoint) - rr) < 1e-6


class TestReport:
    def test_domination_property(self):
        good = RegionVerification("main", 10, 3, 1e-9, 1e-9, 0)
        bad = RegionVerification("disk-0", 2, 5, 1e-9, 1e-9, 0)
        assert good.dominated and not bad.dominated
        assert not ZeroCountReport((good, bad), 1e-8).dominated
        assert ZeroCountReport((good,), 1e-8).dominated
