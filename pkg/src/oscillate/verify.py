"""Numeric verification of a bound certificate: per-region zero counts by
the argument principle, compared against the structural bounds.

Region boundaries are perturbed inward (shrinking the region) when a zero of
the continued solution sits on them; a count over a shrunk region is still
validly compared against the structural bound of the enclosing region.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import random

from .bounds import BoundCertificate, CircleSlit, SlitPlan
from .numerics import (
    ToleranceUnreachable,
    ZeroOnArc,
    ZeroOnBoundary,
    count_zeros_region,
)
from .paths import ArcSpec, ComplexPath

_MAX_PERTURB = 8


@dataclass(frozen=True)
class RegionVerification:
    name: str
    structural_bound: int
    numeric_count: int
    winding_margin: float
    branch_defect: float
    perturbation_step: int  # 0 = original boundary

    @property
    def dominated(self) -> bool:
        return self.numeric_count <= self.structural_bound


@dataclass(frozen=True)
class ZeroCountReport:
    regions: tuple[RegionVerification, ...]
    tolerance: float

    @property
    def dominated(self) -> bool:
        return all(r.dominated for r in self.regions)


def _shrunk_plan(plan: SlitPlan, delta: float) -> SlitPlan:
    """Outer circle pulled in and pole circles pushed out by delta: the cut
    region shrinks, slits rebuilt along the same direction."""
    rr = float(plan.disk_radius) - delta
    direction = plan.direction + delta  # also rotates slits off any boundary zero
    circles = tuple(
        CircleSlit(c.pole, c.rho + delta, max(c.clearance - delta, 1e-12))
        for c in plan.circles
    )
    e = cmath.exp(1j * direction)
    segments = []
    for c in circles:
        b_ = (c.pole * e.conjugate()).real
        disc = b_ * b_ - (abs(c.pole) ** 2 - rr * rr)
        s_max = -b_ + math.sqrt(max(disc, 0.0))
        segments.append(
            ArcSpec.segment(c.pole + c.rho * e, c.pole + s_max * e, c.clearance)
        )
    from fractions import Fraction

    return SlitPlan(
        disk_radius=Fraction(rr).limit_denominator(10**9),
        circles=circles,
        segments=tuple(segments),
        direction=direction,
        clearance=plan.clearance,
        degree=plan.degree,
    )


def _witness_seed(n: int, comb, k: int) -> list[complex]:
    """Generic initial vector for the continued solution, varied with the
    perturbation step so zeros of the witness move off the boundary.  The
    pairing with the combination covector is kept away from zero (a seed with
    sum(comb_i * seed_i) = 0 would vanish exactly at the path start point)."""
    rng = random.Random(0xA51C ^ (k * 0x9E37))
    while True:
        seed = [
            complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) for _ in range(n)
        ]
        pairing = sum(c * s for c, s in zip(comb, seed))
        scale = max(abs(s) for s in seed)
        if abs(pairing) > 0.05 * scale * max(abs(c) for c in comb):
            return seed


def _count_with_perturbation(build_path, system, comb, tol):
    last = None
    for k in range(_MAX_PERTURB + 1):
        seed = _witness_seed(system.n, comb, k)
        try:
            rc = count_zeros_region(system, build_path(k), tol, seed=seed, combination=comb)
            return rc, k
        except (ZeroOnArc, ZeroOnBoundary) as exc:
            last = exc
    raise ZeroOnBoundary(f"all perturbations failed: {last}")


def verify_certificate(cert: BoundCertificate, tol: float = 1e-8) -> ZeroCountReport:
    system = cert.system
    comb = [c.to_complex() for c in cert.combination]
    plan = cert.plan
    base_clear = max(float(plan.clearance), 1e-6)
    # keep perturbed circles pairwise disjoint and inside the outer circle
    for i, ci in enumerate(plan.circles):
        base_clear = min(
            base_clear,
            (float(plan.disk_radius) - abs(ci.pole) - float(ci.rho)) / 4.0,
        )
        for cj in plan.circles[i + 1 :]:
            gap = abs(ci.pole - cj.pole) - float(ci.rho) - float(cj.rho)
            base_clear = min(base_clear, gap / 4.0)
    base_clear = max(base_clear, 1e-9)
    results = []

    for region in cert.region_bounds:
        if region.kind == "main":

            def build_main(k: int) -> ComplexPath:
                if k == 0:
                    return plan.main_region_path()
                return _shrunk_plan(plan, base_clear * 2.0**-k).main_region_path()

            rc, k = _count_with_perturbation(build_main, system, comb, tol)
        else:
            j = int(region.name.split("-")[1])
            circle = plan.circles[j]

            def build_disk(k: int, j=j, circle=circle) -> ComplexPath:
                shrink = base_clear * 2.0**-k if k else 0.0
                rho = circle.rho - shrink
                inner = rho * (0.125 + (shrink / max(circle.rho, 1e-9)))
                th = plan.direction + shrink
                a = circle.pole + rho * cmath.exp(1j * th)
                b = circle.pole + inner * cmath.exp(1j * th)
                return ComplexPath([
                    ArcSpec.arc(circle.pole, rho, th, th + 2 * math.pi),
                    ArcSpec.segment(a, b),
                    ArcSpec.arc(circle.pole, inner, th, th - 2 * math.pi),
                    ArcSpec.segment(b, a),
                ])

            rc, k = _count_with_perturbation(build_disk, system, comb, tol)
        results.append(
            RegionVerification(
                name=region.name,
                structural_bound=region.bound,
                numeric_count=rc.zeros,
                winding_margin=rc.margin,
                branch_defect=rc.closed_defect,
                perturbation_step=k,
            )
        )
    return ZeroCountReport(tuple(results), tol)
