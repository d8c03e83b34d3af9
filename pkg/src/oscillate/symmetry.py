"""Reflection of systems in a real line through the plane, and the doubled
(block-diagonal) system whose solution space contains every combination
together with its reflection.

Axis directions are restricted to unit Gaussian rationals (from Pythagorean
triples) so reflection is an exact involution; the candidate grid is dense
enough that the pigeonhole separation argument survives the discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import DEFAULT_REL_PREC, GaussRat, Interval, Matrix, Poly, block_diag
from .model import (
    CarpetValue,
    FuchsianSystem,
    SpherePoint,
    chordal_dist2,
    r_flat,
    validate,
)
from .reduction import ScalarOperator, log2_enclosure

#: constant C in the corpus-validated bound nu_axis <= C * (n + m)
AXIS_NU_CONSTANT = 2


@dataclass(frozen=True)
class AxisSpec:
    """A real line: base point plus a unit Gaussian-rational direction."""

    base: GaussRat
    direction: GaussRat

    def __post_init__(self):
        if self.direction.norm2() != 1:
            raise ValueError("axis direction must be an exact unit (Pythagorean)")

    def reflect_scalar(self, t: GaussRat) -> GaussRat:
        """Mirror image of a point: b + u^2 * conj(t - b)."""
        u = self.direction
        return self.base + u * u * (t - self.base).conj()

    def reflect_point(self, p: SpherePoint) -> SpherePoint:
        if p.is_infinite:
            return p
        return SpherePoint(self.reflect_scalar(p.finite))

    def on_axis(self, t: GaussRat) -> bool:
        return self.reflect_scalar(t) == t

    def to_rotated(self, t: GaussRat) -> GaussRat:
        """Coordinate s with the axis mapped to the real line: s = (t-b)/u."""
        return (t - self.base) / self.direction

    def from_rotated(self, s: GaussRat) -> GaussRat:
        return self.base + self.direction * s


def real_axis(base=0) -> AxisSpec:
    return AxisSpec(GaussRat.of(base), GaussRat(1))


def pythagorean_units(count: int) -> list[GaussRat]:
    """count unit Gaussian rationals with angles roughly equidistributed in
    [0, pi) (axis directions are lines, so u and -u coincide)."""
    cands: list[tuple[float, GaussRat]] = [
        (0.0, GaussRat(1)),
        (math.pi / 2, GaussRat(0, 1)),
    ]
    limit = 2
    while True:
        cands = cands[:2]
        for p in range(2, limit + 1):
            for q in range(1, p):
                if (p - q) % 2 == 0 or math.gcd(p, q) != 1:
                    continue
                a, b, c = p * p - q * q, 2 * p * q, p * p + q * q
                for sa, sb in ((a, b), (a, -b), (b, a), (-b, a)):
                    u = GaussRat(Fraction(sa, c), Fraction(sb, c))
                    ang = math.atan2(sb, sa) % math.pi
                    cands.append((ang, u))
        if len(cands) >= 4 * count:
            break
        limit += 2
    cands.sort(key=lambda t: t[0])
    # thin to `count` roughly-uniform angles
    out = []
    for k in range(count):
        target = math.pi * k / count
        best = min(cands, key=lambda t: abs(t[0] - target))
        out.append(best[1])
    seen = set()
    uniq = []
    for u in out:
        key = (u.re, u.im)
        if key not in seen:
            seen.add(key)
            uniq.append(u)
    return uniq


def reflect_poly(p: Poly, axis: AxisSpec) -> Poly:
    """p -> conjugate of p taken in the rotated coordinate: the unique
    polynomial with p_reflected(t_mirror) = conj(p(t)) for t on... rather,
    coefficients conjugated after rotating the axis to the real line."""
    u, b = axis.direction, axis.base
    q = p.compose_affine(u, b)  # q(s) = p(u s + b)
    qc = q.conj_coeffs()
    return qc.compose_affine(GaussRat(1) / u, -b / u)


def reflect_system(system: FuchsianSystem, axis: AxisSpec) -> FuchsianSystem:
    """The mirror system: poles reflected, residues conjugated in the rotated
    chart (for a unit direction this is the plain entrywise conjugate)."""
    poles = tuple(axis.reflect_point(p) for p in system.poles)
    residues = tuple(a.conj() for a in system.residues)
    return FuchsianSystem(system.n, poles, residues)


def reflect(obj, axis: AxisSpec):
    if isinstance(obj, Poly):
        return reflect_poly(obj, axis)
    if isinstance(obj, FuchsianSystem):
        return reflect_system(obj, axis)
    raise TypeError(f"cannot reflect object of type {type(obj).__name__}")


def choose_axis(
    system: FuchsianSystem,
    center: SpherePoint,
    candidates: Optional[int] = None,
    allow_center_in_poles: bool = False,
) -> AxisSpec:
    """Axis through the center maximizing the minimum distance between the
    pole set and its mirror image, self-mirror (on-axis) poles excluded.

    Searches 4 m^2 Pythagorean directions.  An axis through a pole (the
    annulus-counting configuration) must be requested explicitly.
    """
    if center.is_infinite:
        raise ValueError("axis center must be finite")
    if not allow_center_in_poles:
        for p in system.poles:
            if (not p.is_infinite) and p.finite == center.finite:
                raise ValueError("axis center coincides with a pole")
    m = system.m
    n_cand = candidates if candidates is not None else max(4 * m * m, 4)
    best_axis, best_score = None, None
    for u in pythagorean_units(n_cand):
        axis = AxisSpec(center.finite, u)
        score = _mirror_separation(system, axis)
        if best_score is None or score > best_score:
            best_axis, best_score = axis, score
    return best_axis


def _mirror_separation(system: FuchsianSystem, axis: AxisSpec) -> Fraction:
    worst = None
    for p in system.poles:
        q = axis.reflect_point(p)
        if q == p:
            continue  # self-mirror pole sits on the axis; excluded
        d = min(chordal_dist2(q, s) for s in system.poles)
        if worst is None or d < worst:
            worst = d
    if worst is None:
        # every pole on the axis: perfect symmetry
        return Fraction(10**9)
    return worst


@dataclass(frozen=True)
class SymmetrizedSystem:
    original: FuchsianSystem
    reflected: FuchsianSystem
    doubled: FuchsianSystem
    axis: AxisSpec
    nu_axis: Fraction  # observed exponent: log r_flat(doubled) / log r_flat(original)

    def symmetric_combination(self, combination: Sequence) -> tuple[GaussRat, ...]:
        """Covector (c | conj c) of the doubled system: picks out y + y#,
        which is real on the axis."""
        comb = tuple(GaussRat.of(c) for c in combination)
        if len(comb) != self.original.n:
            raise ValueError("combination length does not match rank")
        return comb + tuple(c.conj() for c in comb)


def symmetrize(
    system: FuchsianSystem, axis: AxisSpec, rel_prec: int = DEFAULT_REL_PREC
) -> SymmetrizedSystem:
    """Block-diagonal doubling of a system with its mirror.

    The doubled pole list merges the two pole sets: an on-axis (self-mirror)
    pole carries blockdiag(A, conj A); an off-axis pole of the original
    carries blockdiag(A, 0) and its mirror blockdiag(0, conj A).
    """
    validate(system)
    mirror = reflect_system(system, axis)
    n = system.n
    zero = Matrix.zero(n, n)

    poles: list[SpherePoint] = []
    residues: list[Matrix] = []
    mirrored_used = set()
    for j, p in enumerate(system.poles):
        q = axis.reflect_point(p)
        if q == p:
            poles.append(p)
            residues.append(block_diag(system.residues[j], mirror.residues[j]))
            mirrored_used.add(j)
        else:
            # does the mirror of pole j coincide with some original pole k?
            partner = None
            for k, pk in enumerate(system.poles):
                if mirror.poles[k] == p:
                    partner = k
                    break
            poles.append(p)
            residues.append(
                block_diag(
                    system.residues[j],
                    mirror.residues[partner] if partner is not None else zero,
                )
            )
            if partner is not None:
                mirrored_used.add(partner)
    for j, p in enumerate(mirror.poles):
        if j in mirrored_used:
            continue
        poles.append(p)
        residues.append(block_diag(zero, mirror.residues[j]))

    doubled = FuchsianSystem(2 * n, tuple(poles), tuple(residues))
    validate(doubled)

    r_orig = r_flat(system, rel_prec=rel_prec).value
    r_doub = r_flat(doubled, rel_prec=rel_prec).value
    nu = log2_enclosure(r_doub.hi, 24).hi / log2_enclosure(r_orig.lo, 24).lo
    return SymmetrizedSystem(system, mirror, doubled, axis, Fraction(nu))


def operator_real_on_axis(op: ScalarOperator, axis: AxisSpec) -> bool:
    """Exact check: after rotating the axis to the real line (as an operator:
    d/dt = (1/u) d/ds adds a factor u^j to the j-th coefficient) and dividing
    out the leading coefficient of a_0, do all coefficients lie in R[t]?"""
    u = axis.direction
    rotated = []
    upow = GaussRat(1)
    for a in op.coefficients:
        rotated.append(a.compose_affine(u, axis.base) * upow)
        upow = upow * u
    lead = rotated[0].leading()
    inv = GaussRat(1) / lead
    for a in rotated:
        for c in (a * inv).coeffs:
            if c.im != 0:
                return False
    return True
