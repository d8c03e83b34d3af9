"""The lemma chain: explicit lower bounds for polynomials away from their
zeros, variation-of-argument bounds along arcs and small circles, annulus
counting through the real-on-axis monodromy argument, the slit-plan
decomposition of the disk, and the final assembly of the certified zero
bound.

Every implementer-chosen constant lives in `Constants` and is recorded in
the emitted certificate, so the whole object is auditable and falsifiable by
the numeric oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import GaussRat, Interval, Poly, poly_norm
from .model import (
    CarpetValue,
    FuchsianSystem,
    r_flat,
    spectral_class_check,
    validate,
)
from .numerics import monodromy as numeric_monodromy
from .paths import ArcSpec, ComplexPath
from .reduction import (
    NormalizedChart,
    ReductionTrace,
    ScalarOperator,
    derive_scalar,
    log2_enclosure,
    normalize_chart,
    nu_default,
    slope,
)
from .roots import distance_lower_bound, root_enclosures
from .symmetry import choose_axis, operator_real_on_axis, symmetrize

# 2*pi sandwiched by rationals (lower for sound ceilings of radians/turns,
# upper for sound radian bounds of full circles)
TWO_PI_LO = Fraction(6283185, 1000000)
TWO_PI_HI = Fraction(6283186, 1000000)


class OnZeroLocus(ValueError):
    """The evaluation point is a zero of the polynomial."""


class ArcTooClose(RuntimeError):
    """Arc clearance from the zero locus could not be certified positive."""


class NotFuchsianLocal(ValueError):
    """The operator is not Fuchsian at the requested point."""


class MonodromyNotUnitModulus(RuntimeError):
    """Annulus counting inapplicable: monodromy eigenvalues off the circle."""


class SpectralClassViolation(RuntimeError):
    def __init__(self, residue_index: int):
        self.residue_index = residue_index
        super().__init__(f"residue {residue_index} has non-real spectrum")


class InternalInconsistency(RuntimeError):
    """A step that must succeed in the spectral class failed."""


@dataclass(frozen=True)
class Constants:
    """Every implementer-chosen constant of the bound assembly."""

    c_vp: Fraction = Fraction(4)  # de la Vallee Poussin-type O(1)
    nu_c: int = 4  # exponent constant: nu(n, m) = 2^(nu_c * n^2 * m)
    axis_nu: int = 2  # doubled-system carpet exponent <= axis_nu * (n + m)
    chart_grid: int = 64  # chart-infinity candidates per pole
    slit_grid_per_degree: int = 4  # candidate slits: ceil(4 d) + 1

    def as_dict(self) -> dict:
        return {
            "C_VP": str(self.c_vp),
            "nu_c": self.nu_c,
            "axis_nu": self.axis_nu,
            "chart_grid": self.chart_grid,
            "slit_grid_per_degree": self.slit_grid_per_degree,
        }


DEFAULT_CONSTANTS = Constants()


# ---------------------------------------------------------------------------
# Lower bounds of polynomials away from their zeros
# ---------------------------------------------------------------------------


def _root_split(p: Poly, two_r: Fraction):
    """Count roots (with multiplicity) inside / outside |z| <= 2R, plus the
    boundary-ambiguous ones (decided pessimistically by the caller)."""
    encls, certified = root_enclosures(p)
    inside = outside = ambiguous = 0
    for e in encls:
        dist = abs(e.center)
        rad = float(e.radius) if certified else float(two_r) * 2
        if dist + rad <= float(two_r):
            inside += e.multiplicity
        elif dist - rad > float(two_r):
            outside += e.multiplicity
        else:
            ambiguous += e.multiplicity
    return inside, outside, ambiguous


def _frac_repr(x) -> str:
    """Readable form of a rational for report dictionaries; very large values
    are abbreviated to their binary magnitude."""
    x = Fraction(x)
    if x == 0:
        return "0"
    nb = abs(x.numerator).bit_length()
    db = x.denominator.bit_length()
    if nb < 512 and db < 512:
        return str(x)
    return f"~2^{nb - db}"


def relative_lower_bound(
    p: Poly, clearance: Fraction, R: Fraction
) -> Fraction:
    """b with |p(t)| >= b * ||p|| whenever |t| <= R and dist(t, zeros) >=
    clearance: the proof-explicit product over root locations."""
    p = Poly.of(p)
    d = p.degree()
    if d <= 0:
        return Fraction(1)
    R = Fraction(R)
    if R < 2:
        raise ValueError("lower-bound lemma needs R >= 2")
    clearance = Fraction(clearance)
    if clearance <= 0:
        raise ArcTooClose("clearance is not certified positive")
    d_in, d_out, d_amb = _root_split(p, 2 * R)
    f_in = clearance / (2 * R + 1)
    f_out = Fraction(3, 8)
    f_amb = min(f_in, f_out)
    return (
        Fraction(1, d + 1) * f_in**d_in * f_out**d_out * f_amb**d_amb
    )


def lower_bound_away_from_zeros(p: Poly, t: GaussRat, R) -> Fraction:
    """Certified lower bound for |p(t)| with |t| <= R, via the clearance of t
    from the zero set of p.  For p of (approximately) unit norm this is the
    bound of the lemma; in general the result is scaled by a lower enclosure
    of ||p|| so the guarantee bound <= |p(t)| holds unconditionally."""
    p = Poly.of(p)
    t = GaussRat.of(t)
    R = Fraction(R)
    if R < 2:
        raise ValueError("lower-bound lemma needs R >= 2")
    if t.norm2() > R * R:
        raise ValueError("evaluation point outside the disk of radius R")
    val = p.eval(t)
    if not val:
        raise OnZeroLocus(f"p({t}) = 0")
    if p.degree() <= 0:
        return poly_norm(p).lo
    clearance = distance_lower_bound(p, t)
    if clearance <= 0:
        raise OnZeroLocus("could not separate the point from the zero set")
    rel = relative_lower_bound(p, clearance, R)
    return rel * poly_norm(p).lo


# ---------------------------------------------------------------------------
# Variation-of-argument bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarArgBound:
    arc: ArcSpec
    bound: Fraction  # radians
    inputs: dict

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("variation bound must be nonnegative")

    def turns(self) -> int:
        return max(0, math.ceil(self.bound / TWO_PI_LO))


def var_arg_bound_arc(
    op: ScalarOperator,
    arc: ArcSpec,
    clearance: Fraction,
    R: Fraction,
    constants: Constants = DEFAULT_CONSTANTS,
) -> VarArgBound:
    """B = C_VP * k * L * A where A bounds the monic-form coefficients
    |a_j/a_0| on the arc: sup |a_j| <= S ||a_0|| R^d and inf |a_0| through
    the lower-bound lemma at the certified clearance."""
    clearance = Fraction(clearance)
    if clearance <= 0:
        raise ArcTooClose("arc clearance from the zero locus is not positive")
    R = max(Fraction(R), Fraction(2))
    k = op.order
    if k == 0:
        raise ValueError("order-zero operator")
    d = max(op.max_degree(), 0)
    s_hi = slope(op).hi
    if s_hi == 0:
        length = arc.length().hi
        return VarArgBound(arc, Fraction(0), {
            "k": k, "S": "0", "L": _frac_repr(length), "r": _frac_repr(clearance),
            "R": _frac_repr(R), "d": d, "A": "0", "C_VP": _frac_repr(constants.c_vp)})
    lb = relative_lower_bound(op.a0, clearance, R)
    a_sup = s_hi * R**d  # relative to ||a_0||
    a_bound = a_sup / lb
    length = arc.length().hi
    b = constants.c_vp * k * length * a_bound
    return VarArgBound(arc, b, {
        "k": k, "S": _frac_repr(s_hi), "L": _frac_repr(length), "r": _frac_repr(clearance),
        "R": _frac_repr(R), "d": d, "A": _frac_repr(a_bound), "C_VP": _frac_repr(constants.c_vp),
    })


def local_fuchsian_form(op: ScalarOperator, pole: GaussRat) -> list[Poly]:
    """Coefficients q_j of the local form at the pole (in the Euler-operator
    chart): q_j = a_j(t + pole) * t^j / t^mu with mu = ord(a_0 at pole).
    Raises NotFuchsianLocal if some division leaves a remainder."""
    pole = GaussRat.of(pole)
    shifted = [a.shift(pole) for a in op.coefficients]
    mu = shifted[0].ord_at_zero()
    qs = []
    for j, b in enumerate(shifted):
        if b.is_zero():
            qs.append(Poly())
            continue
        ordb = b.ord_at_zero()
        if ordb + j < mu:
            raise NotFuchsianLocal(
                f"ord(a_{j}) = {ordb} < {mu} - {j} at the pole"
            )
        # multiply by t^j, divide by t^mu: shift the coefficient index
        shift = j - mu
        if shift >= 0:
            qs.append(Poly([GaussRat(0)] * shift + list(b.coeffs)))
        else:
            qs.append(Poly(list(b.coeffs[-shift:])))
    return qs


def var_arg_bound_small_circle(
    op: ScalarOperator,
    pole: GaussRat,
    clearance: Fraction,
    R: Fraction,
    constants: Constants = DEFAULT_CONSTANTS,
) -> VarArgBound:
    """Variation bound along circles |t - pole| = rho, valid uniformly for
    all sufficiently small rho.  In the Euler chart the circle becomes a
    segment of length 2 pi and the coefficient ratios stay bounded as rho
    goes to 0, so a single de la Vallee Poussin application suffices; the
    Stirling conversion factors are absorbed into k^k."""
    pole = GaussRat.of(pole)
    R = max(Fraction(R), Fraction(2))
    clearance = Fraction(clearance)
    if clearance <= 0:
        raise ArcTooClose("pole clearance is not positive")
    k = op.order
    qs = local_fuchsian_form(op, pole)
    q0 = qs[0]
    q0_norm = poly_norm(q0)
    s_q = Fraction(0)
    for q in qs[1:]:
        if not q.is_zero():
            ratio = poly_norm(q).hi / q0_norm.lo
            s_q = max(s_q, ratio)
    # clearance of the disk of radii <= rho from the zeros of q_0
    r_q = min(clearance, distance_lower_bound(q0, GaussRat(0)))
    if r_q <= 0:
        raise NotFuchsianLocal("leading local coefficient vanishes at the pole")
    rho = min(Fraction(1, 2), r_q / 2)
    lb = relative_lower_bound(q0, r_q - rho, R) if r_q - rho > 0 else relative_lower_bound(q0, r_q / 2, R)
    stirling = Fraction(max(k, 1) ** max(k, 1))
    a_bound = stirling * (s_q if s_q else Fraction(1)) / lb
    b = constants.c_vp * k * TWO_PI_HI * a_bound
    arc = ArcSpec.circle(pole.to_complex(), float(rho), float(clearance))
    return VarArgBound(arc, b, {
        "k": k, "S_local": _frac_repr(s_q), "L": _frac_repr(TWO_PI_HI), "r": _frac_repr(clearance),
        "R": _frac_repr(R), "d": max(op.max_degree(), 0), "A": _frac_repr(a_bound),
        "C_VP": _frac_repr(constants.c_vp), "rho_max": _frac_repr(rho),
    })


# ---------------------------------------------------------------------------
# Annulus counting via real-on-axis monodromy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Annulus:
    center: complex
    inner: float
    outer: float

    def __post_init__(self):
        if not 0 <= self.inner < self.outer:
            raise ValueError("annulus radii out of order")


def petrov_annulus_bound(
    op: ScalarOperator,
    annulus: Annulus,
    variation: VarArgBound,
    monodromy_source=None,
    axis=None,
    tol: float = 1e-9,
) -> int:
    """(2k+1)(2B+1) zero bound in the annulus, B = the variation bound in
    whole turns.  Applicable only when the operator is real on the symmetry
    axis and the monodromy around the annulus core has all eigenvalues
    certified on the unit circle."""
    k = op.order
    if axis is not None and not operator_real_on_axis(op, axis):
        raise ValueError("operator is not real on the symmetry axis")
    source = monodromy_source if monodromy_source is not None else op
    radius = math.sqrt(annulus.inner * annulus.outer) if annulus.inner > 0 else annulus.outer / 2
    loop = ComplexPath.circle_loop(annulus.center, radius)
    md = numeric_monodromy(source, loop, tol)
    if not md.all_unit():
        raise MonodromyNotUnitModulus(
            f"eigenvalue moduli {[abs(e) for e in md.eigenvalues]} "
            f"(flags {md.unit_flags})"
        )
    b_turns = variation.turns() if isinstance(variation, VarArgBound) else int(variation)
    return (2 * k + 1) * (2 * b_turns + 1)


# ---------------------------------------------------------------------------
# Slit plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircleSlit:
    pole: complex
    rho: float
    clearance: float


@dataclass(frozen=True)
class SlitPlan:
    disk_radius: Fraction
    circles: tuple[CircleSlit, ...]
    segments: tuple[ArcSpec, ...]
    direction: float  # common angle of the straight slits
    clearance: Fraction  # min certified distance of all slits to V
    degree: int

    @property
    def region_count(self) -> int:
        # m punctured disks plus the one cut outer region
        return len(self.circles) + 1

    def punctured_disk_annulus(self, j: int, inner_frac: float = 0.125) -> Annulus:
        c = self.circles[j]
        return Annulus(c.pole, c.rho * inner_frac, c.rho)

    def punctured_disk_boundary(self, j: int, inner_frac: float = 0.125) -> ComplexPath:
        """Keyhole contour of the truncated annulus around pole j."""
        c = self.circles[j]
        th = self.direction
        a = c.pole + c.rho * cmath.exp(1j * th)
        b = c.pole + c.rho * inner_frac * cmath.exp(1j * th)
        return ComplexPath([
            ArcSpec.arc(c.pole, c.rho, th, th + 2 * math.pi, c.clearance),
            ArcSpec.segment(a, b, c.clearance),
            ArcSpec.arc(c.pole, c.rho * inner_frac, th, th - 2 * math.pi, c.clearance),
            ArcSpec.segment(b, a, c.clearance),
        ])

    def main_region_arcs(self) -> list[ArcSpec]:
        """Boundary arcs of the cut outer region, straight slits counted for
        both traversals."""
        out = [ArcSpec.circle(0, float(self.disk_radius), float(self.clearance))]
        for c in self.circles:
            out.append(ArcSpec.circle(c.pole, c.rho, c.clearance))
        for s in self.segments:
            out.append(s)
            out.append(s)  # traversed on both sides
        return out

    def main_region_path(self) -> ComplexPath:
        """Closed keyhole traversal of the outer region boundary: outer
        circle counterclockwise, descending each slit to circle its pole
        clockwise."""
        rr = float(self.disk_radius)
        # order slits by the angle of their outer endpoint
        items = sorted(
            zip(self.circles, self.segments),
            key=lambda cs: cmath.phase(cs[1].end) % (2 * math.pi),
        )
        segs: list[ArcSpec] = []
        angles = [cmath.phase(s.end) % (2 * math.pi) for _, s in items]
        for idx, (c, s) in enumerate(items):
            # descend, loop the pole clockwise, ascend
            segs.append(s.reversed())
            th = cmath.phase(s.start - c.pole)
            segs.append(ArcSpec.arc(c.pole, c.rho, th, th - 2 * math.pi, c.clearance))
            segs.append(s)
            # outer arc to the next slit
            a0 = angles[idx]
            a1 = angles[(idx + 1) % len(items)]
            if idx + 1 == len(items):
                a1 += 2 * math.pi
            while a1 <= a0:
                a1 += 2 * math.pi
            segs.append(ArcSpec.arc(0, rr, a0, a1, float(self.clearance)))
        return ComplexPath(segs)


def _dist_point_segment(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def build_slit_plan(
    op: ScalarOperator,
    poles: Sequence[GaussRat],
    R: Fraction,
    constants: Constants = DEFAULT_CONSTANTS,
) -> SlitPlan:
    """Circle slits (radius in [1/4, 1/2] around each pole) and parallel
    straight slits from each pole circle to the outer boundary, with the
    candidate maximizing the certified distance to V = {a_0 = 0} chosen among
    ceil(4 d) + 1 options (pigeonhole: some candidate is O(1/d)-clear)."""
    d = max(op.max_degree(), 1)
    poles_c = [GaussRat.of(p).to_complex() for p in poles]
    encls, certified = root_enclosures(op.a0)
    root_pts = [(e.center, float(e.radius) if certified else 0.0) for e in encls]
    r_out = Fraction(R) + 1
    rr = float(r_out)
    ncand = math.ceil(constants.slit_grid_per_degree * d) + 1

    def clear_to_v_circle(center: complex, rho: float) -> float:
        best = float("inf")
        for z, rad in root_pts:
            best = min(best, abs(abs(z - center) - rho) - rad)
        for q in poles_c:
            if q != center:
                best = min(best, abs(q - center) - rho)
        return best

    circles = []
    for tau in poles_c:
        best_rho, best_clear = None, None
        for i in range(ncand):
            rho = 0.25 + 0.25 * (i / max(ncand - 1, 1))
            cl = clear_to_v_circle(tau, rho)
            if best_clear is None or cl > best_clear:
                best_rho, best_clear = rho, cl
        circles.append(CircleSlit(tau, best_rho, max(best_clear, 0.0)))

    def segment_for(tau: complex, rho: float, th: float):
        e = cmath.exp(1j * th)
        # outer intersection: |tau + s e| = rr
        b_ = (tau * e.conjugate()).real
        disc = b_ * b_ - (abs(tau) ** 2 - rr * rr)
        s_max = -b_ + math.sqrt(max(disc, 0.0))
        return tau + rho * e, tau + s_max * e

    def clear_segment(a: complex, b: complex, own: complex) -> float:
        best = float("inf")
        for z, rad in root_pts:
            best = min(best, _dist_point_segment(z, a, b) - rad)
        for q in poles_c:
            if q != own:
                best = min(best, _dist_point_segment(q, a, b))
        return best

    best_th, best_score, best_segs = None, None, None
    for i in range(ncand):
        th = math.pi * (2 * i + 1) / (2 * ncand)
        segs = []
        score = float("inf")
        for c in circles:
            a, b = segment_for(c.pole, c.rho, th)
            segs.append((a, b))
            score = min(score, clear_segment(a, b, c.pole))
        if best_score is None or score > best_score:
            best_th, best_score, best_segs = th, score, segs

    seg_clear = max(best_score, 0.0)
    clearance = min([seg_clear] + [c.clearance for c in circles])
    segments = tuple(
        ArcSpec.segment(a, b, seg_clear) for (a, b) in best_segs
    )
    # rational (slightly shrunk) certified clearance
    clearance_q = Fraction(clearance) * Fraction(2**20 - 1, 2**20) if clearance > 0 else Fraction(0)
    return SlitPlan(
        disk_radius=r_out,
        circles=tuple(circles),
        segments=segments,
        direction=best_th,
        clearance=clearance_q,
        degree=d,
    )


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionBound:
    name: str
    kind: str  # "main" | "punctured-disk"
    bound: int
    variation_total: Fraction  # radians (main) or per-annulus bound input
    details: dict


@dataclass(frozen=True)
class BoundCertificate:
    chart: NormalizedChart
    operator: ScalarOperator
    plan: SlitPlan
    arc_bounds: tuple[VarArgBound, ...]
    region_bounds: tuple[RegionBound, ...]
    total: int
    log2_total: Fraction
    closed_form_R: CarpetValue
    closed_form_nu: Fraction
    constants: dict
    system: FuchsianSystem  # normalized system the certificate talks about
    combination: tuple[GaussRat, ...]
    trace: Optional[ReductionTrace] = None

    def closed_form_holds(self) -> bool:
        """total <= R^nu, compared through log2 enclosures."""
        if self.total <= 1:
            return True
        lhs = log2_enclosure(Fraction(self.total), 24)
        rhs = log2_enclosure(self.closed_form_R.value.lo, 24)
        return lhs.hi <= self.closed_form_nu * rhs.lo


def assemble_bound(
    system: FuchsianSystem,
    combination: Sequence,
    constants: Constants = DEFAULT_CONSTANTS,
    chart_seed: int = 0,
) -> BoundCertificate:
    """normalize -> derive -> slit plan -> per-region bounds -> total, with
    the closed form (R_flat, nu_default) attached."""
    validate(system)
    spec = spectral_class_check(system)
    if not spec.all_real:
        bad = spec.per_residue_real.index(False)
        raise SpectralClassViolation(bad)

    chart, nsys = normalize_chart(system, grid_seed=chart_seed)
    comb = tuple(GaussRat.of(c) for c in combination)
    op, trace = derive_scalar(nsys, comb)
    carpet = r_flat(nsys)
    nu = nu_default(nsys.n, nsys.m, constants.nu_c)

    plan = build_slit_plan(op, [p.finite for p in nsys.poles], chart.R_bound, constants)
    r_lemma = plan.disk_radius + 1

    arc_bounds: list[VarArgBound] = []
    total_rad = Fraction(0)
    for arc in plan.main_region_arcs():
        vb = var_arg_bound_arc(op, arc, plan.clearance, r_lemma, constants)
        arc_bounds.append(vb)
        total_rad += vb.bound
    main_bound = math.ceil(total_rad / TWO_PI_LO)
    regions = [
        RegionBound("main", "main", main_bound, total_rad, {"arcs": len(arc_bounds)})
    ]

    for j, c in enumerate(plan.circles):
        pole = nsys.poles[j].finite
        axis = choose_axis(nsys, nsys.poles[j], allow_center_in_poles=True)
        sym = symmetrize(nsys, axis)
        sym_comb = sym.symmetric_combination(comb)
        op_sym, _ = derive_scalar(sym.doubled, sym_comb)
        small = var_arg_bound_small_circle(
            op_sym, pole, plan.clearance, r_lemma, constants
        )
        outer_arc = ArcSpec.circle(c.pole, c.rho, c.clearance)
        outer_vb = var_arg_bound_arc(op_sym, outer_arc, plan.clearance, r_lemma, constants)
        combined = VarArgBound(outer_arc, small.bound + outer_vb.bound, {
            "small_circle": small.inputs, "outer": outer_vb.inputs,
        })
        arc_bounds.extend([small, outer_vb])
        annulus = plan.punctured_disk_annulus(j)
        try:
            bound_j = petrov_annulus_bound(
                op_sym, annulus, combined,
                monodromy_source=sym.doubled, axis=axis,
            )
        except MonodromyNotUnitModulus as exc:
            raise InternalInconsistency(
                f"unit-modulus certification failed in the spectral class: {exc}"
            ) from exc
        regions.append(
            RegionBound(
                f"disk-{j}", "punctured-disk", bound_j, combined.bound,
                {"k": op_sym.order, "B_turns": combined.turns()},
            )
        )

    total = sum(r.bound for r in regions)
    log2_total = log2_enclosure(Fraction(max(total, 1)), 24).hi
    cert = BoundCertificate(
        chart=chart,
        operator=op,
        plan=plan,
        arc_bounds=tuple(arc_bounds),
        region_bounds=tuple(regions),
        total=total,
        log2_total=log2_total,
        closed_form_R=carpet,
        closed_form_nu=nu,
        constants=constants.as_dict(),
        system=nsys,
        combination=comb,
        trace=trace,
    )
    if not cert.closed_form_holds():
        raise InternalInconsistency("assembled total exceeds the closed form R^nu")
    return cert
