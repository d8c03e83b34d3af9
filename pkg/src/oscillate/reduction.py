"""Reduction of a Fuchsian system to a scalar operator annihilating a chosen
linear combination of solution components.

The chart is first normalized (all poles finite, pairwise distances >= 1,
contained in a disk of known radius).  The derivation runs the covector
recursion seeded with the combination itself, finds the first linear
dependency over the rational-function field by bordered determinants, and
reads off exact polynomial coefficients via signed maximal minors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import (
    DEFAULT_REL_PREC,
    GaussRat,
    Interval,
    Matrix,
    Poly,
    poly_gcd,
    poly_gcd2,
    poly_norm,
    sqrt_enclosure,
)
from .model import FuchsianSystem, SpherePoint, chordal_dist2, validate


class RatFunc:
    """Rational function over Q(i), normalized so gcd(num, den) = 1, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=Poly([1])):
        num, den = Poly.of(num), Poly.of(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly([1])
        else:
            g = poly_gcd2(num, den)
            if g.degree() > 0:
                num, den = num.exact_div(g), den.exact_div(g)
            lead = den.leading()
            if lead != GaussRat(1):
                num = num * (GaussRat(1) / lead)
                den = den.monic()
        self.num, self.den = num, den

    def __add__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return RatFunc(self.num * other.den, self.den * other.num)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __eq__(self, other):
        other = other if isinstance(other, RatFunc) else RatFunc(other)
        return self.num == other.num and self.den == other.den

    def __bool__(self):
        return not self.num.is_zero()

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def eval(self, x) -> GaussRat:
        d = self.den.eval(x)
        if not d:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.eval(x) / d

    def eval_complex(self, z: complex) -> complex:
        return self.num.eval_complex(z) / self.den.eval_complex(z)

    def __repr__(self):
        return f"RatFunc({self.num!r} / {self.den!r})"


def poly_matrix_det(rows: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square matrix of polynomials (expansion with memoized
    column subsets; fine for the small orders arising here)."""
    n = len(rows)
    if n == 0:
        return Poly([1])
    cols = list(range(n))
    cache: dict[tuple[int, ...], Poly] = {}

    def minor(r: int, cs: tuple[int, ...]) -> Poly:
        if r == n:
            return Poly([1])
        key = cs
        if key in cache:
            return cache[key]
        acc = Poly()
        sign = 1
        for idx, c in enumerate(cs):
            e = rows[r][c]
            if e:
                sub = minor(r + 1, cs[:idx] + cs[idx + 1 :])
                term = e * sub
                acc = acc + (term if sign > 0 else -term)
            sign = -sign
        cache[key] = acc
        return acc

    # cache keyed by remaining columns: row index is implied by len(cs)
    return minor(0, tuple(cols))


@dataclass(frozen=True)
class NormalizedChart:
    """Composite Moebius map t -> (a t + b)/(c t + d) normalizing the pole locus."""

    moebius: Matrix  # 2x2, applied to the *original* coordinate
    scale: GaussRat
    normalized_poles: tuple[GaussRat, ...]
    R_bound: Fraction

    def apply(self, p: SpherePoint) -> SpherePoint:
        a, b = self.moebius[0, 0], self.moebius[0, 1]
        c, d = self.moebius[1, 0], self.moebius[1, 1]
        if p.is_infinite:
            if not c:
                return SpherePoint.infinity()
            return SpherePoint.at(a / c)
        den = c * p.finite + d
        if not den:
            return SpherePoint.infinity()
        return SpherePoint.at((a * p.finite + b) / den)

    def is_identity(self) -> bool:
        return self.moebius == Matrix.identity(2)


def _fib_sphere_candidates(count: int, seed: int = 0):
    """Deterministic spread of rational points on the sphere, stereographically
    projected to the plane (None encodes the point at infinity)."""
    out = []
    golden = (1 + 5**0.5) / 2
    for k in range(count):
        z = 1 - 2 * (k + 0.5) / count
        theta = 2 * math.pi * ((k + seed * 0.37) / golden % 1.0)
        rho = max(0.0, 1 - z * z) ** 0.5
        x, y = rho * math.cos(theta), rho * math.sin(theta)
        # stereographic projection from the north pole
        if 1 - z < 1e-9:
            out.append(None)
            continue
        w = complex(x, y) / (1 - z)
        out.append(w)
    return out


def _snap(w: complex, max_den: int = 64) -> GaussRat:
    return GaussRat(
        Fraction(w.real).limit_denominator(max_den),
        Fraction(w.imag).limit_denominator(max_den),
    )


def _min_chordal2_to_poles(w: Optional[GaussRat], poles) -> Fraction:
    p = SpherePoint.infinity() if w is None else SpherePoint(w)
    return min(chordal_dist2(p, q) for q in poles)


def normalize_chart(
    system: FuchsianSystem,
    grid_seed: int = 0,
    rel_prec: int = DEFAULT_REL_PREC,
) -> tuple[NormalizedChart, FuchsianSystem]:
    """Find an affine chart with all poles finite, pairwise >= 1 apart, inside
    a disk of reported radius.  Residue matrices are untouched (residues of a
    1-form are invariant under chart changes).

    The chart-infinity point is chosen to maximize the minimum chordal
    distance to the poles over a deterministic spherical grid of 64 m points,
    then locally refined.
    """
    validate(system)
    poles = system.poles
    m = system.m

    if system.all_finite():
        dists2 = [
            (poles[i].finite - poles[j].finite).norm2()
            for i in range(m)
            for j in range(i + 1, m)
        ]
        if all(d >= 1 for d in dists2) or m <= 1:
            finite = tuple(p.finite for p in poles)
            r_bound = _disk_radius_bound(finite, rel_prec)
            chart = NormalizedChart(Matrix.identity(2), GaussRat(1), finite, r_bound)
            return chart, FuchsianSystem(system.n, poles, system.residues)

    # pick the chart-infinity point w
    best_w, best_score = None, Fraction(-1)
    if system.infinite_index() is None:
        best_w, best_score = None, _min_chordal2_to_poles(None, poles)
    for w in _fib_sphere_candidates(64 * max(m, 1), grid_seed):
        cand = None if w is None else _snap(w)
        if cand is None and system.infinite_index() is not None:
            continue
        if cand is not None and any(
            (not p.is_infinite) and p.finite == cand for p in poles
        ):
            continue
        score = _min_chordal2_to_poles(cand, poles)
        if score > best_score:
            best_w, best_score = cand, score
    # local refinement around the best finite candidate
    if best_w is not None:
        base = best_w.to_complex()
        step = 0.5
        for _ in range(12):
            improved = False
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)):
                cand = _snap(base + complex(dx * step, dy * step))
                if any((not p.is_infinite) and p.finite == cand for p in poles):
                    continue
                score = _min_chordal2_to_poles(cand, poles)
                if score > best_score:
                    best_w, best_score, base = cand, score, cand.to_complex()
                    improved = True
            if not improved:
                step /= 2

    if best_w is None:
        moeb1 = Matrix.identity(2)
        imgs = [p.finite for p in poles]
    else:
        # zeta = 1/(t - w)
        moeb1 = Matrix.from_rows([[GaussRat(0), GaussRat(1)], [GaussRat(1), -best_w]])
        imgs = []
        for p in poles:
            if p.is_infinite:
                imgs.append(GaussRat(0))
            else:
                imgs.append(GaussRat(1) / (p.finite - best_w))

    # affine normalization: center, then scale so min pairwise distance >= 1
    mean = GaussRat(0)
    for z in imgs:
        mean = mean + z
    mean = mean / GaussRat(m) if m else GaussRat(0)
    centered = [z - mean for z in imgs]
    if m >= 2:
        min2 = min(
            (centered[i] - centered[j]).norm2()
            for i in range(m)
            for j in range(i + 1, m)
        )
        enc = sqrt_enclosure(min2, rel_prec)
        c = Fraction(1) / enc.lo
        # round up to a modest rational to keep coefficients small
        c = Fraction(math.ceil(c * 16), 16)
        scale = GaussRat(c)
    else:
        scale = GaussRat(1)
    final = tuple(scale * z for z in centered)
    # moeb2: z -> scale*(z - mean)
    moeb2 = Matrix.from_rows([[scale, -scale * mean], [GaussRat(0), GaussRat(1)]])
    moeb = moeb2 * moeb1
    r_bound = _disk_radius_bound(final, rel_prec)
    chart = NormalizedChart(moeb, scale, final, r_bound)
    new_system = FuchsianSystem(
        system.n, tuple(SpherePoint(z) for z in final), system.residues
    )
    # hard postcondition: pairwise distances >= 1
    for i in range(m):
        for j in range(i + 1, m):
            if (final[i] - final[j]).norm2() < 1:
                raise AssertionError("chart normalization failed the separation bound")
    return chart, new_system


def _disk_radius_bound(points: Sequence[GaussRat], rel_prec: int) -> Fraction:
    if not points:
        return Fraction(1)
    top = max((z.norm2() for z in points), default=Fraction(0))
    hi = sqrt_enclosure(top, rel_prec).hi
    hi = Fraction(math.ceil(hi * 2**16), 2**16)
    return max(Fraction(1), hi)


@dataclass(frozen=True)
class ScalarOperator:
    """Polynomial-coefficient operator a_0 y^(k) + ... + a_k y, gcd-reduced."""

    order: int
    coefficients: tuple[Poly, ...]  # a_0 .. a_k
    degree_bound: int

    def __post_init__(self):
        if len(self.coefficients) != self.order + 1:
            raise ValueError("coefficient count does not match order")
        if self.coefficients[0].is_zero():
            raise ValueError("leading coefficient is identically zero")

    @property
    def a0(self) -> Poly:
        return self.coefficients[0]

    def max_degree(self) -> int:
        return max(c.degree() for c in self.coefficients)

    def scale(self, c) -> "ScalarOperator":
        c = GaussRat.of(c)
        if not c:
            raise ValueError("scaling by zero")
        return ScalarOperator(
            self.order, tuple(p * c for p in self.coefficients), self.degree_bound
        )


@dataclass(frozen=True)
class ReductionTrace:
    Q: Poly
    P_matrix: tuple[tuple[Poly, ...], ...]
    alpha: tuple[tuple[Poly, ...], ...]  # alpha_0 .. alpha_k (rows of covectors)
    wedges: tuple[Poly, ...]  # n+1 maximal minors (empty in the degenerate case)
    cramer: tuple[RatFunc, ...]  # c_0 .. c_{k-1} with xi_k = sum c_i xi_i
    degenerate: bool
    bit_complexity: int

    def xi(self, k: int) -> tuple[RatFunc, ...]:
        """Covector xi_k = alpha_k / Q^k as rational functions."""
        qk = Poly([1])
        for _ in range(k):
            qk = qk * self.Q
        return tuple(RatFunc(a, qk) for a in self.alpha[k])


def _alpha_recursion_step(alpha, q, dq, pmat, k):
    """alpha_{k+1} = Q*alpha' - k*Q'*alpha + alpha . P  (row covector)."""
    n = len(alpha)
    dalpha = [a.derivative() for a in alpha]
    out = []
    for c in range(n):
        term = q * dalpha[c] - (dq * alpha[c]) * k
        dot = Poly()
        for r in range(n):
            if alpha[r]:
                dot = dot + alpha[r] * pmat[r][c]
        out.append(term + dot)
    return out


def derive_scalar(
    system: FuchsianSystem, combination: Sequence
) -> tuple[ScalarOperator, ReductionTrace]:
    """Derive the scalar operator annihilating y = combination . x for every
    solution x of the (normalized, all-poles-finite) system.

    Order is n generically; on the degenerate locus the first linear
    dependency yields a lower-order operator, flagged in the trace.
    """
    # A pole at infinity is invisible in the affine chart (Q and P are built
    # from the finite poles only), so it is accepted here as-is.
    n = system.n
    comb = [GaussRat.of(c) for c in combination]
    if len(comb) != n:
        raise ValueError("combination length does not match rank")
    if not any(comb):
        raise ValueError("combination is zero")

    q = system.denominator()
    dq = q.derivative()
    pmat = system.numerator_matrix()

    alphas = [[Poly.of(c) for c in comb]]
    for k in range(n):
        alphas.append(_alpha_recursion_step(alphas[k], q, dq, pmat, k))

    # incremental rank: witness columns certifying rank k of rows xi_0..xi_{k-1}
    #
    # the rows xi_j = alpha_j / Q^j are brought to the common scaling
    # alpha_j * Q^(k-j); the determinant is multilinear in rows, so every
    # minor is the raw alpha minor times a known power of Q.  All maximal
    # minors share the factor Q^(k(k+1)/2 - k), which the gcd reduction would
    # divide out anyway, so the minors are computed on the raw alpha rows and
    # only the non-shared Q^i is restored.  This keeps the determinant
    # arithmetic at the minimal degrees.
    witness: list[int] = [next(c for c in range(n) if comb[c])]
    dep_order = None
    dep_coeffs = None
    for k in range(1, n + 1):
        rows = alphas[: k + 1]
        extended = None
        for c in range(n):
            if c in witness:
                continue
            cols = sorted(witness + [c])
            det = poly_matrix_det([[rows[j][cc] for cc in cols] for j in range(k + 1)])
            if not det.is_zero():
                extended = cols
                break
        if extended is not None and k < n:
            witness = extended
            continue
        if extended is not None and k == n:
            # cannot happen: n+1 rows of length n
            raise AssertionError("rank exceeded ambient dimension")
        # dependent: signed maximal minors over the witness columns
        cols = sorted(witness)
        dets = []
        for i in range(k + 1):
            sub = [[rows[j][cc] for cc in cols] for j in range(k + 1) if j != i]
            dets.append(poly_matrix_det(sub))
        b = []
        qpow = Poly([1])
        for i in range(k + 1):
            scaled = qpow * dets[i]
            b.append(scaled if i % 2 == 0 else -scaled)
            qpow = qpow * q
        dep_order = k
        dep_coeffs = b
        break

    assert dep_order is not None and dep_coeffs is not None
    k = dep_order
    # operator: sum_i b_i y^(i) = 0  ->  a_{k-i} = b_i
    coeffs = [dep_coeffs[k - j] for j in range(k + 1)]  # a_0 .. a_k
    g = poly_gcd(coeffs)
    if g.degree() > 0:
        coeffs = [c.exact_div(g) for c in coeffs]
    lead = coeffs[0].leading()
    inv = GaussRat(1) / lead
    coeffs = [c * inv for c in coeffs]

    degenerate = k < n
    wedges: tuple[Poly, ...] = ()
    cramer: tuple[RatFunc, ...] = ()
    if not degenerate:
        # wedge_i = Q^i * det(alpha rows omitting i); in the non-degenerate
        # case the witness covers every column, so the dependency minors are
        # exactly these determinants (up to the alternating sign)
        wedges = tuple(
            b if i % 2 == 0 else -b for i, b in enumerate(dep_coeffs)
        )
        # xi_n = sum c_i xi_i with c_i = -b_i / b_n; the known common factor
        # Q^i of b_i and b_n is cancelled before normalization
        qpows = [Poly([1])]
        for _ in range(n):
            qpows.append(qpows[-1] * q)
        cramer = tuple(
            RatFunc(
                -dets[i] if (i + n) % 2 == 0 else dets[i],
                qpows[n - i] * dets[n],
            )
            for i in range(n)
        )

    bits = sum(sum(p.bit_complexity() for p in row) for row in alphas[: k + 1])
    bits += sum(c.bit_complexity() for c in coeffs)
    trace = ReductionTrace(
        Q=q,
        P_matrix=tuple(tuple(row) for row in pmat),
        alpha=tuple(tuple(row) for row in alphas[: k + 1]),
        wedges=wedges,
        cramer=cramer,
        degenerate=degenerate,
        bit_complexity=bits,
    )
    op = ScalarOperator(order=k, coefficients=tuple(coeffs), degree_bound=n * n * system.m)
    _check_trace_invariants(op, trace, system)
    return op, trace


def _check_trace_invariants(op: ScalarOperator, trace: ReductionTrace, system: FuchsianSystem):
    n, m = system.n, system.m
    for k, row in enumerate(trace.alpha):
        for p in row:
            if p.degree() > k * m:
                raise AssertionError(f"deg alpha_{k} exceeds {k}*m")
    for a in op.coefficients:
        if a.degree() > n * n * m:
            raise AssertionError("coefficient degree exceeds n^2 m")


def slope(op: ScalarOperator, rel_prec: int = DEFAULT_REL_PREC) -> Interval:
    """max over j >= 1 of |a_j| / |a_0| as a rational enclosure."""
    a0 = poly_norm(op.a0, rel_prec)
    if op.order == 0:
        return Interval(Fraction(0))
    out = None
    for a in op.coefficients[1:]:
        r = poly_norm(a, rel_prec) / a0
        out = r if out is None else out.max_with(r)
    return out


def log2_enclosure(x: Fraction, prec: int = 32) -> Interval:
    """Rational enclosure of log2(x) for x > 0, by repeated squaring."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 of a nonpositive value")
    # integer part
    k = 0
    y = x
    while y >= 2:
        y /= 2
        k += 1
    while y < 1:
        y *= 2
        k -= 1
    # fractional bits of log2(y), y in [1,2)
    lo = Fraction(k)
    num = Fraction(0)
    denom = Fraction(1)
    for _ in range(prec):
        y = y * y
        denom *= 2
        if y >= 2:
            num += 1 / denom
            y /= 2
        # cap the size of y's representation to keep this cheap
        y = Fraction(y.numerator * 2**64 // y.denominator, 2**64)
        if y < 1:
            y = Fraction(1)
    return Interval(lo + num, lo + num + Fraction(2, 2**prec))


def verify_slope_bound(op: ScalarOperator, carpet, nu: Fraction, rel_prec: int = 32) -> bool:
    """True iff slope(op) <= R^nu, compared through log2 enclosures so that
    astronomically large exponents nu stay cheap."""
    nu = Fraction(nu)
    if nu <= 0:
        raise ValueError("nu must be positive")
    s = slope(op)
    if s.hi <= 1:
        return True
    r_lo = carpet.value.lo if hasattr(carpet, "value") else Interval.of(carpet).lo
    lhs = log2_enclosure(s.hi, rel_prec)
    rhs = log2_enclosure(r_lo, rel_prec)
    return lhs.hi <= nu * rhs.lo


def nu_default(n: int, m: int, c: int = 4) -> Fraction:
    """Default exponent 2^(c * n^2 * m) for the slope / counting bounds."""
    return Fraction(2 ** (c * n * n * m))
