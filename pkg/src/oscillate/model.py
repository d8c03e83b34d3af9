"""Fuchsian system model: poles and residues on the Riemann sphere,
spectral-class membership, and the carpeting-function machinery.

The metric on the sphere is the chordal distance
d(z, w) = |z - w| / sqrt((1 + |z|^2)(1 + |w|^2)),   d(z, inf) = 1/sqrt(1 + |z|^2),
whose square is an exact rational; it is semialgebraic and d(0, inf) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import (
    DEFAULT_REL_PREC,
    GaussRat,
    Interval,
    Matrix,
    Poly,
    matrix_norm,
    poly_discriminant,
    poly_gcd2,
    poly_norm,
    poly_squarefree_part,
    real_coeffs,
    real_root_isolation,
    sqrt_enclosure,
    sturm_count_real_roots,
)


class DuplicatePoles(ValueError):
    def __init__(self, pairs):
        self.pairs = pairs
        super().__init__(f"coinciding poles at index pairs {pairs}")


class ResidueSumNonzero(ValueError):
    def __init__(self, defect: Matrix):
        self.defect = defect
        super().__init__("residue matrices do not sum to zero")


class ZeroDiscriminant(ValueError):
    """The denominator polynomial has a multiple root."""


class IndeterminateSpectrum(RuntimeError):
    """Spectrum realness could not be decided (should not occur: decisions are exact)."""


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere: a finite Gaussian rational or infinity."""

    finite: Optional[GaussRat]

    @staticmethod
    def at(value) -> "SpherePoint":
        return SpherePoint(GaussRat.of(value))

    @staticmethod
    def infinity() -> "SpherePoint":
        return SpherePoint(None)

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    def __repr__(self):
        return "inf" if self.is_infinite else repr(self.finite)


def chordal_dist2(p: SpherePoint, q: SpherePoint) -> Fraction:
    """Exact square of the chordal distance between two sphere points."""
    if p.is_infinite and q.is_infinite:
        return Fraction(0)
    if p.is_infinite or q.is_infinite:
        z = q.finite if p.is_infinite else p.finite
        return Fraction(1) / (1 + z.norm2())
    z, w = p.finite, q.finite
    return (z - w).norm2() / ((1 + z.norm2()) * (1 + w.norm2()))


def chordal_dist(p: SpherePoint, q: SpherePoint, rel_prec: int = DEFAULT_REL_PREC) -> Interval:
    return sqrt_enclosure(chordal_dist2(p, q), rel_prec)


@dataclass(frozen=True)
class FuchsianSystem:
    """A rank-n system with m first-order poles, given by poles and residues.

    The residue at an infinite pole is stored explicitly; the chart-change
    rule (it equals minus the sum of the finite residues) is validated, not
    recomputed.
    """

    n: int
    poles: tuple[SpherePoint, ...]
    residues: tuple[Matrix, ...]

    def __init__(self, n: int, poles: Sequence[SpherePoint], residues: Sequence[Matrix]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "poles", tuple(poles))
        object.__setattr__(self, "residues", tuple(residues))
        if len(self.poles) != len(self.residues):
            raise ValueError("pole and residue counts differ")
        for a in self.residues:
            if a.rows != n or a.cols != n:
                raise ValueError("residue shape does not match rank")

    @property
    def m(self) -> int:
        return len(self.poles)

    def finite_indices(self):
        return [i for i, p in enumerate(self.poles) if not p.is_infinite]

    def infinite_index(self) -> Optional[int]:
        for i, p in enumerate(self.poles):
            if p.is_infinite:
                return i
        return None

    def residue_sum(self) -> Matrix:
        s = Matrix.zero(self.n, self.n)
        for a in self.residues:
            s = s + a
        return s

    def all_finite(self) -> bool:
        return self.infinite_index() is None

    def denominator(self) -> Poly:
        """Q(t) = prod (t - tau_j) over the finite poles."""
        q = Poly([1])
        for i in self.finite_indices():
            q = q * Poly([-self.poles[i].finite, 1])
        return q

    def numerator_matrix(self) -> "list[list[Poly]]":
        """P(t) = Q(t) * A(t) as an n x n matrix of polynomials."""
        idx = self.finite_indices()
        out = [[Poly() for _ in range(self.n)] for _ in range(self.n)]
        for j in idx:
            cof = Poly([1])
            for k in idx:
                if k != j:
                    cof = cof * Poly([-self.poles[k].finite, 1])
            a = self.residues[j]
            for r in range(self.n):
                for c in range(self.n):
                    if a[r, c]:
                        out[r][c] = out[r][c] + cof * a[r, c]
        return out

    def bit_complexity(self) -> int:
        total = sum(a.bit_complexity() for a in self.residues)
        for p in self.poles:
            if not p.is_infinite:
                total += p.finite.bit_complexity()
        return total


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    in_proper_class: bool  # every residue nonzero (F_{n,m} proper vs partial closure F*)
    zero_residue_indices: tuple[int, ...]
    messages: tuple[str, ...]


def validate(system: FuchsianSystem) -> ValidationReport:
    """Check pole distinctness and the residue-sum identity.

    Raises DuplicatePoles / ResidueSumNonzero on hard failures; returns a
    report classifying proper-class membership otherwise.
    """
    pairs = []
    for i in range(system.m):
        for j in range(i + 1, system.m):
            pi, pj = system.poles[i], system.poles[j]
            if pi.is_infinite and pj.is_infinite:
                pairs.append((i, j))
            elif not pi.is_infinite and not pj.is_infinite and pi.finite == pj.finite:
                pairs.append((i, j))
    if pairs:
        raise DuplicatePoles(pairs)
    s = system.residue_sum()
    if not s.is_zero():
        raise ResidueSumNonzero(s)
    zeros = tuple(i for i, a in enumerate(system.residues) if a.is_zero())
    msgs = []
    if zeros:
        msgs.append(f"zero residues at indices {list(zeros)}: system lies in the partial closure")
    return ValidationReport(True, not zeros, zeros, tuple(msgs))


@dataclass(frozen=True)
class SpectrumReport:
    all_real: bool
    per_residue_real: tuple[bool, ...]
    eigenvalue_enclosures: tuple[tuple[Interval, ...], ...]  # real eigenvalues only


def matrix_spectrum_is_real(a: Matrix) -> bool:
    """Exact decision: does a have purely real spectrum (multiplicities included)?

    The characteristic polynomial is computed over Q(i); the spectrum is real
    iff all its coefficients are real and its squarefree part has as many
    distinct real roots as its degree (Sturm count).
    """
    cp = a.charpoly()
    if any(c.im != 0 for c in cp.coeffs):
        return False
    sf = poly_squarefree_part(cp)
    cs = real_coeffs(sf)
    return sturm_count_real_roots(cs) == sf.degree()


def spectral_class_check(system: FuchsianSystem) -> SpectrumReport:
    """True iff every residue has an all-real spectrum, with eigenvalue enclosures."""
    flags = []
    enclosures = []
    for a in system.residues:
        ok = matrix_spectrum_is_real(a)
        flags.append(ok)
        if ok:
            cp = a.charpoly()
            sf = poly_squarefree_part(cp)
            enclosures.append(tuple(real_root_isolation(real_coeffs(sf))))
        else:
            enclosures.append(())
    return SpectrumReport(all(flags), tuple(flags), tuple(enclosures))


# ---------------------------------------------------------------------------
# Carpeting functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CarpetValue:
    """A carpeting-function value: a rational enclosure with lower bound >= 2."""

    value: Interval

    def __init__(self, value):
        value = Interval.of(value)
        if value.lo < 2:
            raise ValueError(f"carpeting value must be >= 2, got {value}")
        object.__setattr__(self, "value", value)

    def __repr__(self):
        return f"CarpetValue({self.value})"


CARPETING_OPERATIONS = ("sum", "max", "radius", "shifted-product")

BASE_POINT_FUNCTIONS = ("reciprocal-distance", "residue-norm", "custom")


@dataclass(frozen=True)
class CarpetingSpec:
    base_point_function: str = "reciprocal-distance"
    operation: str = "shifted-product"

    def __post_init__(self):
        if self.operation not in CARPETING_OPERATIONS:
            raise ValueError(f"unknown carpeting operation {self.operation!r}")
        if self.base_point_function not in BASE_POINT_FUNCTIONS:
            raise ValueError(f"unknown base point function {self.base_point_function!r}")


def carpet_op(op: str, a: Interval, b: Interval) -> Interval:
    if op == "sum":
        return a + b
    if op == "max":
        return a.max_with(b)
    if op == "radius":
        return (a * a + b * b).sqrt()
    if op == "shifted-product":
        return (a + 2) * (b + 2)
    raise ValueError(f"unknown carpeting operation {op!r}")


def natural_carpet(values: Sequence[CarpetValue], spec: CarpetingSpec) -> CarpetValue:
    """Aggregate carpeting values with the chosen operation, order-independently.

    For sum / max / radius this is the associative fold.  The shifted product
    is combined n-arily as prod(2 + x_i): the paper's binary formula applied
    coordinate-wise, which is permutation-invariant (the binary operation
    itself is not associative; see the decisions ledger).
    """
    if not values:
        raise ValueError("natural_carpet of an empty collection")
    ivs = sorted((v.value for v in values), key=lambda iv: (iv.lo, iv.hi))
    if len(ivs) == 1:
        return CarpetValue(ivs[0])
    if spec.operation == "shifted-product":
        out = Interval(Fraction(1))
        for iv in ivs:
            out = out * (iv + 2)
        return CarpetValue(out)
    out = ivs[0]
    for iv in ivs[1:]:
        out = carpet_op(spec.operation, out, iv)
    return CarpetValue(out)


def r_flat(
    system: FuchsianSystem,
    ordered_pairs: bool = True,
    rel_prec: int = DEFAULT_REL_PREC,
) -> CarpetValue:
    """Reciprocal-distance carpeting value of a system:

    2 + sum over pairs of distinct poles of 1/dist + sum of residue norms,
    with the chordal metric.  Pairs are ordered by default (each unordered
    pair contributes twice); ordered_pairs=False switches to unordered.
    """
    validate(system)
    total = Interval(Fraction(2))
    m = system.m
    for i in range(m):
        for j in range(i + 1, m):
            d = chordal_dist(system.poles[i], system.poles[j], rel_prec)
            term = Interval(Fraction(1)) / d
            if ordered_pairs:
                term = term + term
            total = total + term
    for a in system.residues:
        total = total + matrix_norm(a, rel_prec)
    return CarpetValue(total)


def r_sharp(
    numerator: Sequence[Sequence[Poly]],
    denominator: Poly,
    rel_prec: int = DEFAULT_REL_PREC,
) -> CarpetValue:
    """Carpeting value in the rational-matrix chart:

    2 + 1/|disc(Q)| + |P| + |Q|, with the discriminant computed exactly.
    For monic Q of degree 1 the discriminant is 1 by convention.
    """
    q = Poly.of(denominator)
    if q.is_zero() or q.leading() != GaussRat(1):
        raise ValueError("denominator must be monic")
    if q.degree() >= 2:
        disc = poly_discriminant(q)
    else:
        disc = GaussRat(1)
    if not disc:
        raise ZeroDiscriminant("denominator has a multiple root")
    # coprimality of P and Q: no common root of Q with all entries of P
    g = q
    for row in numerator:
        for p in row:
            g = poly_gcd2(g, Poly.of(p))
    if g.degree() > 0:
        raise ValueError("numerator matrix and denominator are not coprime")
    total = Interval(Fraction(2))
    total = total + Interval(Fraction(1)) / sqrt_enclosure(disc.norm2(), rel_prec)
    pnorm = Interval(Fraction(0))
    for row in numerator:
        for p in row:
            pnorm = pnorm + poly_norm(Poly.of(p), rel_prec)
    total = total + pnorm + poly_norm(q, rel_prec)
    return CarpetValue(total)
