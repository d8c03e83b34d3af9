"""Numeric oracle: analytic continuation of linear systems along complex
paths, argument-variation measurement, argument-principle zero counting, and
monodromy.

The integrator is an adaptive Taylor transport for x' = (N(t)/q(t)) x: per
step the coefficients are Taylor-shifted to the step center, the fundamental
matrix series is generated by the standard recurrence, and the step size is
kept below half the distance to the nearest singularity (so the chord and the
actual arc are homotopic inside the disk of analyticity).  The error model is
heuristic-rigorous: accumulated truncation-tail estimates, reported with
every frame.  Precision escalates through a fixed ladder before giving up.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import mpmath

from .exact import GaussRat, Poly
from .model import FuchsianSystem
from .paths import ArcSpec, ComplexPath
from .reduction import ScalarOperator

#: mantissa bits per escalation rung; the first rung runs on hardware doubles
PRECISION_LADDER = (64, 128, 256)

_TAYLOR_ORDER = 24
_MIN_CLEARANCE = 1e-12


class ClearanceLost(RuntimeError):
    """The path passed too close to a singularity to continue."""


class ToleranceUnreachable(RuntimeError):
    """Requested tolerance not met after exhausting the precision ladder."""


class ZeroOnArc(RuntimeError):
    """The continued solution (nearly) vanishes on the arc."""


class ZeroOnBoundary(RuntimeError):
    """A zero sits on the region boundary after maximal perturbation."""


class RationalSystem:
    """First-order linear system x' = (N(t)/q(t)) x with exact polynomial data."""

    def __init__(self, numerator: Sequence[Sequence[Poly]], denominator: Poly):
        self.numerator = [[Poly.of(p) for p in row] for row in numerator]
        self.denominator = Poly.of(denominator)
        self.dim = len(self.numerator)
        if any(len(row) != self.dim for row in self.numerator):
            raise ValueError("numerator matrix must be square")
        if self.denominator.is_zero():
            raise ValueError("zero denominator")
        self._sing: Optional[list[complex]] = None

    @staticmethod
    def from_fuchsian(system: FuchsianSystem) -> "RationalSystem":
        return RationalSystem(system.numerator_matrix(), system.denominator())

    @staticmethod
    def companion(op: ScalarOperator) -> "RationalSystem":
        """Companion system in x = (y, y', ..., y^(k-1)), denominator a_0."""
        k = op.order
        if k == 0:
            raise ValueError("order-zero operator has no companion system")
        a0 = op.a0
        rows = [[Poly() for _ in range(k)] for _ in range(k)]
        for i in range(k - 1):
            rows[i][i + 1] = a0
        for j in range(k):
            rows[k - 1][j] = -op.coefficients[k - j]
        return RationalSystem(rows, a0)

    def singularities(self) -> list[complex]:
        if self._sing is None:
            d = self.denominator.degree()
            if d <= 0:
                self._sing = []
            else:
                coeffs = [c.to_complex() for c in reversed(self.denominator.coeffs)]
                with mpmath.workprec(120):
                    try:
                        rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=240)
                    except mpmath.libmp.NoConvergence:
                        rts = mpmath.polyroots(coeffs, maxsteps=600, extraprec=600)
                self._sing = [complex(r) for r in rts]
        return self._sing

    def dist_to_singularity(self, z: complex) -> float:
        sing = self.singularities()
        if not sing:
            return float("inf")
        return min(abs(z - s) for s in sing)


def as_rational_system(source) -> RationalSystem:
    if isinstance(source, RationalSystem):
        return source
    if isinstance(source, FuchsianSystem):
        return RationalSystem.from_fuchsian(source)
    if isinstance(source, ScalarOperator):
        return RationalSystem.companion(source)
    raise TypeError(f"cannot integrate object of type {type(source).__name__}")


# -- series kernels (generic over python complex / mpmath.mpc) ---------------


def _shift_poly(coeffs: list, t0):
    b = list(coeffs)
    n = len(b)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            b[j] = b[j] + t0 * b[j + 1]
    return b


def _series_inv(q: list, order: int, one):
    r0 = one / q[0]
    out = [r0]
    for k in range(1, order):
        acc = None
        for i in range(1, min(k, len(q) - 1) + 1):
            term = q[i] * out[k - i]
            acc = term if acc is None else acc + term
        out.append(-r0 * acc if acc is not None else r0 * 0)
    return out


def _series_mul(a: list, b: list, order: int, zero):
    out = [zero] * order
    for i, ai in enumerate(a):
        if i >= order:
            break
        for j, bj in enumerate(b):
            if i + j >= order:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


class _Context:
    """Arithmetic context: hardware complex or mpmath at fixed precision."""

    def __init__(self, bits: int):
        self.bits = bits
        self.native = bits <= 64

    def convert(self, c: GaussRat):
        if self.native:
            return c.to_complex()
        return mpmath.mpc(
            mpmath.mpf(c.re.numerator) / c.re.denominator,
            mpmath.mpf(c.im.numerator) / c.im.denominator,
        )

    def lift(self, z: complex):
        return z if self.native else mpmath.mpc(z)

    @property
    def zero(self):
        return 0j if self.native else mpmath.mpc(0)

    @property
    def one(self):
        return (1 + 0j) if self.native else mpmath.mpc(1)

    def poly_arrays(self, system: RationalSystem):
        num = [
            [[self.convert(c) for c in p.coeffs] or [self.zero] for p in row]
            for row in system.numerator
        ]
        den = [self.convert(c) for c in system.denominator.coeffs]
        return num, den


def _mat_mul(a, b, zero):
    n, k = len(a), len(b[0])
    return [
        [sum((a[i][r] * b[r][j] for r in range(len(b))), zero) for j in range(k)]
        for i in range(n)
    ]


def _mat_norm(a) -> float:
    return float(max(sum(abs(x) for x in row) for row in a))


class _StepSeries:
    """Local fundamental-matrix Taylor series Phi(s), Phi(0) = I, around t0."""

    def __init__(self, ctx: _Context, num, den, t0, n: int, order: int):
        self.t0 = t0
        self.n = n
        z = ctx.zero
        qsh = _shift_poly(den, t0)
        qinv = _series_inv(qsh, order, ctx.one)
        a = [
            [_series_mul(_shift_poly(num[i][j], t0), qinv, order, z) for j in range(n)]
            for i in range(n)
        ]
        ident = [[ctx.one if i == j else z for j in range(n)] for i in range(n)]
        xs = [ident]
        for k in range(order - 1):
            nxt = [[z] * n for _ in range(n)]
            for i_ord in range(k + 1):
                ak = [[a[r][c][i_ord] for c in range(n)] for r in range(n)]
                prod = _mat_mul(ak, xs[k - i_ord], z)
                for r in range(n):
                    for c in range(n):
                        nxt[r][c] = nxt[r][c] + prod[r][c]
            inv = 1.0 / (k + 1)
            xs.append([[e * inv for e in row] for row in nxt])
        self.xs = xs

    def eval(self, h):
        n = self.n
        acc = [row[:] for row in self.xs[-1]]
        for k in range(len(self.xs) - 2, -1, -1):
            xk = self.xs[k]
            acc = [[acc[i][j] * h + xk[i][j] for j in range(n)] for i in range(n)]
        return acc

    def tail_estimate(self, h) -> float:
        habs = abs(h)
        t1 = _mat_norm(self.xs[-1]) * habs ** (len(self.xs) - 1)
        t2 = _mat_norm(self.xs[-2]) * habs ** (len(self.xs) - 2)
        return float(t1 + t2)


class _VecStepSeries:
    """Taylor series of the single solution x(s) with x(0) = v0, around t0.

    Same recurrence as _StepSeries but carried on a column instead of the
    fundamental matrix: an order-of-n cheaper when only one solution is
    transported (argument-variation sweeps)."""

    def __init__(self, ctx: _Context, num, den, t0, n: int, order: int, v0):
        self.t0 = t0
        self.n = n
        z = ctx.zero
        qsh = _shift_poly(den, t0)
        qinv = _series_inv(qsh, order, ctx.one)
        a = [
            [_series_mul(_shift_poly(num[i][j], t0), qinv, order, z) for j in range(n)]
            for i in range(n)
        ]
        xs = [list(v0)]
        for k in range(order - 1):
            inv = 1.0 / (k + 1)
            nxt = []
            for i in range(n):
                ai = a[i]
                acc = z
                for j in range(n):
                    aij = ai[j]
                    for i_ord in range(k + 1):
                        acc = acc + aij[i_ord] * xs[k - i_ord][j]
                nxt.append(acc * inv)
            xs.append(nxt)
        self.xs = xs

    def eval(self, h):
        acc = list(self.xs[-1])
        for k in range(len(self.xs) - 2, -1, -1):
            xk = self.xs[k]
            acc = [acc[i] * h + xk[i] for i in range(self.n)]
        return acc

    def tail_estimate(self, h) -> float:
        habs = abs(h)
        t1 = max(abs(x) for x in self.xs[-1]) * habs ** (len(self.xs) - 1)
        t2 = max(abs(x) for x in self.xs[-2]) * habs ** (len(self.xs) - 2)
        return float(t1 + t2)


class _Transporter:
    """Stateful stepping engine for one (system, context) pair."""

    def __init__(self, system: RationalSystem, ctx: _Context, tol: float):
        self.system = system
        self.ctx = ctx
        self.num, self.den = ctx.poly_arrays(system)
        self.steptol = max(tol * 1e-3, 1e-300)
        self.err = 0.0
        #: optional witness covector; with a recorder attached, every column
        #: step is subdivided until y = witness . x moves within a zero-free
        #: disk around its step-start value (|y| spread <= |y0| / 2), which
        #: certifies the per-step argument change below asin(1/2)
        self.witness = None
        self.record = None

    def along_arc(self, arc: ArcSpec, state):
        """Advance along the arc; every step endpoint lies on the arc itself.

        A step is a chord between two arc points, shrunk (in arc parameter,
        reusing the step series) until the truncation tail is small and, with
        a recorder attached, until the witness value provably stays in a
        zero-free disk over the whole step.  The series coefficient bound at
        radius |h| covers every arc point of the step, since those are within
        |h| of the step start; so no argument variation can hide between
        recorded samples and the winding is measured along the true arc."""
        total = float(arc.length().hi)
        column = len(state[0]) == 1
        witnessed = column and self.record is not None
        comb_norm = (
            float(sum(abs(c) for c in self.witness)) if witnessed else 0.0
        )
        s = 0.0
        guard = 0
        while s < 1.0 - 1e-15:
            z = arc.point(s)
            dist = self.system.dist_to_singularity(z)
            if dist < _MIN_CLEARANCE:
                raise ClearanceLost(f"path touches a singularity near {z}")
            if column:
                series = _VecStepSeries(
                    self.ctx,
                    self.num,
                    self.den,
                    self.ctx.lift(z),
                    self.system.dim,
                    _TAYLOR_ORDER,
                    [r[0] for r in state],
                )
            else:
                series = _StepSeries(
                    self.ctx,
                    self.num,
                    self.den,
                    self.ctx.lift(z),
                    self.system.dim,
                    _TAYLOR_ORDER,
                )
            if witnessed:
                ys = [
                    sum(c * row[i] for i, c in enumerate(self.witness))
                    for row in series.xs
                ]
                y0 = float(abs(ys[0]))
            step_len = min(0.5 * dist, total * (1.0 - s))
            ds = step_len / total if total > 0 else 1.0 - s
            certified = False
            for _ in range(60):
                s2 = min(1.0, s + ds)
                h = arc.point(s2) - z
                tail = series.tail_estimate(h)
                if tail <= self.steptol:
                    if not witnessed:
                        certified = True
                        break
                    habs = abs(h)
                    spread = float(
                        sum(abs(y) * habs**k for k, y in enumerate(ys) if k)
                    )
                    if spread + comb_norm * tail <= 0.5 * y0:
                        certified = True
                        break
                ds *= 0.5
            if witnessed and not certified:
                # the witness value cannot be boxed into a zero-free disk on
                # any usable step: a zero of y sits on or next to the arc
                raise ZeroOnArc(
                    f"witness value not certifiably zero-free near {z}"
                )
            self.err += tail
            hl = self.ctx.lift(h)
            if column:
                state = [[x] for x in series.eval(hl)]
                if self.record is not None:
                    self.record.append(
                        complex(sum(c * r[0] for c, r in zip(self.witness, state)))
                    )
            else:
                state = _mat_mul(series.eval(hl), state, self.ctx.zero)
            s = s2
            guard += 1
            if guard > 200000:
                raise ClearanceLost("step count exploded near a singularity")
        return state

    def along_path(self, path: ComplexPath, state):
        for arc in path.segments:
            state = self.along_arc(arc, state)
        return state


@dataclass
class SolutionFrame:
    base_point: complex
    matrix: list  # n x n, context numbers
    error_bound: float
    precision_bits: int

    def to_complex(self) -> list[list[complex]]:
        return [[complex(e) for e in row] for row in self.matrix]


def integrate(
    source,
    path: ComplexPath,
    tol: float = 1e-10,
    ladder: Sequence[int] = PRECISION_LADDER,
) -> SolutionFrame:
    """Fundamental matrix transported along the path (identity at the start),
    with relative error estimate <= tol or ToleranceUnreachable."""
    system = as_rational_system(source)
    n = system.dim
    last_rel = None
    for bits in ladder:
        ctx = _Context(bits)
        tr = _Transporter(system, ctx, tol)
        ident = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]
        state = tr.along_path(path, ident)
        scale = max(_mat_norm(state), 1e-300)
        rel = tr.err / scale
        if rel <= tol:
            return SolutionFrame(path.endpoint, state, rel, bits)
        last_rel = rel
    raise ToleranceUnreachable(
        f"relative error {last_rel} > {tol} after ladder {tuple(ladder)}"
    )


def _unwrap(args: list[float]) -> Optional[float]:
    """Total continuous variation; None if some jump is >= pi/2."""
    total = 0.0
    for a, b in zip(args, args[1:]):
        d = b - a
        while d > math.pi:
            d -= 2 * math.pi
        while d < -math.pi:
            d += 2 * math.pi
        if abs(d) >= math.pi / 2:
            return None
        total += d
    return total


@dataclass
class VariationResult:
    variation: float
    samples: int
    error_estimate: float
    final_state: list  # column state at the path end


def var_arg_measure(
    source,
    seed: Sequence[complex],
    arc: Union[ArcSpec, ComplexPath],
    tol: float = 1e-8,
    combination: Optional[Sequence[complex]] = None,
) -> VariationResult:
    """Continuous argument variation of y = combination . x along the arc,
    for the solution x with the given start value.  For a companion system
    the default combination picks out y itself (first coordinate)."""
    system = as_rational_system(source)
    path = arc if isinstance(arc, ComplexPath) else ComplexPath.single(arc)
    n = system.dim
    comb = (
        [complex(c) for c in combination]
        if combination is not None
        else [1.0 + 0j] + [0j] * (n - 1)
    )
    seed = [complex(s) for s in seed]

    ladder_failed = None
    for bits in PRECISION_LADDER:
        ctx = _Context(bits)
        tr = _Transporter(system, ctx, tol)
        tr.witness = [ctx.lift(c) for c in comb]
        state = [[ctx.lift(s)] for s in seed]
        values = [complex(sum(c * complex(r[0]) for c, r in zip(comb, state)))]
        tr.record = values
        for arc in path.segments:
            state = tr.along_arc(arc, state)
        mags = [abs(v) for v in values]
        top = max(mags)
        if top == 0 or min(mags) < 1e-10 * top:
            raise ZeroOnArc("continued solution vanishes (to tolerance) on the arc")
        scale = max(_mat_norm(state), 1e-300)
        if tr.err / scale > tol:
            ladder_failed = tr.err / scale
            continue
        total = _unwrap([cmath.phase(v) for v in values])
        if total is None:
            # a certified-small per-step spread makes every jump < pi/2; a
            # larger one means the step hit its subdivision cap near a zero
            raise ZeroOnArc("argument spread not certifiable on the arc")
        return VariationResult(total, len(values), tr.err / scale, state)
    raise ToleranceUnreachable(
        f"variation error {ladder_failed} > {tol} after full ladder"
    )


@dataclass
class RegionCount:
    zeros: int
    total_variation: float
    margin: float
    closed_defect: float  # |y(end) - y(start)| / scale: branch-return check
    samples: int


def count_zeros_region(
    source,
    boundary: ComplexPath,
    tol: float = 1e-8,
    seed: Optional[Sequence[complex]] = None,
    combination: Optional[Sequence[complex]] = None,
) -> RegionCount:
    """Zeros (with multiplicity) of the continued combination inside the
    region, by the argument principle along the closed boundary."""
    if not boundary.is_closed():
        raise ValueError("region boundary must be a closed path")
    system = as_rational_system(source)
    n = system.dim
    if seed is None:
        seed = [1.0] + [0.0] * (n - 1)
    res = var_arg_measure(source, seed, boundary, tol, combination)
    turns = res.variation / (2 * math.pi)
    k = round(turns)
    margin = abs(res.variation - 2 * math.pi * k)
    if margin >= math.pi:
        raise ZeroOnBoundary(
            f"winding {turns} too far from an integer (margin {margin:.3f} rad)"
        )
    comb = (
        [complex(c) for c in combination]
        if combination is not None
        else [1.0 + 0j] + [0j] * (n - 1)
    )
    y_end = sum(c * complex(r[0]) for c, r in zip(comb, res.final_state))
    y_start = sum(c * complex(s) for c, s in zip(comb, seed))
    scale = max(abs(y_end), abs(y_start), 1e-300)
    defect = abs(y_end - y_start) / scale
    return RegionCount(k, res.variation, margin, defect, res.samples)


@dataclass
class MonodromyData:
    loop: ComplexPath
    matrix: list[list[complex]]
    error_bound: float
    eigenvalues: list[complex]
    eigenvalue_radii: list[float]
    unit_flags: list[str]  # "unit" | "non-unit" | "indeterminate"

    def all_unit(self) -> bool:
        return all(f == "unit" for f in self.unit_flags)


_UNIT_TOL = 1e-6


def monodromy(source, loop: ComplexPath, tol: float = 1e-9) -> MonodromyData:
    """Monodromy matrix along the closed loop, with per-eigenvalue
    unit-modulus certification at enclosure width 1e-6."""
    if not loop.is_closed():
        raise ValueError("monodromy loop must be closed")
    frame = integrate(source, loop, tol)
    mat = frame.to_complex()
    n = len(mat)
    with mpmath.workprec(max(frame.precision_bits, 64) + 32):
        mp_mat = mpmath.matrix(n)
        for i in range(n):
            for j in range(n):
                mp_mat[i, j] = mpmath.mpc(mat[i][j])
        eigs = [complex(e) for e in mpmath.eig(mp_mat, left=False, right=False)]
    scale = max(_mat_norm(mat), 1.0)
    # the eigensolve conditioning is not tracked; the certification enclosure
    # is never taken narrower than half the advertised width
    radius = max(frame.error_bound * scale * 10, 1e-15 * scale, 0.5 * _UNIT_TOL)
    flags = []
    for mu in eigs:
        lo, hi = abs(mu) - radius, abs(mu) + radius
        if hi < 1 or lo > 1:
            flags.append("non-unit")
        elif 2.0 * radius <= _UNIT_TOL:
            flags.append("unit")
        else:
            flags.append("indeterminate")
    det = 1.0 + 0j
    for mu in eigs:
        det *= mu
    if abs(det) <= radius**n:
        raise ToleranceUnreachable("monodromy determinant enclosure touches zero")
    return MonodromyData(loop, mat, radius, eigs, [radius] * len(eigs), flags)
