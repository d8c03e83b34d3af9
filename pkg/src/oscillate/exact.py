"""Exact arithmetic substrate: Gaussian rationals, rational enclosures,
dense univariate polynomials and matrices over Q(i).

Everything downstream (system validation, operator derivation, bound
assembly) is computed on top of these types.  All values are immutable;
norms involving square roots are returned as rational enclosures, never
floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence, Union

#: default relative width of enclosures produced by sqrt_enclosure and norms
DEFAULT_REL_PREC = 64


class AllZero(ValueError):
    """Raised when a gcd of an all-zero polynomial collection is requested."""


ScalarLike = Union["GaussRat", Fraction, int]


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True, slots=True)
class GaussRat:
    """Element of Q(i), held as a pair of normalized rationals."""

    re: Fraction
    im: Fraction

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _to_fraction(re))
        object.__setattr__(self, "im", _to_fraction(im))

    @staticmethod
    def of(x: ScalarLike) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        return GaussRat(_to_fraction(x))

    def __add__(self, other):
        other = GaussRat.of(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat.of(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.of(other) - self

    def __mul__(self, other):
        other = GaussRat.of(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussRat.of(other)
        n2 = other.norm2()
        if n2 == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / n2,
            (self.im * other.re - self.re * other.im) / n2,
        )

    def __rtruediv__(self, other):
        return GaussRat.of(other) / self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2, an exact rational."""
        return self.re * self.re + self.im * self.im

    def abs_enclosure(self, rel_prec: int = DEFAULT_REL_PREC) -> "Interval":
        return sqrt_enclosure(self.norm2(), rel_prec)

    def is_real(self) -> bool:
        return self.im == 0

    def bit_complexity(self) -> int:
        """Bit-size of the explicit representation (both rational parts)."""
        total = 0
        for f in (self.re, self.im):
            total += abs(f.numerator).bit_length() + f.denominator.bit_length()
        return total

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


def _isqrt_floor(n: int) -> int:
    return isqrt(n)


def sqrt_enclosure(x: Fraction, rel_prec: int = DEFAULT_REL_PREC) -> "Interval":
    """Rational enclosure [lo, hi] of sqrt(x) with hi/lo <= 1 + 2^-rel_prec.

    x must be a nonnegative rational.  Widening rel_prec never shrinks
    the enclosure (monotone in the tolerance).
    """
    x = _to_fraction(x)
    if x < 0:
        raise ValueError("sqrt of a negative rational")
    if x == 0:
        return Interval(Fraction(0), Fraction(0))
    # sqrt(p/q) = sqrt(p*q)/q; scale so the integer sqrt carries rel_prec bits
    p, q = x.numerator, x.denominator
    n = p * q
    shift = 2 * rel_prec + 4
    m = n << (2 * shift)
    r = _isqrt_floor(m)
    lo = Fraction(r, q << shift)
    hi = Fraction(r + 1, q << shift)
    return Interval(lo, hi)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed rational interval [lo, hi]; the enclosure type for norms."""

    lo: Fraction
    hi: Fraction

    def __init__(self, lo, hi=None):
        lo = _to_fraction(lo)
        hi = lo if hi is None else _to_fraction(hi)
        if hi < lo:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @staticmethod
    def of(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        return Interval(_to_fraction(x))

    def __add__(self, other):
        other = Interval.of(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = Interval.of(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return Interval.of(other) - self

    def __mul__(self, other):
        other = Interval.of(other)
        prods = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Interval.of(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division through zero")
        quots = [
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ]
        return Interval(min(quots), max(quots))

    def __rtruediv__(self, other):
        return Interval.of(other) / self

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pow__(self, k: int):
        if k < 0:
            return Interval(1) / self ** (-k)
        out = Interval(Fraction(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def max_with(self, other) -> "Interval":
        other = Interval.of(other)
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def min_with(self, other) -> "Interval":
        other = Interval.of(other)
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def sqrt(self, rel_prec: int = DEFAULT_REL_PREC) -> "Interval":
        lo = sqrt_enclosure(max(self.lo, Fraction(0)), rel_prec).lo
        hi = sqrt_enclosure(self.hi, rel_prec).hi
        return Interval(lo, hi)

    def hull(self, other) -> "Interval":
        other = Interval.of(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def contains(self, x) -> bool:
        x = _to_fraction(x)
        return self.lo <= x <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __float__(self):
        return float(self.mid())

    def __repr__(self):
        if self.is_point():
            return f"[{self.lo}]"
        return f"[{self.lo}, {self.hi}]"


def _int_coeffs(coeffs):
    """Clear denominators: (common denominator, integer real parts,
    integer imaginary parts)."""
    den = 1
    for c in coeffs:
        den = lcm(den, c.re.denominator, c.im.denominator)
    re = [int(c.re * den) for c in coeffs]
    im = [int(c.im * den) for c in coeffs]
    return den, re, im


class Poly:
    """Dense univariate polynomial over Q(i), trailing zeros trimmed.

    degree() is the index of the leading coefficient; the zero polynomial
    has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussRat.of(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def of(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly([GaussRat.of(x)])

    @staticmethod
    def monomial(k: int, c=1) -> "Poly":
        return Poly([GaussRat(0)] * k + [GaussRat.of(c)])

    @staticmethod
    def variable() -> "Poly":
        return Poly([0, 1])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> GaussRat:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.of(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = Poly.of(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-Poly.of(other))

    def __rsub__(self, other):
        return Poly.of(other) - self

    def __mul__(self, other):
        if isinstance(other, (GaussRat, Fraction, int)):
            c = GaussRat.of(other)
            return Poly([a * c for a in self.coeffs])
        other = Poly.of(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        # denominators cleared once, big-integer convolution, one rational
        # normalization per output coefficient
        d1, ar, ai = _int_coeffs(self.coeffs)
        d2, br, bi = _int_coeffs(other.coeffs)
        out_re = [0] * (len(ar) + len(br) - 1)
        out_im = [0] * (len(ar) + len(br) - 1)
        for i in range(len(ar)):
            x, y = ar[i], ai[i]
            if not (x or y):
                continue
            for j in range(len(br)):
                u, v = br[j], bi[j]
                if u or v:
                    out_re[i + j] += x * u - y * v
                    out_im[i + j] += x * v + y * u
        den = d1 * d2
        return Poly(
            [
                GaussRat(Fraction(r, den), Fraction(s, den))
                for r, s in zip(out_re, out_im)
            ]
        )

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = Poly.of(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd, dv = len(rem) - 1, other.degree()
        if dd < dv:
            return Poly(), self
        inv_lead = ONE / other.leading()
        quot = [GaussRat(0)] * (dd - dv + 1)
        for k in range(dd - dv, -1, -1):
            c = rem[dv + k] * inv_lead
            if c:
                quot[k] = c
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Poly":
        q, r = divmod(self, Poly.of(other))
        if not r.is_zero():
            raise ValueError("exact_div with nonzero remainder")
        return q

    def derivative(self) -> "Poly":
        return Poly([c * k for k, c in enumerate(self.coeffs)][1:])

    def eval(self, x: ScalarLike) -> GaussRat:
        x = GaussRat.of(x)
        out = GaussRat(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def eval_complex(self, z: complex) -> complex:
        out = 0j
        for c in reversed(self.coeffs):
            out = out * z + c.to_complex()
        return out

    def conj_coeffs(self) -> "Poly":
        """Coefficient-wise conjugation: the reflection p^dagger in the real axis."""
        return Poly([c.conj() for c in self.coeffs])

    def compose_affine(self, a: ScalarLike, b: ScalarLike) -> "Poly":
        """p(a*t + b), exactly."""
        a, b = GaussRat.of(a), GaussRat.of(b)
        lin = Poly([b, a])
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * lin + Poly.of(c)
        return out

    def shift(self, b: ScalarLike) -> "Poly":
        """Taylor translate p(t + b)."""
        return self.compose_affine(ONE, b)

    def scale_arg(self, a: ScalarLike) -> "Poly":
        """p(a*t)."""
        a = GaussRat.of(a)
        out, pw = [], ONE
        for c in self.coeffs:
            out.append(c * pw)
            pw = pw * a
        return Poly(out)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = ONE / self.leading()
        return self * inv

    def norm(self, rel_prec: int = DEFAULT_REL_PREC) -> Interval:
        return poly_norm(self, rel_prec)

    def ord_at_zero(self) -> int:
        """Multiplicity of the root t=0 (degree+1 sentinel for the zero poly)."""
        if self.is_zero():
            return 0
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return 0

    def bit_complexity(self) -> int:
        return sum(c.bit_complexity() for c in self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = [f"{c!r}*t^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Poly(" + " + ".join(terms) + ")"


def poly_norm(p: Poly, rel_prec: int = DEFAULT_REL_PREC) -> Interval:
    """Enclosure of the coefficient 1-norm: sum of |c| over all coefficients."""
    total = Interval(Fraction(0))
    for c in p.coeffs:
        if c.im == 0:
            total = total + Interval(abs(c.re))
        elif c.re == 0:
            total = total + Interval(abs(c.im))
        else:
            total = total + sqrt_enclosure(c.norm2(), rel_prec)
    return total


def poly_mul(p: Poly, q: Poly) -> Poly:
    return Poly.of(p) * Poly.of(q)


def _gi_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _zi_gcd(x, y):
    """Gcd in Z[i] by the Euclidean algorithm with rounded division."""
    while y != (0, 0):
        n = y[0] * y[0] + y[1] * y[1]
        pr = x[0] * y[0] + x[1] * y[1]
        pi = x[1] * y[0] - x[0] * y[1]
        qr = (2 * pr + n) // (2 * n)
        qi = (2 * pi + n) // (2 * n)
        x, y = y, (
            x[0] - (qr * y[0] - qi * y[1]),
            x[1] - (qr * y[1] + qi * y[0]),
        )
    return x


def _gi_strip_content(coeffs):
    """Divide a Gaussian-integer coefficient list by its Z[i] content.

    Stripping the full Gaussian content (not just the integer one) is what
    keeps the remainder sequence at subresultant size; the systematic common
    factors accumulated by pseudo-division are complex."""
    g = (0, 0)
    for c in coeffs:
        g = _zi_gcd(g, c)
        if g[0] * g[0] + g[1] * g[1] == 1:
            return coeffs
    n = g[0] * g[0] + g[1] * g[1]
    if n <= 1:
        return coeffs
    out = []
    for r, s in coeffs:
        out.append(((r * g[0] + s * g[1]) // n, (s * g[0] - r * g[1]) // n))
    return out


def _gi_exact_div(c, d):
    """Exact division in Z[i]."""
    n = d[0] * d[0] + d[1] * d[1]
    return ((c[0] * d[0] + c[1] * d[1]) // n, (c[1] * d[0] - c[0] * d[1]) // n)


def _gi_pow(x, k):
    out = (1, 0)
    for _ in range(k):
        out = _gi_mul(out, x)
    return out


def _gi_prem(a, b):
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b over Z[i],
    coefficient lists ascending."""
    lead = b[-1]
    delta = len(a) - len(b)
    r = list(a)
    steps = 0
    while len(r) >= len(b):
        f = r[-1]
        shift = len(r) - len(b)
        new = [_gi_mul(c, lead) for c in r[:-1]]
        for i, bc in enumerate(b[:-1]):
            t = _gi_mul(bc, f)
            new[shift + i] = (new[shift + i][0] - t[0], new[shift + i][1] - t[1])
        while new and new[-1] == (0, 0):
            new.pop()
        r = new
        steps += 1
        if not r:
            return r
    # conform to the exact lc^(delta+1) scaling the subresultant factors assume
    for _ in range(delta + 1 - steps):
        r = [_gi_mul(c, lead) for c in r]
    return r


# primes = 1 mod 4 with a precomputed square root of -1: reduction mod p maps
# Q(i) into F_p so a cheap Euclid can certify coprimality before the exact PRS
_MOD_GCD_PRIMES = (
    (2305843009213693973, 1035093963448091331),
    (2305843009213694009, 2057672465479607062),
)


def _fp_reduce(coeffs, p, s):
    """Coefficient list mod p with i -> s, or None if a denominator or the
    leading coefficient vanishes mod p."""
    out = []
    for c in coeffs:
        dr, di = c.re.denominator % p, c.im.denominator % p
        if dr == 0 or di == 0:
            return None
        v = (
            c.re.numerator * pow(dr, p - 2, p) + s * c.im.numerator * pow(di, p - 2, p)
        ) % p
        out.append(v)
    if out[-1] == 0:
        return None
    return out


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_MOD_PRIME_CACHE: list = list(_MOD_GCD_PRIMES)


def _mod_primes(count: int):
    """First `count` primes = 1 mod 4 above 2^61, with a square root of -1."""
    while len(_MOD_PRIME_CACHE) < count:
        p = _MOD_PRIME_CACHE[-1][0] + 4
        while not (_is_probable_prime(p) and p % 4 == 1):
            p += 4
        a = 2
        while pow(a, (p - 1) // 2, p) != p - 1:
            a += 1
        _MOD_PRIME_CACHE.append((p, pow(a, (p - 1) // 4, p)))
    return _MOD_PRIME_CACHE[:count]


def _rat_reconstruct(c: int, m: int):
    """Fraction n/d with n = c*d mod m and |n|, d <= sqrt(m/2), or None."""
    c %= m
    r0, r1 = m, c
    t0, t1 = 0, 1
    bound = isqrt(m // 2)
    while r1 > bound:
        q = r0 // r1
        r0, r1, t0, t1 = r1, r0 - q * r1, t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    if t1 < 0:
        r1, t1 = -r1, -t1
    return Fraction(r1, t1)


def _poly_divisible(a: Poly, g: Poly) -> bool:
    """Exact divisibility a = q*g over Q(i), by a fraction-free remainder."""
    if a.is_zero():
        return True
    if a.degree() < g.degree():
        return False
    _, ar, ai = _int_coeffs(a.coeffs)
    _, gr, gi = _int_coeffs(g.coeffs)
    return not _gi_prem(list(zip(ar, ai)), list(zip(gr, gi)))


_MAX_GCD_PRIMES = 192


def _modular_gcd(a: Poly, b: Poly):
    """Monic gcd of a, b over Q(i) by modular images, or None.

    Per prime the gcd is computed under both embeddings i -> +-s, which are
    the images of the gcd and of its coefficient-conjugate; their sum and
    difference separate real and imaginary parts for ordinary rational
    reconstruction.  Images accumulate by incremental CRT; reconstruction is
    attempted on a geometric schedule.  A candidate is accepted only after a
    divisibility check, so a returned value is always correct."""
    best_deg = None
    m = 1
    xs_acc: list = []
    ys_acc: list = []
    count = 0
    next_try = 2
    for p, s in _mod_primes(_MAX_GCD_PRIMES):
        ra = _fp_reduce(a.coeffs, p, s)
        rb = _fp_reduce(b.coeffs, p, s)
        ca = _fp_reduce(a.coeffs, p, p - s)
        cb = _fp_reduce(b.coeffs, p, p - s)
        if ra is None or rb is None or ca is None or cb is None:
            continue
        g1 = _fp_gcd_list(ra, rb, p)
        g2 = _fp_gcd_list(ca, cb, p)
        if len(g1) != len(g2):
            continue
        deg = len(g1) - 1
        if deg == 0:
            return Poly([1])
        inv1 = pow(g1[-1], p - 2, p)
        inv2 = pow(g2[-1], p - 2, p)
        g1 = [c * inv1 % p for c in g1]
        g2 = [c * inv2 % p for c in g2]
        half = pow(2, p - 2, p)
        sinv = pow(2 * s % p, p - 2, p)
        xs = [(u + v) * half % p for u, v in zip(g1, g2)]
        ys = [(u - v) * sinv % p for u, v in zip(g1, g2)]
        if best_deg is None or deg < best_deg:
            best_deg = deg
            m, xs_acc, ys_acc, count, next_try = p, xs, ys, 1, 2
        elif deg == best_deg:
            minv = pow(m % p, p - 2, p)
            xs_acc = [
                (x + m * ((xp - x) * minv % p)) for x, xp in zip(xs_acc, xs)
            ]
            ys_acc = [
                (y + m * ((yp - y) * minv % p)) for y, yp in zip(ys_acc, ys)
            ]
            m *= p
            count += 1
        else:
            continue
        if count < next_try:
            continue
        next_try = count + max(2, count // 2)
        coeffs = []
        ok = True
        for xj, yj in zip(xs_acc, ys_acc):
            fx = _rat_reconstruct(xj, m)
            fy = _rat_reconstruct(yj, m)
            if fx is None or fy is None:
                ok = False
                break
            coeffs.append(GaussRat(fx, fy))
        if not ok:
            continue
        cand = Poly(coeffs)
        if cand.degree() == best_deg and _poly_divisible(a, cand) and _poly_divisible(b, cand):
            return cand
    return None


def _certified_coprime(a: Poly, b: Poly) -> bool:
    """True only if gcd(a, b) = 1, certified by a good modular reduction
    (the modular gcd degree bounds the true gcd degree from above)."""
    return _certified_coprime_many([a, b])


def _certified_coprime_many(ps: Sequence[Poly]) -> bool:
    """True only if the collection gcd is 1, by one good modular reduction."""
    for p, s in _MOD_GCD_PRIMES:
        reduced = []
        ok = True
        for q in ps:
            rq = _fp_reduce(q.coeffs, p, s)
            if rq is None:
                ok = False
                break
            reduced.append(rq)
        if not ok:
            continue
        g = reduced[0]
        for rq in reduced[1:]:
            if len(g) == 1:
                break
            # reuse the F_p Euclid; represent the running gcd exactly
            d = _fp_gcd_list(g, rq, p)
            g = d
        return len(g) == 1
    return False


def _fp_gcd_list(a, b, p):
    """Gcd of coefficient lists over F_p (ascending, leads nonzero)."""
    while b:
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b):
            f = (r[-1] * inv) % p
            shift = len(r) - len(b)
            if f:
                for i, bc in enumerate(b):
                    r[shift + i] = (r[shift + i] - f * bc) % p
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    return a


def poly_gcd2(p: Poly, q: Poly) -> Poly:
    """Monic gcd of two polynomials over Q(i), by the subresultant
    pseudo-remainder sequence over Z[i] (fraction free; every intermediate
    division is by a predicted exact factor, so coefficients stay at
    subresultant size without any content gcds).  A modular reduction
    certifies the common coprime case without any big-integer work."""
    a, b = Poly.of(p), Poly.of(q)
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.degree() > 0 and b.degree() > 0 and _certified_coprime(a, b):
        return Poly([1])
    if a.degree() > 0 and b.degree() > 0:
        modular = _modular_gcd(a, b)
        if modular is not None:
            return modular
    _, ar, ai = _int_coeffs(a.coeffs)
    _, br, bi = _int_coeffs(b.coeffs)
    ca = _gi_strip_content(list(zip(ar, ai)))
    cb = _gi_strip_content(list(zip(br, bi)))
    if len(ca) < len(cb):
        ca, cb = cb, ca
    g, h = (1, 0), (1, 0)
    while True:
        delta = len(ca) - len(cb)
        rem = _gi_prem(ca, cb)
        if not rem:
            break
        beta = _gi_mul(g, _gi_pow(h, delta))
        rem = [_gi_exact_div(c, beta) for c in rem]
        ca, cb = cb, rem
        g = ca[-1]
        if delta >= 1:
            h = _gi_exact_div(_gi_pow(g, delta), _gi_pow(h, delta - 1))
    return Poly([GaussRat(Fraction(r), Fraction(s)) for r, s in cb]).monic()


def poly_gcd(ps: Sequence[Poly]) -> Poly:
    """Monic gcd of a collection of polynomials over Q(i).

    Raises AllZero if every input is the zero polynomial.
    """
    ps = [Poly.of(p) for p in ps]
    nonzero = [p for p in ps if not p.is_zero()]
    if not nonzero:
        raise AllZero("gcd of an all-zero polynomial collection")
    if len(nonzero) > 1 and all(p.degree() > 0 for p in nonzero):
        if _certified_coprime_many(nonzero):
            return Poly([1])
    nonzero.sort(key=lambda p: p.degree())
    g = nonzero[0].monic()
    for p in nonzero[1:]:
        g = poly_gcd2(g, p)
        if g.degree() == 0:
            break
    return g


def poly_squarefree_part(p: Poly) -> Poly:
    """p divided by gcd(p, p'), monic."""
    p = Poly.of(p)
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if p.degree() == 0:
        return Poly([1])
    g = poly_gcd2(p, p.derivative())
    return p.exact_div(g).monic()


def poly_resultant(p: Poly, q: Poly) -> GaussRat:
    """Resultant over Q(i) via the Euclidean remainder sequence."""
    a, b = Poly.of(p), Poly.of(q)
    if a.is_zero() or b.is_zero():
        return GaussRat(0)
    res = GaussRat(1)
    sign = 1
    while b.degree() > 0:
        r = a % b
        if r.is_zero():
            return GaussRat(0)
        da, db, dr = a.degree(), b.degree(), r.degree()
        lb = b.leading()
        res = res * _pow_scalar(lb, da - dr)
        if (da % 2) and (db % 2):
            sign = -sign
        a, b = b, r
    # b is a nonzero constant
    res = res * _pow_scalar(b.leading(), a.degree())
    return res if sign > 0 else -res


def poly_discriminant(p: Poly) -> GaussRat:
    """Discriminant of p: (-1)^(d(d-1)/2) res(p, p') / lc(p)."""
    p = Poly.of(p)
    d = p.degree()
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return GaussRat(1)
    r = poly_resultant(p, p.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return r * GaussRat.of(sign) / p.leading()


def _pow_scalar(c: GaussRat, k: int) -> GaussRat:
    out = GaussRat(1)
    for _ in range(k):
        out = out * c
    return out


class Matrix:
    """Immutable dense matrix over Q(i)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(GaussRat.of(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.rows, self.cols = rows, cols
        self.entries = entries

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "Matrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = [e for row in rows for e in row]
        return Matrix(r, c, flat)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @staticmethod
    def zero(r: int, c: int) -> "Matrix":
        return Matrix(r, c, [ZERO] * (r * c))

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r * self.cols + c]

    def row(self, r: int):
        return self.entries[r * self.cols : (r + 1) * self.cols]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return Matrix(self.rows, self.cols, [-a for a in self.entries])

    def __mul__(self, other):
        if isinstance(other, (GaussRat, Fraction, int)):
            c = GaussRat.of(other)
            return Matrix(self.rows, self.cols, [a * c for a in self.entries])
        assert self.cols == other.rows
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                s = GaussRat(0)
                for k in range(self.cols):
                    s = s + self[i, k] * other[k, j]
                out.append(s)
        return Matrix(self.rows, other.cols, out)

    __rmul__ = __mul__

    def conj(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [e.conj() for e in self.entries])

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, [self[j, i] for i in range(self.cols) for j in range(self.rows)])

    def is_zero(self) -> bool:
        return not any(self.entries)

    def trace(self) -> GaussRat:
        assert self.rows == self.cols
        return sum((self[i, i] for i in range(self.rows)), GaussRat(0))

    def frobenius_norm2(self) -> Fraction:
        return sum((e.norm2() for e in self.entries), Fraction(0))

    def charpoly(self) -> Poly:
        """Characteristic polynomial det(xI - A) by Faddeev-LeVerrier."""
        assert self.rows == self.cols
        n = self.rows
        coeffs = [GaussRat(0)] * (n + 1)
        coeffs[n] = GaussRat(1)
        m = Matrix.identity(n)
        for k in range(1, n + 1):
            am = self * m
            c = -(am.trace() / k)
            coeffs[n - k] = c
            m = am + Matrix.identity(n) * c
        return Poly(coeffs)

    def det(self) -> GaussRat:
        cp = self.charpoly()
        c0 = cp.coeffs[0] if cp.coeffs else GaussRat(0)
        return c0 if self.rows % 2 == 0 else -c0

    def inverse(self) -> "Matrix":
        """Inverse by Gauss-Jordan elimination over Q(i)."""
        assert self.rows == self.cols
        n = self.rows
        aug = [list(self.row(i)) + list(Matrix.identity(n).row(i)) for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = ONE / aug[col][col]
            aug[col] = [e * inv for e in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return Matrix.from_rows([row[n:] for row in aug])

    def to_complex_list(self):
        return [
            [self[i, j].to_complex() for j in range(self.cols)] for i in range(self.rows)
        ]

    def bit_complexity(self) -> int:
        return sum(e.bit_complexity() for e in self.entries)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {list(self.entries)!r})"


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    out = []
    for i in range(a.rows):
        out.append(list(a.row(i)) + [ZERO] * b.cols)
    for i in range(b.rows):
        out.append([ZERO] * a.cols + list(b.row(i)))
    return Matrix.from_rows(out)


def matrix_norm(m: Matrix, rel_prec: int = DEFAULT_REL_PREC) -> Interval:
    """Enclosure of the Frobenius norm (the fixed matrix norm of this package)."""
    return sqrt_enclosure(m.frobenius_norm2(), rel_prec)


# ---------------------------------------------------------------------------
# Real-rational polynomial helpers (Sturm sequences for spectra decisions)
# ---------------------------------------------------------------------------


def real_coeffs(p: Poly) -> list[Fraction]:
    """Coefficient list of a polynomial known to have real coefficients."""
    for c in p.coeffs:
        if c.im != 0:
            raise ValueError("polynomial has a non-real coefficient")
    return [c.re for c in p.coeffs]


def _rpoly_eval(cs: Sequence[Fraction], x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(cs):
        out = out * x + c
    return out


def _rpoly_divmod(a, b):
    rem = list(a)
    dd, dv = len(rem) - 1, len(b) - 1
    if dd < dv:
        return [], rem
    inv = 1 / b[-1]
    quot = [Fraction(0)] * (dd - dv + 1)
    for k in range(dd - dv, -1, -1):
        c = rem[dv + k] * inv
        quot[k] = c
        if c:
            for j, bc in enumerate(b):
                rem[k + j] -= c * bc
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


def sturm_chain(cs: Sequence[Fraction]):
    """Sturm sequence of a real rational polynomial given by coefficients."""
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [cs]
    d = [c * k for k, c in enumerate(cs)][1:]
    if d:
        chain.append(d)
    while len(chain[-1]) > 1:
        _, r = _rpoly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(values) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_count_real_roots(cs: Sequence[Fraction], lo=None, hi=None) -> int:
    """Number of distinct real roots in (lo, hi]; whole line when both None."""
    chain = sturm_chain(cs)
    if lo is None or hi is None:
        # signs at -inf / +inf from leading coefficients
        at_neg = [c[-1] * (-1) ** (len(c) - 1) for c in chain]
        at_pos = [c[-1] for c in chain]
        return _sign_changes(at_neg) - _sign_changes(at_pos)
    at_lo = [_rpoly_eval(c, lo) for c in chain]
    at_hi = [_rpoly_eval(c, hi) for c in chain]
    return _sign_changes(at_lo) - _sign_changes(at_hi)


def real_root_isolation(cs: Sequence[Fraction], width: Fraction = Fraction(1, 2**32)):
    """Disjoint rational intervals, one per distinct real root, each of width <= width."""
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs or len(cs) == 1:
        return []
    # Cauchy bound on root magnitudes
    lead = abs(cs[-1])
    bound = 1 + max(abs(c) for c in cs[:-1]) / lead if len(cs) > 1 else Fraction(1)
    total = sturm_count_real_roots(cs)
    out = []

    def split(lo, hi, count):
        if count == 0:
            return
        if count == 1 and hi - lo <= width:
            out.append(Interval(lo, hi))
            return
        mid = (lo + hi) / 2
        if _rpoly_eval(cs, mid) == 0:
            # nudge the split point off the root
            mid = lo + (hi - lo) * Fraction(13, 27)
        left = sturm_count_real_roots(cs, lo, mid)
        split(lo, mid, left)
        split(mid, hi, count - left)

    split(-bound - 1, bound + 1, total)
    return sorted(out, key=lambda iv: iv.lo)
