"""Certified complex root enclosures for exact polynomials.

Approximate roots come from high-precision numerics on the exact squarefree
factors; each approximation is wrapped in a disk that provably contains a
root (a degree-d polynomial has a root within d*|p(z)/p'(z)| of any z).  If
the disks are pairwise disjoint the enclosure set is certified: one root per
disk, all roots covered.  Distance-to-root-set lower bounds additionally fall
back on a fully rational inequality through the Cauchy root bound, which is
sound unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exact import DEFAULT_REL_PREC, GaussRat, Poly, poly_gcd2, sqrt_enclosure


@dataclass(frozen=True)
class RootEnclosure:
    center: complex
    radius: Fraction  # certified: the disk contains >= 1 root of its factor
    multiplicity: int


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = lc * prod f_i^i with the f_i squarefree, coprime,
    monic.  Returns [(f_i, i)] with trivial (constant) factors dropped."""
    p = Poly.of(p)
    if p.degree() <= 0:
        return []
    p = p.monic()
    dp = p.derivative()
    g = poly_gcd2(p, dp)
    if g.degree() == 0:
        return [(p, 1)]
    w = p.exact_div(g)
    y = dp.exact_div(g)
    out = []
    i = 1
    while w.degree() > 0 and i <= p.degree() + 1:
        z = y - w.derivative()
        f = poly_gcd2(w, z)
        if f.degree() > 0:
            out.append((f.monic(), i))
        w = w.exact_div(f) if f.degree() > 0 else w
        y = z.exact_div(f) if f.degree() > 0 else z
        i += 1
    return out


def cauchy_root_bound(p: Poly) -> Fraction:
    """Rational C with every root of p inside |z| <= C."""
    p = Poly.of(p)
    d = p.degree()
    if d <= 0:
        return Fraction(1)
    lead2 = p.leading().norm2()
    best = Fraction(0)
    for c in p.coeffs[:-1]:
        if c:
            r2 = c.norm2() / lead2
            hi = sqrt_enclosure(r2, 32).hi
            if hi > best:
                best = hi
    return 1 + best


def _to_mpc(c: GaussRat) -> mpmath.mpc:
    return mpmath.mpc(
        mpmath.mpf(c.re.numerator) / c.re.denominator,
        mpmath.mpf(c.im.numerator) / c.im.denominator,
    )


def _upper_fraction(x: mpmath.mpf, slack: Fraction = Fraction(1, 2**20)) -> Fraction:
    f = Fraction(float(x)) if x else Fraction(0)
    return f * (1 + slack) + Fraction(1, 2**200)


_ENCLOSURE_CACHE: dict = {}
_ENCLOSURE_CACHE_MAX = 512


def root_enclosures(p: Poly, prec: int = 160) -> tuple[list[RootEnclosure], bool]:
    """All roots of p as disks with multiplicities; the flag reports whether
    the disks (within each squarefree factor and across factors) are pairwise
    disjoint, i.e. the collection is a certified complete isolation.

    Results are memoized per (coefficients, precision); callers must treat the
    returned list as read-only."""
    p = Poly.of(p)
    if p.degree() <= 0:
        return [], True
    key = (p.coeffs, prec)
    cached = _ENCLOSURE_CACHE.get(key)
    if cached is not None:
        return cached
    enclosures: list[RootEnclosure] = []
    with mpmath.workprec(prec):
        for factor, mult in squarefree_decomposition(p):
            d = factor.degree()
            coeffs = [_to_mpc(c) for c in reversed(factor.coeffs)]
            try:
                rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=prec)
            except mpmath.libmp.NoConvergence:
                rts = mpmath.polyroots(coeffs, maxsteps=500, extraprec=4 * prec)
            dfactor = factor.derivative()
            for z in rts:
                pz = _eval_mp(factor, z)
                dz = _eval_mp(dfactor, z)
                if dz == 0:
                    radius = cauchy_root_bound(factor) * 2  # degenerate; never certified
                else:
                    radius = _upper_fraction(d * abs(pz / dz))
                enclosures.append(RootEnclosure(complex(z), radius, mult))
    certified = _pairwise_disjoint(enclosures)
    if len(_ENCLOSURE_CACHE) >= _ENCLOSURE_CACHE_MAX:
        _ENCLOSURE_CACHE.clear()
    _ENCLOSURE_CACHE[key] = (enclosures, certified)
    return enclosures, certified


def _eval_mp(p: Poly, z) -> mpmath.mpc:
    acc = mpmath.mpc(0)
    for c in reversed(p.coeffs):
        acc = acc * z + _to_mpc(c)
    return acc


def _pairwise_disjoint(encls: list[RootEnclosure]) -> bool:
    for i in range(len(encls)):
        for j in range(i + 1, len(encls)):
            a, b = encls[i], encls[j]
            if abs(a.center - b.center) <= float(a.radius + b.radius):
                return False
    return True


def distance_lower_bound(
    p: Poly, t: GaussRat, prec: int = 160, rel_prec: int = DEFAULT_REL_PREC
) -> Fraction:
    """Certified rational lower bound on dist(t, {p = 0}); 0 if p(t) = 0.

    Takes the better of the disk-enclosure bound (when the isolation is
    certified) and the unconditional Cauchy-bound inequality
    dist >= |p(t)| / (|lc| * (|t| + C)^(d-1)).
    """
    p = Poly.of(p)
    d = p.degree()
    if d <= 0:
        return Fraction(10**9)  # no zeros anywhere
    val = p.eval(t)
    if not val:
        return Fraction(0)

    # unconditional fallback
    c_bound = cauchy_root_bound(p)
    abs_t = sqrt_enclosure(t.norm2(), rel_prec).hi
    abs_val = sqrt_enclosure(val.norm2(), rel_prec).lo
    abs_lead = sqrt_enclosure(p.leading().norm2(), rel_prec).hi
    denom = abs_lead * (abs_t + c_bound) ** max(d - 1, 0)
    fallback = abs_val / denom
    fallback = min(fallback, abs_t + c_bound)  # never beyond the far rim

    encls, certified = root_enclosures(p, prec)
    if not certified:
        return fallback
    tz = complex(float(t.re), float(t.im))
    best = None
    for e in encls:
        gap = Fraction(abs(tz - e.center)) * Fraction(2**20 - 1, 2**20) - e.radius
        if best is None or gap < best:
            best = gap
    if best is None or best <= 0:
        return fallback
    return max(fallback, best)
