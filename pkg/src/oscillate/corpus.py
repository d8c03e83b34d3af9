"""Deterministic randomized system corpus for tests and calibration.

Spectral-class membership is arranged structurally: a sum of integer
symmetric matrices is symmetric, and a sum of triangular ones is triangular,
so drawing all residues from one of those families (with the last residue
balancing the sum) guarantees real spectra without any eigenvalue search.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .exact import GaussRat, Matrix
from .model import FuchsianSystem, SpherePoint, spectral_class_check, validate


def _random_pole_values(rng: random.Random, m: int) -> list[GaussRat]:
    grid = [
        GaussRat(Fraction(a, 2), Fraction(b, 2))
        for a in range(-6, 7)
        for b in range(-6, 7)
    ]
    return rng.sample(grid, m)


def _gauss_int(rng: random.Random, lo: int = -2, hi: int = 2) -> GaussRat:
    return GaussRat(rng.randint(lo, hi), rng.randint(lo, hi))


def _symmetric_int(rng: random.Random, n: int) -> Matrix:
    e = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = rng.randint(-2, 2)
            e[i][j] = v
            e[j][i] = v
    return Matrix.from_rows(e)


def _triangular_int(rng: random.Random, n: int) -> Matrix:
    e = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            e[i][j] = rng.randint(-2, 2)
    return Matrix.from_rows(e)


def random_system(
    seed: int,
    n: Optional[int] = None,
    m: Optional[int] = None,
    spectral: bool = False,
    allow_infinite_pole: bool = True,
) -> FuchsianSystem:
    """One corpus system: n <= 3, m <= 4, small entries, residues summing to
    zero.  With spectral=True every residue has a real spectrum by
    construction (all-symmetric or all-triangular integer residues)."""
    rng = random.Random(seed)
    n = n if n is not None else rng.randint(1, 3)
    m = m if m is not None else rng.randint(2, 4)

    while True:
        if spectral:
            family = _symmetric_int if rng.random() < 0.5 else _triangular_int
            residues = [family(rng, n) for _ in range(m - 1)]
        else:
            residues = [
                Matrix.from_rows(
                    [[_gauss_int(rng) for _ in range(n)] for _ in range(n)]
                )
                for _ in range(m - 1)
            ]
        last = Matrix.zero(n, n)
        for a in residues:
            last = last - a
        residues.append(last)
        if all(not a.is_zero() for a in residues):
            break

    pole_vals = _random_pole_values(rng, m)
    poles = [SpherePoint(v) for v in pole_vals]
    if allow_infinite_pole and rng.random() < 0.3:
        poles[-1] = SpherePoint.infinity()

    system = FuchsianSystem(n, tuple(poles), tuple(residues))
    validate(system)
    if spectral:
        assert spectral_class_check(system).all_real
    return system


def random_combination(seed: int, n: int) -> tuple[GaussRat, ...]:
    rng = random.Random(seed ^ 0x5EED)
    while True:
        comb = tuple(_gauss_int(rng) for _ in range(n))
        if any(comb):
            return comb


def spectral_corpus(count: int, base_seed: int = 0) -> list[FuchsianSystem]:
    return [random_system(base_seed + 1000 + k, spectral=True) for k in range(count)]
