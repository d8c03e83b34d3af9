"""Shared builders for the test suite: named small systems with known
closed-form solutions, used as independent oracles."""

from fractions import Fraction

import pytest

from oscillate import FuchsianSystem, GaussRat, Matrix, SpherePoint


def euler_system(N: int) -> FuchsianSystem:
    """x' = diag(N, 0)/t x: solutions span {t^N, 1}."""
    a = Matrix.from_rows([[N, 0], [0, 0]])
    return FuchsianSystem(
        2, (SpherePoint.at(0), SpherePoint.infinity()), (a, -a)
    )


def rotation_system() -> FuchsianSystem:
    """x' = J/t x with J the rotation generator: solutions span {t^i, t^-i}."""
    j = Matrix.from_rows([[0, -1], [1, 0]])
    return FuchsianSystem(
        2, (SpherePoint.at(0), SpherePoint.infinity()), (j, -j)
    )


def blowup_system(eps: Fraction) -> FuchsianSystem:
    """Four-pole family {0, eps, 1/eps, inf} with nilpotent residues whose
    carpeting value blows up as eps -> 0."""
    eps = Fraction(eps)
    a0 = Matrix.from_rows([[0, 1], [0, 0]])
    ae = Matrix.from_rows([[0, 0], [-1, 0]])
    return FuchsianSystem(
        2,
        (
            SpherePoint.at(0),
            SpherePoint.at(GaussRat(eps)),
            SpherePoint.at(GaussRat(1 / eps)),
            SpherePoint.infinity(),
        ),
        (a0, ae, -ae, -a0),
    )


@pytest.fixture
def euler5():
    return euler_system(5)


@pytest.fixture
def rotation():
    return rotation_system()
