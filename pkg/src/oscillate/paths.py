"""Arc and path geometry shared by the bound engine and the numeric oracle.

Geometry is held in hardware floats (this layer feeds the numeric
integrator); lengths are reported as small rational enclosures so the bound
formulas stay in exact arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import Interval

CIRCULAR_ARC = "circular-arc"
LINE_SEGMENT = "line-segment"
FULL_CIRCLE = "full-circle"

_LENGTH_SLACK = Fraction(1, 2**40)


def _enclose(x: float) -> Interval:
    f = Fraction(x)
    pad = abs(f) * _LENGTH_SLACK
    return Interval(f - pad, f + pad)


@dataclass(frozen=True)
class ArcSpec:
    """A circular arc, a line segment, or a full circle.

    clearance records the certified distance from the relevant singular set
    (zero means not yet certified).
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    angle0: float = 0.0
    angle1: float = 0.0
    start: complex = 0j
    end: complex = 0j
    clearance: float = 0.0

    def __post_init__(self):
        if self.kind not in (CIRCULAR_ARC, LINE_SEGMENT, FULL_CIRCLE):
            raise ValueError(f"unknown arc kind {self.kind!r}")
        if self.kind in (CIRCULAR_ARC, FULL_CIRCLE) and self.radius <= 0:
            raise ValueError("arc radius must be positive")
        if self.kind == CIRCULAR_ARC and self.angle0 == self.angle1:
            raise ValueError("degenerate circular arc")
        if self.kind == LINE_SEGMENT and self.start == self.end:
            raise ValueError("degenerate segment")

    @staticmethod
    def segment(a: complex, b: complex, clearance: float = 0.0) -> "ArcSpec":
        return ArcSpec(LINE_SEGMENT, start=complex(a), end=complex(b), clearance=clearance)

    @staticmethod
    def circle(center: complex, radius: float, clearance: float = 0.0) -> "ArcSpec":
        return ArcSpec(FULL_CIRCLE, center=complex(center), radius=float(radius), clearance=clearance)

    @staticmethod
    def arc(center: complex, radius: float, a0: float, a1: float, clearance: float = 0.0) -> "ArcSpec":
        return ArcSpec(
            CIRCULAR_ARC, center=complex(center), radius=float(radius),
            angle0=float(a0), angle1=float(a1), clearance=clearance,
        )

    def length(self) -> Interval:
        if self.kind == LINE_SEGMENT:
            return _enclose(abs(self.end - self.start))
        if self.kind == FULL_CIRCLE:
            return _enclose(2 * math.pi * self.radius)
        return _enclose(abs(self.angle1 - self.angle0) * self.radius)

    def point(self, s: float) -> complex:
        """Parametrization by s in [0, 1]."""
        if self.kind == LINE_SEGMENT:
            return self.start + s * (self.end - self.start)
        if self.kind == FULL_CIRCLE:
            ang = self.angle0 + 2 * math.pi * s
        else:
            ang = self.angle0 + s * (self.angle1 - self.angle0)
        return self.center + self.radius * cmath.exp(1j * ang)

    @property
    def startpoint(self) -> complex:
        return self.point(0.0)

    @property
    def endpoint(self) -> complex:
        return self.point(1.0)

    def is_closed_loop(self) -> bool:
        return self.kind == FULL_CIRCLE

    def subarc(self, s0: float, s1: float) -> "ArcSpec":
        """The piece between parameters s0 < s1 (both in [0, 1])."""
        if not 0.0 <= s0 < s1 <= 1.0:
            raise ValueError("subarc parameters out of order")
        if self.kind == LINE_SEGMENT:
            return ArcSpec.segment(self.point(s0), self.point(s1), self.clearance)
        if self.kind == FULL_CIRCLE:
            a0 = self.angle0 + 2 * math.pi * s0
            a1 = self.angle0 + 2 * math.pi * s1
        else:
            a0 = self.angle0 + s0 * (self.angle1 - self.angle0)
            a1 = self.angle0 + s1 * (self.angle1 - self.angle0)
        return ArcSpec.arc(self.center, self.radius, a0, a1, self.clearance)

    def reversed(self) -> "ArcSpec":
        if self.kind == LINE_SEGMENT:
            return ArcSpec.segment(self.end, self.start, self.clearance)
        if self.kind == FULL_CIRCLE:
            return ArcSpec(
                CIRCULAR_ARC, center=self.center, radius=self.radius,
                angle0=self.angle0 + 2 * math.pi, angle1=self.angle0,
                clearance=self.clearance,
            )
        return ArcSpec.arc(self.center, self.radius, self.angle1, self.angle0, self.clearance)


_CHAIN_TOL = 1e-9


@dataclass(frozen=True)
class ComplexPath:
    segments: tuple[ArcSpec, ...]

    def __init__(self, segments: Sequence[ArcSpec]):
        segments = tuple(segments)
        if not segments:
            raise ValueError("empty path")
        scale = max(1.0, max(abs(s.startpoint) for s in segments))
        for a, b in zip(segments, segments[1:]):
            if abs(a.endpoint - b.startpoint) > _CHAIN_TOL * scale:
                raise ValueError(
                    f"path segments do not chain: {a.endpoint} -> {b.startpoint}"
                )
        object.__setattr__(self, "segments", segments)

    @property
    def startpoint(self) -> complex:
        return self.segments[0].startpoint

    @property
    def endpoint(self) -> complex:
        return self.segments[-1].endpoint

    def is_closed(self) -> bool:
        scale = max(1.0, abs(self.startpoint))
        return abs(self.endpoint - self.startpoint) <= _CHAIN_TOL * scale

    def length(self) -> Interval:
        total = self.segments[0].length()
        for s in self.segments[1:]:
            total = total + s.length()
        return total

    def min_clearance(self) -> float:
        return min(s.clearance for s in self.segments)

    def reversed(self) -> "ComplexPath":
        return ComplexPath([s.reversed() for s in reversed(self.segments)])

    @staticmethod
    def single(arc: ArcSpec) -> "ComplexPath":
        return ComplexPath([arc])

    @staticmethod
    def circle_loop(center: complex, radius: float, clearance: float = 0.0) -> "ComplexPath":
        return ComplexPath([ArcSpec.circle(center, radius, clearance)])
