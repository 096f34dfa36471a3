"""Unit system and one-dimensional potential models.

All solvers work on the time-independent Schrodinger equation

    -(hbar^2 / 2m) psi'' + U(x) psi = E psi

with a potential that is constant outside a finite interval [a, b]:
``left_level`` for x <= a and ``right_level`` for x >= b.  Inside the
interval the potential is either piecewise constant (a stack of
contiguous segments) or piecewise linear through a table of samples.

Potentials are immutable value objects; validation happens eagerly at
construction so an invalid instance can never circulate.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum

from .errors import (
    EmptyDomainError,
    GapBetweenSegmentsError,
    OverlappingSegmentsError,
)

# Geometry comparisons: segment joins must agree to this absolute slack.
JOIN_TOL = 1e-12


class Side(Enum):
    """Incidence side for scattering, also used as an integration direction."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class ModelParams:
    """Physical constants fixing the unit system.

    Defaults are the dimensionless units hbar = m = 1 used throughout the
    test-suite.  Both constants must be strictly positive.
    """

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0) or not (self.mass > 0.0):
            raise ValueError("hbar and mass must be strictly positive")


@dataclass(frozen=True)
class PotentialSegment:
    """Constant-potential slab on [x_start, x_end), value ``u``."""

    x_start: float
    x_end: float
    u: float

    def __post_init__(self):
        if not self.x_start < self.x_end:
            raise OverlappingSegmentsError(
                f"segment needs x_start < x_end, got [{self.x_start}, {self.x_end}]"
            )

    @property
    def length(self) -> float:
        return self.x_end - self.x_start


@dataclass(frozen=True)
class PiecewisePotential:
    """Contiguous stack of constant segments between two semi-infinite leads.

    An empty segment tuple degenerates to a sharp potential step located
    at ``step_x``.
    """

    left_level: float
    segments: tuple[PotentialSegment, ...]
    right_level: float
    step_x: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments and self.step_x is None:
            raise EmptyDomainError(
                "empty segment list requires an explicit step_x location"
            )
        prev = None
        for seg in self.segments:
            if prev is not None:
                if seg.x_start - prev.x_end > JOIN_TOL:
                    raise GapBetweenSegmentsError(
                        f"gap between segments at x={prev.x_end} and x={seg.x_start}"
                    )
                if prev.x_end - seg.x_start > JOIN_TOL:
                    raise OverlappingSegmentsError(
                        f"segments overlap near x={seg.x_start}"
                    )
            prev = seg

    @property
    def a(self) -> float:
        """Left edge of the structured region (the step point if empty)."""
        return self.segments[0].x_start if self.segments else float(self.step_x)

    @property
    def b(self) -> float:
        """Right edge of the structured region (the step point if empty)."""
        return self.segments[-1].x_end if self.segments else float(self.step_x)

    def u_at(self, x: float) -> float:
        if x <= self.a:
            return self.left_level
        if x >= self.b:
            return self.right_level
        # interior: boundary points take the right segment's value
        for seg in self.segments:
            if x < seg.x_end:
                return seg.u
        return self.right_level

    def interfaces(self) -> list[float]:
        """All potential jump locations, ordered, including a and b."""
        if not self.segments:
            return [self.a]
        pts = [self.segments[0].x_start]
        pts.extend(seg.x_end for seg in self.segments)
        return pts

    def breakpoints_between(self, lo: float, hi: float) -> list[float]:
        """Interfaces strictly inside (lo, hi); used to split ODE integration."""
        return [x for x in self.interfaces() if lo < x < hi]

    def mirrored(self) -> "PiecewisePotential":
        """The potential reflected through x -> -x (leads swap)."""
        segs = tuple(
            PotentialSegment(-s.x_end, -s.x_start, s.u) for s in reversed(self.segments)
        )
        step = None if self.step_x is None else -self.step_x
        return PiecewisePotential(self.right_level, segs, self.left_level, step)


@dataclass(frozen=True)
class SampledPotential:
    """Piecewise-linear potential through (x, u) samples, constant outside.

    Sample abscissae must be strictly increasing; the leads take over for
    x <= xs[0] and x >= xs[-1] regardless of the edge sample values.
    """

    xs: tuple[float, ...]
    us: tuple[float, ...]
    left_level: float
    right_level: float

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "us", tuple(float(v) for v in self.us))
        if len(self.xs) != len(self.us):
            raise EmptyDomainError("xs and us must have equal length")
        if len(self.xs) < 2:
            raise EmptyDomainError("sampled potential needs at least two samples")
        for x0, x1 in zip(self.xs, self.xs[1:]):
            if not x0 < x1:
                raise OverlappingSegmentsError(
                    "sample abscissae must be strictly increasing"
                )

    @property
    def a(self) -> float:
        return self.xs[0]

    @property
    def b(self) -> float:
        return self.xs[-1]

    def u_at(self, x: float) -> float:
        if x <= self.a:
            return self.left_level
        if x >= self.b:
            return self.right_level
        i = bisect.bisect_right(self.xs, x) - 1
        x0, x1 = self.xs[i], self.xs[i + 1]
        w = (x - x0) / (x1 - x0)
        return (1.0 - w) * self.us[i] + w * self.us[i + 1]

    def interfaces(self) -> list[float]:
        return list(self.xs)

    def breakpoints_between(self, lo: float, hi: float) -> list[float]:
        return [x for x in self.xs if lo < x < hi]

    def mirrored(self) -> "SampledPotential":
        xs = tuple(-x for x in reversed(self.xs))
        us = tuple(reversed(self.us))
        return SampledPotential(xs, us, self.right_level, self.left_level)


Potential = PiecewisePotential | SampledPotential


def potential_at(pot: Potential, x: float) -> float:
    """Potential value at ``x`` (leads outside [a, b], right-value at joins)."""
    return pot.u_at(x)


def validate_potential(pot: Potential) -> Potential:
    """Re-run the construction checks; returns the potential unchanged.

    Constructors already validate, so this only matters for instances
    rebuilt through mechanisms that bypass ``__post_init__``.
    """
    type(pot)(**{f: getattr(pot, f) for f in pot.__dataclass_fields__})
    return pot
