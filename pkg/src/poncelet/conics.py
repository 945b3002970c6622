"""Confocal conic geometry for the billiard inside x^2/a + y^2/b = 1.

The confocal family is x^2/(a - lam) + y^2/(b - lam) = 1.  Parameters
lam < b give ellipses, b < lam < a give hyperbolas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# Relative width of the band around b and a in which a caustic parameter is
# reported as degenerate.
DEGENERACY_RTOL = 1e-12
FOCUS_TOL = 1e-14


class FocusPoint(ValueError):
    pass


class DegenerateCaustic(ValueError):
    pass


class InvalidFamily(ValueError):
    pass


class CausticKind(enum.Enum):
    ELLIPSE = "Ellipse"
    HYPERBOLA = "Hyperbola"
    DEGENERATE_X = "DegenerateX"
    DEGENERATE_Y = "DegenerateY"
    NON_REAL = "NonReal"


@dataclass(frozen=True)
class ConfocalFamily:
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (self.a > self.b > 0):
            raise InvalidFamily(f"need a > b > 0, got a={self.a}, b={self.b}")

    @property
    def focus(self) -> float:
        return math.sqrt(self.a - self.b)

    def caustic(self, lambda0: float) -> "CausticParam":
        return CausticParam(float(lambda0), classify(self, lambda0))


@dataclass(frozen=True)
class CausticParam:
    lambda0: float
    kind: CausticKind

    @property
    def is_proper(self) -> bool:
        return self.kind in (CausticKind.ELLIPSE, CausticKind.HYPERBOLA)


@dataclass(frozen=True)
class EllipticCoords:
    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class IntervalConfig:
    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def points(self) -> tuple[float, float, float, float]:
        """The four endpoints in increasing order (c4, c3, c2, c1)."""
        return (self.c4, self.c3, self.c2, self.c1)

    def quartic(self) -> np.ndarray:
        """Coefficients (lowest degree first) of the monic quartic with roots c1..c4."""
        return np.polynomial.polynomial.polyfromroots([self.c4, self.c3, self.c2, self.c1])


def classify(family: ConfocalFamily, lambda0: float) -> CausticKind:
    a, b = family.a, family.b
    band = DEGENERACY_RTOL * a
    if abs(lambda0 - b) <= band:
        return CausticKind.DEGENERATE_X
    if abs(lambda0 - a) <= band:
        return CausticKind.DEGENERATE_Y
    if lambda0 <= 0 or lambda0 >= a:
        return CausticKind.NON_REAL
    return CausticKind.ELLIPSE if lambda0 < b else CausticKind.HYPERBOLA


def elliptic_coords(family: ConfocalFamily, point) -> EllipticCoords:
    """Both confocal parameters of the conics through ``point``.

    They are the roots of lam^2 - (a + b - x^2 - y^2) lam + (ab - b x^2 - a y^2) = 0.
    """
    a, b = family.a, family.b
    x, y = float(point[0]), float(point[1])
    s = a + b - x * x - y * y
    p = a * b - b * x * x - a * y * y
    disc = s * s - 4.0 * p
    if disc < FOCUS_TOL:
        raise FocusPoint(f"point ({x}, {y}) is a focus of the family")
    root = math.sqrt(disc)
    # stable quadratic formula; s > 0 whenever the point is inside the ellipse
    if s >= 0:
        big = 0.5 * (s + root)
    else:
        big = 0.5 * (s - root)
    small = p / big if big != 0 else 0.5 * (s - root)
    lam1, lam2 = sorted((small, big))
    return EllipticCoords(lam1, lam2)


def line_coordinates(point, direction) -> tuple[float, float, float]:
    """Normalized homogeneous coordinates (p, q, r) of the line p x + q y = r."""
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0:
        raise ValueError("direction must be nonzero")
    p, q = -dy / norm, dx / norm
    r = p * float(point[0]) + q * float(point[1])
    return p, q, r


def caustic_of_line(family: ConfocalFamily, point, direction) -> CausticParam:
    """Parameter of the confocal conic tangent to the line through ``point``.

    The line p x + q y = r (p^2 + q^2 = 1) touches the confocal conic with
    parameter lam iff (a - lam) p^2 + (b - lam) q^2 = r^2.  This form also
    covers lines through the origin.
    """
    p, q, r = line_coordinates(point, direction)
    lam = family.a * p * p + family.b * q * q - r * r
    return family.caustic(lam)


def interval_config(family: ConfocalFamily, caustic: CausticParam) -> IntervalConfig:
    if not caustic.is_proper:
        raise DegenerateCaustic(f"caustic of kind {caustic.kind.value} has no interval configuration")
    a, b, lam = family.a, family.b, caustic.lambda0
    if caustic.kind is CausticKind.ELLIPSE:
        return IntervalConfig(1.0 / lam, 1.0 / b, 1.0 / a, 0.0)
    return IntervalConfig(1.0 / b, 1.0 / lam, 1.0 / a, 0.0)
