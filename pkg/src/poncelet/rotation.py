"""Rotation numbers of the billiard map from complete and incomplete elliptic integrals.

For a caustic lam the rotation number is

    rho(lam) = int_0^{min(b, lam)} dt / sqrt|f(t)|  /  int_{max(b, lam)}^a dt / sqrt|f(t)|

with f(t) = (a - t)(b - t)(lam - t).  For a periodic caustic rho = m1 / m0.
Under s = 1/t both integrals become the integrals of ds / sqrt(P4(s)) over
(c1, inf) and (c3, c2), scaled by the same factor 1/sqrt(a b lam).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .conics import CausticKind, ConfocalFamily, classify


class DegenerateLambda(ValueError):
    pass


class MonotonicityViolated(AssertionError):
    pass


class Side(enum.Enum):
    ELLIPSE = "EllipseSide"
    HYPERBOLA = "HyperbolaSide"


@dataclass(frozen=True)
class RotationResult:
    lam: float
    rho: float
    quadrature_error: float


@dataclass(frozen=True)
class MonotonicityReport:
    side: Side
    lambdas: np.ndarray
    rhos: np.ndarray
    increasing: bool


def _check(family: ConfocalFamily, lam: float) -> None:
    kind = classify(family, lam)
    if kind not in (CausticKind.ELLIPSE, CausticKind.HYPERBOLA):
        raise DegenerateLambda(f"lambda={lam} gives a {kind.value} caustic")


def carlson_integrals(family: ConfocalFamily, lam):
    """Numerator and denominator integrals of rho by Carlson's R_F.

    With roots e1 > e2 > e3 of f, p = e2 - e3, q = e1 - e3:
      int_{e2}^{e1} dt / sqrt|f| = 2 R_F(0, p, q)
      int_0^{e3}  dt / sqrt(f)   = 2 R_F(pq/e3, pq/e3 + q, pq/e3 + p)
    The second form is the reduction of int_0^{e3} du/sqrt(u(u+p)(u+q))
    by u -> pq/u, which avoids cancellation when e3 is small.
    """
    lam = np.asarray(lam, dtype=float)
    e1 = family.a
    e2 = np.maximum(family.b, lam)
    e3 = np.minimum(family.b, lam)
    p = e2 - e3
    q = e1 - e3
    den = 2.0 * special.elliprf(0.0, p, q)
    w = p * q / e3
    num = 2.0 * special.elliprf(w, w + q, w + p)
    return num, den


def quadrature_integrals(family: ConfocalFamily, lam: float) -> tuple[float, float]:
    """The same integrals by adaptive quadrature after endpoint substitutions.

    t = e3 - u^2 removes the endpoint singularity of the numerator and
    t = e2 + (e1 - e2) sin^2(th) removes both singularities of the denominator.
    """
    e1 = family.a
    e2 = max(family.b, lam)
    e3 = min(family.b, lam)
    p, q = e2 - e3, e1 - e3
    num, _ = integrate.quad(lambda u: 2.0 / math.sqrt((p + u * u) * (q + u * u)), 0.0, math.sqrt(e3),
                            epsabs=0.0, epsrel=1e-13, limit=200)
    den, _ = integrate.quad(lambda th: 2.0 / math.sqrt(p + (e1 - e2) * math.sin(th) ** 2), 0.0, math.pi / 2,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return num, den


def rotation_numbers(family: ConfocalFamily, lams) -> np.ndarray:
    num, den = carlson_integrals(family, lams)
    return num / den


def rotation_number(family: ConfocalFamily, lam: float, crosscheck: bool = True) -> RotationResult:
    """rho(lam); with ``crosscheck`` the error estimate is the gap to quadrature."""
    _check(family, lam)
    num, den = carlson_integrals(family, lam)
    rho = float(num / den)
    if crosscheck:
        qn, qd = quadrature_integrals(family, lam)
        err = abs(rho - qn / qd)
    else:
        err = 8.0 * np.finfo(float).eps * rho
    return RotationResult(float(lam), rho, err)


def winding_integrals(family: ConfocalFamily, lam: float) -> tuple[float, float]:
    """I_inf = int_{c1}^inf ds/sqrt(P4) and I_mid = int_{c3}^{c2} ds/sqrt(P4).

    P4 is the monic quartic with roots 0, 1/a, 1/b, 1/lam; s = 1/t maps these
    onto the rotation-number integrals times sqrt(a b lam).
    """
    _check(family, lam)
    num, den = carlson_integrals(family, lam)
    scale = math.sqrt(family.a * family.b * lam)
    return float(scale * num), float(scale * den)


def winding_identity_residual(family: ConfocalFamily, lam: float, m0: int, m1: int) -> float:
    """|m0 I_inf - m1 I_mid| / (m0 I_inf); vanishes iff (m0, m1) is the winding pair."""
    i_inf, i_mid = winding_integrals(family, lam)
    return abs(m0 * i_inf - m1 * i_mid) / (m0 * i_inf)


def side_interval(family: ConfocalFamily, side: Side, guard: float) -> tuple[float, float]:
    if side is Side.ELLIPSE:
        return guard, family.b - guard
    return family.b + guard, family.a - guard


def monotonicity_scan(family: ConfocalFamily, side: Side, samples: int = 200,
                      guard: float = 1e-6) -> MonotonicityReport:
    """Sample rho on a uniform grid of one side and require strict monotonicity."""
    if samples < 3:
        raise ValueError("need at least 3 samples")
    lo, hi = side_interval(family, side, guard)
    lams = np.linspace(lo, hi, samples)
    rhos = rotation_numbers(family, lams)
    diffs = np.diff(rhos)
    if np.all(diffs > 0):
        increasing = True
    elif np.all(diffs < 0):
        increasing = False
    else:
        bad = int(np.flatnonzero(np.sign(diffs) != np.sign(diffs[0]))[0])
        raise MonotonicityViolated(
            f"rho not strictly monotone on {side.value} near lambda={lams[bad]:.17g}")
    return MonotonicityReport(side, lams, rhos, increasing)
