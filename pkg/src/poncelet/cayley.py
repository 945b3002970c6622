"""Hankel-determinant conditions for periodic and elliptic-periodic trajectories.

A caustic lam0 gives n-periodic trajectories iff a Hankel determinant in the
Taylor coefficients of B = sqrt((a - x)(b - x)(lam0 - x)), C = B/(lam0 - x) or
D = B/(b - x) vanishes.  ``schedule`` lists which series, first index and
size apply to each period and flavor.

Residuals are evaluated on the dimensionless coefficients c_k rho^k / c_0,
rho = min(lam0, b) being the radius of convergence.  This positive rescaling
keeps the sign and the zero set of every determinant while making the values
comparable across (a, b, lam0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from . import rotation
from .conics import CausticKind, CausticParam, ConfocalFamily, DegenerateCaustic, classify
from .series import series_family

GRID_DENSITY = 10_000
GUARD = 1e-9
BISECTION_TOL = 1e-12
TOUCH_THRESHOLD = 1e-18
# A root of the condition for a proper divisor d of n is recognised when the
# normalized residual for d is below this value at the refined root.
DIVISOR_TOL = 1e-8


class Flavor(enum.Enum):
    PERIODIC = "Periodic"
    ELLIPTIC_A = "EllipticA"
    ELLIPTIC_B = "EllipticB"
    ELLIPTIC_C = "EllipticC"


class Source(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    ROOT_SCAN = "RootScan"


class UnsupportedPeriod(ValueError):
    pass


@dataclass(frozen=True)
class HankelSchedule:
    series: str
    start: int
    dim: int

    @property
    def last_index(self) -> int:
        return self.start + 2 * (self.dim - 1) if self.dim else self.start


@dataclass(frozen=True)
class PeriodicityCondition:
    n: int
    flavor: Flavor
    residual: float
    matrix_dim: int
    series: str
    odd_hyperbola: bool = False

    def vanishes(self, tol: float = 1e-10) -> bool:
        return abs(self.residual) < tol


@dataclass(frozen=True)
class CausticSolution:
    caustic: CausticParam
    n: int
    winding: tuple[int, int]
    source: Source
    flavor: Flavor = Flavor.PERIODIC
    validated: Optional[bool] = field(default=None, compare=False)

    @property
    def lambda0(self) -> float:
        return self.caustic.lambda0


def schedule(flavor: Flavor, n: int) -> HankelSchedule:
    """Series, first coefficient index and size of the Hankel matrix."""
    m, odd = divmod(n, 2)
    if flavor is Flavor.PERIODIC:
        if n < 3:
            raise ValueError("periodic conditions need n >= 3")
        return HankelSchedule("C", 2, m) if odd else HankelSchedule("B", 3, m - 1)
    if n < 2:
        raise ValueError("elliptic-periodic conditions need n >= 2")
    if flavor is Flavor.ELLIPTIC_A:
        return HankelSchedule("B", 2, m) if odd else HankelSchedule("C", 1, m)
    if flavor is Flavor.ELLIPTIC_B:
        return HankelSchedule("B", 2, m) if odd else HankelSchedule("D", 1, m)
    if not odd:
        raise ValueError("case (c) applies to odd n only")
    return HankelSchedule("D", 2, m)


def hankel_residuals(family: ConfocalFamily, lams, sched: HankelSchedule) -> np.ndarray:
    """Normalized Hankel determinants for an array of lam0 values."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if sched.dim == 0:
        return np.ones_like(lams)
    N = sched.last_index
    coeffs = series_family(family.a, family.b, lams, N)[sched.series].coeffs
    rho = np.minimum(lams, family.b)
    k = np.arange(N + 1)[:, None]
    scaled = coeffs * rho[None, :] ** k / coeffs[0][None, :]
    idx = sched.start + np.add.outer(np.arange(sched.dim), np.arange(sched.dim))
    mats = np.moveaxis(scaled[idx], -1, 0)
    return np.linalg.det(mats)


def _require_proper(family: ConfocalFamily, lambda0: float) -> CausticKind:
    kind = classify(family, lambda0)
    if kind not in (CausticKind.ELLIPSE, CausticKind.HYPERBOLA):
        raise DegenerateCaustic(f"lambda0={lambda0} gives a {kind.value} caustic")
    return kind


def periodic_residual(family: ConfocalFamily, lambda0: float, n: int) -> PeriodicityCondition:
    kind = _require_proper(family, lambda0)
    sched = schedule(Flavor.PERIODIC, n)
    if n % 2 and kind is CausticKind.HYPERBOLA:
        # trajectories with a hyperbola as caustic have even period
        return PeriodicityCondition(n, Flavor.PERIODIC, math.inf, sched.dim, sched.series, odd_hyperbola=True)
    r = float(hankel_residuals(family, [lambda0], sched)[0])
    return PeriodicityCondition(n, Flavor.PERIODIC, r, sched.dim, sched.series)


def applicable_elliptic_flavors(kind: CausticKind, n: int) -> list[Flavor]:
    if kind is CausticKind.ELLIPSE:
        return [Flavor.ELLIPTIC_A]
    return [Flavor.ELLIPTIC_B] + ([Flavor.ELLIPTIC_C] if n % 2 else [])


def elliptic_periodic_residual(family: ConfocalFamily, lambda0: float, n: int) -> list[PeriodicityCondition]:
    kind = _require_proper(family, lambda0)
    out = []
    for flavor in applicable_elliptic_flavors(kind, n):
        sched = schedule(flavor, n)
        r = float(hankel_residuals(family, [lambda0], sched)[0])
        out.append(PeriodicityCondition(n, flavor, r, sched.dim, sched.series))
    return out


def flavor_residual(family: ConfocalFamily, lambda0: float, n: int, flavor: Flavor) -> float:
    if flavor is Flavor.PERIODIC:
        return periodic_residual(family, lambda0, n).residual
    return float(hankel_residuals(family, [lambda0], schedule(flavor, n))[0])


def _scan_intervals(family: ConfocalFamily, n: int, flavor: Flavor) -> list[tuple[float, float]]:
    g = GUARD * (family.a - family.b)
    ellipse = (g, family.b - g)
    hyperbola = (family.b + g, family.a - g)
    if flavor is Flavor.PERIODIC:
        return [ellipse] if n % 2 else [ellipse, hyperbola]
    if flavor is Flavor.ELLIPTIC_A:
        return [ellipse]
    if flavor is Flavor.ELLIPTIC_B:
        return [hyperbola]
    return [hyperbola] if n % 2 else []


def _bisect(fun, lo: float, hi: float, flo: float) -> float:
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(family: ConfocalFamily, sched: HankelSchedule, lo: float, hi: float,
               density: int = GRID_DENSITY) -> list[float]:
    """Roots of one Hankel condition on [lo, hi]: sign changes plus touching minima."""
    grid = np.linspace(lo, hi, density)
    vals = hankel_residuals(family, grid, sched)

    def fun(x):
        return float(hankel_residuals(family, [x], sched)[0])

    roots = []
    for i in np.flatnonzero(vals == 0):
        roots.append(float(grid[i]))
    change = np.flatnonzero(vals[:-1] * vals[1:] < 0)
    for i in change:
        roots.append(_bisect(fun, float(grid[i]), float(grid[i + 1]), float(vals[i])))
    mag = np.abs(vals)
    interior = np.arange(1, density - 1)
    is_min = (mag[interior] < mag[interior - 1]) & (mag[interior] < mag[interior + 1])
    same_sign = vals[interior - 1] * vals[interior + 1] > 0
    for i in interior[is_min & same_sign]:
        res = optimize.minimize_scalar(lambda x: abs(fun(x)), bounds=(grid[i - 1], grid[i + 1]),
                                       method="bounded", options={"xatol": 1e-14})
        if res.fun < TOUCH_THRESHOLD:
            roots.append(float(res.x))
    return sorted(roots)


def _dedupe(values: list[float], tol: float = 1e-9) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out


def _proper_divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


def _has_shorter_period(family: ConfocalFamily, lam: float, n: int, flavor: Flavor) -> bool:
    """True if lam already solves a condition whose period divides n, or, for
    elliptic flavors, the n-periodic condition itself."""
    kind = classify(family, lam)
    for d in _proper_divisors(n):
        if d >= 3 and not (d % 2 and kind is CausticKind.HYPERBOLA):
            if abs(periodic_residual(family, lam, d).residual) < DIVISOR_TOL:
                return True
        if flavor is not Flavor.PERIODIC and d >= 2:
            for cond in elliptic_periodic_residual(family, lam, d):
                if abs(cond.residual) < DIVISOR_TOL:
                    return True
    if flavor is not Flavor.PERIODIC and n >= 3:
        cond = periodic_residual(family, lam, n)
        if abs(cond.residual) < DIVISOR_TOL:
            return True
    return False


def classify_winding(family: ConfocalFamily, lam: float, period: int) -> tuple[int, int]:
    """Winding pair (period, m1) with m1 = period * rho(lam) rounded."""
    rho = rotation.rotation_number(family, lam, crosscheck=False).rho
    m1 = int(round(period * rho))
    if abs(rho - m1 / period) > 1e-6:
        raise ValueError(f"rotation number {rho} at lambda={lam} is not a multiple of 1/{period}")
    return period, m1


def cartesian_period(n: int, flavor: Flavor) -> int:
    return n if flavor is Flavor.PERIODIC else 2 * n


def _make_solution(family, lam, n, flavor, source, validate) -> CausticSolution:
    period = cartesian_period(n, flavor)
    winding = classify_winding(family, lam, period)
    sol = CausticSolution(family.caustic(lam), period, winding, source, flavor)
    if validate:
        from .billiard import validate_solution
        sol = CausticSolution(sol.caustic, sol.n, sol.winding, sol.source, sol.flavor,
                              validate_solution(family, sol))
    return sol


def find_caustics(family: ConfocalFamily, n: int, flavor: Flavor = Flavor.PERIODIC,
                  density: int = GRID_DENSITY, validate: bool = True) -> list[CausticSolution]:
    """Caustics lam0 whose trajectories are n-periodic (or n-elliptic periodic).

    For elliptic flavors the returned ``n`` is the Cartesian period 2n.
    Returns an empty list when there is no root.
    """
    sched = schedule(flavor, n)
    found = []
    for lo, hi in _scan_intervals(family, n, flavor):
        found.extend(scan_roots(family, sched, lo, hi, density))
    roots = [lam for lam in _dedupe(found) if not _has_shorter_period(family, lam, n, flavor)]
    return [_make_solution(family, lam, n, flavor, Source.ROOT_SCAN, validate) for lam in roots]


def sextic_period5(a: float, b: float) -> np.ndarray:
    """Coefficients (lowest first) of the numerator of C3^2 - C2 C4 up to a constant."""
    d = a - b
    return np.array([
        -5 * a**6 * b**6,
        10 * a**5 * b**5 * (a + b),
        a**4 * b**4 * (9 * a**2 - 34 * a * b + 9 * b**2),
        -36 * a**3 * b**3 * d**2 * (a + b),
        a**2 * b**2 * d**2 * (29 * a**2 + 54 * a * b + 29 * b**2),
        -2 * a * b * d**2 * (a + b) * (3 * a + b) * (a + 3 * b),
        -d**6,
    ])


def _real_roots_in(coeffs: np.ndarray, lo: float, hi: float) -> list[float]:
    """Real roots of a polynomial in (lo, hi), polished by bracketing."""
    poly = np.polynomial.Polynomial(coeffs)
    out = []
    for z in poly.roots():
        if abs(z.imag) > 1e-7 * max(1.0, abs(z.real)) or not (lo < z.real < hi):
            continue
        x = z.real
        h = 1e-7 * max(1.0, abs(x))
        left, right = max(lo, x - h), min(hi, x + h)
        fl, fr = poly(left), poly(right)
        if fl * fr < 0:
            x = optimize.brentq(poly, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        out.append(float(x))
    return sorted(out)


def closed_form_lambdas(family: ConfocalFamily, n: int) -> list[float]:
    a, b = family.a, family.b
    if n == 3:
        # positive root of (a-b)^2 l^2 + 2ab(a+b) l - 3a^2 b^2
        return [(-a * b * (a + b) + 2 * a * b * math.sqrt(a * a - a * b + b * b)) / (a - b) ** 2]
    if n == 4:
        out = [a * b / (a + b)]
        if b < a / 2:
            out.append(a * b / (a - b))
        return out
    if n == 5:
        # substitute lam = b u so the polynomial is scale free
        c = sextic_period5(a / b, 1.0)
        return [b * u for u in _real_roots_in(c, 0.0, 1.0)]
    if n == 6:
        ra, rb = math.sqrt(a), math.sqrt(b)
        out = [a * b / (ra + rb) ** 2]
        if a > 4 * b:
            out.append(a * b / (ra - rb) ** 2)
        if a > 4 * b / 3:
            out.append((a * b * (a - b) + 2 * a * b * math.sqrt(a * (a - b))) / ((a - b) * (3 * a + b)))
        return sorted(out)
    raise UnsupportedPeriod(f"closed forms are available for n in 3..6, not {n}")


def closed_form_caustics(family: ConfocalFamily, n: int, validate: bool = False) -> list[CausticSolution]:
    return [_make_solution(family, lam, n, Flavor.PERIODIC, Source.CLOSED_FORM, validate)
            for lam in closed_form_lambdas(family, n)]
