"""Polynomial Pell equations p^2 - P4 q^2 = 1 attached to periodic caustics.

P4(s) = s (s - 1/a)(s - 1/b)(s - 1/lam0).  A caustic that passes the Cayley
condition gives polynomials p*(x), q*(x) with p* - q* G(x) = O(x^n), where G
is one of the series B, C, D.  Passing to s = 1/x turns this into
S_A p^2 - S_B q^2 = +-1 with S_A S_B = P4, and then
p_hat = 2 S_A p^2 -+ 1, q_hat = 2 p q solve the Pell equation.

Polynomials are numpy ``Polynomial`` objects in the variable s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .cayley import Flavor
from .conics import CausticKind, ConfocalFamily, IntervalConfig, interval_config
from .series import series_family, sqrt_series

RESIDUAL_LIMIT = 1e-7
GRID_POINTS = 512
VALUE_TOL = 1e-6


class NoKernel(ValueError):
    pass


class ResidualTooLarge(ValueError):
    pass


class ValuePatternInvalid(ValueError):
    pass


class CountMismatch(ValueError):
    pass


@dataclass(frozen=True)
class DefectLayout:
    """Series used, degrees of p* and q*, and the linear factor divided out of sqrt(f)."""
    series: str
    deg_p: int
    deg_q: int


def defect_layout(n: int, flavor: Flavor = Flavor.PERIODIC) -> DefectLayout:
    m, odd = divmod(n, 2)
    if flavor is Flavor.PERIODIC:
        if n < 3:
            raise ValueError("periodic Pell pairs need n >= 3")
        return DefectLayout("C", m, m - 1) if odd else DefectLayout("B", m, m - 2)
    if n < 2:
        raise ValueError("elliptic Pell pairs need n >= 2")
    if flavor is Flavor.ELLIPTIC_A:
        return DefectLayout("B", m, m - 1) if odd else DefectLayout("C", m - 1, m - 1)
    if flavor is Flavor.ELLIPTIC_B:
        return DefectLayout("B", m, m - 1) if odd else DefectLayout("D", m - 1, m - 1)
    if not odd:
        raise ValueError("case (c) applies to odd n only")
    return DefectLayout("D", m, m - 1)


@dataclass(frozen=True)
class DefectPair:
    p_star: Polynomial
    q_star: Polynomial
    n: int
    flavor: Flavor
    layout: DefectLayout
    singular_values: np.ndarray


@dataclass(frozen=True)
class PellPair:
    n: int
    lambda0: float
    family: ConfocalFamily
    flavor: Flavor
    p_hat: Polynomial
    q_hat: Polynomial
    residual: float

    @property
    def config(self) -> IntervalConfig:
        return interval_config(self.family, self.family.caustic(self.lambda0))

    def to_dict(self, signature: Optional["Signature"] = None) -> dict:
        out = {
            "n": self.n,
            "lambda0": self.lambda0,
            "p_hat": [float(c) for c in self.p_hat.coef],
            "q_hat": [float(c) for c in self.q_hat.coef],
            "residual": self.residual,
        }
        if signature is not None:
            out["signature"] = [signature.tau1, signature.tau2]
        return out


@dataclass(frozen=True)
class Signature:
    tau1: int
    tau2: int
    m0: int
    m1: int


@dataclass(frozen=True)
class Alternance:
    points: np.ndarray
    values: np.ndarray
    m0: int
    m1: int
    signature: Signature


@dataclass(frozen=True)
class Factorization:
    """p_hat - 1 = 2 sigma S_plus p^2 and p_hat + 1 = 2 sigma S_minus q^2."""
    S_plus: Polynomial
    S_minus: Polynomial
    p: Polynomial
    q: Polynomial
    sigma: int
    plus_points: tuple[float, ...]
    residual: float
    verdict: str
    p_hat: Polynomial


def p4_polynomial(family: ConfocalFamily, lambda0: float) -> Polynomial:
    return Polynomial.fromroots([0.0, 1.0 / family.a, 1.0 / family.b, 1.0 / lambda0])


def chebyshev_grid(lo: float, hi: float, count: int = GRID_POINTS) -> np.ndarray:
    k = np.arange(count)
    return 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * k / (count - 1))


def trim(poly: Polynomial, rtol: float = 1e-12) -> Polynomial:
    c = np.array(poly.coef, dtype=float)
    big = np.max(np.abs(c)) if c.size else 0.0
    while c.size > 1 and abs(c[-1]) <= rtol * big:
        c = c[:-1]
    return Polynomial(c)


def _kernel(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right singular vector of least singular value, with the gap criterion."""
    _, sv, vt = np.linalg.svd(M)
    smin, smax = sv[-1], sv[0]
    second = sv[-2] if sv.size > 1 else smax
    if not (smin < 1e-8 * smax and smin < 1e-4 * second):
        raise NoKernel(f"no isolated kernel: singular values {sv}")
    return vt[-1], sv


def build_defect_pair(family: ConfocalFamily, lambda0: float, n: int,
                      flavor: Flavor = Flavor.PERIODIC) -> DefectPair:
    """Solve p*(x) - q*(x) G(x) = O(x^n) for the nontrivial pair (p*, q*).

    The system is set up in the scaled variable x = rho xi, rho = min(lam0, b),
    with G normalized to G(0) = 1, so that its entries are of order one.
    """
    lay = defect_layout(n, flavor)
    G = series_family(family.a, family.b, lambda0, n)[lay.series].coeffs
    rho = min(lambda0, family.b)
    g0 = G[0]
    Gs = G * rho ** np.arange(n + 1) / g0
    np_, nq = lay.deg_p + 1, lay.deg_q + 1
    M = np.zeros((n, np_ + nq))
    for k in range(n):
        if k < np_:
            M[k, k] = 1.0
        for j in range(min(nq, k + 1)):
            M[k, np_ + j] = -Gs[k - j]
    v, sv = _kernel(M)
    P, Q = v[:np_], v[np_:]
    # undo the scaling: p*(x) = g0 P(x/rho), q*(x) = Q(x/rho)
    p_star = Polynomial(g0 * P * rho ** -np.arange(np_))
    q_star = Polynomial(Q * rho ** -np.arange(nq))
    return DefectPair(p_star, q_star, n, flavor, lay, sv)


def _reverse(poly: Polynomial, degree: int) -> Polynomial:
    c = np.zeros(degree + 1)
    c[: len(poly.coef)] = poly.coef
    return Polynomial(c[::-1])


def certify(family: ConfocalFamily, lambda0: float, p_hat: Polynomial, q_hat: Polynomial) -> float:
    """Max of |p^2 - P4 q^2 - 1| on a Chebyshev grid over [c4, c1]."""
    cfg = interval_config(family, family.caustic(lambda0))
    s = chebyshev_grid(cfg.c4, cfg.c1)
    P4 = p4_polynomial(family, lambda0)
    return float(np.max(np.abs(p_hat(s) ** 2 - P4(s) * q_hat(s) ** 2 - 1.0)))


def assemble_pell(defect: DefectPair, family: ConfocalFamily, lambda0: float) -> PellPair:
    """Turn a defect pair into a solution of the Pell equation in s = 1/x."""
    a, b, lam = family.a, family.b, lambda0
    n, lay = defect.n, defect.layout
    divisor = {"B": [], "C": [lam], "D": [b]}[lay.series]
    rest = [r for r in (a, b, lam) if r not in divisor] if divisor else [a, b, lam]
    if lay.series == "D" and b == lam:
        raise ValueError("degenerate caustic")
    e_A = n - len(divisor) - 2 * lay.deg_p
    e_B = n - len(rest) - 2 * lay.deg_q
    if {e_A, e_B} != {0, 1}:
        raise ValueError(f"inconsistent degree layout {lay} for n={n}")
    s = Polynomial([0.0, 1.0])
    S_A = s ** e_A * Polynomial.fromroots([1.0 / r for r in divisor]) if divisor else s ** e_A
    S_B = s ** e_B * Polynomial.fromroots([1.0 / r for r in rest])
    kA = math.prod(divisor) if divisor else 1.0
    kB = math.prod(rest)
    P = _reverse(defect.p_star, lay.deg_p)
    Q = _reverse(defect.q_star, lay.deg_q)
    # x^n coefficient of A p*^2 - B q*^2 equals the constant term in s
    c = float((kA * S_A * P ** 2 - kB * S_B * Q ** 2)(0.0))
    sigma = 1 if c > 0 else -1
    p = P * math.sqrt(kA / abs(c))
    q = Q * math.sqrt(kB / abs(c))
    p_hat = 2.0 * S_A * p ** 2 - sigma
    q_hat = 2.0 * p * q
    p_hat = Polynomial(p_hat.coef[: n + 1])
    q_hat = Polynomial(q_hat.coef[: n - 1]) if n >= 2 else Polynomial([0.0])
    # absorb drift so that p_hat(0) = +-1 exactly
    scale = abs(p_hat(0.0))
    p_hat, q_hat = p_hat / scale, q_hat / scale
    residual = certify(family, lambda0, p_hat, q_hat)
    if not residual < RESIDUAL_LIMIT:
        raise ResidualTooLarge(f"Pell residual {residual:.3e} exceeds {RESIDUAL_LIMIT}")
    return PellPair(n, float(lambda0), family, defect.flavor, p_hat, q_hat, residual)


def pell_pair(family: ConfocalFamily, lambda0: float, n: int, flavor: Flavor = Flavor.PERIODIC) -> PellPair:
    return assemble_pell(build_defect_pair(family, lambda0, n, flavor), family, lambda0)


def pell_pair_at_infinity(family: ConfocalFamily, lambda0: float, n: int,
                          flavor: Flavor = Flavor.PERIODIC) -> PellPair:
    """Independent construction from the expansion of sqrt(P4(s)) at s = infinity.

    p_hat - q_hat sqrt(P4) = 1/(p_hat + q_hat sqrt(P4)) = O(s^-n), so q_hat
    (degree n - 2) annihilates the coefficients of s^-1 .. s^-(n-1) of
    q_hat sqrt(P4), and p_hat is the polynomial part.  The variable is
    scaled by c1 so that all roots of the quartic lie in [0, 1].
    """
    if n < 3:
        raise ValueError("the expansion at infinity needs n >= 3")
    cfg = interval_config(family, family.caustic(lambda0))
    c1 = cfg.c1
    roots = np.array(cfg.points) / c1
    # sqrt(prod(u - r_i)) = u^2 sum_k g_k u^-k
    g = sqrt_series(Polynomial.fromroots(roots).coef[::-1], 2 * n + 2).coeffs
    nq = n - 1
    M = np.array([[g[j + 2 + i] for j in range(nq)] for i in range(1, n)])
    v, _ = _kernel(M)
    pc = np.zeros(n + 1)
    for e in range(n + 1):
        for j in range(max(0, e - 2), nq):
            pc[e] += v[j] * g[j + 2 - e]
    scale = pc[0]
    p_hat = Polynomial(pc / scale * c1 ** -np.arange(n + 1))
    q_hat = Polynomial(v / scale * c1 ** -np.arange(nq) / c1 ** 2)
    residual = certify(family, lambda0, p_hat, q_hat)
    if not residual < RESIDUAL_LIMIT:
        raise ResidualTooLarge(f"Pell residual {residual:.3e} exceeds {RESIDUAL_LIMIT}")
    return PellPair(n, float(lambda0), family, flavor, p_hat, q_hat, residual)


def _values_at_endpoints(pair: PellPair, cfg: IntervalConfig) -> np.ndarray:
    vals = pair.p_hat(np.array(cfg.points))
    if np.any(np.abs(np.abs(vals) - 1.0) > VALUE_TOL):
        raise ValuePatternInvalid(f"p_hat at c4..c1 is {vals}, not +-1")
    return np.sign(vals)


def _split(p_hat: Polynomial, q_hat: Polynomial, cfg: IntervalConfig, plus_points, P4: Polynomial):
    """Factor p_hat -+ 1 given the endpoints where p_hat = +1."""
    minus_points = [c for c in cfg.points if c not in plus_points]
    S_plus = Polynomial.fromroots(plus_points) if plus_points else Polynomial([1.0])
    S_minus = Polynomial.fromroots(minus_points) if minus_points else Polynomial([1.0])
    n = p_hat.degree()
    lead = p_hat.coef[-1]
    sigma = 1 if lead > 0 else -1
    dp = (n - len(plus_points)) // 2
    dq = (n - len(minus_points)) // 2
    rq = q_hat.roots() if q_hat.degree() > 0 else np.array([])
    rq = np.real(rq[np.abs(np.imag(rq)) < 1e-6 * (1.0 + np.abs(rq))])
    vals = p_hat(rq)
    rp = np.sort(rq[vals > 0])
    rm = np.sort(rq[vals < 0])
    if len(rp) != dp or len(rm) != dq:
        raise ValuePatternInvalid(f"q_hat roots split {len(rp)}/{len(rm)}, expected {dp}/{dq}")
    k = math.sqrt(abs(lead) / 2.0)
    p = k * Polynomial.fromroots(rp) if dp else Polynomial([k])
    q = k * Polynomial.fromroots(rm) if dq else Polynomial([k])
    s = chebyshev_grid(cfg.c4, cfg.c1)
    residual = float(np.max(np.abs(S_plus(s) * p(s) ** 2 - S_minus(s) * q(s) ** 2 + sigma)))
    return S_plus, S_minus, p, q, sigma, residual


def factor_pell_odd(pair: PellPair, cfg: Optional[IntervalConfig] = None) -> Factorization:
    """S1 p^2 - S3 q^2 = -sigma, S1 = s - s1 where p_hat(s1) = +1 at a single endpoint."""
    cfg = cfg or pair.config
    if pair.n % 2 == 0:
        raise ValueError("odd factorization needs an odd-degree pair")
    signs = _values_at_endpoints(pair, cfg)
    p_hat, q_hat = pair.p_hat, pair.q_hat
    if np.sum(signs > 0) != 1:
        p_hat, q_hat, signs = -p_hat, -q_hat, -signs
    if np.sum(signs > 0) != 1:
        raise ValuePatternInvalid(f"sign pattern {signs} has no single +1")
    plus = tuple(c for c, sg in zip(cfg.points, signs) if sg > 0)
    S1, S3, p, q, sigma, res = _split(p_hat, q_hat, cfg, plus, p4_polynomial(pair.family, pair.lambda0))
    periodic = math.isclose(plus[0], 1.0 / pair.lambda0, rel_tol=1e-12)
    return Factorization(S1, S3, p, q, sigma, plus, res, "periodic" if periodic else "elliptic", p_hat)


def factor_pell_even(pair: PellPair, cfg: Optional[IntervalConfig] = None) -> Factorization:
    """S' p^2 - S'' q^2 = -sigma with S' = 1 (periodic) or S' = s (s - c1)."""
    cfg = cfg or pair.config
    if pair.n % 2:
        raise ValueError("even factorization needs an even-degree pair")
    signs = _values_at_endpoints(pair, cfg)
    p_hat, q_hat = pair.p_hat, pair.q_hat
    npos = int(np.sum(signs > 0))
    if npos in (0, 4):
        if npos == 4:
            p_hat, q_hat, signs = -p_hat, -q_hat, -signs
        plus: tuple[float, ...] = ()
    elif npos == 2:
        if signs[0] < 0:
            p_hat, q_hat, signs = -p_hat, -q_hat, -signs
        plus = tuple(c for c, sg in zip(cfg.points, signs) if sg > 0)
        if plus != (cfg.c4, cfg.c1):
            raise ValuePatternInvalid(f"p_hat = +1 at {plus}, expected c4 and c1")
    else:
        raise ValuePatternInvalid(f"sign pattern {signs} has an odd number of +1")
    Sp, Spp, p, q, sigma, res = _split(p_hat, q_hat, cfg, plus, p4_polynomial(pair.family, pair.lambda0))
    verdict = "periodic" if not plus else "elliptic"
    return Factorization(Sp, Spp, p, q, sigma, plus, res, verdict, p_hat)


def factor_pell(pair: PellPair) -> Factorization:
    return factor_pell_odd(pair) if pair.n % 2 else factor_pell_even(pair)


def alternance(pair: PellPair, cfg: Optional[IntervalConfig] = None) -> Alternance:
    """Solutions of p_hat^2 = 1 in [c4, c1] and the winding data they encode.

    The endpoints c4..c1 are simple solutions and the zeros of q_hat are
    double ones.  c3 and c2 carry the same value, so the alternance set over
    [c4, c1] has one point fewer than the solution set.
    """
    cfg = cfg or pair.config
    rq = pair.q_hat.roots() if pair.q_hat.degree() > 0 else np.array([])
    rq = np.real(rq[np.abs(np.imag(rq)) < 1e-6 * (1.0 + np.abs(rq))])
    inside = rq[(rq > cfg.c4) & (rq < cfg.c1)]
    in_gap = inside[(inside > cfg.c3) & (inside < cfg.c2)]
    if in_gap.size:
        raise CountMismatch(f"q_hat has zeros {in_gap} in the gap (c3, c2)")
    points = np.sort(np.concatenate([np.array(cfg.points), inside]))
    m1 = int(np.sum(points <= cfg.c3 + 1e-12 * cfg.c1)) - 1
    m0 = len(points) - 2
    tau1 = int(np.sum((inside > cfg.c2) & (inside < cfg.c1)))
    if m0 != pair.n or m0 != m1 + tau1 + 1:
        raise CountMismatch(f"alternance counts m0={m0}, m1={m1}, tau1={tau1} for n={pair.n}")
    return Alternance(points, pair.p_hat(points), m0, m1, Signature(tau1, m1 - 1, m0, m1))
