"""Jacobi elliptic and theta functions and the extremal polynomials built from them.

Chebyshev, Zolotarev and Akhiezer polynomials are compared here with the
Pell polynomials p_hat_n(s) after an affine change of variable.

Classical theta notation maps to the modern functions at z = pi u / (2K):
H = theta_1, H1 = theta_2, Theta1 = theta_3, Theta = theta_4.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy import special

from .cayley import closed_form_lambdas
from .conics import ConfocalFamily, interval_config
from .pell import chebyshev_grid, pell_pair

PROPORTIONALITY_TOL = 1e-6


class ModulusOutOfRange(ValueError):
    pass


class AlphaOutOfRange(ValueError):
    pass


class ParamOutOfRange(ValueError):
    pass


class CaseHInadmissible(ValueError):
    pass


class MismatchBeyondTolerance(AssertionError):
    pass


class Case(enum.Enum):
    E = "E"
    H = "H"


def _check_kappa(kappa) -> None:
    k = np.asarray(kappa, dtype=float)
    if np.any(~(k > 0)) or np.any(~(k < 1)):
        raise ModulusOutOfRange("kappa must lie in (0, 1)")


def agm(x, y, tol: float = 1e-16):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    for _ in range(64):
        x, y = 0.5 * (x + y), np.sqrt(x * y)
        if np.all(np.abs(x - y) <= tol * np.abs(x)):
            break
    return 0.5 * (x + y)


@dataclass(frozen=True)
class EllipticModulus:
    kappa: float
    K: float = field(init=False)
    Kprime: float = field(init=False)
    nome_q: float = field(init=False)

    def __post_init__(self):
        _check_kappa(self.kappa)
        kp = math.sqrt((1.0 - self.kappa) * (1.0 + self.kappa))
        K = math.pi / (2.0 * float(agm(1.0, kp)))
        Kp = math.pi / (2.0 * float(agm(1.0, self.kappa)))
        # independent value of K from Carlson's R_F
        if abs(K - float(special.elliprf(0.0, kp * kp, 1.0))) > 1e-14 * K:
            raise ArithmeticError("AGM and R_F disagree on K")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "Kprime", Kp)
        object.__setattr__(self, "nome_q", math.exp(-math.pi * Kp / K))

    @property
    def kappa_prime(self) -> float:
        return math.sqrt((1.0 - self.kappa) * (1.0 + self.kappa))


def jacobi_sn_cn_dn(u, kappa):
    """sn, cn, dn by the descending Landen (AGM) scheme; broadcasts over u and kappa."""
    _check_kappa(kappa)
    u = np.asarray(u, dtype=float)
    k = np.asarray(kappa, dtype=float)
    u, k = np.broadcast_arrays(u, k)
    a = np.ones_like(k)
    b = np.sqrt((1.0 - k) * (1.0 + k))
    c = k.copy()
    ratios = []
    while True:
        ratios.append(c / a)
        if np.all(np.abs(c) <= 1e-17 * a):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        if len(ratios) > 60:
            break
    N = len(ratios) - 1
    phi = (2.0 ** N) * a * u
    phis = [phi]
    for j in range(N, 0, -1):
        phi = 0.5 * (phi + np.arcsin(ratios[j] * np.sin(phi)))
        phis.append(phi)
    phi0 = phis[-1]
    sn, cn = np.sin(phi0), np.cos(phi0)
    # dn > 0 for real u and k < 1; the quotient cn / cos(phi1 - phi0) is 0/0 at u = K
    dn = np.sqrt((1.0 - k * sn) * (1.0 + k * sn))
    return sn, cn, dn


def _theta_terms(q: float, growth: float = 0.0, tol: float = 1e-18, cap: int = 400) -> int:
    """Number of terms until q^(n^2) e^(2 n growth) drops below tol."""
    lq = math.log(q)
    n = 1
    while n < cap and n * n * lq + 2 * n * growth > math.log(tol):
        n += 1
    return n + 1


def theta_functions(u, modulus: EllipticModulus):
    """(H, H1, Theta, Theta1) = (theta1, theta2, theta4, theta3) at z = pi u / (2K).

    ``u`` may be complex.  Terms are summed until q^(n^2) times the growth of
    the trigonometric factor falls below 1e-18.
    """
    q = modulus.nome_q
    z = np.pi * np.asarray(u, dtype=complex) / (2.0 * modulus.K)
    growth = float(np.max(np.abs(z.imag))) if z.size else 0.0
    N = _theta_terms(q, growth)
    H = np.zeros_like(z)
    H1 = np.zeros_like(z)
    Th = np.ones_like(z)
    Th1 = np.ones_like(z)
    for n in range(N):
        w = q ** ((n + 0.5) ** 2)
        H = H + 2.0 * (-1) ** n * w * np.sin((2 * n + 1) * z)
        H1 = H1 + 2.0 * w * np.cos((2 * n + 1) * z)
        if n >= 1:
            w2 = q ** (n * n)
            Th = Th + 2.0 * (-1) ** n * w2 * np.cos(2 * n * z)
            Th1 = Th1 + 2.0 * w2 * np.cos(2 * n * z)
    if np.isrealobj(u) or not np.any(np.iscomplex(u)):
        return H.real, H1.real, Th.real, Th1.real
    return H, H1, Th, Th1


def theta_log_derivative(u, modulus: EllipticModulus):
    """Theta'(u)/Theta(u) with respect to u."""
    q = modulus.nome_q
    s = math.pi / (2.0 * modulus.K)
    z = s * np.asarray(u, dtype=float)
    num = np.zeros_like(z)
    den = np.ones_like(z)
    for n in range(1, _theta_terms(q)):
        w = 2.0 * (-1) ** n * q ** (n * n)
        den = den + w * np.cos(2 * n * z)
        num = num - w * 2 * n * np.sin(2 * n * z)
    return s * num / den


def sn_inverse_sq(w, modulus: EllipticModulus):
    """A complex u with sn^2(u) = w for real w, through Carlson's R_F.

    For 0 <= w <= 1 the real inverse is sqrt(w) R_F(1 - w, 1 - k^2 w, 1); the
    other ranges reduce to it by the imaginary and quarter-period shifts.
    """
    k2 = modulus.kappa ** 2
    kp2 = 1.0 - k2
    K, Kp = modulus.K, modulus.Kprime
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.zeros(w.shape, dtype=complex)

    def real_inv(t, m):
        t = np.clip(t, 0.0, 1.0)
        return np.sqrt(t) * special.elliprf(1.0 - t, 1.0 - m * t, 1.0)

    neg = w <= 0
    mid = (w > 0) & (w < 1)
    upper = (w >= 1) & (w * k2 <= 1)
    top = w * k2 > 1
    out[neg] = 1j * real_inv(-w[neg] / (1.0 - w[neg]), kp2)
    out[mid] = real_inv(w[mid], k2)
    out[upper] = K + 1j * real_inv((1.0 - 1.0 / w[upper]) / kp2, kp2)
    out[top] = real_inv(1.0 / (k2 * w[top]), k2) + 1j * Kp
    return out


def chebyshev_T(n: int, x):
    """T_n by the three-term recursion T_{k+1} = 2x T_k - T_{k-1}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x, dtype=float)
    t0, t1 = np.ones_like(x), x
    if n == 0:
        return t0
    for _ in range(n - 1):
        t0, t1 = t1, 2.0 * x * t1 - t0
    return t1


def proportionality(f, g) -> tuple[float, float]:
    """Constant c with f ~ c g (taken where |f| is largest) and max |f - c g| / max |f|."""
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    i = int(np.argmax(np.abs(f)))
    c = f[i] / g[i]
    return float(c), float(np.max(np.abs(f - c * g)) / np.max(np.abs(f)))


def interpolate(fun, n: int) -> Polynomial:
    """Degree-n polynomial through fun at n + 1 Chebyshev nodes of [-1, 1]."""
    k = np.arange(n + 1)
    x = np.cos(np.pi * (k + 0.5) / (n + 1))
    return Chebyshev.fit(x, fun(x), n, domain=[-1, 1]).convert(kind=Polynomial)


def _solve_kappa(fun, target: float) -> float:
    """Bisection for kappa in (1e-9, 1 - 1e-9) on an increasing map."""
    lo, hi = 1e-9, 1.0 - 1e-9
    flo = fun(lo) - target
    fhi = fun(hi) - target
    if flo * fhi > 0:
        raise ParamOutOfRange(f"target {target} outside the range of the modulus map")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fun(mid) - target
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------- Zolotarev

@dataclass(frozen=True)
class ZolotarevParams:
    n: int
    kappa: float
    sigma: float
    alpha: float
    beta: float
    ell_n: float
    L_n: float
    polynomial: Polynomial


def _v_power_sum(modulus: EllipticModulus, shift: float, n: int, w):
    """v^n + v^-n with v = H(u - shift)/H(u + shift) and sn^2 u = w."""
    u = sn_inverse_sq(w, modulus)
    H = theta_functions(u - shift, modulus)[0] / theta_functions(u + shift, modulus)[0]
    val = H ** n + H ** (-n)
    return val


def zolotarev_endpoints(n: int, kappa: float) -> ZolotarevParams:
    """Endpoints, sigma and the monic polynomial z_n for the modulus kappa.

    z_n is proportional to v^n + v^-n with x = (sn^2 u + S)/(sn^2 u - S),
    S = sn^2(K/n); the monic normalization and the deviation on [-1, 1] are
    taken from the interpolated polynomial.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    mod = EllipticModulus(kappa)
    K, k2 = mod.K, kappa * kappa
    sn, cn, dn = (float(v) for v in jacobi_sn_cn_dn(K / n, kappa))
    S = sn * sn
    alpha = (1.0 + k2 * S) / (dn * dn)
    beta = (1.0 + S) / (cn * cn)
    back = (alpha - 1.0) * (beta + 1.0) / ((alpha + 1.0) * (beta - 1.0))
    if abs(back - k2) > 1e-10:
        raise ArithmeticError(f"kappa^2 back-relation off by {abs(back - k2):.3e}")
    sn2 = float(jacobi_sn_cn_dn(2.0 * K / n, kappa)[0])
    sigma = 2.0 * sn / (cn * dn) * (1.0 / sn2 - float(theta_log_derivative(K / n, mod))) - 1.0

    def raw(x):
        return np.real(_v_power_sum(mod, K / n, n, S * (x + 1.0) / (x - 1.0)))

    poly = interpolate(raw, n)
    poly = poly / poly.coef[-1]
    L = abs(float(poly(-1.0)))
    H1 = float(theta_functions(K / n, mod)[1])
    Th1_0 = float(theta_functions(0.0, mod)[3])
    Th1 = float(theta_functions(K / n, mod)[3])
    ell = 2.0 ** -n * (math.sqrt(kappa) * Th1_0 ** 2 / (H1 * Th1)) ** (2 * n)
    return ZolotarevParams(n, float(kappa), sigma, alpha, beta, ell, L, poly)


def zolotarev_kappa_for_alpha(n: int, alpha: float) -> float:
    return _solve_kappa(lambda k: zolotarev_endpoints(n, k).alpha, alpha)


def criterion3_residual(alpha: float, beta: float) -> float:
    """The endpoint relation in the form it is usually quoted."""
    return 9 * beta**2 - 3 * alpha**2 - 6 * alpha * beta + 12 * alpha - 36 * beta + 56


def endpoint_relation_n3(alpha: float, beta: float) -> float:
    """Relation between alpha = 2t - 1 and beta = 2a/lam0 - 1 for the period-3 caustic."""
    return 9 * beta**2 - 6 * alpha * beta - 3 * alpha**2 - 12


@dataclass(frozen=True)
class ZolotarevReport:
    t: float
    kappa: float
    alpha: float
    beta: float
    beta_from_caustic: float
    beta_quoted_closed: float
    beta_quoted_rational: float
    beta_from_Y: float
    identity_quoted: float
    identity_corrected: float
    proportionality: float
    constant: float
    ell_n: float
    L_n: float

    @property
    def identity_passed(self) -> bool:
        return abs(self.identity_quoted) < 1e-9

    @property
    def proportional(self) -> bool:
        return self.proportionality < PROPORTIONALITY_TOL

    @property
    def passed(self) -> bool:
        return self.identity_passed and self.proportional


def verify_zolotarev_n3(family: ConfocalFamily) -> ZolotarevReport:
    """Compare p_hat_3(s) with z_3(2as - 1) for the period-3 caustic."""
    a, b = family.a, family.b
    t = a / b
    lam0 = closed_form_lambdas(family, 3)[0]
    alpha = 2.0 * t - 1.0
    kappa = zolotarev_kappa_for_alpha(3, alpha)
    zp = zolotarev_endpoints(3, kappa)
    r = math.sqrt(t * t - t + 1.0)
    y = (-1.0 + r) / (t - 1.0)
    beta_Y = ((t - 1) ** 2 + (-1 + r) ** 2) / ((t - 1) ** 2 - (-1 + r) ** 2)
    pair = pell_pair(family, lam0, 3)
    cfg = interval_config(family, family.caustic(lam0))
    s = chebyshev_grid(0.0, cfg.c1, 64)
    c, dev = proportionality(pair.p_hat(s), zp.polynomial(2.0 * a * s - 1.0))
    del y
    return ZolotarevReport(
        t=t, kappa=kappa, alpha=zp.alpha, beta=zp.beta,
        beta_from_caustic=2.0 * a / lam0 - 1.0,
        beta_quoted_closed=4.0 / 3.0 * r + 2.0 / 3.0 * t + 5.0 / 3.0,
        beta_quoted_rational=-(2 * t * t - 3 * t + 3 + 2 * r) / (t + 1 + 2 * r),
        beta_from_Y=beta_Y,
        identity_quoted=criterion3_residual(zp.alpha, zp.beta),
        identity_corrected=endpoint_relation_n3(zp.alpha, zp.beta),
        proportionality=dev, constant=c, ell_n=zp.ell_n, L_n=zp.L_n,
    )


# ---------------------------------------------------------------- Akhiezer

def akhiezer_symmetric(m: int, alpha: float, x):
    """A_2m(x; alpha), the monic extremal polynomial on [-1, -alpha] U [alpha, 1], and its deviation."""
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange("alpha must lie in (0, 1)")
    L = (1.0 - alpha**2) ** m / 2.0 ** (2 * m - 1)
    x = np.asarray(x, dtype=float)
    return L * chebyshev_T(m, (2.0 * x * x - 1.0 - alpha**2) / (1.0 - alpha**2)), L


@dataclass(frozen=True)
class AkhiezerParams:
    n: int
    m: int
    kappa: float
    alpha: float
    beta: float
    L: float
    tau1_coeff: float
    polynomial: Polynomial

    @property
    def mu(self) -> int:
        return self.n - self.m + 1

    @property
    def nu(self) -> int:
        return self.m + 1


def _akhiezer_core(n: int, m: int, kappa: float):
    if not 1 <= m <= n - 1:
        raise ParamOutOfRange("need 1 <= m <= n - 1")
    mod = EllipticModulus(kappa)
    K = mod.K
    shift = m * K / n
    sn, cn, dn = (float(v) for v in jacobi_sn_cn_dn(shift, kappa))
    S = sn * sn
    alpha = 1.0 - 2.0 * S
    beta = 2.0 * float(jacobi_sn_cn_dn((n - m) * K / n, kappa)[0]) ** 2 - 1.0
    _, _, Th0, Th10 = theta_functions(0.0, mod)
    _, _, Ths, Th1s = theta_functions(shift, mod)
    R = float(Th0 * Th10 / (Ths * Th1s))
    # deviation; v^n + v^-n has leading coefficient 2 / L
    L = 2.0 ** (1 - n) * R ** (2 * n)
    sn2 = float(jacobi_sn_cn_dn(2.0 * shift, kappa)[0])
    tau1 = -1.0 + 2.0 * sn * cn / dn * (1.0 / sn2 - float(theta_log_derivative(shift, mod)))
    return mod, shift, S, alpha, beta, L, tau1


def akhiezer_general_TA(n: int, m: int, kappa: float, x):
    """TA_n(x, m, kappa) = (L/2)(v^n + v^-n), evaluated through theta quotients."""
    mod, shift, S, alpha, beta, L, _ = _akhiezer_core(n, m, kappa)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    w = np.empty_like(x)
    den = x - 1.0 + 2.0 * S
    pole = np.abs(den) < 1e-300
    w[~pole] = S * (x[~pole] + 1.0) / den[~pole]
    w[pole] = np.inf
    u = sn_inverse_sq(np.where(pole, 1e300, w), mod)
    v = theta_functions(u - shift, mod)[0] / theta_functions(u + shift, mod)[0]
    val = 0.5 * L * (v ** n + v ** (-n))
    return np.real(val)


def akhiezer_params(n: int, m: int, kappa: float) -> AkhiezerParams:
    _, _, _, alpha, beta, L, tau1 = _akhiezer_core(n, m, kappa)
    poly = interpolate(lambda x: akhiezer_general_TA(n, m, kappa, x), n)
    return AkhiezerParams(n, m, float(kappa), alpha, beta, L, tau1, poly)


def akhiezer_kappa(n: int, m: int, case: Case, t: float) -> float:
    """Modulus that matches the interval geometry of a family with a/b = t.

    Case E: (beta + 1)/(alpha + 1) = t, which reduces to 1/dn^2(mK/n) = t.
    Case H: alpha = 2/t - 1, i.e. sn^2(mK/n) = 1 - 1/t.
    """
    def shift_fn(k):
        K = EllipticModulus(k).K
        return jacobi_sn_cn_dn(m * K / n, k)

    if case is Case.E:
        return _solve_kappa(lambda k: 1.0 / float(shift_fn(k)[2]) ** 2, t)
    return _solve_kappa(lambda k: float(shift_fn(k)[0]) ** 2, 1.0 - 1.0 / t)


@dataclass(frozen=True)
class AkhiezerReport:
    n: int
    l: int
    m: int
    case: Case
    kappa: float
    alpha: float
    beta: float
    lambda_model: float
    lambda0: float
    proportionality: float
    constant: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.proportionality < PROPORTIONALITY_TOL
                and abs(self.lambda_model - self.lambda0) < 1e-8 * max(1.0, self.lambda0))


def verify_akhiezer_pn(family: ConfocalFamily, lambda0: float, n: int, l: int, case: Case) -> AkhiezerReport:
    """Compare the Pell polynomial with winding (n, 2l) against TA_n(h(s); n - 2l, kappa)."""
    a, b = family.a, family.b
    t = a / b
    m = n - 2 * l
    kappa = akhiezer_kappa(n, m, case, t)
    prm = akhiezer_params(n, m, kappa)
    if case is Case.E:
        scale = a * (prm.alpha + 1.0)
        lam_model = 0.5 * scale
    else:
        scale = 2.0 * b
        lam_model = 2.0 * b / (prm.beta + 1.0)
    pair = pell_pair(family, lambda0, n)
    cfg = interval_config(family, family.caustic(lambda0))
    s = chebyshev_grid(0.0, cfg.c1, 64)
    c, dev = proportionality(pair.p_hat(s), prm.polynomial(scale * s - 1.0))
    return AkhiezerReport(n, l, m, case, kappa, prm.alpha, prm.beta, lam_model, float(lambda0), dev, c)


def verify_akhiezer_n4(family: ConfocalFamily, case: Case) -> AkhiezerReport:
    """p_hat_4 against the symmetric Akhiezer polynomial A_4 after the affine change.

    Case E: lam = ab/(a+b), x = 2ab s/(a+b) - 1, alpha = (a-b)/(a+b).
    Case H: lam = ab/(a-b), x = 2bs - 1, alpha = (a-2b)/a; needs b < a/2.
    The report also carries the deviations from the quadratic forms in s,
    the canonical quartics and, for case E, the period-8 generalization.
    """
    a, b = family.a, family.b
    if case is Case.E:
        lam = a * b / (a + b)
        alpha = (a - b) / (a + b)
        to_x = lambda s: 2.0 * a * b / (a + b) * s - 1.0
        quad = lambda s: 2 * a * b * s**2 - 2 * (a + b) * s + 1
        quad_quoted = quad
        canonical = Polynomial([1, -8 * (a + b), 8 * (a * a + 3 * a * b + b * b), -16 * a * b * (a + b), 8 * a * a * b * b])
    else:
        if not b < a / 2:
            raise CaseHInadmissible("the hyperbola case needs b < a/2")
        lam = a * b / (a - b)
        alpha = (a - 2 * b) / a
        to_x = lambda s: 2.0 * b * s - 1.0
        quad = lambda s: (2 * a * a * b * s**2 - 2 * a * a * s + (a - b)) / (a - b)
        quad_quoted = lambda s: (a * a * s**2 - 4 * a * a * b * s + 8 * b**3 * (a - b)) / (8 * b**3 * (a - b))
        canonical = Polynomial([32 * b**9 * (b - 2 * a), 64 * a * a * b**4 * (b - a),
                                16 * a * a * b * b * (a * a + a * b - b * b), -8 * a**4 * b, a**4])
    pair = pell_pair(family, lam, 4)
    cfg = interval_config(family, family.caustic(lam))
    s = chebyshev_grid(0.0, cfg.c1, 64)
    ph = pair.p_hat(s)
    c, dev = proportionality(ph, akhiezer_symmetric(2, alpha, to_x(s))[0])
    extra = {
        "quadratic_form": proportionality(ph, chebyshev_T(2, quad(s)))[1],
        "quadratic_form_quoted": proportionality(ph, chebyshev_T(2, quad_quoted(s)))[1],
        "canonical_quartic": proportionality(ph, canonical(s))[1],
    }
    if case is Case.E:
        p8 = pell_pair(family, lam, 8)
        extra["period_8"] = proportionality(p8.p_hat(s), chebyshev_T(4, quad(s)))[1]
    return AkhiezerReport(4, 1, 2, case, math.nan, alpha, -alpha, lam, lam, dev, c, extra)


# ---------------------------------------------------------------- period 5 relation

# P(Z, s) = sum_q F_q(Z) s^q; entries map a power of Z to its coefficient.
P_TABLE: dict[int, dict[int, int]] = {
    0: {0: -1, 1: 16, 2: -64, 3: 64},
    1: {2: -56, 3: 352, 4: -416},
    2: {3: 144, 4: -1244, 5: 2160, 6: -1280, 7: 896, 8: -256},
    3: {4: -160, 5: 2144, 6: -4744, 7: 4160, 8: -3264, 9: 1024},
    4: {5: 64, 6: -1984, 7: 5360, 8: -5830, 9: 5360, 10: -1984, 11: 64},
    5: {12: -160, 11: 2144, 10: -4744, 9: 4160, 8: -3264, 7: 1024},
    6: {13: 144, 12: -1244, 11: 2160, 10: -1280, 9: 896, 8: -256},
    7: {14: -56, 13: 352, 12: -416},
    8: {16: -1, 15: 16, 14: -64, 13: 64},
}


def p_table_matrix() -> np.ndarray:
    """Coefficients P[p, q] of Z^p s^q."""
    M = np.zeros((17, 9))
    for q, row in P_TABLE.items():
        for p, c in row.items():
            M[p, q] = c
    return M


def p_zs(Z, s):
    """The relation between Z = sn^2(K/5) and s = kappa^2."""
    M = p_table_matrix()
    Z, s = np.asarray(Z, dtype=float), np.asarray(s, dtype=float)
    return sum(M[p, q] * Z**p * s**q for p in range(17) for q in range(9) if M[p, q])
