import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poncelet.conics import ConfocalFamily
from poncelet.extremal import (
    AlphaOutOfRange, Case, CaseHInadmissible, EllipticModulus, ModulusOutOfRange, ParamOutOfRange,
    agm, akhiezer_general_TA, akhiezer_kappa, akhiezer_params, akhiezer_symmetric, chebyshev_T,
    criterion3_residual, endpoint_relation_n3, interpolate, jacobi_sn_cn_dn, p_table_matrix, p_zs,
    proportionality, sn_inverse_sq, theta_functions, theta_log_derivative, verify_akhiezer_n4,
    verify_akhiezer_pn, verify_zolotarev_n3, zolotarev_endpoints, zolotarev_kappa_for_alpha,
)
from poncelet.fixtures import periodic_fixtures

KAPPA = 0.6
# 40-digit values for m = kappa^2 = 0.36
MP_SNCNDN = {
    0.4: (0.38599881978357815825, 0.92249927432257893946, 0.97281127049661925181),
    1.1: (0.86118169475457150287, 0.50829724435574508952, 0.85616107824583561361),
}
MP_K, MP_KP, MP_Q = 1.7507538029157525290, 1.9953027776647293877, 0.027864078593728724921
MP_THETA_07 = (0.47951458678470002768, 0.66100642550601540062, 0.98274940395766984168, 1.0172486468506448520)


# ---------------------------------------------------------------- special functions

def test_agm():
    assert float(agm(1.0, 1.0)) == 1.0
    assert float(agm(1.0, math.sqrt(2.0))) == pytest.approx(1.1981402347355922074)


def test_complete_integrals_and_nome():
    mod = EllipticModulus(KAPPA)
    assert mod.K == pytest.approx(MP_K, rel=1e-15)
    assert mod.Kprime == pytest.approx(MP_KP, rel=1e-15)
    assert mod.nome_q == pytest.approx(MP_Q, rel=1e-13)
    assert mod.kappa_prime == pytest.approx(0.8)


@pytest.mark.parametrize("kappa", [0.0, 1.0, -0.2, 1.5])
def test_modulus_range(kappa):
    with pytest.raises(ModulusOutOfRange):
        EllipticModulus(kappa)
    with pytest.raises(ModulusOutOfRange):
        jacobi_sn_cn_dn(0.3, kappa)


@pytest.mark.parametrize("u", sorted(MP_SNCNDN))
def test_jacobi_values(u):
    assert tuple(float(v) for v in jacobi_sn_cn_dn(u, KAPPA)) == pytest.approx(MP_SNCNDN[u], abs=1e-14)


def test_jacobi_special_points():
    K = EllipticModulus(KAPPA).K
    sn, cn, dn = (float(v) for v in jacobi_sn_cn_dn(0.0, KAPPA))
    assert (sn, cn, dn) == (0.0, 1.0, 1.0)
    sn, cn, dn = (float(v) for v in jacobi_sn_cn_dn(K, KAPPA))
    assert (sn, cn, dn) == pytest.approx((1.0, 0.0, 0.8), abs=1e-14)
    # sn^2(K/2) = 1/(1 + k')
    assert float(jacobi_sn_cn_dn(K / 2, KAPPA)[0]) ** 2 == pytest.approx(1 / 1.8, rel=1e-14)


def test_jacobi_identities_on_random_points():
    rng = np.random.default_rng(3)
    u = rng.uniform(-10, 10, 1000)
    k = rng.uniform(0.01, 0.99, 1000)
    sn, cn, dn = jacobi_sn_cn_dn(u, k)
    assert np.max(np.abs(sn**2 + cn**2 - 1)) < 1e-13
    assert np.max(np.abs(dn**2 + k**2 * sn**2 - 1)) < 1e-13
    # derivative of sn is cn dn
    h = 1e-6
    d = (jacobi_sn_cn_dn(u + h, k)[0] - jacobi_sn_cn_dn(u - h, k)[0]) / (2 * h)
    assert np.max(np.abs(d - cn * dn)) < 1e-8


def test_theta_values():
    mod = EllipticModulus(KAPPA)
    assert tuple(float(v) for v in theta_functions(0.7, mod)) == pytest.approx(MP_THETA_07, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.98), st.floats(-5.0, 5.0))
def test_sn_as_theta_quotient(kappa, u):
    mod = EllipticModulus(kappa)
    H, H1, Th, Th1 = theta_functions(u, mod)
    sn, cn, dn = jacobi_sn_cn_dn(u, kappa)
    kp = mod.kappa_prime
    assert float(H / (math.sqrt(kappa) * Th)) == pytest.approx(float(sn), abs=1e-12)
    assert float(math.sqrt(kp / kappa) * H1 / Th) == pytest.approx(float(cn), abs=1e-12)
    assert float(math.sqrt(kp) * Th1 / Th) == pytest.approx(float(dn), abs=1e-12)


def test_theta_log_derivative_matches_difference():
    mod = EllipticModulus(KAPPA)
    u, h = 0.9, 1e-6
    num = (math.log(theta_functions(u + h, mod)[2]) - math.log(theta_functions(u - h, mod)[2])) / (2 * h)
    assert float(theta_log_derivative(u, mod)) == pytest.approx(num, rel=1e-8)


@pytest.mark.parametrize("w", [-3.0, -0.2, 0.0, 0.3, 0.99, 1.0, 1.7, 2.7, 10.0, 100.0])
def test_sn_inverse_sq_round_trip(w):
    mod = EllipticModulus(KAPPA)
    u = sn_inverse_sq(w, mod)
    H, _, Th, _ = theta_functions(u, mod)
    sn = complex((H / (math.sqrt(KAPPA) * Th))[0])
    assert sn * sn == pytest.approx(w, abs=1e-10 * max(1.0, abs(w)))


# ---------------------------------------------------------------- polynomials

def test_chebyshev():
    x = np.linspace(-1, 1, 101)
    assert np.allclose(chebyshev_T(3, x), 4 * x**3 - 3 * x)
    assert np.allclose(chebyshev_T(0, x), 1.0)
    th = np.linspace(0, math.pi, 50)
    assert np.allclose(chebyshev_T(7, np.cos(th)), np.cos(7 * th))
    with pytest.raises(ValueError):
        chebyshev_T(-1, x)


def test_proportionality_and_interpolation():
    x = np.linspace(0, 1, 20)
    c, dev = proportionality(3 * x**2 + 1, x**2 + 1 / 3)
    assert c == pytest.approx(3.0) and dev < 1e-15
    assert proportionality(x + 1, x**2 + 1)[1] > 0.1
    p = interpolate(lambda t: 2 * t**3 - t + 5, 3)
    assert p.coef == pytest.approx([5, -1, 0, 2], abs=1e-13)


# ---------------------------------------------------------------- Zolotarev

def test_zolotarev_polynomial_properties():
    zp = zolotarev_endpoints(3, KAPPA)
    poly = zp.polynomial
    assert poly.coef[-1] == 1.0
    x = np.linspace(-1, 1, 2001)
    assert np.max(np.abs(poly(x))) == pytest.approx(zp.L_n, rel=1e-12)
    y = np.linspace(zp.alpha, zp.beta, 2001)
    assert np.max(np.abs(poly(y))) == pytest.approx(zp.L_n, rel=1e-10)
    assert zp.sigma == pytest.approx(-poly.coef[-2] / 3, abs=1e-12)
    # the closed-form deviation is half the sup norm
    assert zp.L_n == pytest.approx(2 * zp.ell_n, rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_zolotarev_endpoint_back_relation(n):
    zp = zolotarev_endpoints(n, 0.8)
    k2 = 0.64
    back = (zp.alpha - 1) * (zp.beta + 1) / ((zp.alpha + 1) * (zp.beta - 1))
    assert back == pytest.approx(k2, rel=1e-12)
    assert 1 < zp.alpha < zp.beta


def test_kappa_for_alpha_inverts():
    k = zolotarev_kappa_for_alpha(3, 3.0)
    assert zolotarev_endpoints(3, k).alpha == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(ParamOutOfRange):
        zolotarev_kappa_for_alpha(3, 0.5)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (3.0, 1.0), (5.0, 2.0)])
def test_zolotarev_matches_period_three(a, b):
    rep = verify_zolotarev_n3(ConfocalFamily(a, b))
    assert rep.proportional and rep.proportionality < 1e-9
    assert rep.alpha == pytest.approx(2 * a / b - 1, rel=1e-12)
    assert rep.beta == pytest.approx(rep.beta_from_caustic, rel=1e-10)
    assert rep.beta_from_Y == pytest.approx(rep.beta_from_caustic, rel=1e-12)
    assert abs(rep.identity_corrected) < 1e-9
    assert rep.L_n == pytest.approx(2 * rep.ell_n, rel=1e-12)


def test_zolotarev_quoted_forms_are_off(family21):
    # the commonly printed closed form for beta is shifted by 2, and the printed
    # endpoint relation does not vanish; see the corrected relation above
    rep = verify_zolotarev_n3(family21)
    assert rep.beta_quoted_closed - rep.beta_from_caustic == pytest.approx(2.0, abs=1e-12)
    assert rep.beta_quoted_rational < 0
    assert abs(rep.identity_quoted) > 1.0
    assert criterion3_residual(rep.alpha, rep.beta) == rep.identity_quoted
    assert endpoint_relation_n3(rep.alpha, rep.beta) == rep.identity_corrected


# ---------------------------------------------------------------- Akhiezer

@pytest.mark.parametrize("m", [1, 2, 3])
def test_akhiezer_symmetric(m):
    alpha = 0.35
    _, L = akhiezer_symmetric(m, alpha, 0.0)
    poly = interpolate(lambda x: akhiezer_symmetric(m, alpha, x)[0], 2 * m)
    assert poly.coef[-1] == pytest.approx(1.0, rel=1e-12)
    ends = akhiezer_symmetric(m, alpha, np.array([-1.0, -alpha, alpha, 1.0]))[0]
    assert ends == pytest.approx([L, (-1) ** m * L, (-1) ** m * L, L], rel=1e-12)
    x = np.concatenate([np.linspace(-1, -alpha, 500), np.linspace(alpha, 1, 500)])
    assert np.max(np.abs(akhiezer_symmetric(m, alpha, x)[0])) <= L * (1 + 1e-12)
    with pytest.raises(AlphaOutOfRange):
        akhiezer_symmetric(m, 1.2, 0.0)


def _alternation_count(poly, lo, hi, L):
    """Points of [lo, hi] where |poly| reaches L: endpoints plus interior critical points."""
    crit = poly.deriv().roots()
    crit = np.real(crit[np.abs(np.imag(crit)) < 1e-9])
    pts = np.concatenate([[lo, hi], crit[(crit > lo) & (crit < hi)]])
    return int(np.sum(np.abs(np.abs(poly(pts)) - L) < 1e-8 * L))


@pytest.mark.parametrize("n,m", [(4, 1), (4, 2), (5, 2), (5, 3), (6, 2)])
def test_akhiezer_general(n, m):
    prm = akhiezer_params(n, m, 0.7)
    assert prm.polynomial.coef[-1] == pytest.approx(1.0, rel=1e-10)
    assert -prm.polynomial.coef[-2] / n == pytest.approx(prm.tau1_coeff, abs=1e-10)
    left = np.linspace(-1, prm.alpha, 4000)
    right = np.linspace(prm.beta, 1, 4000)
    vl, vr = akhiezer_general_TA(n, m, 0.7, left), akhiezer_general_TA(n, m, 0.7, right)
    assert np.max(np.abs(vl)) <= prm.L * (1 + 1e-10)
    assert np.max(np.abs(vr)) <= prm.L * (1 + 1e-10)
    assert _alternation_count(prm.polynomial, -1.0, prm.alpha, prm.L) == prm.mu
    assert _alternation_count(prm.polynomial, prm.beta, 1.0, prm.L) == prm.nu
    gap = np.linspace(prm.alpha, prm.beta, 102)[1:-1]
    assert np.min(np.abs(akhiezer_general_TA(n, m, 0.7, gap))) > prm.L
    assert akhiezer_general_TA(n, m, 0.7, 1.0)[0] == pytest.approx(prm.L, rel=1e-9)


def test_akhiezer_mirror():
    p2, p3 = akhiezer_params(5, 2, 0.7), akhiezer_params(5, 3, 0.7)
    assert p3.alpha == pytest.approx(-p2.beta) and p3.beta == pytest.approx(-p2.alpha)
    x = np.linspace(-1, 1, 11)
    assert np.allclose(p3.polynomial(x), -p2.polynomial(-x), atol=1e-12)


def test_akhiezer_general_reduces_to_symmetric():
    prm = akhiezer_params(4, 2, 0.7)
    assert prm.alpha == pytest.approx(-prm.beta)
    x = np.linspace(-1, 1, 41)
    sym, L = akhiezer_symmetric(2, prm.beta, x)
    assert L == pytest.approx(prm.L, rel=1e-12)
    assert np.allclose(prm.polynomial(x), sym, atol=1e-12)


def test_akhiezer_param_range():
    with pytest.raises(ParamOutOfRange):
        akhiezer_params(4, 0, 0.5)
    with pytest.raises(ParamOutOfRange):
        akhiezer_params(4, 4, 0.5)


@pytest.mark.parametrize("t", [1.5, 2.0, 4.0])
def test_akhiezer_kappa_relations(t):
    kE = akhiezer_kappa(4, 2, Case.E, t)
    K = EllipticModulus(kE).K
    assert 1 / float(jacobi_sn_cn_dn(K / 2, kE)[2]) ** 2 == pytest.approx(t, rel=1e-10)
    kH = akhiezer_kappa(5, 1, Case.H, t)
    K = EllipticModulus(kH).K
    assert float(jacobi_sn_cn_dn(K / 5, kH)[0]) ** 2 == pytest.approx(1 - 1 / t, rel=1e-10)


@pytest.mark.parametrize("a,b,case", [(2.0, 1.0, Case.E), (3.0, 1.0, Case.E), (3.0, 1.0, Case.H), (5.0, 1.0, Case.H)])
def test_akhiezer_n4(a, b, case):
    rep = verify_akhiezer_n4(ConfocalFamily(a, b), case)
    assert rep.passed and rep.proportionality < 1e-9
    assert rep.extra["quadratic_form"] < 1e-9
    if case is Case.E:
        assert rep.extra["canonical_quartic"] < 1e-9
        assert rep.extra["period_8"] < 1e-9


def test_akhiezer_n4_hyperbola_quoted_forms_are_off():
    rep = verify_akhiezer_n4(ConfocalFamily(3.0, 1.0), Case.H)
    assert rep.extra["quadratic_form_quoted"] > 0.1
    assert rep.extra["canonical_quartic"] > 0.1


def test_akhiezer_n4_inadmissible(family21):
    with pytest.raises(CaseHInadmissible):
        verify_akhiezer_n4(family21, Case.H)


@pytest.mark.parametrize("ident,case", [
    ("n4-2-1", Case.E), ("n5-2-1-a", Case.E), ("n5-2-1-b", Case.E),
    ("n6-2-1-ellipse", Case.E), ("n6-2-1-hyperbola", Case.H),
])
def test_akhiezer_pn(ident, case):
    fx = next(f for f in periodic_fixtures() if f.ident == ident)
    rep = verify_akhiezer_pn(fx.family, fx.lambda0, fx.n, fx.winding[1] // 2, case)
    assert rep.passed
    # the modulus alone predicts the caustic
    assert rep.lambda_model == pytest.approx(fx.lambda0, rel=1e-10)


# ---------------------------------------------------------------- period five relation

@pytest.mark.parametrize("kappa", [0.2, 0.5, 0.8, 0.95])
def test_period_five_relation_vanishes(kappa):
    K = EllipticModulus(kappa).K
    Z = float(jacobi_sn_cn_dn(K / 5, kappa)[0]) ** 2
    assert abs(float(p_zs(Z, kappa**2))) < 1e-13
    assert abs(float(p_zs(1.01 * Z, kappa**2))) > 1e-4


def test_period_five_table_symmetry():
    M = p_table_matrix()
    assert M.shape == (17, 9)
    assert np.array_equal(M, M[::-1, ::-1])


@pytest.mark.parametrize("kappa", [0.3, 0.7])
def test_doubling_formula(kappa):
    # with Y = sn^2(u): sn^2(2u) = 4 Y (1 - Y)(1 - k^2 Y) / (1 - k^2 Y^2)^2
    K = EllipticModulus(kappa).K
    Y = float(jacobi_sn_cn_dn(K / 5, kappa)[0]) ** 2
    k2 = kappa**2
    direct = float(jacobi_sn_cn_dn(2 * K / 5, kappa)[0]) ** 2
    assert 4 * Y * (1 - Y) * (1 - k2 * Y) / (1 - k2 * Y * Y) ** 2 == pytest.approx(direct, rel=1e-13)
    assert abs(4 * Y * (1 - Y) * (1 - k2 * Y) / (1 - k2 * Y * Y) - direct) > 1e-4
