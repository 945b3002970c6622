import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from poncelet.exactalg import (
    EXAMPLES, ExampleMismatch, NonHomogeneousFactor, RationalPoly, ZeroLeading, ZeroPolynomial,
    bareiss_det, certify_identity, discriminant, homogenized_separability_check,
    normalized_c_coeffs, normalized_sqrt_coeffs, proportional_polys, resultant,
    verify_discriminant_example,
)
from poncelet.series import series_family

X = sp.Symbol("x")

# ratio between the discriminant and the printed closed form, stable over all points
P_CONSTANTS = {
    "p2": Fraction(4),
    "p3": Fraction(-3**9),
    "p4": Fraction(-2**28),
    "p5": Fraction(5**25),
}


def _to_sympy(p: RationalPoly):
    return sum(sp.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(p.coeffs))


def _random_poly(rng, degree):
    c = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(degree)]
    return RationalPoly(c + [Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 4))])


def test_rational_poly_arithmetic():
    x = RationalPoly.x()
    p = (x + 1) * (x - 1)
    assert p.coeffs == (-1, 0, 1)
    assert (p - p).is_zero() and (p - p).degree == -1
    assert (x**3).derivative().coeffs == (0, 0, 3)
    stripped, k = (x**2 * (x + 2)).strip_variable()
    assert k == 2 and stripped.coeffs == (2, 1)
    with pytest.raises(ZeroPolynomial):
        RationalPoly().lc


def test_bareiss_matches_fraction_determinant():
    M = [[Fraction(2), Fraction(1, 3), Fraction(0)],
         [Fraction(-1), Fraction(4), Fraction(5, 2)],
         [Fraction(0), Fraction(1), Fraction(1)]]
    ref = sp.Matrix([[sp.Rational(v.numerator, v.denominator) for v in row] for row in M]).det()
    assert bareiss_det(M) == Fraction(int(ref.p), int(ref.q))


def test_resultant_small_examples():
    x = RationalPoly.x()
    assert resultant(x * x - 1, x - 2) == 3
    p, q = Fraction(3), Fraction(-7, 2)
    assert discriminant(x * x + p * x + q) == p * p - 4 * q
    with pytest.raises(ZeroPolynomial):
        resultant(RationalPoly(), x)
    with pytest.raises(ZeroLeading):
        discriminant(RationalPoly())
    with pytest.raises(ValueError):
        discriminant(x + 1)


@pytest.mark.parametrize("seed", range(8))
def test_resultant_and_discriminant_match_sympy(seed):
    rng = random.Random(seed)
    f, g = _random_poly(rng, 4), _random_poly(rng, 3)
    ref = sp.resultant(_to_sympy(f), _to_sympy(g), X)
    assert resultant(f, g) == Fraction(int(sp.numer(ref)), int(sp.denom(ref)))
    ref = sp.discriminant(_to_sympy(f), X)
    assert discriminant(f) == Fraction(int(sp.numer(ref)), int(sp.denom(ref)))


def test_resultant_product_over_rational_roots():
    rng = random.Random(5)
    f = _random_poly(rng, 4)
    roots = [Fraction(1, 2), Fraction(-3), Fraction(2, 7)]
    g = RationalPoly([1])
    for r in roots:
        g = g * RationalPoly([-r, 1])
    # Res(f, g) = (-1)^(deg f deg g) lc(g)^deg f prod f(r)
    def ev(p, t):
        return sum(c * t**k for k, c in enumerate(p.coeffs))
    expected = (-1) ** (4 * 3) * np.prod([ev(f, r) for r in roots])
    assert resultant(f, g) == expected


def test_period_three_condition_discriminant():
    a, b = Fraction(2), Fraction(1)
    assert discriminant(EXAMPLES["c1"].polynomial(a, b)) == 192
    assert discriminant(EXAMPLES["c5"].polynomial(a, b)) == 128


@pytest.mark.parametrize("ident", ["c1", "c2", "c5"])
def test_c_examples_exact(ident):
    rep = verify_discriminant_example(ident, trials=20, seed=1)
    assert rep.exact and rep.passed and rep.numerator_matches
    assert rep.constant == 1


@pytest.mark.parametrize("ident", ["c3", "c4"])
def test_hankel_examples_up_to_constant(ident):
    rep = verify_discriminant_example(ident, trials=10, seed=2)
    assert rep.constant_stable and rep.passed
    assert rep.numerator_matches
    assert rep.constant == 1


@pytest.mark.parametrize("ident", sorted(P_CONSTANTS))
def test_p_examples_stable_constant(ident):
    rep = verify_discriminant_example(ident, trials=20, seed=3)
    assert rep.constant_stable
    assert rep.constant == P_CONSTANTS[ident]
    assert rep.exact_matches == 0 and not rep.passed


def test_mismatch_raises_with_witness():
    with pytest.raises(ExampleMismatch, match="mismatch at"):
        verify_discriminant_example("p2", trials=2, raise_on_mismatch=True)


def test_p2_discriminant_is_symmetric():
    x, y, z = sp.symbols("x y z")
    p2 = (x + y + z) ** 2 - 4 * (x * y + y * z + z * x)
    assert sp.expand(sp.discriminant(p2, z) - 16 * x * y) == 0
    assert sp.expand(sp.discriminant(p2, x) - 16 * y * z) == 0
    u, v = Fraction(3, 5), Fraction(-2, 7)
    assert discriminant(EXAMPLES["p2"].polynomial(u, v)) == 16 * u * v


def test_exact_series_mirror_matches_floats():
    rng = random.Random(9)
    for _ in range(20):
        b = Fraction(rng.randint(1, 50), rng.randint(1, 50))
        a = b + Fraction(rng.randint(1, 50), rng.randint(1, 50))
        lam = Fraction(rng.randint(1, 99), 100) * a
        N = 6
        P = normalized_sqrt_coeffs(a, b, N)
        C = normalized_c_coeffs(a, b, N)
        fam = series_family(float(a), float(b), float(lam), N)
        B, Cs = fam["B"].coeffs, fam["C"].coeffs
        f0 = float(a * b * lam)
        for k in range(N + 1):
            pk = float(sum(c * lam**j for j, c in enumerate(P[k].coeffs)))
            assert pk == pytest.approx(B[k] / B[0] * f0**k, rel=1e-10, abs=1e-10 * f0**k)
            ck = float(sum(c * lam**j for j, c in enumerate(C[k].coeffs)))
            assert B[0] * ck / (f0**k * float(lam) ** (k + 1)) == pytest.approx(Cs[k], rel=1e-10, abs=1e-12)


def test_proportional_polys():
    x = RationalPoly.x()
    f = x * x + 2
    assert proportional_polys(f * Fraction(3, 2), f) == Fraction(3, 2)
    assert proportional_polys(f + x, f) is None
    assert proportional_polys(f, RationalPoly()) is None


@pytest.mark.parametrize("ident", ["c1", "c2", "c3", "c4", "c5"])
def test_identity_certificate(ident):
    # a (d+1)^2 grid promotes the pointwise checks to a polynomial identity
    cert = certify_identity(ident)
    assert cert.holds
    assert cert.points == (cert.degree_bound + 1) ** 2


@pytest.mark.parametrize("ident", ["p2", "p3"])
def test_identity_certificate_with_constant(ident):
    cert = certify_identity(ident, P_CONSTANTS[ident])
    assert cert.holds and cert.points == (cert.degree_bound + 1) ** 2
    assert not certify_identity(ident).holds


@pytest.mark.parametrize("ident,expected", [
    ("c1", {"a^2-ab+b^2": 2}),
    ("c2", {"(a-b)^2": 2}),
    ("c4", {"(a-b)^8": 8, "sextic": 6}),
    ("p5", {"x^2-y^2-11xy": 2, "x^2-y^2+11xy": 2}),
])
def test_homogeneity(ident, expected):
    assert homogenized_separability_check(ident).degrees == expected


def test_non_homogeneous_factor_detected(monkeypatch):
    ex = EXAMPLES["c1"]
    bad = type(ex)(ex.ident, ex.polynomial, ex.closed_form, (("a+1", lambda a, b: a + 1, 1),))
    monkeypatch.setitem(EXAMPLES, "c1", bad)
    with pytest.raises(NonHomogeneousFactor):
        homogenized_separability_check("c1")
