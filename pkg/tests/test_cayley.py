import math

import mpmath as mp
import numpy as np
import pytest

from poncelet.cayley import (
    Flavor, Source, UnsupportedPeriod, classify_winding, closed_form_caustics,
    closed_form_lambdas, elliptic_periodic_residual, find_caustics, periodic_residual, schedule,
)
from poncelet.conics import ConfocalFamily, DegenerateCaustic

# roots computed independently with 40-digit arithmetic
MP_ROOTS = {
    (2.0, 1.0, 3): [0.92820323027550917411],
    (2.0, 1.0, 5): [0.47015364759538576792, 0.99763817093889706951],
}


def classical_cayley(a, b, lam, n):
    """Cayley's condition for the pencil t * boundary + caustic in 30 digits.

    Expands sqrt((1 + t)(t/a + 1/(a - lam))(t/b + 1/(b - lam))) at t = 0 and
    returns the relevant coefficient or Hankel determinant, scaled.
    """
    mp.mp.dps = 30
    a, b, lam = mp.mpf(a), mp.mpf(b), mp.mpf(lam)
    c = mp.taylor(lambda t: mp.sqrt((1 + t) * (t / a + 1 / (a - lam)) * (t / b + 1 / (b - lam))), 0, n)
    scale = max(abs(x) for x in c)
    if n == 3:
        val = c[2] / scale
    elif n == 4:
        val = c[3] / scale
    elif n == 5:
        val = mp.det(mp.matrix([[c[2], c[3]], [c[3], c[4]]])) / scale**2
    else:
        val = mp.det(mp.matrix([[c[3], c[4]], [c[4], c[5]]])) / scale**2
    return abs(complex(val))


@pytest.mark.parametrize("flavor,n,expected", [
    (Flavor.PERIODIC, 3, ("C", 2, 1)),
    (Flavor.PERIODIC, 4, ("B", 3, 1)),
    (Flavor.PERIODIC, 5, ("C", 2, 2)),
    (Flavor.PERIODIC, 6, ("B", 3, 2)),
    (Flavor.ELLIPTIC_A, 2, ("C", 1, 1)),
    (Flavor.ELLIPTIC_A, 3, ("B", 2, 1)),
    (Flavor.ELLIPTIC_B, 2, ("D", 1, 1)),
    (Flavor.ELLIPTIC_B, 3, ("B", 2, 1)),
    (Flavor.ELLIPTIC_C, 3, ("D", 2, 1)),
])
def test_schedule(flavor, n, expected):
    s = schedule(flavor, n)
    assert (s.series, s.start, s.dim) == expected


def test_schedule_errors():
    with pytest.raises(ValueError):
        schedule(Flavor.PERIODIC, 2)
    with pytest.raises(ValueError):
        schedule(Flavor.ELLIPTIC_A, 1)
    with pytest.raises(ValueError):
        schedule(Flavor.ELLIPTIC_C, 4)


@pytest.mark.parametrize("a,b,n", [(2.0, 1.0, 3), (2.0, 1.0, 5)])
def test_roots_match_high_precision(a, b, n):
    got = [s.lambda0 for s in find_caustics(ConfocalFamily(a, b), n)]
    assert got == pytest.approx(MP_ROOTS[(a, b, n)], abs=1e-10)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (3.0, 1.0), (4.5, 1.0), (7.0, 2.0)])
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_closed_forms_match_scan(a, b, n):
    fam = ConfocalFamily(a, b)
    scan = sorted(s.lambda0 for s in find_caustics(fam, n, validate=False))
    assert scan == pytest.approx(sorted(closed_form_lambdas(fam, n)), abs=1e-9)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (4.5, 1.0)])
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_roots_satisfy_classical_cayley(a, b, n):
    # an independent determinant: the pencil of the two conics, not the cubic series
    fam = ConfocalFamily(a, b)
    for sol in find_caustics(fam, n, validate=False):
        assert classical_cayley(a, b, sol.lambda0, n) < 1e-11
        assert classical_cayley(a, b, 0.97 * sol.lambda0, n) > 1e-9


def test_closed_form_caustics_are_validated(family21):
    sols = closed_form_caustics(family21, 6, validate=True)
    assert all(s.source is Source.CLOSED_FORM and s.validated for s in sols)
    assert [s.winding for s in sols] == [(6, 2), (6, 4)]


def test_closed_form_unsupported(family21):
    with pytest.raises(UnsupportedPeriod):
        closed_form_lambdas(family21, 7)


def test_odd_period_with_hyperbola_is_impossible(family21):
    cond = periodic_residual(family21, 1.5, 5)
    assert cond.odd_hyperbola and math.isinf(cond.residual) and not cond.vanishes()


def test_residual_rejects_degenerate(family21):
    with pytest.raises(DegenerateCaustic):
        periodic_residual(family21, 1.0, 4)
    with pytest.raises(DegenerateCaustic):
        elliptic_periodic_residual(family21, 3.0, 2)


def test_residual_vanishes_at_fixture(periodic_fixture):
    cond = periodic_residual(periodic_fixture.family, periodic_fixture.lambda0, periodic_fixture.n)
    assert cond.vanishes(1e-10)


def test_divisor_roots_are_filtered(family21):
    # lambda of period 3 also solves the period-6 condition; it must not be reported for 6
    lam3 = closed_form_lambdas(family21, 3)[0]
    assert periodic_residual(family21, lam3, 6).vanishes(1e-8)
    sols6 = [s.lambda0 for s in find_caustics(family21, 6, validate=False)]
    assert all(abs(l - lam3) > 1e-6 for l in sols6)


def test_hyperbola_rejected_when_inadmissible(family21):
    # b < a/2 fails for (2, 1): only the ellipse caustic exists for period 4
    assert [s.lambda0 for s in find_caustics(family21, 4)] == pytest.approx([2 / 3], abs=1e-10)


def test_empty_result():
    # a long thin ellipse family with no period-2 elliptic hyperbola solution
    assert find_caustics(ConfocalFamily(2.0, 1.0), 2, Flavor.ELLIPTIC_B, validate=False) == []


def test_classify_winding(family21):
    assert classify_winding(family21, 2.0 / 3.0, 4) == (4, 2)
    with pytest.raises(ValueError):
        classify_winding(family21, 0.5, 4)


def _elliptic_union(fam, n):
    out = []
    flavors = [Flavor.ELLIPTIC_A, Flavor.ELLIPTIC_B] + ([Flavor.ELLIPTIC_C] if n % 2 else [])
    for fl in flavors:
        out.extend(s.lambda0 for s in find_caustics(fam, n, fl, validate=False))
    return sorted(out)


@pytest.mark.parametrize("a,b", [(2.0, 1.0), (3.0, 1.0), (4.5, 1.0)])
@pytest.mark.parametrize("n", [2, 3])
def test_even_period_equals_elliptic_period(a, b, n):
    fam = ConfocalFamily(a, b)
    periodic = sorted(s.lambda0 for s in find_caustics(fam, 2 * n, validate=False))
    assert periodic == pytest.approx(_elliptic_union(fam, n), abs=1e-9)
    assert periodic


def test_elliptic_solution_reports_cartesian_period(elliptic_fixture):
    fx = elliptic_fixture
    sols = find_caustics(fx.family, fx.n, fx.flavor)
    match = [s for s in sols if abs(s.lambda0 - fx.lambda0) < 1e-9]
    assert len(match) == 1
    assert match[0].n == 2 * fx.n and match[0].winding == fx.winding and match[0].validated
