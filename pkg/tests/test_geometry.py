from fractions import Fraction

import pytest

from mnvbench.algebra import ONE, RationalFn, S, SparsePoly, X, Y
from mnvbench.errors import ConformalityViolation, PotentialMismatch
from mnvbench.geometry import (
    Immersion,
    enneper_immersion,
    fundamental_form,
    invert_immersion,
    laplacian,
    potential_pairing,
    structural_certificates,
    verify_conformal,
    verify_potential_matches_U,
    weierstrass_potential_sq,
)

ZERO = SparsePoly()


@pytest.fixture(scope="module")
def enneper():
    return enneper_immersion()


@pytest.fixture(scope="module")
def inverted(enneper):
    return invert_immersion(enneper)


def test_enneper_value(enneper):
    assert enneper.evaluate(1, 0, 0) == (0, Fraction(2, 3), 1)


def test_enneper_translation(enneper):
    assert enneper.evaluate(0, 0, 5) == (0, -5, 0)
    assert enneper.evaluate(0, 0, Fraction(-1, 2)) == (0, Fraction(1, 2), 0)


def test_inverted_value(inverted):
    assert inverted.evaluate(1, 0, 0) == (0, Fraction(-6, 13), Fraction(-9, 13))


def test_enneper_is_harmonic(enneper):
    assert all(c.is_zero() for c in laplacian(enneper).components)


def test_inversion_is_involution(enneper, inverted):
    back = invert_immersion(inverted)
    assert all((a - b).is_zero() for a, b in zip(back.components, enneper.components))


def test_enneper_first_fundamental_form(enneper):
    ff = fundamental_form(enneper)
    assert ff.E == RationalFn((ONE + X * X + Y * Y) ** 2)
    assert ff.F.is_zero()
    assert (ff.E - ff.G).is_zero()


def test_conformal_reports(enneper, inverted):
    reports = verify_conformal(fundamental_form(enneper), "enneper")
    reports += verify_conformal(fundamental_form(inverted), "inverted")
    assert [r.check for r in reports] == ["enneper:E=G", "enneper:F=0", "inverted:E=G", "inverted:F=0"]
    assert all(r.passed for r in reports)


def test_sheared_immersion_is_not_conformal():
    r = Immersion(RationalFn(X + Y), RationalFn(Y), RationalFn(ZERO))
    with pytest.raises(ConformalityViolation) as info:
        verify_conformal(fundamental_form(r))
    assert info.value.context["point"] is not None


def test_enneper_potential_is_zero(enneper):
    # a minimal surface has vanishing mean curvature
    assert potential_pairing(enneper).is_zero()


def test_potential_squared_value(inverted):
    pt = (1, 0, 0)
    h = potential_pairing(inverted).evaluate(*pt)
    g = fundamental_form(inverted).E.evaluate(*pt)
    assert h * h / (16 * g**3) == Fraction(144, 169)


def test_potential_squared_plane_is_zero():
    plane = Immersion(RationalFn(X), RationalFn(Y), RationalFn(ZERO))
    assert weierstrass_potential_sq(plane, fundamental_form(plane)).is_zero()


def test_potential_squared_unit_sphere():
    # inverse stereographic chart: |H| = 1 and g = 4/(1+x^2+y^2)^2, so (H sqrt(g)/2)^2 = 1/(1+x^2+y^2)^2
    d = ONE + X * X + Y * Y
    sphere = Immersion(RationalFn(2 * X, d), RationalFn(2 * Y, d), RationalFn(X * X + Y * Y - 1, d))
    ff = fundamental_form(sphere)
    assert ff.F.is_zero() and (ff.E - ff.G).is_zero()
    assert weierstrass_potential_sq(sphere, ff) == RationalFn(1, d * d)


def test_potential_matches_u(inverted, bundle):
    report = verify_potential_matches_U(inverted, fundamental_form(inverted), bundle)
    assert report.potential_certificate.passed
    assert report.sign_convention == 1
    assert report.potential_certificate.extra["sign_convention"] == 1
    assert report.samples >= 100
    assert all(r.passed for r in report.conformal_certificate)


@pytest.mark.parametrize(
    "offset",
    [
        (ZERO, -S, ONE),  # extra constant translation
        (ZERO, S, ZERO),  # opposite time direction
        (ZERO, ZERO, ZERO),  # no time dependence
    ],
)
def test_wrong_translation_fails_potential(offset, bundle):
    r = invert_immersion(enneper_immersion(offset))
    with pytest.raises(PotentialMismatch):
        verify_potential_matches_U(r, fundamental_form(r), bundle, samples=8)


def test_structural_certificates():
    reports = structural_certificates()
    assert [r.check for r in reports] == [
        "enneper:E=G",
        "enneper:F=0",
        "inverted:E=G",
        "inverted:F=0",
        "9|u|^2=Q",
        "g_inverted*|u|^4=g0",
    ]
    assert all(r.passed for r in reports)


def test_denominator_is_nine_norm(enneper, bundle):
    assert 9 * enneper.norm2() == RationalFn(bundle.Q)
