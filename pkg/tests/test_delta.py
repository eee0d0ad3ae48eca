import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gwig.delta import KappaProfile, RegularizedDelta, normalize_order
from gwig.errors import DomainError

# reference values from a 40-digit evaluation of the logistic profile (mpmath)
DELTA_AT_1 = 1.966119332414818525
KAPPA_AT_0 = 0.9932620530009145329
DELTA_P_AT_2 = -0.7996250105615306252
DELTA_PP_AT_2 = 0.3885166754820601644
KAPPA_P_AT_3 = -0.3313327383471676606
KAPPA_PP_AT_3 = -0.004143252688934466721
SUPPORT_HALF = 3.289021490198250952


@pytest.fixture
def delta():
    return RegularizedDelta(1.0, 10.0)


@pytest.fixture
def kappa(delta):
    return KappaProfile(delta, 2.0)


def test_origin_value(delta):
    assert delta.evaluate(0.0) == 2.5
    assert delta.peak() == 2.5
    assert RegularizedDelta(0.2, 8.0).evaluate(0.0) == pytest.approx(10.0, rel=1e-15)


def test_reference_values(delta, kappa):
    assert delta.evaluate(1.0) == pytest.approx(DELTA_AT_1, rel=1e-14)
    assert delta.evaluate(2.0, "first") == pytest.approx(DELTA_P_AT_2, rel=1e-13)
    assert delta.evaluate(2.0, "second") == pytest.approx(DELTA_PP_AT_2, rel=1e-13)
    assert kappa.evaluate(0.0) == pytest.approx(KAPPA_AT_0, rel=1e-15)
    assert kappa.evaluate(3.0, 1) == pytest.approx(KAPPA_P_AT_3, rel=1e-13)
    assert kappa.evaluate(3.0, 2) == pytest.approx(KAPPA_PP_AT_3, rel=1e-12)


def test_closed_form_origin_derivatives(delta):
    assert delta.evaluate(0.0, 1) == 0.0
    assert delta.evaluate(0.0, 2) == pytest.approx(-10.0 / 8.0, rel=1e-15)


def test_decay(delta, kappa):
    assert delta.evaluate(800.0) == 0.0
    assert kappa.evaluate(60.0) < 1e-24


def test_tiny_radius_is_origin(delta):
    assert delta.evaluate(1e-13) == delta.evaluate(0.0)
    assert delta.evaluate(1e-13, 1) == 0.0


@pytest.mark.parametrize("bad", [-1e-9, -3.0, np.nan])
def test_negative_radius(delta, bad):
    with pytest.raises(DomainError):
        delta.evaluate(bad)


def test_bad_parameters():
    with pytest.raises(DomainError):
        RegularizedDelta(0.0)
    with pytest.raises(DomainError):
        RegularizedDelta(1.0, -2.0)


def test_order_names():
    assert [normalize_order(o) for o in ("value", "first", "second", 0, 1, 2)] == [0, 1, 2, 0, 1, 2]
    with pytest.raises(ValueError):
        normalize_order("third")


def test_derivatives_match_finite_differences(delta):
    # each order against a centred difference of the order below; delta is even and delta' odd at 0
    r = np.linspace(0.0, 20.0, 4001)
    h = 1e-5
    for order, parity in ((1, 1.0), (2, -1.0)):
        below = np.asarray(delta.evaluate(np.abs(r - h), order - 1))
        below = np.where(r - h < 0, parity * below, below)
        fd = (np.asarray(delta.evaluate(r + h, order - 1)) - below) / (2 * h)
        exact = np.asarray(delta.evaluate(r, order))
        assert np.all(np.abs(fd - exact) <= 1e-6 * np.abs(exact) + 1e-9)


def test_bundle_matches_single_orders(kappa):
    r = np.linspace(0.0, 15.0, 301)
    values = kappa.derivatives(r)
    for k in range(3):
        np.testing.assert_array_equal(values[k], kappa.evaluate(r, k))


def test_shell_integral_diagnostic(delta):
    from scipy import integrate
    numeric, _ = integrate.quad(lambda r: 4 * np.pi * delta.evaluate(r) * r * r, 0, 80, epsabs=1e-12)
    assert delta.shell_integral() == pytest.approx(numeric, rel=1e-10)


@given(st.floats(0.01, 10.0), st.floats(0.5, 20.0), st.floats(0.1, 4.0))
def test_kappa_profile_invariants(a, beta, w):
    prof = KappaProfile(RegularizedDelta(a, beta), w)
    r = np.linspace(0.0, 40.0, 801)
    k0, k1, _ = prof.derivatives(r)
    assert np.all((k0 >= 0.0) & (k0 <= 1.0))
    assert np.all(k1 <= 0.0)
    assert np.all(np.diff(k0) <= 0.0)


def test_curvature_changes_sign_once(kappa):
    r = np.linspace(1e-6, 30.0, 30001)
    k2 = np.asarray(kappa.evaluate(r, 2))
    s = np.sign(k2[np.abs(k2) > 0])
    assert np.sum(s[1:] != s[:-1]) == 1


def test_origin_residual():
    for a in (0.1, 0.05, 0.01):
        prof = KappaProfile(RegularizedDelta(a, 10.0), 2.0)
        assert prof.origin_residual() == pytest.approx(np.exp(-5.0 / a), rel=1e-14)
        assert prof.origin_residual() < 1e-21


def test_indicator_limit_dimensional_radius():
    # at a fixed dimensional radius the scaled radius r/a grows, so kappa dies out
    values = [KappaProfile(RegularizedDelta(a, 10.0)).evaluate(0.5 / a) for a in (0.1, 0.05, 0.02, 0.01)]
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-15
    assert KappaProfile(RegularizedDelta(0.01, 10.0)).evaluate(0.0) == 1.0


def test_support_radius_reference(kappa):
    assert kappa.support_radius(0.5) == pytest.approx(SUPPORT_HALF, rel=1e-13)


def test_support_radius_limits(kappa):
    assert kappa.support_radius(0.999) == 0.0
    radii = [kappa.support_radius(t) for t in (0.9, 0.5, 1e-3, 1e-9)]
    assert np.all(np.diff(radii) > 0)
    with pytest.raises(DomainError):
        kappa.support_radius(1.0)
