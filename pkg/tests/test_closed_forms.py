import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gwig import closed_forms as cf
from gwig.delta import RegularizedDelta
from gwig.errors import DomainError, NonInvertibleError, ShapeError

# 40-digit references (mpmath) for a = 1, beta = 10, w = 2
PHI_AT_10 = 0.1008167537111977518
PHI_AT_5 = 0.2996007047138101298
E_AT_1 = 0.01959974614079816414
E_AT_5 = 0.1268992935896432281
DIV_E_OVER_3_AT_2 = 0.1016328378703897532


@pytest.fixture
def model():
    return cf.ParticleModel(RegularizedDelta(1.0, 10.0), w=2.0)


class TestComposition:
    def test_examples(self):
        assert cf.compose_solution(2.0, 4.0, 0.25).phi_hat == 2.5
        assert cf.extract_riemannian(2.5, 4.0, 0.25) == 2.0

    def test_limits(self):
        h = np.array([1.0, -3.0, np.inf])
        np.testing.assert_array_equal(cf.compose_solution(h[:2], 7.0, 0.0).phi_hat, h[:2])
        np.testing.assert_array_equal(cf.compose_solution(h, 7.0, 1.0).phi_hat, [7.0, 7.0, 7.0])

    def test_noninvertible(self):
        with pytest.raises(NonInvertibleError):
            cf.extract_riemannian([1.0, 2.0], 2.0, [0.3, 1.0])

    def test_domain_and_shape(self):
        with pytest.raises(DomainError):
            cf.compose_solution(1.0, 1.0, 1.2)
        with pytest.raises(ShapeError):
            cf.compose_solution(np.zeros(3), np.zeros(4), 0.1)

    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0.0, 0.99)),
                    min_size=1, max_size=30))
    def test_roundtrip(self, triples):
        h, d, k = (np.array(x) for x in zip(*triples))
        phi = cf.compose_solution(h, d, k).phi_hat
        back = cf.compose_solution(cf.extract_riemannian(phi, d, k), d, k).phi_hat
        assert np.all(np.abs(back - phi) <= 1e-12 * np.maximum(1.0, np.abs(phi)) + 1e-12 * np.abs(d))

    def test_dark_gauge(self):
        rng = np.random.default_rng(5)
        h, k = rng.normal(size=50), rng.uniform(0, 1, 50)
        diff = cf.compose_solution(h, 2.0, k).phi_hat - cf.compose_solution(h, -0.5, k).phi_hat
        np.testing.assert_allclose(diff, 2.5 * k, rtol=1e-14, atol=1e-15)


class TestParticle:
    def test_unit_radius_exact(self):
        for a, beta in ((1.0, 10.0), (0.05, 10.0), (3.0, 2.5), (0.3, 17.0)):
            assert cf.particle_potential(1.0, cf.ParticleModel(RegularizedDelta(a, beta))) == 1.0

    def test_reference_values(self, model):
        assert cf.particle_potential(10.0, model) == pytest.approx(PHI_AT_10, rel=1e-13)
        assert cf.particle_potential(5.0, model) == pytest.approx(PHI_AT_5, rel=1e-13)
        assert cf.particle_field(1.0, model) == pytest.approx(E_AT_1, rel=1e-13)
        assert cf.particle_field(5.0, model) == pytest.approx(E_AT_5, rel=1e-13)
        assert cf.particle_potential(10.0, model) * 10 - 1 < 0.01

    def test_field_at_unit_radius(self, model):
        assert cf.particle_field(1.0, model) == pytest.approx(1 - model.kappa.evaluate(1.0), rel=1e-14)

    def test_coulomb_far_field(self, model):
        r = np.array([40.0, 60.0])
        np.testing.assert_allclose(cf.particle_potential(r, model), 1 / r, rtol=1e-12)
        np.testing.assert_allclose(cf.particle_field(r, model), 1 / r**2, rtol=1e-10)
        assert np.max(np.abs(cf.particle_charge_density(r, model))) < 1e-12

    def test_saturated_kappa(self):
        m = cf.ParticleModel(RegularizedDelta(0.01, 10.0))
        assert m.kappa.evaluate(0.5) == 1.0
        assert cf.particle_potential(0.5, m) == 1.0
        assert cf.particle_potential(0.0, m) == 1.0

    def test_origin_with_residual(self, model):
        assert cf.particle_potential(0.0, model) == np.inf

    def test_negative_radius(self, model):
        for fn in (cf.particle_potential, cf.particle_field, cf.particle_charge_density, cf.null_dark_potential):
            with pytest.raises(DomainError):
                fn(-1.0, model)

    def test_field_is_minus_gradient(self, model):
        r = np.linspace(0.1, 20.0, 2000)
        h = 1e-5
        fd = -(cf.particle_potential(r + h, model) - cf.particle_potential(r - h, model)) / (2 * h)
        E = cf.particle_field(r, model)
        assert np.max(np.abs(fd - E) / np.maximum(np.abs(E), 1e-3)) < 1e-6

    def test_density_is_minus_divergence(self, model):
        # the density carries the opposite sign of (1/3) div E
        assert cf.particle_charge_density(2.0, model) == pytest.approx(-DIV_E_OVER_3_AT_2, rel=1e-12)
        r = np.linspace(0.2, 15.0, 500)
        h = 1e-4
        flux = lambda x: x**2 * cf.particle_field(x, model)
        div = (flux(r + h) - flux(r - h)) / (2 * h) / r**2 / 3
        np.testing.assert_allclose(cf.particle_charge_density(r, model), -div, atol=1e-7)

    def test_general_dark_ratio(self):
        m = cf.ParticleModel(RegularizedDelta(1.0, 10.0), phi_d_over_phi_a=0.0)
        r = np.linspace(0.1, 10, 50)
        np.testing.assert_allclose(cf.particle_potential(r, m), cf.null_dark_potential(r, m), rtol=1e-12)

    def test_non_singular_small_a(self):
        m = cf.ParticleModel(RegularizedDelta(0.05, 10.0))
        r = np.concatenate(([0.0], np.logspace(-300, 3, 3000)))
        assert np.max(np.abs(cf.particle_potential(r, m))) <= 1 + 1e-12
        assert m.origin_residual() <= 1e-40


class TestNullDark:
    def test_limits(self, model):
        far = cf.ParticleModel(RegularizedDelta(1e9, 10.0))
        assert cf.null_dark_potential(3.0, far) == pytest.approx(1 / 3, rel=1e-8)
        sat = cf.ParticleModel(RegularizedDelta(0.01, 10.0))
        assert cf.null_dark_potential(0.5, sat) == 0.0

    def test_matches_composition(self, model):
        r = np.linspace(0.05, 25, 999)
        k = model.kappa.evaluate(r)
        np.testing.assert_allclose(cf.null_dark_potential(r, model), cf.compose_solution(1 / r, 0.0, k).phi_hat,
                                   rtol=1e-14)


class TestDirichlet:
    def test_exponent_one_matches_particle(self, model):
        r = np.linspace(0.1, 12, 200)
        # (1 - k) phi_d / r + k phi_d is phi_d times the unit-dark-field particle profile
        np.testing.assert_allclose(cf.dirichlet_solution(r, 2.0, model.delta), 2.0 * cf.particle_potential(r, model),
                                   rtol=1e-12)
        np.testing.assert_allclose(cf.dirichlet_solution(r, 1.0, model.delta), cf.particle_potential(r, model),
                                   rtol=1e-12)

    def test_limits(self):
        far = RegularizedDelta(1e9, 10.0)
        assert cf.dirichlet_solution(4.0, 3.0, far) == pytest.approx(0.75, rel=1e-8)
        assert cf.dirichlet_solution(4.0, 3.0, far, exponent=2) == pytest.approx(3 / 16, rel=1e-8)
        assert cf.dirichlet_solution(0.3, 3.0, RegularizedDelta(0.01, 10.0)) == 3.0

    def test_origin_rejected(self, model):
        with pytest.raises(DomainError):
            cf.dirichlet_solution(0.0, 1.0, model.delta)
