import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwig import core
from gwig.errors import DomainError, NonInvertibleError, ShapeError, SingularSystemError

kappas = st.floats(0.0, 0.99)
weights = st.lists(st.floats(0.1, 1.0), min_size=1, max_size=6)


class TestKappaLambda:
    def test_identity_cases(self):
        assert core.kappa_lambda_roundtrip(0.0, "kappa_to_lambda") == 0.0
        assert core.kappa_lambda_roundtrip(0.0, "lambda_to_kappa") == 0.0

    def test_forced_value(self):
        lam = core.kappa_lambda_roundtrip(1.0 - np.exp(-5.0), core.Direction.KAPPA_TO_LAMBDA)
        assert lam == pytest.approx(5.0, rel=1e-14)

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, np.nan])
    def test_kappa_domain(self, bad):
        with pytest.raises(DomainError):
            core.kappa_to_lambda(bad)

    def test_lambda_domain(self):
        with pytest.raises(DomainError):
            core.lambda_to_kappa(-1e-3)

    @given(st.floats(1e-300, 0.999))
    def test_roundtrip_from_kappa(self, k):
        assert core.lambda_to_kappa(core.kappa_to_lambda(k)) == pytest.approx(k, rel=1e-14)

    def test_dilation_scalar_consistent(self):
        s = core.DilationScalar.from_lambda(2.0)
        assert np.exp(-s.lam) == pytest.approx(1.0 - s.kappa, rel=1e-15)
        with pytest.raises(DomainError):
            core.DilationScalar(0.5, 3.0)


class TestKappaTensor:
    def test_zero_kappa(self):
        assert np.array_equal(core.kappa_tensor(0.0, [1.0, 2.0, 3.0]).entries, np.zeros(3))

    def test_half(self):
        np.testing.assert_allclose(core.kappa_tensor(0.5, [1.0, 2.0]).entries, [0.5, 0.75], rtol=1e-15)

    def test_near_collapse(self):
        K = core.kappa_tensor(core.KAPPA_MAX, [1.0, 2.0])
        assert np.all(K.entries > 1.0 - 1e-11)

    def test_weight_collapse_identity(self):
        lam = np.linspace(0.0, 10.0, 101)
        w = np.array([0.5, 1.0, 2.0])
        for x in lam:
            K = core.kappa_tensor(core.lambda_to_kappa(x), w)
            np.testing.assert_allclose(1.0 - K.entries, np.exp(-w * x), rtol=0, atol=1e-14)

    def test_monotone(self):
        grid = np.linspace(0.0, 0.999, 500)
        e = np.array([core.kappa_tensor(k, [0.3, 1.0, 4.0]).entries for k in grid])
        assert np.all(np.diff(e, axis=0) > 0.0)


class TestTransforms:
    def test_forward_example(self):
        K = core.AffineKappaTensor([0.5, 0.5], [0.0, 4.0])
        np.testing.assert_array_equal(core.forward_transform([2.0, 2.0], K), [1.0, 3.0])

    def test_inverse_example(self):
        K = core.AffineKappaTensor([0.5, 0.5], [0.0, 4.0])
        np.testing.assert_array_equal(core.inverse_transform([1.0, 3.0], K), [2.0, 2.0])

    def test_identity_at_zero(self):
        K = core.kappa_tensor(0.0, [1.0, 2.0], [5.0, -1.0])
        v = np.array([0.3, -7.0])
        np.testing.assert_array_equal(core.forward_transform(v, K), v)
        np.testing.assert_array_equal(core.inverse_transform(v, K), v)

    def test_collapse_goes_to_fixed_point(self):
        K = core.AffineKappaTensor([1.0, 1.0], [3.0, -2.0])
        np.testing.assert_array_equal(core.forward_transform([100.0, 5.0], K), [3.0, -2.0])
        with pytest.raises(NonInvertibleError):
            core.inverse_transform([3.0, -2.0], K)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            core.forward_transform([1.0, 2.0, 3.0], core.kappa_tensor(0.3, [1.0, 1.0]))

    @settings(max_examples=200)
    @given(kappas, weights, st.data())
    def test_roundtrip(self, kappa, w, data):
        d = len(w)
        vec = st.lists(st.floats(-100, 100), min_size=d, max_size=d)
        v, fp = np.array(data.draw(vec)), np.array(data.draw(vec))
        K = core.kappa_tensor(kappa, w, fp)
        scale = max(1.0, np.max(np.abs(v)), np.max(np.abs(fp)))
        assert np.max(np.abs(core.forward_transform(core.inverse_transform(v, K), K) - v)) <= 1e-12 * scale
        assert np.max(np.abs(core.inverse_transform(core.forward_transform(v, K), K) - v)) <= 1e-12 * scale


class TestInducedMetric:
    def test_example(self):
        h = core.induced_metric([[2.0, 1.0], [1.0, 2.0]], 0.5, [1.0, 2.0], [0.0, 0.0])
        np.testing.assert_allclose(h.linear, [[2.0, 2.0], [0.5, 2.0]], rtol=1e-15)
        np.testing.assert_array_equal(h.offset, [0.0, 0.0])

    def test_equal_weights(self):
        g = np.array([[3.0, 1.0, 0.5], [1.0, 2.0, -0.2], [0.5, -0.2, 1.0]])
        h = core.induced_metric(g, 0.7, [1.5, 1.5, 1.5], [1.0, -2.0, 0.5])
        np.testing.assert_allclose(h.linear, g, rtol=1e-14)
        np.testing.assert_allclose(h.offset, 0.0, atol=1e-14)

    def test_diagonal_metric(self):
        g = np.diag([-1.0, 1.0, 1.0, 1.0])
        h = core.induced_metric(g, 0.9, [0.5, 1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(h.linear, g)
        np.testing.assert_allclose(h.offset, 0.0, atol=1e-14)

    def test_generic_commutes(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d = 3
            m = rng.normal(size=(d, d))
            g = m + m.T + 4 * np.eye(d)
            kappa, w, v_d, v = rng.uniform(0, 0.95), rng.uniform(0.2, 2.5, d), rng.normal(size=d), rng.normal(size=d)
            h = core.induced_metric(g, kappa, w, v_d)
            lhs = h(core.forward_transform(v, core.kappa_tensor(kappa, w, v_d)))
            rhs = core.forward_transform(g @ v, core.kappa_tensor(kappa, w, g @ v_d))
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_affine_not_linear_for_generic_case(self):
        h = core.induced_metric([[2.0, 1.0], [1.0, 2.0]], 0.5, [1.0, 2.0], [1.0, 1.0])
        assert np.max(np.abs(h.offset)) > 0.1

    def test_singular(self):
        with pytest.raises(SingularSystemError):
            core.induced_metric([[1.0, 1.0], [1.0, 1.0]], 0.2, [1.0, 1.0], [0.0, 0.0])

    def test_affine_map_algebra(self):
        f = core.AffineMap([[2.0, 0.0], [1.0, 1.0]], [1.0, -1.0])
        x = np.array([0.5, 2.0])
        np.testing.assert_allclose(f.inverse()(f(x)), x, rtol=1e-15)
        np.testing.assert_allclose(f.compose(f.inverse()).linear, np.eye(2), atol=1e-15)


class TestMetricRepresentations:
    def test_identity_at_zero(self):
        g = np.array([[1.0, 0.2], [0.2, -1.0]])
        rep = core.metric_representations(g, 0.0, [1.0, 3.0])
        np.testing.assert_array_equal(rep.g_hat_W, g)
        np.testing.assert_array_equal(rep.g_hat_R, g)

    def test_diag_example(self):
        rep = core.metric_representations(np.diag([1.0, -1.0]), 0.5, [1.0, 1.0])
        np.testing.assert_array_equal(rep.g_hat_W, np.diag([0.5, -0.5]))
        np.testing.assert_array_equal(rep.g_hat_R, np.diag([2.0, -2.0]))

    def test_classical_weyl_metric(self):
        lam = 0.8
        g = np.array([[2.0, 0.3, 0.1], [0.3, 1.0, 0.0], [0.1, 0.0, 3.0]])
        rep = core.metric_representations(g, core.lambda_to_kappa(lam), [2.0, 2.0, 2.0])
        np.testing.assert_allclose(rep.g_hat_W, np.exp(-2 * lam) * g, rtol=1e-14)

    def test_observer_conversion(self):
        lam = 1.3
        z = np.array([0.5, 1.0, 2.0])
        g = np.array([[2.0, 0.3, 0.1], [0.3, 1.0, 0.0], [0.1, 0.0, 3.0]])
        rep = core.metric_representations(g, core.lambda_to_kappa(lam), z)
        L = np.exp(z * lam)
        np.testing.assert_allclose(L[:, None] * rep.g_hat_W * L[None, :], rep.g_hat_R, rtol=1e-13)

    def test_not_symmetrised(self):
        rep = core.metric_representations([[1.0, 1.0], [1.0, 1.0]], 0.5, [1.0, 2.0])
        assert rep.g_hat_W[0, 1] != rep.g_hat_W[1, 0]

    def test_asymmetric_rejected(self):
        with pytest.raises(DomainError):
            core.metric_representations([[1.0, 2.0], [0.0, 1.0]], 0.1, [1.0, 1.0])


class TestDilation:
    def test_tensor_examples(self):
        np.testing.assert_array_equal(core.dilation_tensor(0.0, [1.0, 2.0]), np.eye(2))
        np.testing.assert_allclose(core.dilation_tensor(0.75, [1.0, 2.0]), np.diag([0.25, 0.0625]), rtol=1e-15)
        assert np.all(np.diag(core.dilation_tensor(core.KAPPA_MAX, [1.0, 1.0])) < 1e-11)

    def test_density_examples(self):
        assert core.dilation_density(0.0, [1, 1, 1, 1]) == 1.0
        assert core.dilation_density(0.75, [1, 1, 1, 1]) == pytest.approx(16.0, rel=1e-14)

    @given(kappas, st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=8))
    def test_density_identity(self, kappa, z):
        sigma = core.dilation_density(kappa, z)
        det = np.linalg.det(core.dilation_tensor(kappa, z))
        assert sigma**2 * abs(det) == pytest.approx(1.0, abs=1e-12)

    def test_observer_examples(self):
        assert core.observer_pairing([1, 1], [1, 1], 0.75, [1, 1], "R") == 2.0
        assert core.observer_pairing([1, 1], [1, 1], 0.75, [1, 1], "W") == 0.5
        assert core.observer_pairing([1, 2], [3, 4], 0.0, [1, 1], "W") == core.observer_pairing(
            [1, 2], [3, 4], 0.0, [1, 1], "R")

    def test_observer_limit(self):
        assert abs(core.observer_pairing([3.0, -1.0], [2.0, 5.0], core.KAPPA_MAX, [1, 1], core.Observer.W)) < 1e-10

    def test_dimension_limit(self):
        with pytest.raises(ShapeError):
            core.dilation_tensor(0.1, np.ones(core.MAX_DIM + 1))

    def test_weights(self):
        ww = core.WeylWeights.uniform(4)
        assert ww.d == 4
        with pytest.raises(DomainError):
            core.WeylWeights([1.0, np.inf], [1.0, 1.0])
