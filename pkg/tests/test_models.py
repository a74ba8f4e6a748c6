import numpy as np
import pytest

from congruent_tensors.markov import random_congruent_kernel
from congruent_tensors.models import (
    ParametrizedModel,
    amari_chentsov,
    bernoulli,
    categorical_simplex,
    exponential_family,
    fisher_metric,
    linear_table,
    log_derivative,
    model_tensor,
    model_tensor_via_roots,
    pushforward_measure,
    pushforward_model,
    scaled,
)


def random_expfam(rng, index_size, param_dim, normalized=True):
    F = rng.standard_normal((index_size, param_dim))
    w = rng.uniform(0.5, 1.5, index_size)
    return exponential_family(F, base_weights=w, normalized=normalized)


def test_bernoulli_probabilities():
    m = bernoulli()
    np.testing.assert_allclose(m.p([0.3]), [0.3, 0.7])
    assert m.is_statistical


def test_bernoulli_fisher_closed_form():
    m = bernoulli()
    for xi in np.linspace(0.1, 0.9, 9):
        g = fisher_metric(m, [xi])
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(1.0 / (xi * (1.0 - xi)), rel=1e-8)


def test_bernoulli_amari_chentsov_closed_form():
    # T(xi) = (1 - 2 xi) / (xi (1 - xi))^2 for the Bernoulli family
    m = bernoulli()
    for xi in (0.2, 0.5, 0.7):
        t = amari_chentsov(m, [xi])
        want = (1.0 - 2.0 * xi) / (xi * (1.0 - xi)) ** 2
        assert t[0, 0, 0] == pytest.approx(want, rel=1e-6)


def test_simplex_fisher_closed_form():
    # g_ab = delta_ab / p_a + 1 / p_last on the open simplex
    m = categorical_simplex(3)
    xi = np.array([0.2, 0.3])
    g = fisher_metric(m, xi)
    p_last = 1.0 - xi.sum()
    want = np.diag(1.0 / xi) + 1.0 / p_last
    np.testing.assert_allclose(g, want, rtol=1e-8)


def test_log_derivative_zero_mean_for_statistical():
    # E_p[d log p (v)] = 0 whenever the model stays normalized
    rng = np.random.default_rng(3)
    m = random_expfam(rng, 5, 3)
    for _ in range(100):
        xi = rng.uniform(-0.5, 0.5, 3)
        v = rng.standard_normal(3)
        s = log_derivative(m, xi, v)
        assert float(np.dot(s, m.p(xi))) == pytest.approx(0.0, abs=1e-10)


def test_model_tensor_degree_one_vanishes_for_statistical():
    rng = np.random.default_rng(5)
    m = random_expfam(rng, 4, 2)
    for _ in range(50):
        xi = rng.uniform(-0.5, 0.5, 2)
        v = rng.standard_normal(2)
        assert model_tensor(m, 1, xi, [v]) == pytest.approx(0.0, abs=1e-10)


def test_model_tensor_degree_two_is_fisher():
    rng = np.random.default_rng(7)
    m = random_expfam(rng, 4, 2)
    xi = np.array([0.2, -0.1])
    g = fisher_metric(m, xi)
    e = np.eye(2)
    for a in range(2):
        for b in range(2):
            assert model_tensor(m, 2, xi, [e[a], e[b]]) == pytest.approx(
                g[a, b], rel=1e-10
            )


def test_model_tensor_symmetric():
    rng = np.random.default_rng(9)
    m = random_expfam(rng, 5, 3)
    xi = rng.uniform(-0.3, 0.3, 3)
    vs = [rng.standard_normal(3) for _ in range(3)]
    base = model_tensor(m, 3, xi, vs)
    assert model_tensor(m, 3, xi, [vs[1], vs[2], vs[0]]) == pytest.approx(
        base, rel=1e-10
    )


def test_dual_route_agreement():
    # root-embedding finite differences against the log-derivative formula
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = random_expfam(rng, int(rng.integers(3, 6)), 2)
        xi = rng.uniform(-0.3, 0.3, 2)
        n = int(rng.integers(1, 5))
        vs = [rng.standard_normal(2) for _ in range(n)]
        a = model_tensor(m, n, xi, vs)
        b = model_tensor_via_roots(m, n, xi, vs)
        scale = max(1.0, abs(a))
        assert abs(a - b) / scale < 1e-6


def test_expfam_exact_jacobian_matches_finite_differences():
    rng = np.random.default_rng(13)
    m = random_expfam(rng, 4, 3)
    m_fd = ParametrizedModel(
        param_dim=3,
        index_size=4,
        eval_fn=m.eval_fn,
        is_statistical=True,
    )
    xi = rng.uniform(-0.3, 0.3, 3)
    np.testing.assert_allclose(m.jacobian(xi), m_fd.jacobian(xi), atol=1e-8)


def test_unnormalized_expfam_not_statistical():
    rng = np.random.default_rng(15)
    m = random_expfam(rng, 4, 2, normalized=False)
    assert not m.is_statistical
    xi = np.array([0.1, 0.2])
    assert m.p(xi).sum() != pytest.approx(1.0, abs=1e-6)


def test_scaled_model_tensor_homogeneous():
    # A^n picks up the scale factor once (degree-n tensor on lambda mu has
    # one overall factor of lambda under the canonical weights)
    rng = np.random.default_rng(17)
    m = random_expfam(rng, 4, 2)
    lam = 2.5
    ms = scaled(m, lam)
    xi = np.array([0.15, -0.2])
    vs = [rng.standard_normal(2) for _ in range(2)]
    a = model_tensor(m, 2, xi, vs)
    b = model_tensor(ms, 2, xi, vs)
    assert b == pytest.approx(lam * a, rel=1e-10)


def test_linear_table_model():
    matrix = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]) * 0.1
    offset = np.full(4, 0.25)
    m = linear_table(matrix, offset)
    np.testing.assert_allclose(m.p([0.0, 0.0]), offset)
    np.testing.assert_allclose(m.jacobian([0.0, 0.0]), matrix, atol=1e-9)


def test_pushforward_model_preserves_fisher():
    rng = np.random.default_rng(19)
    base = bernoulli()
    for _ in range(50):
        K, _ = random_congruent_kernel(2, [3, 2], seed=int(rng.integers(1 << 30)))
        pushed = pushforward_model(base, K)
        xi = [float(rng.uniform(0.1, 0.9))]
        g0 = fisher_metric(base, xi)
        g1 = fisher_metric(pushed, xi)
        np.testing.assert_allclose(g1, g0, rtol=1e-8)


def test_pushforward_model_preserves_amari_chentsov():
    rng = np.random.default_rng(21)
    base = bernoulli()
    for _ in range(25):
        K, _ = random_congruent_kernel(2, [2, 3], seed=int(rng.integers(1 << 30)))
        pushed = pushforward_model(base, K)
        xi = [float(rng.uniform(0.2, 0.8))]
        np.testing.assert_allclose(
            amari_chentsov(pushed, xi), amari_chentsov(base, xi), rtol=1e-5, atol=1e-8
        )


def test_pushforward_measure_matches_model():
    rng = np.random.default_rng(23)
    K, _ = random_congruent_kernel(2, [2, 2], seed=7)
    m = bernoulli()
    xi = [0.3]
    mu = pushforward_measure(m, K, xi)
    np.testing.assert_allclose(mu.coeffs, pushforward_model(m, K).p(xi))
    assert mu.total_mass == pytest.approx(1.0)


def test_model_rejects_out_of_bounds():
    m = bernoulli()
    with pytest.raises(Exception):
        m.p([1.5])
    with pytest.raises(Exception):
        m.p([0.0])
