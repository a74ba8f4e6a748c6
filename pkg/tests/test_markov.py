import numpy as np
import pytest
from fractions import Fraction as F

from congruent_tensors.errors import (
    DominationViolation,
    EmptyFiber,
    InvalidFiberSizes,
    InvalidWeights,
)
from congruent_tensors.markov import (
    MarkovKernel,
    Statistic,
    apply_K_r,
    formal_derivative,
    is_congruent,
    kernel_from_statistic,
    pushforward,
    random_congruent_kernel,
)
from congruent_tensors.measures import RMeasure, norm, signed_measure


def coarsen_2_to_3():
    # statistic J={0,1,2} -> I={0,1}, fibers {0,1} and {2}
    kappa = Statistic(2, [0, 0, 1])
    K = kernel_from_statistic(kappa, fiber_weights=[[0.25, 0.75, 0.0], [0.0, 0.0, 1.0]])
    return kappa, K


def test_pushforward_identity():
    mu = signed_measure([0.2, 0.8])
    out = pushforward(MarkovKernel(np.eye(2)), mu)
    np.testing.assert_allclose(out.coeffs, mu.coeffs)


def test_pushforward_explicit():
    K = MarkovKernel([[0.5, 0.5], [0.0, 1.0]])
    out = pushforward(K, signed_measure([0.4, 0.6]))
    np.testing.assert_allclose(out.coeffs, [0.2, 0.8])


def test_pushforward_preserves_mass_and_positive_norm():
    rng = np.random.default_rng(7)
    for _ in range(200):
        K, _ = random_congruent_kernel(3, [2, 1, 3], seed=int(rng.integers(1 << 30)))
        mu = signed_measure(rng.uniform(0.01, 2.0, 3))
        out = pushforward(K, mu)
        assert out.total_mass == pytest.approx(mu.total_mass, rel=1e-12)
        assert norm(out) == pytest.approx(norm(mu), rel=1e-12)


def test_statistic_kernel_is_deterministic():
    kappa = Statistic(2, [0, 0, 1])
    np.testing.assert_allclose(kappa.kernel().matrix, [[1, 0], [1, 0], [0, 1]])


def test_statistic_pushforward_sums_fibers():
    kappa = Statistic(2, [0, 0, 1])
    out = pushforward(kappa.kernel(), signed_measure([0.1, 0.2, 0.7]))
    np.testing.assert_allclose(out.coeffs, [0.3, 0.7])


def test_statistic_fibers():
    kappa = Statistic(2, [0, 1, 0])
    np.testing.assert_array_equal(kappa.fiber(0), [0, 2])
    np.testing.assert_array_equal(kappa.fiber(1), [1])


def test_kernel_from_statistic_uniform_default():
    kappa = Statistic(2, [0, 1, 0])
    K = kernel_from_statistic(kappa)
    np.testing.assert_allclose(K.matrix, [[0.5, 0.0, 0.5], [0.0, 1.0, 0.0]])


def test_kernel_from_statistic_weighted():
    _, K = coarsen_2_to_3()
    np.testing.assert_allclose(K.matrix, [[0.25, 0.75, 0.0], [0.0, 0.0, 1.0]])


def test_kernel_from_statistic_rejects_empty_fiber():
    with pytest.raises(EmptyFiber):
        kernel_from_statistic(Statistic(3, [0, 0, 1]))


def test_kernel_from_statistic_rejects_bad_weights():
    kappa = Statistic(2, [0, 0, 1])
    with pytest.raises(InvalidWeights):
        # mass leaking outside the first fiber
        kernel_from_statistic(kappa, fiber_weights=[[0.5, 0.0, 0.5], [0.0, 0.0, 1.0]])
    with pytest.raises(InvalidWeights):
        # zero weight inside the fiber
        kernel_from_statistic(kappa, fiber_weights=[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def test_is_congruent_accepts_fiber_supported():
    kappa, K = coarsen_2_to_3()
    assert is_congruent(K, kappa)


def test_is_congruent_rejects_off_fiber_mass():
    kappa = Statistic(2, [0, 0, 1])
    K = MarkovKernel([[0.25, 0.7, 0.05], [0.0, 0.0, 1.0]])
    assert not is_congruent(K, kappa)


def test_congruence_right_inverse():
    # kappa_* after K_* is the identity on measures over I
    rng = np.random.default_rng(11)
    for _ in range(100):
        sizes = [int(s) for s in rng.integers(1, 4, 3)]
        K, kappa = random_congruent_kernel(3, sizes, seed=int(rng.integers(1 << 30)))
        mu = signed_measure(rng.standard_normal(3))
        back = pushforward(kappa.kernel(), pushforward(K, mu))
        np.testing.assert_allclose(back.coeffs, mu.coeffs, atol=1e-12)


def test_random_congruent_kernel_is_congruent():
    for seed in range(30):
        K, kappa = random_congruent_kernel(2, [3, 2], seed=seed)
        assert is_congruent(K, kappa)
        np.testing.assert_array_equal(kappa.map, [0, 0, 0, 1, 1])
        assert np.all(K.matrix[0, :3] > 0)
        assert np.all(K.matrix[1, 3:] > 0)


def test_random_congruent_kernel_reproducible():
    K1, _ = random_congruent_kernel(3, [2, 2, 2], seed=42)
    K2, _ = random_congruent_kernel(3, [2, 2, 2], seed=42)
    np.testing.assert_array_equal(K1.matrix, K2.matrix)


def test_random_congruent_kernel_rejects_bad_sizes():
    with pytest.raises(InvalidFiberSizes):
        random_congruent_kernel(2, [3], seed=0)
    with pytest.raises(InvalidFiberSizes):
        random_congruent_kernel(2, [3, 0], seed=0)


def test_apply_K_r_explicit_half():
    # K_{1/2} on a two-point measure through a 2 -> 3 congruent kernel
    _, K = coarsen_2_to_3()
    mu_r = RMeasure(F(1, 2), [3.0, 5.0])
    out = apply_K_r(K, mu_r)
    assert out.exponent == F(1, 2)
    expected = np.sqrt(np.array([0.25 * 9.0, 0.75 * 9.0, 1.0 * 25.0]))
    np.testing.assert_allclose(out.coeffs, expected)


def test_apply_K_r_norm_preserved_on_nonnegative():
    rng = np.random.default_rng(13)
    for _ in range(100):
        K, _ = random_congruent_kernel(3, [2, 2, 1], seed=int(rng.integers(1 << 30)))
        r = F(1, int(rng.integers(1, 5)))
        mu = signed_measure(rng.uniform(0.01, 2.0, 3))
        mu_r = RMeasure(r, mu.coeffs ** float(r))
        out = apply_K_r(K, mu_r)
        assert norm(out) == pytest.approx(norm(mu_r), rel=1e-12)


def test_apply_K_r_r_equal_one_is_pushforward():
    _, K = coarsen_2_to_3()
    mu = signed_measure([0.4, 0.6])
    out = apply_K_r(K, mu)
    np.testing.assert_allclose(out.coeffs, pushforward(K, mu).coeffs)


def test_formal_derivative_matches_finite_differences():
    # dK_r is the linearization of K_r along a curve of measures
    _, K = coarsen_2_to_3()
    r = F(1, 2)
    mu = signed_measure([0.4, 0.6])
    v = signed_measure([0.01, -0.01])
    v_r = RMeasure(r, float(r) * v.coeffs * mu.coeffs ** (float(r) - 1))
    out = formal_derivative(K, mu, r, v_r)
    h = 1e-6
    plus = pushforward(K, signed_measure(mu.coeffs + h * v.coeffs))
    base = pushforward(K, mu)
    fd = (plus.coeffs ** float(r) - base.coeffs ** float(r)) / h
    np.testing.assert_allclose(out.coeffs, fd, atol=1e-6)
    assert out.exponent == r


def test_formal_derivative_contracts_norm():
    rng = np.random.default_rng(17)
    for _ in range(200):
        K, _ = random_congruent_kernel(3, [2, 1, 2], seed=int(rng.integers(1 << 30)))
        r = F(1, int(rng.integers(1, 4)))
        mu = signed_measure(rng.uniform(0.05, 2.0, 3))
        v = RMeasure(r, rng.standard_normal(3))
        out = formal_derivative(K, mu, r, v)
        assert norm(out) <= norm(v) * (1 + 1e-10)


def test_formal_derivative_norm_preserved_for_congruent():
    # congruent kernels act isometrically on dominated tangents
    rng = np.random.default_rng(19)
    for _ in range(100):
        K, _ = random_congruent_kernel(3, [2, 2, 2], seed=int(rng.integers(1 << 30)))
        mu = signed_measure(rng.uniform(0.05, 2.0, 3))
        v = RMeasure(F(1, 2), rng.standard_normal(3))
        out = formal_derivative(K, mu, F(1, 2), v)
        assert norm(out) == pytest.approx(norm(v), rel=1e-10)


def test_formal_derivative_requires_domination():
    _, K = coarsen_2_to_3()
    mu = signed_measure([0.0, 1.0])
    v = RMeasure(F(1, 2), [1.0, 0.0])
    with pytest.raises(DominationViolation):
        formal_derivative(K, mu, F(1, 2), v)


def test_markov_kernel_rejects_negative_entries():
    with pytest.raises(Exception):
        MarkovKernel([[1.1, -0.1], [0.5, 0.5]])


def test_markov_kernel_rejects_bad_row_sums():
    with pytest.raises(Exception):
        MarkovKernel([[0.6, 0.5], [0.5, 0.5]])
