import subprocess
import sys

import numpy as np
import pytest

from congruent_tensors.backend import (
    ACTIVE_BACKEND,
    BACKEND_ENV,
    _numpy_weighted_prod_sum,
    weighted_prod_sum,
)


def reference(vectors, weights):
    total = 0.0
    for i in range(weights.size):
        acc = float(weights[i])
        for j in range(vectors.shape[0]):
            acc *= float(vectors[j, i])
        total += acc
    return total


def test_active_backend_is_known():
    assert ACTIVE_BACKEND in ("numba", "numpy")


def test_matches_plain_loop_reference():
    rng = np.random.default_rng(0)
    for _ in range(100):
        k = int(rng.integers(0, 5))
        m = int(rng.integers(1, 20))
        V = rng.standard_normal((k, m))
        w = rng.standard_normal(m)
        assert weighted_prod_sum(V, w) == pytest.approx(reference(V, w), rel=1e-12)


def test_empty_product_sums_weights():
    w = np.array([1.0, 2.0, 3.5])
    assert weighted_prod_sum(np.zeros((0, 3)), w) == pytest.approx(6.5)


def test_backends_agree():
    rng = np.random.default_rng(1)
    for _ in range(50):
        V = rng.standard_normal((3, 8))
        w = rng.standard_normal(8)
        assert weighted_prod_sum(V, w) == pytest.approx(
            _numpy_weighted_prod_sum(V, w), rel=1e-12
        )


@pytest.mark.parametrize("choice", ["numpy", "numba"])
def test_env_flag_selects_backend(choice):
    code = (
        "from congruent_tensors.backend import ACTIVE_BACKEND; print(ACTIVE_BACKEND)"
    )
    proc = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", BACKEND_ENV: choice},
    )
    if choice == "numba" and proc.returncode != 0:
        pytest.skip("numba not importable in subprocess")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == choice


def test_env_flag_rejects_unknown():
    code = "import congruent_tensors.backend"
    proc = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", BACKEND_ENV: "gpu"},
    )
    assert proc.returncode != 0
    assert "gpu" in proc.stderr
