"""Numeric kernel backend.

The single hot kernel of the package is a weighted sum of componentwise
products,

    weighted_prod_sum(V, w) = sum_i w_i * prod_j V[j, i],

which underlies every tensor evaluation (block factors of partition
tensors, L^n forms, model tensors).  Two interchangeable implementations
exist: a numba ``@njit`` version and a pure-numpy one.  Selection is via

    CONGRUENT_TENSORS_BACKEND = "numba" | "numpy"

defaulting to numba when importable.  ``CONGRUENT_TENSORS_THREADS`` caps
the numba thread pool.
"""

import os

import numpy as np

BACKEND_ENV = "CONGRUENT_TENSORS_BACKEND"
THREADS_ENV = "CONGRUENT_TENSORS_THREADS"


def _numpy_weighted_prod_sum(vectors: np.ndarray, weights: np.ndarray) -> float:
    if vectors.shape[0] == 0:
        return float(np.sum(weights))
    return float(np.sum(np.prod(vectors, axis=0) * weights))


def _build_numba_kernel():
    import numba

    cap = os.environ.get(THREADS_ENV, "").strip()
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))

    @numba.njit(cache=True)
    def _kernel(vectors, weights):  # pragma: no cover - compiled
        total = 0.0
        k, m = vectors.shape
        for i in range(m):
            acc = weights[i]
            for j in range(k):
                acc *= vectors[j, i]
            total += acc
        return total

    def _numba_weighted_prod_sum(vectors: np.ndarray, weights: np.ndarray) -> float:
        return float(
            _kernel(
                np.ascontiguousarray(vectors, dtype=np.float64),
                np.ascontiguousarray(weights, dtype=np.float64),
            )
        )

    return _numba_weighted_prod_sum


def _select():
    choice = os.environ.get(BACKEND_ENV, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        return "numpy", _numpy_weighted_prod_sum
    try:
        return "numba", _build_numba_kernel()
    except ImportError:
        if choice == "numba":
            raise
        return "numpy", _numpy_weighted_prod_sum


ACTIVE_BACKEND, weighted_prod_sum = _select()
