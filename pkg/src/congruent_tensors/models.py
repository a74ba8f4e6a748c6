"""Parametrized measure models on finite sample spaces.

A model maps a parameter point to a strictly positive coefficient vector.
Its canonical n-tensors are finite sums of products of logarithmic
derivatives weighted by the measure; for n = 2 and n = 3 these are the
Fisher metric and the Amari-Chentsov tensor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .backend import weighted_prod_sum
from .errors import BoundarySingularity, DimensionMismatch
from .markov import MarkovKernel, pushforward
from .measures import RMeasure, signed_measure
from .tensors import L_n_eval

STATISTICAL_TOL = 1e-10
BOX_MARGIN = 1e-8
FD_STEP = 1e-5


@dataclass(frozen=True)
class ParametrizedModel:
    """A differentiable map from a parameter box into strictly positive measures.

    ``jacobian_fn`` returns the |I| x d matrix of partial derivatives; when
    absent, central finite differences with step 1e-5 * max(1, |xi|) are
    used (error O(h^2)).  ``bounds`` is an optional axis-aligned box,
    enforced with margin 1e-8 at evaluation.
    """

    param_dim: int
    index_size: int
    eval_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    is_statistical: bool = False
    bounds: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def _check_box(self, xi: np.ndarray):
        if self.bounds is not None:
            lo, hi = self.bounds
            if np.any(xi < lo + BOX_MARGIN) or np.any(xi > hi - BOX_MARGIN):
                raise BoundarySingularity(
                    f"parameter {xi} outside the declared box (margin {BOX_MARGIN})"
                )

    def p(self, xi) -> np.ndarray:
        """Coefficient vector p(xi); validates positivity and normalization."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        if xi.shape != (self.param_dim,):
            raise DimensionMismatch(
                f"parameter must have shape ({self.param_dim},), got {xi.shape}"
            )
        self._check_box(xi)
        values = np.asarray(self.eval_fn(xi), dtype=np.float64)
        if values.shape != (self.index_size,):
            raise DimensionMismatch("evaluator returned a vector of wrong length")
        if np.any(values <= 0.0):
            raise BoundarySingularity(f"model coefficients not strictly positive at {xi}")
        if self.is_statistical and abs(values.sum() - 1.0) > STATISTICAL_TOL:
            raise BoundarySingularity(
                f"statistical model violates sum p = 1 at {xi}: {values.sum()}"
            )
        return values

    def measure(self, xi) -> RMeasure:
        return signed_measure(self.p(xi))

    def jacobian(self, xi) -> np.ndarray:
        """|I| x d matrix of partials, exact or by central differences."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        if self.jacobian_fn is not None:
            jac = np.asarray(self.jacobian_fn(xi), dtype=np.float64)
            if jac.shape != (self.index_size, self.param_dim):
                raise DimensionMismatch("jacobian has wrong shape")
            return jac
        h = FD_STEP * max(1.0, float(np.max(np.abs(xi))))
        jac = np.empty((self.index_size, self.param_dim))
        for a in range(self.param_dim):
            step = np.zeros_like(xi)
            step[a] = h
            jac[:, a] = (self.eval_fn(xi + step) - self.eval_fn(xi - step)) / (2 * h)
        return jac


def log_derivative(model: ParametrizedModel, xi, v) -> np.ndarray:
    """The vector over I of (sum_a v_a dp_i/dxi_a) / p_i."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    if v.shape != (model.param_dim,):
        raise DimensionMismatch("direction has wrong dimension")
    return (model.jacobian(xi) @ v) / model.p(xi)


def model_tensor(model: ParametrizedModel, n: int, xi, vs) -> float:
    """The canonical n-tensor: sum_i prod_j (d_{v_j} log p)_i * p_i."""
    if len(vs) != n:
        raise DimensionMismatch(f"need {n} directions, got {len(vs)}")
    p = model.p(xi)
    jac = model.jacobian(xi)
    logders = np.vstack(
        [(jac @ np.atleast_1d(np.asarray(v, dtype=np.float64))) / p for v in vs]
    )
    return weighted_prod_sum(logders, p)


def model_tensor_via_roots(
    model: ParametrizedModel, n: int, xi, vs, step: float = FD_STEP
) -> float:
    """Pullback route for the canonical n-tensor, independent of model_tensor.

    Takes central finite differences of xi -> p(xi)^(1/n) along each
    direction and feeds the results to the canonical n-form L^n.
    """
    if len(vs) != n:
        raise DimensionMismatch(f"need {n} directions, got {len(vs)}")
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    h = step * max(1.0, float(np.max(np.abs(xi))))
    root = Fraction(1, n)

    def q(point: np.ndarray) -> np.ndarray:
        return np.asarray(model.eval_fn(point), dtype=np.float64) ** (1.0 / n)

    tangents = []
    for v in vs:
        v = np.atleast_1d(np.asarray(v, dtype=np.float64))
        dq = (q(xi + h * v) - q(xi - h * v)) / (2 * h)
        tangents.append(RMeasure(root, dq))
    return L_n_eval(n, tangents)


def fisher_metric(model: ParametrizedModel, xi) -> np.ndarray:
    """The d x d Fisher matrix (n = 2), symmetric positive semidefinite."""
    d = model.param_dim
    basis = np.eye(d)
    g = np.empty((d, d))
    for a in range(d):
        for b in range(a, d):
            g[a, b] = g[b, a] = model_tensor(model, 2, xi, [basis[a], basis[b]])
    return g


def amari_chentsov(model: ParametrizedModel, xi) -> np.ndarray:
    """The fully symmetric d x d x d array of third log-derivative moments."""
    d = model.param_dim
    basis = np.eye(d)
    t = np.empty((d, d, d))
    for a in range(d):
        for b in range(a, d):
            for c in range(b, d):
                value = model_tensor(model, 3, xi, [basis[a], basis[b], basis[c]])
                for idx in {(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)}:
                    t[idx] = value
    return t


def pushforward_model(model: ParametrizedModel, kernel: MarkovKernel) -> ParametrizedModel:
    """The model xi -> K_* p(xi); congruent kernels preserve all its tensors."""
    if kernel.source_size != model.index_size:
        raise DimensionMismatch(
            f"kernel source {kernel.source_size} != model index size {model.index_size}"
        )
    matrix_t = kernel.matrix.T

    def eval_fn(xi: np.ndarray) -> np.ndarray:
        return matrix_t @ model.eval_fn(xi)

    jacobian_fn = None
    if model.jacobian_fn is not None:
        jacobian_fn = lambda xi: matrix_t @ model.jacobian_fn(xi)

    return ParametrizedModel(
        param_dim=model.param_dim,
        index_size=kernel.target_size,
        eval_fn=eval_fn,
        jacobian_fn=jacobian_fn,
        is_statistical=model.is_statistical,
        bounds=model.bounds,
    )


def pushforward_measure(model: ParametrizedModel, kernel: MarkovKernel, xi) -> RMeasure:
    return pushforward(kernel, model.measure(xi))


# ---------------------------------------------------------------------------
# model zoo


def bernoulli() -> ParametrizedModel:
    """p(xi) = (xi, 1 - xi) on (0, 1); Fisher metric 1/(xi (1 - xi))."""
    return ParametrizedModel(
        param_dim=1,
        index_size=2,
        eval_fn=lambda xi: np.array([xi[0], 1.0 - xi[0]]),
        jacobian_fn=lambda xi: np.array([[1.0], [-1.0]]),
        is_statistical=True,
        bounds=(np.array([0.0]), np.array([1.0])),
    )


def categorical_simplex(m: int) -> ParametrizedModel:
    """The full simplex over m outcomes, parametrized by the first m-1 masses."""
    if m < 2:
        raise DimensionMismatch("simplex model needs at least 2 outcomes")
    d = m - 1

    def eval_fn(xi: np.ndarray) -> np.ndarray:
        return np.concatenate([xi, [1.0 - xi.sum()]])

    def jacobian_fn(xi: np.ndarray) -> np.ndarray:
        return np.vstack([np.eye(d), -np.ones((1, d))])

    return ParametrizedModel(
        param_dim=d,
        index_size=m,
        eval_fn=eval_fn,
        jacobian_fn=jacobian_fn,
        is_statistical=True,
        bounds=(np.zeros(d), np.ones(d)),
    )


def exponential_family(
    sufficient_statistics: np.ndarray,
    base_weights: Optional[np.ndarray] = None,
    normalized: bool = True,
) -> ParametrizedModel:
    """p_i(xi) proportional to b_i exp(F_i . xi), exactly differentiated.

    With ``normalized`` the family lives on the probability simplex; without
    it the masses are free (the unnormalized variant used for tests of
    Campbell-type families).
    """
    F = np.asarray(sufficient_statistics, dtype=np.float64)
    if F.ndim != 2:
        raise DimensionMismatch("sufficient_statistics must be an |I| x d matrix")
    m, d = F.shape
    b = np.ones(m) if base_weights is None else np.asarray(base_weights, dtype=np.float64)
    if b.shape != (m,) or np.any(b <= 0):
        raise DimensionMismatch("base weights must be strictly positive over I")

    if normalized:

        def eval_fn(xi: np.ndarray) -> np.ndarray:
            w = b * np.exp(F @ xi)
            return w / w.sum()

        def jacobian_fn(xi: np.ndarray) -> np.ndarray:
            p = eval_fn(xi)
            return p[:, None] * (F - p @ F)

    else:

        def eval_fn(xi: np.ndarray) -> np.ndarray:
            return b * np.exp(F @ xi)

        def jacobian_fn(xi: np.ndarray) -> np.ndarray:
            return eval_fn(xi)[:, None] * F

    return ParametrizedModel(
        param_dim=d,
        index_size=m,
        eval_fn=eval_fn,
        jacobian_fn=jacobian_fn,
        is_statistical=normalized,
    )


def scaled(model: ParametrizedModel, factor: float) -> ParametrizedModel:
    """A non-normalized copy with all masses multiplied by a constant."""
    if factor <= 0:
        raise BoundarySingularity("scale factor must be positive")
    jacobian_fn = None
    if model.jacobian_fn is not None:
        jacobian_fn = lambda xi: factor * model.jacobian_fn(xi)
    return ParametrizedModel(
        param_dim=model.param_dim,
        index_size=model.index_size,
        eval_fn=lambda xi: factor * model.eval_fn(xi),
        jacobian_fn=jacobian_fn,
        is_statistical=model.is_statistical and factor == 1.0,
        bounds=model.bounds,
    )


def linear_table(
    matrix: np.ndarray, offset: np.ndarray, bounds=None
) -> ParametrizedModel:
    """An affine model p(xi) = offset + matrix @ xi with exact jacobian."""
    matrix = np.asarray(matrix, dtype=np.float64)
    offset = np.asarray(offset, dtype=np.float64)
    if matrix.ndim != 2 or offset.shape != (matrix.shape[0],):
        raise DimensionMismatch("matrix must be |I| x d with a matching offset")
    if bounds is not None:
        bounds = (np.asarray(bounds[0], dtype=np.float64),
                  np.asarray(bounds[1], dtype=np.float64))
    return ParametrizedModel(
        param_dim=matrix.shape[1],
        index_size=matrix.shape[0],
        eval_fn=lambda xi: offset + matrix @ xi,
        jacobian_fn=lambda xi: matrix,
        is_statistical=False,
        bounds=bounds,
    )
