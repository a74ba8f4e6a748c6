"""Markov kernels between finite index sets and their induced maps.

A kernel is a row-stochastic matrix; it pushes signed measures forward
linearly, acts on r-th powers through K_r = pi^r K_* pi^(1/r), and has a
formal derivative at every nonnegative base measure.  Congruence with
respect to a statistic kappa means kappa_* K_* = id.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DominationViolation,
    EmptyFiber,
    InvalidFiberSizes,
    InvalidWeights,
)
from .measures import RMeasure, RationalLike, power_map, signed_measure

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MarkovKernel:
    """Row-stochastic |I| x |I'| matrix; row i is the image measure of delta_i.

    Rows are validated to sum to 1 within 1e-12 and then renormalized once,
    so downstream mass-preservation identities hold exactly.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.size == 0:
            raise DimensionMismatch("kernel matrix must be a nonempty 2-D array")
        if np.any(matrix < 0):
            raise InvalidWeights("kernel entries must be nonnegative")
        row_sums = matrix.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            raise InvalidWeights(
                f"rows must sum to 1 within {ROW_SUM_TOL}; worst deviation "
                f"{np.max(np.abs(row_sums - 1.0)):.3e}"
            )
        matrix = matrix / row_sums[:, None]
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def source_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def target_size(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class Statistic:
    """A map kappa: I' -> I given by an integer array over I'."""

    target_size: int
    map: np.ndarray

    def __post_init__(self):
        arr = np.array(self.map, dtype=np.intp)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionMismatch("statistic map must be a nonempty 1-D array")
        if self.target_size < 1:
            raise DimensionMismatch("target_size must be >= 1")
        if np.any(arr < 0) or np.any(arr >= self.target_size):
            raise DimensionMismatch("statistic values must lie in 0..target_size-1")
        arr.setflags(write=False)
        object.__setattr__(self, "map", arr)

    @property
    def source_size(self) -> int:
        return self.map.size

    def fiber(self, i: int) -> np.ndarray:
        """Indices i' in I' with kappa(i') = i."""
        return np.flatnonzero(self.map == i)

    def kernel(self) -> MarkovKernel:
        """The deterministic kernel I' -> I induced by kappa (one-hot rows)."""
        matrix = np.zeros((self.source_size, self.target_size))
        matrix[np.arange(self.source_size), self.map] = 1.0
        return MarkovKernel(matrix)


def pushforward(kernel: MarkovKernel, mu: RMeasure) -> RMeasure:
    """K_* mu for a signed measure mu (exponent 1)."""
    if mu.exponent != 1:
        raise DimensionMismatch("pushforward expects an exponent-1 measure")
    if mu.index_size != kernel.source_size:
        raise DimensionMismatch(
            f"measure lives on {mu.index_size} points, kernel source is "
            f"{kernel.source_size}"
        )
    return signed_measure(kernel.matrix.T @ mu.coeffs)


def kernel_from_statistic(
    kappa: Statistic, fiber_weights: Optional[np.ndarray] = None
) -> MarkovKernel:
    """Build a kappa-congruent kernel I -> I' from per-fiber probability rows.

    ``fiber_weights`` is an |I| x |I'| array whose row i must be a strictly
    positive probability vector supported exactly on the fiber kappa^{-1}(i);
    if omitted, uniform weights on each fiber are used.
    """
    n_source = kappa.target_size
    n_target = kappa.source_size
    fibers = [kappa.fiber(i) for i in range(n_source)]
    for i, fiber in enumerate(fibers):
        if fiber.size == 0:
            raise EmptyFiber(f"statistic has empty fiber over {i}")

    if fiber_weights is None:
        matrix = np.zeros((n_source, n_target))
        for i, fiber in enumerate(fibers):
            matrix[i, fiber] = 1.0 / fiber.size
        return MarkovKernel(matrix)

    weights = np.asarray(fiber_weights, dtype=np.float64)
    if weights.shape != (n_source, n_target):
        raise DimensionMismatch(
            f"fiber_weights must have shape ({n_source}, {n_target})"
        )
    for i, fiber in enumerate(fibers):
        off_fiber = np.delete(weights[i], fiber)
        if np.any(off_fiber != 0.0):
            raise InvalidWeights(f"weights of row {i} leak outside fiber {i}")
        if np.any(weights[i, fiber] <= 0.0):
            raise InvalidWeights(f"weights of row {i} must be strictly positive")
    return MarkovKernel(weights)


def is_congruent(kernel: MarkovKernel, kappa: Statistic) -> bool:
    """True iff kappa_* K_* = id, checked by support criterion and on the basis."""
    if kernel.source_size != kappa.target_size:
        raise DimensionMismatch(
            "kernel source and statistic target sizes differ: "
            f"{kernel.source_size} vs {kappa.target_size}"
        )
    if kernel.target_size != kappa.source_size:
        raise DimensionMismatch(
            "kernel target and statistic source sizes differ: "
            f"{kernel.target_size} vs {kappa.source_size}"
        )
    # support criterion: no mass outside the own fiber
    off_fiber = kappa.map[None, :] != np.arange(kernel.source_size)[:, None]
    support_ok = bool(np.all(np.abs(kernel.matrix[off_fiber]) <= ROW_SUM_TOL))
    # composition on the delta basis
    composed = kappa.kernel().matrix.T @ kernel.matrix.T
    basis_ok = bool(
        np.all(np.abs(composed - np.eye(kernel.source_size)) <= ROW_SUM_TOL)
    )
    return support_ok and basis_ok


def apply_K_r(kernel: MarkovKernel, mu_r: RMeasure) -> RMeasure:
    """K_r = pi^r K_* pi^(1/r) applied to an r-th power of a measure."""
    r = mu_r.exponent
    mu = power_map(mu_r, 1 / r)
    return power_map(pushforward(kernel, mu), r)


def formal_derivative(
    kernel: MarkovKernel, mu: RMeasure, r: RationalLike, v: RMeasure
) -> RMeasure:
    """The formal derivative of K_r at the nonnegative measure mu, applied to v.

    Write v = phi * mu^r; the result is the Radon-Nikodym density of
    K_*(phi mu) w.r.t. mu' = K_* mu, times mu'^r.  Coefficients at target
    points with mu' = 0 are set to 0 (the density vanishes there a.e.).
    """
    r = Fraction(r)
    if mu.exponent != 1:
        raise DimensionMismatch("base measure must have exponent 1")
    if not mu.is_nonnegative:
        raise DominationViolation("base measure must be nonnegative")
    if v.exponent != r:
        raise DimensionMismatch(f"tangent exponent {v.exponent} != r = {r}")
    if v.index_size != mu.index_size or mu.index_size != kernel.source_size:
        raise DimensionMismatch("kernel, base and tangent sizes must agree")

    support = mu.coeffs > 0.0
    if np.any(np.abs(v.coeffs[~support]) > 0.0):
        raise DominationViolation("tangent has mass where the base measure has none")

    rf = float(r)
    phi = np.zeros_like(mu.coeffs)
    phi[support] = v.coeffs[support] / mu.coeffs[support] ** rf
    pushed = kernel.matrix.T @ (phi * mu.coeffs)
    mu_prime = kernel.matrix.T @ mu.coeffs
    out = np.zeros_like(mu_prime)
    target_support = mu_prime > 0.0
    out[target_support] = (
        pushed[target_support] / mu_prime[target_support]
    ) * mu_prime[target_support] ** rf
    return RMeasure(r, out)


def random_congruent_kernel(
    source_size: int, fiber_sizes: Sequence[int], seed: int
) -> Tuple[MarkovKernel, Statistic]:
    """A random kappa-congruent kernel with Dirichlet(1) weights on each fiber.

    Deterministic under a fixed seed; all weights strictly positive with
    probability 1.
    """
    fiber_sizes = [int(s) for s in fiber_sizes]
    if len(fiber_sizes) != source_size:
        raise InvalidFiberSizes(
            f"need {source_size} fiber sizes, got {len(fiber_sizes)}"
        )
    if any(s < 1 for s in fiber_sizes):
        raise InvalidFiberSizes("all fiber sizes must be >= 1")

    rng = np.random.default_rng(seed)
    target_size = sum(fiber_sizes)
    kappa_map = np.repeat(np.arange(source_size), fiber_sizes)
    kappa = Statistic(target_size=source_size, map=kappa_map)
    weights = np.zeros((source_size, target_size))
    start = 0
    for i, size in enumerate(fiber_sizes):
        weights[i, start : start + size] = rng.dirichlet(np.ones(size))
        start += size
    # Dirichlet samples can underflow to exactly 0; nudge and renormalize.
    for i, size in enumerate(fiber_sizes):
        fiber = kappa.fiber(i)
        if np.any(weights[i, fiber] <= 0.0):
            weights[i, fiber] = np.maximum(weights[i, fiber], 1e-12)
            weights[i, fiber] /= weights[i, fiber].sum()
    return kernel_from_statistic(kappa, weights), kappa
