"""Constructive decomposition of congruent tensor families.

Any family of n-tensors invariant under congruent Markov morphisms is a
combination sum_P a_P(||mu||) tau^P over partitions of {1, .., n} (on the
cone of strictly positive measures), or sum_P c_P tau^P over singleton-free
partitions (on probability simplexes).  The decomposition is recovered by
evaluating the black-box family at uniform base measures on delta bases
and eliminating partitions finest-first; a residual over verification
measures reports how well the input actually was congruent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import IndexSetTooSmall, RepresentativeMismatch
from .measures import RMeasure, center, power_map, signed_measure
from .partitions import (
    Partition,
    enumerate_partitions,
    refines,
    representative_multiindex,
)
from .tensors import TensorFieldOracle, tau_P_eval

DEFAULT_LAMBDA_GRID = (0.5, 1.0, 2.0, 4.0)
DEFAULT_RESIDUAL_POINTS = 200
DEFAULT_TOLERANCE = 1e-8
REPRESENTATIVE_TOL = 1e-10


def unit_regularity(oracle: TensorFieldOracle) -> TensorFieldOracle:
    """Pull an oracle of regularity r back to regularity 1 along pi^r.

    Base points must be strictly positive; tangents are mapped by the
    derivative of pi^r, i.e. v -> r mu^(r-1) v.
    """
    r = oracle.regularity
    if r == 1:
        return oracle
    rf = float(r)

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        base_r = power_map(base, r)
        scale = rf * base.coeffs ** (rf - 1.0)
        vs_r = [RMeasure(r, scale * v.coeffs) for v in vs]
        return oracle.evaluate(base_r, vs_r)

    return TensorFieldOracle(
        degree=oracle.degree, regularity=Fraction(1), evaluator=evaluator
    )


def normalization_pullback(oracle: TensorFieldOracle) -> TensorFieldOracle:
    """Extend a family on probability simplexes to all positive measures.

    The extension is the pullback under mu -> mu/||mu||; its tangent map
    sends v to (v - mass(v) * mu/||mu||) / ||mu||, which has total mass 0.
    The input oracle is first brought to regularity 1.
    """
    unit = unit_regularity(oracle)

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        lam = base.total_mass
        q = signed_measure(base.coeffs / lam)
        dvs = [
            signed_measure((v.coeffs - v.total_mass * q.coeffs) / lam) for v in vs
        ]
        return unit.evaluate(q, dvs)

    return TensorFieldOracle(
        degree=oracle.degree, regularity=Fraction(1), evaluator=evaluator
    )


def _delta(index_size: int, i: int) -> RMeasure:
    coeffs = np.zeros(index_size)
    coeffs[i] = 1.0
    return signed_measure(coeffs)


def center_component(
    oracle: TensorFieldOracle,
    index_size: int,
    lam: float,
    p: Partition,
    strict: bool = True,
) -> float:
    """The well-defined component theta^P of a congruent family at lambda c_I.

    Evaluates the (regularity-1 pullback of the) oracle on a delta-basis
    multiindex inducing p.  With ``strict`` a second representative is
    checked to agree within 1e-10, as congruence demands.
    """
    if index_size < p.size:
        raise IndexSetTooSmall(
            f"|I| = {index_size} cannot realize a partition with {p.size} blocks"
        )
    unit = unit_regularity(oracle)
    base = center(index_size, lam)

    def component(variant: int) -> float:
        multiindex = representative_multiindex(p, index_size, variant)
        return unit.evaluate(base, [_delta(index_size, i) for i in multiindex])

    value = component(0)
    if strict:
        other = component(1)
        if abs(value - other) > REPRESENTATIVE_TOL * max(1.0, abs(value)):
            raise RepresentativeMismatch(
                f"theta^{p} differs between representatives: {value} vs {other}"
            )
    return value


@dataclass
class Decomposition:
    """Recovered canonical expansion of a congruent family.

    On the measure cone, ``coefficients`` tabulates a_P over the lambda
    grid for every partition; on probability simplexes, ``constants``
    holds the c_P for singleton-free partitions and ``absorbed`` lists the
    singleton partitions whose tau^P vanish there.
    """

    degree: int
    space: str
    lambda_grid: Tuple[float, ...]
    coefficients: Dict[Partition, np.ndarray]
    residual_report: float
    tolerance: float
    constants: Optional[Dict[Partition, float]] = None
    absorbed: Tuple[Partition, ...] = ()

    @property
    def congruent(self) -> bool:
        """False flags NonCongruentInput (residual above tolerance)."""
        return self.residual_report <= self.tolerance

    def coefficient(self, p: Partition, lam: float) -> float:
        idx = self.lambda_grid.index(lam)
        return float(self.coefficients[p][idx])


def _rational_probability_vector(size: int, rng: np.random.Generator) -> np.ndarray:
    """A strictly positive probability vector with small rational coefficients."""
    counts = rng.integers(1, 8, size=size)
    return counts / counts.sum()


def _residual(
    unit: TensorFieldOracle,
    coefficients: Dict[Partition, np.ndarray],
    lambda_grid: Sequence[float],
    index_size: int,
    points: int,
    seed: int,
) -> float:
    parts = list(coefficients)
    rng = np.random.default_rng(seed)
    n = unit.degree
    worst = 0.0
    for k in range(points):
        lam_idx = k % len(lambda_grid)
        lam = lambda_grid[lam_idx]
        base = signed_measure(lam * _rational_probability_vector(index_size, rng))
        vs = [signed_measure(rng.standard_normal(index_size)) for _ in range(n)]
        value = unit.evaluate(base, vs)
        recon = sum(
            float(coefficients[p][lam_idx]) * tau_P_eval(p, 1, base, vs)
            for p in parts
        )
        worst = max(worst, abs(value - recon) / max(1.0, abs(value), abs(recon)))
    return worst


def decompose_on_M(
    oracle: TensorFieldOracle,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    probe_size: Optional[int] = None,
    residual_points: int = DEFAULT_RESIDUAL_POINTS,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    strict_representatives: bool = False,
) -> Decomposition:
    """Recover sum_P a_P(lambda) tau^P from a congruent family on the cone.

    Partitions are eliminated finest-first: at the center lambda c_I every
    tau^P evaluates to the closed form (|I|/lambda)^(n-|P|) on a multiindex
    realizing P, so the component equations are triangular along refinement.
    Non-congruent inputs are not detected here but show up in the residual.
    """
    n = oracle.degree
    parts = enumerate_partitions(n)
    s = probe_size if probe_size is not None else n + 2
    if s < n:
        raise IndexSetTooSmall(f"probe size {s} cannot realize all partitions of {n}")
    grid = tuple(float(lam) for lam in lambda_grid)
    unit = unit_regularity(oracle)

    coefficients: Dict[Partition, np.ndarray] = {
        p: np.zeros(len(grid)) for p in parts
    }
    for gi, lam in enumerate(grid):
        solved: Dict[Partition, float] = {}
        for p0 in parts:
            theta = center_component(
                unit, s, lam, p0, strict=strict_representatives
            )
            correction = sum(
                a * (s / lam) ** (n - p.size)
                for p, a in solved.items()
                if refines(p, p0)
            )
            solved[p0] = (theta - correction) / (s / lam) ** (n - p0.size)
        for p0, a in solved.items():
            coefficients[p0][gi] = a

    residual = _residual(unit, coefficients, grid, s, residual_points, seed)
    return Decomposition(
        degree=n,
        space="M",
        lambda_grid=grid,
        coefficients=coefficients,
        residual_report=residual,
        tolerance=tolerance,
    )


def decompose_on_P(
    oracle: TensorFieldOracle,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    probe_size: Optional[int] = None,
    residual_points: int = DEFAULT_RESIDUAL_POINTS,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Decomposition:
    """Recover sum_P c_P tau^P over singleton-free partitions on simplexes.

    The oracle (defined at probability base points with mass-0 tangents) is
    extended to the measure cone by the normalization pullback, decomposed
    there, and the constants are read off at lambda = 1.  Partitions with a
    singleton block are reported as absorbed: their tau^P vanish on the
    simplex.
    """
    grid = tuple(float(lam) for lam in lambda_grid)
    if 1.0 not in grid:
        grid = tuple(sorted(grid + (1.0,)))
    extension = normalization_pullback(oracle)
    inner = decompose_on_M(
        extension,
        lambda_grid=grid,
        probe_size=probe_size,
        residual_points=residual_points,
        seed=seed,
        tolerance=tolerance,
    )
    one = grid.index(1.0)
    constants = {
        p: float(inner.coefficients[p][one])
        for p in inner.coefficients
        if p.is_singleton_free
    }
    absorbed = tuple(p for p in inner.coefficients if not p.is_singleton_free)
    return Decomposition(
        degree=oracle.degree,
        space="P",
        lambda_grid=grid,
        coefficients=inner.coefficients,
        residual_report=inner.residual_report,
        tolerance=tolerance,
        constants=constants,
        absorbed=absorbed,
    )


def probe_vectors_V(base_size: int) -> List[RMeasure]:
    """Mass-0 probe vectors V_i = 2 d_(0,i) - d_(1,i) - d_(2,i) on {0,1,2} x I.

    On the uniform distribution of J = {0,1,2} x I the diagonal values
    (tau^k)(V_i, .., V_i) equal (2^k + 2 (-1)^k) |J|^(k-1), nonzero for all
    k >= 2, which makes them a nondegenerate probe for singleton-free
    partitions.
    """
    if base_size < 1:
        raise IndexSetTooSmall("base_size must be >= 1")
    j_size = 3 * base_size
    out = []
    for i in range(base_size):
        coeffs = np.zeros(j_size)
        coeffs[0 * base_size + i] = 2.0
        coeffs[1 * base_size + i] = -1.0
        coeffs[2 * base_size + i] = -1.0
        out.append(signed_measure(coeffs))
    return out
