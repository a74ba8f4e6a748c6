"""Canonical tensors, partition tensors, and tensor-field oracles.

The degree-n canonical form L^n acts on n-th roots of measures as
n^n * sum_i prod_j nu_{j,i}.  Its pullback along pi^(1/nr) gives the
canonical n-tensor at regularity r, whose component on the diagonal basis
is |m_i|^(1/r - n) up to the 1/r^n normalization.  Partition tensors
tau^P are products of canonical tensors over the blocks of P.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from .backend import weighted_prod_sum
from .errors import (
    BoundarySingularity,
    DegreeMismatch,
    DimensionMismatch,
    ExponentMismatch,
    RegularityMismatch,
)
from .markov import MarkovKernel, apply_K_r, formal_derivative
from .measures import POSITIVITY_FLOOR, RMeasure, norm, power_map
from .partitions import Partition, trivial_partition

Evaluator = Callable[[RMeasure, Sequence[RMeasure]], float]


@dataclass(frozen=True)
class TensorFieldOracle:
    """A black-box n-tensor field of fixed regularity r.

    The evaluator receives a base point of S^r(I) (any finite I) and n
    tangent vectors of the same exponent, and returns a real number.
    Multilinearity in the tangent slots is the caller's responsibility.
    """

    degree: int
    regularity: Fraction
    evaluator: Evaluator

    def __post_init__(self):
        object.__setattr__(self, "regularity", Fraction(self.regularity))

    def evaluate(self, base: RMeasure, tangents: Sequence[RMeasure]) -> float:
        if len(tangents) != self.degree:
            raise DegreeMismatch(
                f"oracle of degree {self.degree} got {len(tangents)} tangents"
            )
        if base.exponent != self.regularity:
            raise ExponentMismatch(
                f"base exponent {base.exponent} != regularity {self.regularity}"
            )
        for v in tangents:
            if v.exponent != self.regularity:
                raise ExponentMismatch("tangent exponent differs from regularity")
            if v.index_size != base.index_size:
                raise DimensionMismatch("tangent and base index sizes differ")
        return float(self.evaluator(base, tangents))


def _block_weights(mu_r: RMeasure, exponent: Fraction) -> np.ndarray:
    """|m_i|^exponent with 0^0 = 1; negative exponents need a positive base."""
    if exponent == 0:
        return np.ones(mu_r.index_size)
    if exponent < 0 and np.any(np.abs(mu_r.coeffs) <= POSITIVITY_FLOOR):
        raise BoundarySingularity(
            "canonical tensor with negative coefficient power at a boundary point"
        )
    return np.abs(mu_r.coeffs) ** float(exponent)


def canonical_component(mu_r: RMeasure, multiindex: Sequence[int]) -> float:
    """Diagonal component |m_i|^(1/r - n) of the canonical n-tensor.

    Zero unless all entries of the multiindex coincide.  The 1/r^n
    normalization of the tensor itself is applied in tau_P_eval.
    """
    n = len(multiindex)
    if n == 0:
        raise DegreeMismatch("multiindex must be nonempty")
    first = multiindex[0]
    if any(i != first for i in multiindex):
        return 0.0
    if not 0 <= first < mu_r.index_size:
        raise DimensionMismatch(f"index {first} out of range")
    exponent = 1 / mu_r.exponent - n
    return float(_block_weights(mu_r, exponent)[first])


def L_n_eval(n: int, nus: Sequence[RMeasure]) -> float:
    """The canonical n-form: n^n sum_i prod_j nu_{j,i} on exponent-1/n vectors."""
    if len(nus) != n:
        raise DegreeMismatch(f"L^{n} needs exactly {n} arguments")
    expected = Fraction(1, n)
    for nu in nus:
        if nu.exponent != expected:
            raise ExponentMismatch(f"arguments of L^{n} must have exponent 1/{n}")
        if nu.index_size != nus[0].index_size:
            raise DimensionMismatch("arguments live on different index sets")
    stacked = np.vstack([nu.coeffs for nu in nus])
    return float(n) ** n * weighted_prod_sum(stacked, np.ones(nus[0].index_size))


def tau_P_eval(
    p: Partition, r, mu_r: RMeasure, vs: Sequence[RMeasure]
) -> float:
    """The partition tensor tau^P at regularity r.

    Product over blocks B of (1/r)^|B| sum_i (prod_{j in B} v_{j,i})
    * |m_i|^(1/r - |B|).  Blocks of size k with 1/r < k require a strictly
    positive base.
    """
    r = Fraction(r)
    n = p.degree
    if len(vs) != n:
        raise DegreeMismatch(f"tau^P of degree {n} got {len(vs)} tangents")
    if mu_r.exponent != r:
        raise ExponentMismatch(f"base exponent {mu_r.exponent} != r = {r}")
    for v in vs:
        if v.exponent != r:
            raise ExponentMismatch("tangent exponents must equal r")
        if v.index_size != mu_r.index_size:
            raise DimensionMismatch("tangent and base index sizes differ")

    inv_r = 1.0 / float(r)
    value = 1.0
    for block in p.blocks:
        k = len(block)
        weights = _block_weights(mu_r, 1 / r - k)
        stacked = np.vstack([vs[pos - 1].coeffs for pos in block])
        value *= inv_r**k * weighted_prod_sum(stacked, weights)
    return value


def tau_P_oracle(p: Partition, r=1) -> TensorFieldOracle:
    """The congruent family tau^P at regularity r, as an oracle."""
    r = Fraction(r)
    return TensorFieldOracle(
        degree=p.degree,
        regularity=r,
        evaluator=lambda base, vs: tau_P_eval(p, r, base, vs),
    )


def tau_n_oracle(n: int, r=1) -> TensorFieldOracle:
    """The canonical n-tensor family (trivial partition) at regularity r."""
    return tau_P_oracle(trivial_partition(n), r)


def constant_oracle(value: float, r=1) -> TensorFieldOracle:
    """A degree-0 oracle, the unit of the tensor algebra when value = 1."""
    return TensorFieldOracle(
        degree=0, regularity=Fraction(r), evaluator=lambda base, vs: value
    )


CoefficientFn = Union[float, Callable[[float], float]]


def linear_combination_oracle(
    terms: Sequence[Tuple[Partition, CoefficientFn]], r=1
) -> TensorFieldOracle:
    """sum_P a_P(lambda) tau^P with lambda the total mass of the base measure.

    Coefficients may be constants or callables of lambda = ||mu_r^(1/r)||.
    All partitions must share one degree.
    """
    r = Fraction(r)
    if not terms:
        raise DegreeMismatch("need at least one term")
    degree = terms[0][0].degree
    if any(p.degree != degree for p, _ in terms):
        raise DegreeMismatch("all partitions must have the same degree")

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        lam = norm(base)
        total = 0.0
        for p, coeff in terms:
            value = coeff(lam) if callable(coeff) else float(coeff)
            total += value * tau_P_eval(p, r, base, vs)
        return total

    return TensorFieldOracle(degree=degree, regularity=r, evaluator=evaluator)


def zero_oracle(n: int, r=1) -> TensorFieldOracle:
    return TensorFieldOracle(
        degree=n, regularity=Fraction(r), evaluator=lambda base, vs: 0.0
    )


def tensor_product(a: TensorFieldOracle, b: TensorFieldOracle) -> TensorFieldOracle:
    """(A (x) B)(v_1 .. v_{n+m}) = A(first n) * B(last m), pointwise in the base."""
    if a.regularity != b.regularity:
        raise RegularityMismatch(
            f"regularities differ: {a.regularity} vs {b.regularity}"
        )

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        return a.evaluate(base, vs[: a.degree]) * b.evaluate(base, vs[a.degree :])

    return TensorFieldOracle(
        degree=a.degree + b.degree, regularity=a.regularity, evaluator=evaluator
    )


def permute(sigma: Sequence[int], a: TensorFieldOracle) -> TensorFieldOracle:
    """The action (P_sigma A)(v_1 .. v_n) = A(v_{sigma^{-1}(1)}, ..).

    ``sigma`` is a permutation of 0..n-1 mapping slot positions.
    """
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(a.degree)):
        raise DegreeMismatch(f"sigma must permute 0..{a.degree - 1}")
    inverse = [0] * a.degree
    for pos, image in enumerate(sigma):
        inverse[image] = pos

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        return a.evaluate(base, [vs[inverse[j]] for j in range(a.degree)])

    return TensorFieldOracle(
        degree=a.degree, regularity=a.regularity, evaluator=evaluator
    )


def pullback_markov(kernel: MarkovKernel, a: TensorFieldOracle) -> TensorFieldOracle:
    """K_r^* A: evaluate A at K_r(base) on formal-derivative images of tangents.

    Base points must be nonnegative r-th powers of measures dominated by
    themselves; tangents must be dominated by the base.
    """
    r = a.regularity

    def evaluator(base: RMeasure, vs: Sequence[RMeasure]) -> float:
        mu = power_map(base, 1 / r)
        pushed_base = apply_K_r(kernel, base)
        pushed_vs = [formal_derivative(kernel, mu, r, v) for v in vs]
        return a.evaluate(pushed_base, pushed_vs)

    return TensorFieldOracle(degree=a.degree, regularity=r, evaluator=evaluator)
