"""Finite-dimensional spaces of (powers of) signed measures.

A measure on a finite index set {0, .., m-1} is a coefficient vector; its
formal r-th power keeps the same coefficients but carries the rational
exponent r.  Products of powers add exponents componentwise, the
exponentiating map pi^k takes signed componentwise powers, and the natural
norm of an r-th power is sum_i |mu_i|^(1/r).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import BoundarySingularity, DimensionMismatch, ExponentOutOfRange

RationalLike = Union[Fraction, int, str]

#: coefficients below this magnitude count as boundary points of M_+
POSITIVITY_FLOOR = 1e-300


def _as_fraction(value: RationalLike) -> Fraction:
    frac = Fraction(value)
    if frac <= 0:
        raise ExponentOutOfRange(f"exponent must be positive, got {frac}")
    return frac


@dataclass(frozen=True)
class RMeasure:
    """An element of S^r(I): coefficients over a finite index set plus exponent r.

    Exponents are exact rationals so repeated re-exponentiation composes
    without drift.  Exponents above 1 are only admitted for strictly
    positive coefficient vectors (where pi^k is defined for every k).
    Instances are immutable.
    """

    exponent: Fraction
    coeffs: np.ndarray

    def __post_init__(self):
        exponent = _as_fraction(self.exponent)
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise DimensionMismatch("coefficients must be a nonempty 1-D vector")
        coeffs.setflags(write=False)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "coeffs", coeffs)
        if exponent > 1 and not self.is_strictly_positive:
            raise ExponentOutOfRange(
                f"exponent {exponent} > 1 requires strictly positive coefficients"
            )

    @property
    def index_size(self) -> int:
        return self.coeffs.size

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.coeffs >= 0.0))

    @property
    def is_strictly_positive(self) -> bool:
        return bool(np.all(self.coeffs > POSITIVITY_FLOOR))

    @property
    def total_mass(self) -> float:
        """Sum of coefficients; the total mass for exponent 1."""
        return float(np.sum(self.coeffs))


def signed_measure(coeffs) -> RMeasure:
    """An ordinary signed measure, i.e. an RMeasure with exponent 1."""
    return RMeasure(Fraction(1), np.asarray(coeffs, dtype=np.float64))


def norm(mu: RMeasure) -> float:
    """The canonical norm on S^r(I): sum_i |mu_i|^(1/r)."""
    inv_r = 1.0 / float(mu.exponent)
    return float(np.sum(np.abs(mu.coeffs) ** inv_r))


def power_map(mu: RMeasure, k: RationalLike) -> RMeasure:
    """The exponentiating map pi^k: signed componentwise k-th power, exponent k*r.

    Requires k*r <= 1 unless mu is strictly positive.
    """
    k = _as_fraction(k)
    new_exponent = k * mu.exponent
    if new_exponent > 1 and not mu.is_strictly_positive:
        raise ExponentOutOfRange(
            f"pi^{k} would give exponent {new_exponent} > 1 on a "
            "not strictly positive measure"
        )
    kf = float(k)
    coeffs = np.sign(mu.coeffs) * np.abs(mu.coeffs) ** kf
    return RMeasure(new_exponent, coeffs)


def product(mu: RMeasure, nu: RMeasure) -> RMeasure:
    """Componentwise product S^r x S^s -> S^(r+s); requires r + s <= 1."""
    if mu.index_size != nu.index_size:
        raise DimensionMismatch(
            f"index sizes differ: {mu.index_size} vs {nu.index_size}"
        )
    new_exponent = mu.exponent + nu.exponent
    if new_exponent > 1:
        raise ExponentOutOfRange(f"product exponent {new_exponent} exceeds 1")
    return RMeasure(new_exponent, mu.coeffs * nu.coeffs)


def center(index_size: int, lam: float = 1.0) -> RMeasure:
    """The center lambda * c_I: all coefficients equal to lambda/|I|."""
    if index_size < 1:
        raise DimensionMismatch("index_size must be >= 1")
    if lam <= 0:
        raise BoundarySingularity("lambda must be positive")
    return signed_measure(np.full(index_size, lam / index_size))
