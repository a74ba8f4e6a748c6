"""Exception hierarchy for the congruent_tensors package."""


class GeometryError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(GeometryError):
    """Index sets of the operands are incompatible."""


class ExponentOutOfRange(GeometryError):
    """A measure-power operation would leave the admissible exponent range."""


class ExponentMismatch(GeometryError):
    """Operands carry different measure exponents where equal ones are required."""


class RegularityMismatch(GeometryError):
    """Tensor oracles of different regularity cannot be combined."""


class DegreeMismatch(GeometryError):
    """Partitions (or tensors) of different degree were mixed."""


class DegreeTooLarge(GeometryError):
    """Partition enumeration was requested above the configured degree guard."""


class BoundarySingularity(GeometryError):
    """A coefficient at (or numerically at) zero hit a negative power."""


class DominationViolation(GeometryError):
    """A tangent vector carries mass where the base measure has none."""


class EmptyFiber(GeometryError):
    """A statistic has an empty fiber, so no congruent kernel exists."""


class InvalidWeights(GeometryError):
    """Fiber weights leak outside their fiber or fail to be a positive probability vector."""


class InvalidFiberSizes(GeometryError):
    """Requested fiber sizes for a random congruent kernel are not all >= 1."""


class IndexSetTooSmall(GeometryError):
    """The probing index set cannot realize the requested partition."""


class RepresentativeMismatch(GeometryError):
    """Two multiindices inducing the same partition gave different center values."""


class SchemaError(GeometryError):
    """A CLI input file does not match its expected schema."""
