"""Set partitions of {1, .., n} with the refinement partial order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .errors import DegreeMismatch, DegreeTooLarge, DimensionMismatch

#: Bell(12) = 4,213,597; enumeration above this degree is rejected by default
DEFAULT_DEGREE_LIMIT = 12

Block = Tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """A set partition in canonical form.

    Blocks are sorted tuples, ordered by their least element, and jointly
    cover {1, .., n} with n the degree.
    """

    blocks: Tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(block)) for block in self.blocks)
        blocks = tuple(sorted(blocks, key=lambda b: b[0]))
        elements = [x for block in blocks for x in block]
        n = len(elements)
        if n == 0:
            raise DimensionMismatch("partition must have at least one block")
        if sorted(elements) != list(range(1, n + 1)):
            raise DimensionMismatch(
                f"blocks must partition {{1, .., {n}}}, got {blocks}"
            )
        object.__setattr__(self, "blocks", blocks)

    @property
    def degree(self) -> int:
        return sum(len(block) for block in self.blocks)

    @property
    def size(self) -> int:
        """Number of blocks |P|."""
        return len(self.blocks)

    @property
    def is_singleton_free(self) -> bool:
        return all(len(block) >= 2 for block in self.blocks)

    @property
    def max_block_size(self) -> int:
        return max(len(block) for block in self.blocks)

    def block_of(self, element: int) -> int:
        for idx, block in enumerate(self.blocks):
            if element in block:
                return idx
        raise KeyError(element)

    def __str__(self) -> str:
        return "|".join("".join(str(x) for x in block) for block in self.blocks)


def partition(blocks: Iterable[Iterable[int]]) -> Partition:
    return Partition(tuple(tuple(block) for block in blocks))


def trivial_partition(n: int) -> Partition:
    return partition([range(1, n + 1)])


def singleton_partition(n: int) -> Partition:
    return partition([[k] for k in range(1, n + 1)])


def enumerate_partitions(n: int, degree_limit: int = DEFAULT_DEGREE_LIMIT) -> List[Partition]:
    """All partitions of {1, .., n}, finest first.

    The order is by decreasing block count with lexicographic block
    signature as tie break; this is a linear extension of refinement, as
    required by the minimal-first elimination in the classifier.
    """
    if n < 1:
        raise DimensionMismatch("degree must be >= 1")
    if n > degree_limit:
        raise DegreeTooLarge(f"degree {n} exceeds the limit {degree_limit}")

    results: List[Partition] = []

    def extend(element: int, blocks: List[List[int]]):
        if element > n:
            results.append(partition(blocks))
            return
        for block in blocks:
            block.append(element)
            extend(element + 1, blocks)
            block.pop()
        blocks.append([element])
        extend(element + 1, blocks)
        blocks.pop()

    extend(1, [])
    results.sort(key=lambda p: (-p.size, p.blocks))
    return results


def refines(p: Partition, q: Partition) -> bool:
    """True iff every block of p is contained in some block of q."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees differ: {p.degree} vs {q.degree}")
    containing = {}
    for idx, block in enumerate(q.blocks):
        for x in block:
            containing[x] = idx
    return all(
        len({containing[x] for x in block}) == 1 for block in p.blocks
    )


def partition_of_multiindex(indices: Sequence[int]) -> Partition:
    """Equality classes of positions: k ~ l iff indices[k] == indices[l]."""
    groups = {}
    for pos, value in enumerate(indices, start=1):
        groups.setdefault(value, []).append(pos)
    return partition(groups.values())


def representative_multiindex(
    p: Partition, index_size: int, variant: int = 0
) -> Tuple[int, ...]:
    """A multiindex (0-based values) whose equality classes are exactly p.

    ``variant`` selects among distinct index labelings; any two variants
    induce the same partition.  Requires index_size >= |p|.
    """
    if index_size < p.size:
        raise DimensionMismatch(
            f"need at least {p.size} indices to realize the partition"
        )
    labels = list(range(p.size))
    if variant % 2 == 1:
        labels = [index_size - 1 - label for label in labels]
    out = [0] * p.degree
    for block_idx, block in enumerate(p.blocks):
        for pos in block:
            out[pos - 1] = labels[block_idx]
    return tuple(out)
