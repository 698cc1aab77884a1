"""
Set partitions of <k>, the Moebius function of their lattice, and the
Moebius form of the joint cumulant.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Callable, FrozenSet, Iterator, List, Tuple, Union

from app.core.errors import InvalidStructureError

Number = Union[int, Fraction, complex]


@dataclass(frozen=True)
class SetPartition:
    """Blocks are sorted tuples of 0-based points, ordered by minimal element."""

    k: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        points = sorted(x for block in self.blocks for x in block)
        if points != list(range(self.k)) or any(not block for block in self.blocks):
            raise InvalidStructureError(f"{self.blocks} is not a partition of <{self.k}>")

    @classmethod
    def from_blocks(cls, k: int, blocks) -> "SetPartition":
        normalized = sorted((tuple(sorted(block)) for block in blocks), key=lambda b: b[0])
        return cls(k, tuple(normalized))

    @classmethod
    def one(cls, k: int) -> "SetPartition":
        return cls(k, (tuple(range(k)),))

    @classmethod
    def zero(cls, k: int) -> "SetPartition":
        return cls(k, tuple((i,) for i in range(k)))

    def block_of(self) -> List[int]:
        """Index of the block containing each point."""
        owner = [0] * self.k
        for index, block in enumerate(self.blocks):
            for x in block:
                owner[x] = index
        return owner

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(str(x + 1) for x in block) for block in self.blocks)


def enumerate_partitions(k: int) -> Iterator[SetPartition]:
    """All Bell(k) partitions, via restricted-growth strings."""
    if k < 1:
        return
    growth = [0] * k

    def extend(position: int, largest: int) -> Iterator[SetPartition]:
        if position == k:
            blocks: List[List[int]] = [[] for _ in range(largest + 1)]
            for x, label in enumerate(growth):
                blocks[label].append(x)
            yield SetPartition(k, tuple(tuple(b) for b in blocks))
            return
        for label in range(largest + 2):
            growth[position] = label
            yield from extend(position + 1, max(largest, label))

    growth[0] = 0
    yield from extend(1, 0)


def refines(pi: SetPartition, sigma: SetPartition) -> bool:
    """pi <= sigma: every block of pi sits inside a block of sigma."""
    owner = sigma.block_of()
    return all(len({owner[x] for x in block}) == 1 for block in pi.blocks)


def moebius(pi: SetPartition, sigma: SetPartition) -> int:
    """
    mu(pi : sigma) on the partition lattice; 0 unless pi <= sigma.

    Closed form: prod over blocks B of sigma of (-1)^(r_B - 1) (r_B - 1)!,
    r_B being the number of blocks of pi inside B.
    """
    if pi.k != sigma.k or not refines(pi, sigma):
        return 0
    owner = sigma.block_of()
    inside = [0] * len(sigma.blocks)
    for block in pi.blocks:
        inside[owner[block[0]]] += 1
    return prod((-1) ** (r - 1) * factorial(r - 1) for r in inside)


def partition_matrix(phi: SetPartition) -> List[List[int]]:
    """[phi](i, j) = 1 when i and j share a block."""
    owner = phi.block_of()
    return [[1 if owner[i] == owner[j] else 0 for j in range(phi.k)] for i in range(phi.k)]


def joint_cumulant(moment: Callable[[FrozenSet[int]], Number], k: int) -> Number:
    """
    kappa(X_1, ..., X_k) = sum over partitions of mu(Pi : 1_k) prod_blocks moment(block).

    ``moment(A)`` must return E prod_{i in A} X_i for a nonempty frozenset A of
    0-based indices. Values are cached per block.
    """
    cache = {}

    def block_moment(block: Tuple[int, ...]) -> Number:
        key = frozenset(block)
        if key not in cache:
            cache[key] = moment(key)
        return cache[key]

    top = SetPartition.one(k)
    total: Number = 0
    for pi in enumerate_partitions(k):
        total += moebius(pi, top) * prod((block_moment(block) for block in pi.blocks), start=1)
    return total
