from dataclasses import dataclass
from typing import Iterator, List, Tuple

from app.core.errors import InvalidStructureError


@dataclass(frozen=True)
class NCPairing:
    """Non-crossing pair partition of the positions 0..m-1."""

    m: int
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        points = sorted(x for pair in self.pairs for x in pair)
        if points != list(range(self.m)) or any(a >= b for a, b in self.pairs):
            raise InvalidStructureError(f"{self.pairs} is not a pair partition of {self.m} positions")
        for a, c in self.pairs:
            for b, d in self.pairs:
                if a < b < c < d:
                    raise InvalidStructureError(f"pairs {(a, c)} and {(b, d)} cross")


def enumerate_nc_pairings(m: int) -> Iterator[NCPairing]:
    """Catalan(m/2) pairings: position 0 pairs with an odd position j, splitting inside from outside."""
    if m % 2:
        return

    def pairings(points: List[int]) -> Iterator[List[Tuple[int, int]]]:
        if not points:
            yield []
            return
        first = points[0]
        for j in range(1, len(points), 2):
            for inside in pairings(points[1:j]):
                for outside in pairings(points[j + 1:]):
                    yield [(first, points[j])] + inside + outside

    for pairs in pairings(list(range(m))):
        yield NCPairing(m, tuple(sorted(pairs)))
