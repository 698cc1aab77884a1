"""
Vertex labelings and splicing words.

A labeling nu maps the points of <n> onto the vertices of <k>; attached to a
permutation theta it must be constant on theta-cycles. A splicing word lists
the points of the single cycle of theta o tau starting at point 1, flagging
the points fixed by tau as kept.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple
import re

from app.core.errors import InvalidStructureError, ParseError
from app.models.permutation import Permutation, canonical_labeling


@dataclass(frozen=True)
class VertexLabeling:
    nu: Tuple[int, ...]

    def __post_init__(self):
        if self.nu and sorted(set(self.nu)) != list(range(max(self.nu) + 1)):
            raise InvalidStructureError(f"labeling {self.to_text()} is not onto <{max(self.nu) + 1}>")

    @property
    def n(self) -> int:
        return len(self.nu)

    @property
    def k(self) -> int:
        return max(self.nu) + 1 if self.nu else 0

    def __call__(self, x: int) -> int:
        return self.nu[x]

    @classmethod
    def for_theta(cls, theta: Permutation) -> "VertexLabeling":
        return cls(canonical_labeling(theta))

    @classmethod
    def from_fiber_sizes(cls, sizes: List[int]) -> "VertexLabeling":
        return cls(tuple(v for v, size in enumerate(sizes) for _ in range(size)))

    def fibers(self) -> List[List[int]]:
        result: List[List[int]] = [[] for _ in range(self.k)]
        for x, v in enumerate(self.nu):
            result[v].append(x)
        return result

    def fiber_sizes(self) -> List[int]:
        return [len(f) for f in self.fibers()]

    def is_invariant(self, theta: Permutation) -> bool:
        return theta.n == self.n and all(self.nu[theta(x)] == self.nu[x] for x in range(self.n))

    def require_theta_invariant(self, theta: Permutation):
        if not self.is_invariant(theta):
            raise InvalidStructureError(f"labeling {self.to_text()} is not constant on the cycles of {theta}")
        if self.k != len(theta.cycles()):
            raise InvalidStructureError(f"labeling {self.to_text()} must number the {len(theta.cycles())} cycles of {theta}")

    def to_text(self) -> str:
        return ",".join(str(v + 1) for v in self.nu)


def parse_labeling(text: str, n: int) -> VertexLabeling:
    values = []
    for token in re.finditer(r"[^\s,]+", text):
        if not token.group().isdigit() or int(token.group()) < 1:
            raise ParseError.at_offset(f"vertex {token.group()!r} is not a positive integer", text, token.start())
        values.append(int(token.group()) - 1)
    if len(values) != n:
        raise ParseError(f"labeling has {len(values)} entries, expected {n}", text, 1, 1)
    return VertexLabeling(tuple(values))


@dataclass(frozen=True)
class Letter:
    index: int
    vertex: int
    color: int
    kept: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index + 1, "vertex": self.vertex + 1, "color": self.color + 1, "kept": self.kept}


@dataclass(frozen=True)
class SplicingWord:
    tau: Permutation
    letters: Tuple[Letter, ...]

    def kept_letters(self) -> Tuple[Letter, ...]:
        return tuple(letter for letter in self.letters if letter.kept)

    def degree(self) -> int:
        return len(self.kept_letters())

    def __str__(self) -> str:
        kept = " ".join(f"X{letter.index + 1}" for letter in self.kept_letters())
        return kept or "1"
