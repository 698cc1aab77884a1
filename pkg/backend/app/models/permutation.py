"""
Permutation primitives on <n> = {1, ..., n}.

Points are stored 0-based; every textual form (cycle notation, colorings,
reports) is 1-based. Composition applies the right factor first:
``compose(p, q)(x) == p(q(x))``. Cycle counts are invariant under conjugation,
so every counting result is independent of this convention.
"""

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from app.core.errors import InvalidStructureError, ParseError, SizeMismatchError

_CYCLE_PATTERN = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Permutation:
    images: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise InvalidStructureError(f"images {self.images} are not a bijection of <{n}>")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], n: int) -> "Permutation":
        """Build from 0-based cycles; points not mentioned are fixed."""
        images = list(range(n))
        seen = set()
        for cycle in cycles:
            for pos, point in enumerate(cycle):
                if not 0 <= point < n:
                    raise InvalidStructureError(f"point {point + 1} outside <{n}>")
                if point in seen:
                    raise InvalidStructureError(f"point {point + 1} appears twice")
                seen.add(point)
                images[point] = cycle[(pos + 1) % len(cycle)]
        return cls(tuple(images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(tuple(inv))

    def cycles(self) -> List[Tuple[int, ...]]:
        return cycle_decomposition(self)

    def to_cycle_notation(self) -> str:
        return "".join("(" + " ".join(str(x + 1) for x in cycle) + ")" for cycle in self.cycles())

    def __str__(self) -> str:
        return self.to_cycle_notation()


class Matching(Permutation):
    """Fixed-point-free involution."""

    def __post_init__(self):
        super().__post_init__()
        for x, y in enumerate(self.images):
            if x == y or self.images[y] != x:
                raise InvalidStructureError(f"{self.to_cycle_notation()} is not a fixed-point-free involution")

    def pairs(self) -> List[Tuple[int, int]]:
        return [(x, y) for x, y in enumerate(self.images) if x < y]


@dataclass(frozen=True)
class Coloring:
    colors: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.colors)
        for c in self.colors:
            if not 0 <= c < max(n, 1):
                raise InvalidStructureError(f"color {c + 1} outside <{n}>")

    @property
    def n(self) -> int:
        return len(self.colors)

    def __call__(self, x: int) -> int:
        return self.colors[x]

    @classmethod
    def constant(cls, n: int) -> "Coloring":
        return cls(tuple([0] * n))

    def is_constant(self) -> bool:
        return len(set(self.colors)) <= 1

    def relabel(self, sigma: Permutation) -> "Coloring":
        """Coloring x -> gamma(sigma^-1(x)), i.e. the colors carried along sigma."""
        inv = sigma.inverse()
        return Coloring(tuple(self.colors[inv(x)] for x in range(self.n)))

    def to_text(self) -> str:
        return ",".join(str(c + 1) for c in self.colors)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """x -> p(q(x))."""
    if p.n != q.n:
        raise SizeMismatchError(f"cannot compose permutations of degree {p.n} and {q.n}")
    return Permutation(tuple(p.images[y] for y in q.images))


def conjugate(p: Permutation, sigma: Permutation) -> Permutation:
    """sigma p sigma^-1."""
    return compose(compose(sigma, p), sigma.inverse())


def cycle_decomposition(p: Permutation) -> List[Tuple[int, ...]]:
    """Cycles starting at their minimal element, sorted by that element."""
    seen = [False] * p.n
    cycles = []
    for start in range(p.n):
        if seen[start]:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = p.images[x]
        cycles.append(tuple(cycle))
    return cycles


def cycle_count(p: Permutation) -> int:
    return len(cycle_decomposition(p))


def cycle_type(p: Permutation) -> Tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycle_decomposition(p)), reverse=True))


def permutation_with_cycle_type(lengths: Sequence[int]) -> Permutation:
    """Consecutive cycles (1 ... n1)(n1+1 ... n1+n2)... ."""
    cycles = []
    start = 0
    for length in lengths:
        cycles.append(tuple(range(start, start + length)))
        start += length
    return Permutation.from_cycles(cycles, start)


def enumerate_matchings(n: int, coloring: Optional[Coloring] = None) -> Iterator[Matching]:
    """
    Every fixed-point-free involution of <n>, each exactly once.

    The smallest unmatched point is paired with each larger partner in
    increasing order, recursively. With a coloring only same-colored partners
    are tried, which yields exactly the matchings with gamma o iota = gamma
    in the same relative order. Odd n yields nothing.
    """
    if n % 2:
        return
    images = [-1] * n

    def place(remaining: List[int]) -> Iterator[Matching]:
        if not remaining:
            yield Matching(tuple(images))
            return
        first, rest = remaining[0], remaining[1:]
        for pos, partner in enumerate(rest):
            if coloring is not None and coloring(partner) != coloring(first):
                continue
            images[first], images[partner] = partner, first
            yield from place(rest[:pos] + rest[pos + 1:])
        images[first] = -1

    yield from place(list(range(n)))


def double_factorial(m: int) -> int:
    result = 1
    while m > 1:
        result *= m
        m -= 2
    return result


def is_transitive_pair(theta: Permutation, iota: Permutation) -> bool:
    """Whether <theta, iota> has a single orbit, by union-find on the generators."""
    if theta.n != iota.n:
        raise SizeMismatchError(f"theta has degree {theta.n}, iota has degree {iota.n}")
    parent = list(range(theta.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    components = theta.n
    for generator in (theta, iota):
        for x, y in enumerate(generator.images):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
                components -= 1
    return components <= 1


def canonical_labeling(theta: Permutation) -> Tuple[int, ...]:
    """The theta-invariant onto map numbering cycles by their minimal element."""
    nu = [0] * theta.n
    for index, cycle in enumerate(cycle_decomposition(theta)):
        for x in cycle:
            nu[x] = index
    return tuple(nu)


def parse_cycles(text: str, n: Optional[int] = None) -> Permutation:
    """
    Parse 1-based cycle notation such as "(1 2 3)(4 5)".

    Points are separated by whitespace or commas. Fixed points may be omitted
    when ``n`` is given; otherwise n is the largest point mentioned.
    """
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty cycle notation", text, 1, 1)
    cycles: List[List[int]] = []
    pos = 0
    for match in _CYCLE_PATTERN.finditer(text):
        gap = text[pos:match.start()]
        if gap.strip():
            offset = pos + (len(gap) - len(gap.lstrip()))
            raise ParseError.at_offset(f"unexpected text {gap.strip()!r}", text, offset)
        body = match.group(1)
        cycle = []
        for token in re.finditer(r"[^\s,]+", body):
            if not token.group().isdigit() or int(token.group()) < 1:
                raise ParseError.at_offset(
                    f"expected a positive point, got {token.group()!r}", text, match.start(1) + token.start()
                )
            cycle.append(int(token.group()) - 1)
        if not cycle:
            raise ParseError.at_offset("empty cycle", text, match.start())
        cycles.append(cycle)
        pos = match.end()
    tail = text[pos:]
    if tail.strip():
        offset = pos + (len(tail) - len(tail.lstrip()))
        raise ParseError.at_offset(f"unexpected text {tail.strip()!r}", text, offset)
    largest = max(max(c) for c in cycles) + 1
    if n is None:
        n = largest
    elif largest > n:
        raise ParseError(f"point {largest} exceeds n={n}", text, 1, 1)
    try:
        return Permutation.from_cycles(cycles, n)
    except InvalidStructureError as e:
        raise ParseError(str(e), text, 1, 1) from e


def parse_coloring(text: str, n: int) -> Coloring:
    """Parse "constant" or a 1-based comma separated list like "1,2,1,2"."""
    stripped = text.strip()
    if stripped.lower() == "constant":
        return Coloring.constant(n)
    colors = []
    for token in re.finditer(r"[^\s,]+", text):
        if not token.group().isdigit() or not 1 <= int(token.group()) <= n:
            raise ParseError.at_offset(f"color {token.group()!r} outside 1..{n}", text, token.start())
        colors.append(int(token.group()) - 1)
    if len(colors) != n:
        raise SizeMismatchError(f"coloring has {len(colors)} entries, expected {n}")
    return Coloring(tuple(colors))


@dataclass(frozen=True)
class MapInstance:
    theta: Permutation
    gamma: Coloring

    def __post_init__(self):
        if self.theta.n != self.gamma.n:
            raise SizeMismatchError(f"theta has degree {self.theta.n}, gamma has length {self.gamma.n}")

    @property
    def n(self) -> int:
        return self.theta.n

    @classmethod
    def parse(cls, theta: str, gamma: str = "constant", n: Optional[int] = None) -> "MapInstance":
        perm = parse_cycles(theta, n)
        return cls(perm, parse_coloring(gamma, perm.n))
