"""
Forests on <k> and their symbolic weight matrices.

Vertices are 0-based internally; edges are sorted pairs (a, b) with a < b and
print as "1-2". A weight token for the geodesic between i and j is the
polynomial variable ("min", path) where path is the sorted tuple of edges on
that geodesic.
"""

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from app.core.errors import InvalidStructureError, ParseError
from app.models.polynomial import RationalPolynomial, Variable

Edge = Tuple[int, int]
# 0 (different components), 1 (diagonal), or the edge path of a geodesic
WeightToken = Union[int, Tuple[Edge, ...]]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def min_token(path: Sequence[Edge]) -> Variable:
    return ("min", tuple(sorted(_edge(*e) for e in path)))


@dataclass(frozen=True)
class Forest:
    k: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        normalized = tuple(sorted(_edge(a, b) for a, b in self.edges))
        object.__setattr__(self, "edges", normalized)
        for a, b in normalized:
            if a == b or not (0 <= a < self.k and 0 <= b < self.k):
                raise InvalidStructureError(f"edge {a + 1}-{b + 1} is not an edge of the complete graph on <{self.k}>")
        if len(set(normalized)) != len(normalized) or not nx.is_forest(self.graph()):
            raise InvalidStructureError(f"edges {self.to_text()} contain a circuit")

    @classmethod
    def empty(cls, k: int) -> "Forest":
        return cls(k, ())

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.k))
        g.add_edges_from(self.edges)
        return g

    def is_tree(self) -> bool:
        return len(self.edges) == self.k - 1

    def components(self) -> List[Tuple[int, ...]]:
        return sorted(tuple(sorted(c)) for c in nx.connected_components(self.graph()))

    def degree(self, vertex: int) -> int:
        return sum(1 for e in self.edges if vertex in e)

    def geodesic(self, i: int, j: int) -> Optional[Tuple[Edge, ...]]:
        """Edges of the unique path from i to j, or None across components."""
        try:
            path = nx.shortest_path(self.graph(), i, j)
        except nx.NetworkXNoPath:
            return None
        return tuple(sorted(_edge(a, b) for a, b in zip(path, path[1:])))

    def to_text(self) -> str:
        return ",".join(f"{a + 1}-{b + 1}" for a, b in self.edges)

    def __str__(self) -> str:
        return self.to_text() or "(no edges)"


def parse_forest(text: str, k: int) -> Forest:
    """Parse "1-2,2-3"; the empty string is the edgeless forest."""
    edges = []
    offset = 0
    for chunk in text.split(","):
        stripped = chunk.strip()
        if stripped:
            parts = stripped.split("-")
            if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
                raise ParseError.at_offset(f"bad edge {stripped!r}", text, offset)
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
        offset += len(chunk) + 1
    try:
        return Forest(k, tuple(edges))
    except InvalidStructureError as e:
        raise ParseError(str(e), text, 1, 1) from e


def enumerate_spanning_trees(k: int) -> Iterator[Forest]:
    """All k^(k-2) labelled trees on <k>, decoded from Pruefer sequences."""
    if k < 1:
        return
    if k == 1:
        yield Forest.empty(1)
        return
    if k == 2:
        yield Forest(2, ((0, 1),))
        return
    for sequence in product(range(k), repeat=k - 2):
        tree = nx.from_prufer_sequence(list(sequence))
        yield Forest(k, tuple(tree.edges()))


def enumerate_forests(k: int) -> Iterator[Forest]:
    """Every acyclic edge subset of the complete graph on <k>, by size."""
    if k < 1:
        return
    all_edges = list(combinations(range(k), 2))
    for size in range(k):
        for subset in combinations(all_edges, size):
            g = nx.Graph()
            g.add_nodes_from(range(k))
            g.add_edges_from(subset)
            if nx.is_forest(g):
                yield Forest(k, subset)


@dataclass(frozen=True)
class SymbolicWeightMatrix:
    forest: Forest
    entries: Tuple[Tuple[WeightToken, ...], ...]

    @property
    def k(self) -> int:
        return self.forest.k

    def polynomial(self, i: int, j: int) -> RationalPolynomial:
        token = self.entries[i][j]
        if token == 0:
            return RationalPolynomial.zero()
        if token == 1:
            return RationalPolynomial.one()
        return RationalPolynomial.variable(min_token(token))

    def substitute(self, edge_values: Mapping[Edge, object]) -> List[List[object]]:
        """Numeric matrix: each geodesic entry becomes the minimum of its edge values."""
        missing = set(self.forest.edges) - set(edge_values)
        if missing:
            raise InvalidStructureError(f"no value for edges {sorted(missing)}")
        result = []
        for row in self.entries:
            values = []
            for token in row:
                if token in (0, 1):
                    values.append(Fraction(token))
                else:
                    values.append(min(edge_values[e] for e in token))
            result.append(values)
        return result

    def __str__(self) -> str:
        def render(token: WeightToken) -> str:
            if token in (0, 1):
                return str(token)
            return "min(" + ",".join(f"{a + 1}-{b + 1}" for a, b in token) + ")"

        return "\n".join("[" + ", ".join(render(t) for t in row) + "]" for row in self.entries)


@lru_cache(maxsize=None)
def weight_matrix(forest: Forest) -> SymbolicWeightMatrix:
    rows = []
    for i in range(forest.k):
        row: List[WeightToken] = []
        for j in range(forest.k):
            if i == j:
                row.append(1)
                continue
            path = forest.geodesic(i, j)
            row.append(0 if path is None else path)
        rows.append(tuple(row))
    return SymbolicWeightMatrix(forest, tuple(rows))
