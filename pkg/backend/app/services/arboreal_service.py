from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import networkx as nx
import numpy as np

from app.core.config import settings
from app.core.errors import CapExceededError, InvalidStructureError
from app.models.forest import (
    Edge,
    Forest,
    SymbolicWeightMatrix,
    enumerate_forests,
    enumerate_spanning_trees,
    weight_matrix,
)
from app.models.polynomial import Monomial, RationalPolynomial, sum_polynomials
from app.schemas.verification import CheckReport

Matrix = Sequence[Sequence[object]]


@dataclass
class GaplessData:
    articulation: int
    co_articulation: int
    gapless: bool
    forest: Optional[Forest] = None
    edge_values: Dict[Edge, object] = field(default_factory=dict)


@lru_cache(maxsize=None)
def _monomial_expectation(edges: Tuple[Edge, ...], tokens: Monomial) -> Fraction:
    """
    E prod MinOf(S)^a over i.i.d. uniform edge weights.

    For each total order t_1 < ... < t_m of the edge weights a token MinOf(S)
    becomes t_r with r the lowest-ranked edge of S; the monomial prod t_r^b_r
    integrates over the simplex to prod_r 1 / (b_1 + ... + b_r + r).
    """
    total = Fraction(0)
    for order in permutations(edges):
        rank = {e: r for r, e in enumerate(order)}
        exponents = [0] * len(order)
        for (_, path), exp in tokens:
            exponents[min(rank[e] for e in path)] += exp
        value = Fraction(1)
        running = 0
        for r, b in enumerate(exponents):
            running += b
            value /= running + r + 1
        total += value
    return total


class ArborealService:
    """Trees, forests, co-ultrametrics and the uniform edge-weight expectation"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def spanning_trees(self, k: int) -> List[Forest]:
        trees = list(enumerate_spanning_trees(k))
        self.logger.debug(f"Enumerated {len(trees)} spanning trees on {k} vertices")
        return trees

    def forests(self, k: int) -> List[Forest]:
        result = list(enumerate_forests(k))
        self.logger.debug(f"Enumerated {len(result)} forests on {k} vertices")
        return result

    def weight_matrix(self, forest: Forest) -> SymbolicWeightMatrix:
        return weight_matrix(forest)

    def substitute(self, matrix: SymbolicWeightMatrix, edge_values: Dict[Edge, object]) -> List[List[object]]:
        return matrix.substitute(edge_values)

    def sample_forest_weights(self, forest: Forest, rng: np.random.Generator) -> Dict[Edge, float]:
        values = rng.uniform(0.0, 1.0, size=len(forest.edges))
        return dict(zip(forest.edges, values.tolist()))

    # ----- Kirchhoff -----

    def kirchhoff_check(self, k: int, max_k: Optional[int] = None) -> CheckReport:
        """sum over trees of prod_edges x_i x_j == (x_1 + ... + x_k)^(k-2) x_1 ... x_k"""
        limit = max_k or settings.KIRCHHOFF_MAX_K
        if k > limit:
            raise CapExceededError(f"Kirchhoff check refused for k={k} > {limit}", "raise PLANARMAP_KIRCHHOFF_MAX_K")
        xs = [RationalPolynomial.variable(("x", i)) for i in range(k)]
        lhs = sum_polynomials(
            prod((xs[a] * xs[b] for a, b in tree.edges), start=RationalPolynomial.one())
            for tree in enumerate_spanning_trees(k)
        )
        if k == 1:
            rhs = RationalPolynomial.one()
        else:
            rhs = sum_polynomials(xs) ** (k - 2) * prod(xs, start=RationalPolynomial.one())
        passed = lhs == rhs
        self.logger.info(f"Kirchhoff identity at k={k}: {'pass' if passed else 'FAIL'}")
        return CheckReport(
            name="kirchhoff",
            passed=passed,
            lhs=str(lhs),
            rhs=str(rhs),
            details={"k": k, "trees": k ** (k - 2) if k >= 2 else 1, "terms": len(lhs.terms)},
        )

    # ----- numeric co-ultrametrics -----

    def is_co_ultrametric(self, A: Matrix) -> bool:
        k = len(A)
        if any(len(row) != k for row in A):
            return False
        for i in range(k):
            if A[i][i] != 1:
                return False
            for j in range(k):
                if A[i][j] != A[j][i] or not 0 <= A[i][j] <= 1:
                    return False
        for i1 in range(k):
            for i2 in range(k):
                for i3 in range(k):
                    if A[i1][i3] < min(A[i1][i2], A[i2][i3]):
                        return False
        return True

    def gapless_data(self, A: Matrix) -> GaplessData:
        k = len(A)
        values = {A[i][j] for i in range(k) for j in range(k) if i != j} - {0, 1}
        g = nx.Graph()
        g.add_nodes_from(range(k))
        for i, j in combinations(range(k), 2):
            if A[i][j] > 0:
                g.add_edge(i, j, weight=A[i][j])
        co_articulation = nx.number_connected_components(g)
        articulation = len(values)
        gapless = articulation + co_articulation == k
        data = GaplessData(articulation, co_articulation, gapless)
        if gapless:
            # the maximum spanning forest realizes A as its geodesic minima
            spanning = nx.maximum_spanning_tree(g)
            edges = tuple((min(a, b), max(a, b)) for a, b in spanning.edges())
            data.forest = Forest(k, edges)
            data.edge_values = {e: A[e[0]][e[1]] for e in data.forest.edges}
        self.logger.debug(f"gapless_data: articulation={articulation}, co-articulation={co_articulation}")
        return data

    def _ldl_signature(self, A: Matrix) -> Tuple[bool, bool]:
        """(positive semidefinite, positive definite) by exact LDL with diagonal pivoting."""
        M = [[Fraction(x) for x in row] for row in A]
        remaining = list(range(len(M)))
        while remaining:
            pivot = max(remaining, key=lambda i: M[i][i])
            d = M[pivot][pivot]
            if d < 0:
                return False, False
            if d == 0:
                # every remaining diagonal entry is <= 0, so the rest must vanish
                rest_zero = all(M[i][j] == 0 for i in remaining for j in remaining)
                return rest_zero, False
            remaining.remove(pivot)
            for i in remaining:
                factor = M[i][pivot] / d
                if factor:
                    for j in remaining:
                        M[i][j] -= factor * M[pivot][j]
        return True, True

    def psd_check(self, A: Matrix) -> bool:
        return self._ldl_signature(A)[0]

    def is_positive_definite(self, A: Matrix) -> bool:
        return self._ldl_signature(A)[1]

    def lemma_noloops_check(self, A: Matrix, cycle: Sequence[int]) -> bool:
        """The two smallest A-values along a closed walk through ``cycle`` coincide."""
        if len(cycle) < 2:
            return True
        values = sorted(A[cycle[r]][cycle[(r + 1) % len(cycle)]] for r in range(len(cycle)))
        return values[0] == values[1]

    # ----- expectation over uniform edge weights -----

    def expectation_over_weights(self, forest: Forest, poly: RationalPolynomial):
        """Exact E[poly] with MinOf(S) tokens over i.i.d. Uniform(0,1) edge weights."""
        edge_set = set(forest.edges)
        total = 0
        for mono, coeff in poly.terms.items():
            for var, _ in mono:
                if var[0] != "min" or not set(var[1]) <= edge_set:
                    raise InvalidStructureError(f"token {var} does not refer to edges of forest {forest}")
            total += coeff * _monomial_expectation(forest.edges, mono)
        return total

    def sample_expectation(
        self, forest: Forest, poly: RationalPolynomial, samples: int, rng: np.random.Generator
    ) -> Tuple[float, float]:
        """Monte-Carlo mean and standard error of poly over uniform edge weights."""
        index = {e: c for c, e in enumerate(forest.edges)}
        weights = rng.uniform(0.0, 1.0, size=(samples, max(len(index), 1)))
        values = np.zeros(samples)
        for mono, coeff in poly.terms.items():
            term = np.full(samples, float(coeff))
            for (_, path), exp in mono:
                term *= weights[:, [index[e] for e in path]].min(axis=1) ** exp
            values += term
        return float(values.mean()), float(values.std(ddof=1) / np.sqrt(samples))

    def random_co_ultrametrics(self, k: int, count: int, rng: np.random.Generator) -> Iterator[Tuple[Forest, List[List[object]]]]:
        """Numeric wt_F for uniformly chosen forests with rational edge weights."""
        all_forests = self.forests(k)
        for _ in range(count):
            forest = all_forests[int(rng.integers(len(all_forests)))]
            edge_values = {e: Fraction(int(rng.integers(1, 1000)), 1000) for e in forest.edges}
            yield forest, weight_matrix(forest).substitute(edge_values)


def wt_polynomial_matrix(forest: Forest) -> List[List[RationalPolynomial]]:
    matrix = weight_matrix(forest)
    return [[matrix.polynomial(i, j) for j in range(forest.k)] for i in range(forest.k)]
