from itertools import product
from math import factorial, prod
from typing import Iterator, List, Optional
import logging

from app.core.errors import InvalidStructureError
from app.models.forest import Forest, enumerate_spanning_trees
from app.models.permutation import Coloring, Permutation, compose, cycle_count
from app.models.splicing import Letter, SplicingWord, VertexLabeling
from app.schemas.verification import CheckReport


def splice_count_formula(sizes: List[int]) -> int:
    """(n-k)! prod n_i / (n-2k+2)! when n >= 2k-2, else 0."""
    n, k = sum(sizes), len(sizes)
    if n < 2 * k - 2:
        return 0
    return factorial(n - k) * prod(sizes) // factorial(n - 2 * k + 2)


def fiber_compositions(n: int, k: int) -> Iterator[List[int]]:
    """Compositions of n into k positive parts."""
    if k == 1:
        yield [n]
        return
    for first in range(1, n - k + 2):
        for rest in fiber_compositions(n - first, k - 1):
            yield [first] + rest


class SplicingService:
    """Splicing involutions of a tree and the words of the splicing polynomial"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _check_tree(self, tree: Forest, nu: VertexLabeling):
        if not tree.is_tree() or tree.k != nu.k:
            raise InvalidStructureError(f"{tree} is not a tree spanning <{nu.k}>")

    def splice_set(self, tree: Forest, nu: VertexLabeling, gamma: Optional[Coloring] = None) -> List[Permutation]:
        """
        Involutions whose transpositions project under nu onto the edges of the tree.

        Edges are visited in sorted order; each edge {a, b} takes one unused
        point of each fiber. With a coloring only same-colored points are paired.
        """
        self._check_tree(tree, nu)
        fibers = nu.fibers()
        used = [False] * nu.n
        pairs: List[tuple] = []
        result: List[Permutation] = []

        def place(position: int):
            if position == len(tree.edges):
                images = list(range(nu.n))
                for i, j in pairs:
                    images[i], images[j] = j, i
                result.append(Permutation(tuple(images)))
                return
            a, b = tree.edges[position]
            for i, j in product(fibers[a], fibers[b]):
                if used[i] or used[j]:
                    continue
                if gamma is not None and gamma(i) != gamma(j):
                    continue
                used[i] = used[j] = True
                pairs.append((i, j))
                place(position + 1)
                pairs.pop()
                used[i] = used[j] = False

        place(0)
        return result

    def splice_set_colored(self, tree: Forest, nu: VertexLabeling, gamma: Coloring) -> List[Permutation]:
        return self.splice_set(tree, nu, gamma)

    def splice_count_by_tree(self, tree: Forest, nu: VertexLabeling) -> int:
        """prod over vertices of n_i! / (n_i - deg_i)!, zero when a fiber is too small."""
        total = 1
        for vertex, size in enumerate(nu.fiber_sizes()):
            degree = tree.degree(vertex)
            if degree > size:
                return 0
            total *= factorial(size) // factorial(size - degree)
        return total

    def splice_count_check(self, nu: VertexLabeling) -> CheckReport:
        lhs = 0
        mismatched = []
        trees = 0
        for tree in enumerate_spanning_trees(nu.k):
            count = len(self.splice_set(tree, nu))
            if count != self.splice_count_by_tree(tree, nu):
                self.logger.error(f"per-tree splice count disagrees on {tree}: {count}")
                mismatched.append(str(tree))
            lhs += count
            trees += 1
        sizes = nu.fiber_sizes()
        rhs = splice_count_formula(sizes)
        passed = lhs == rhs and not mismatched
        self.logger.debug(f"splice count for fibers {sizes}: {lhs} vs {rhs}")
        return CheckReport(
            name="splice-count",
            passed=passed,
            lhs=str(lhs),
            rhs=str(rhs),
            details={"fiber_sizes": sizes, "trees": trees, "mismatched_trees": mismatched},
        )

    def splicing_cyclicity_check(self, theta: Permutation, nu: VertexLabeling, tree: Forest) -> CheckReport:
        nu.require_theta_invariant(theta)
        taus = self.splice_set(tree, nu)
        counts = [cycle_count(compose(theta, tau)) for tau in taus]
        return CheckReport(
            name="splicing-cyclicity",
            passed=all(c == 1 for c in counts),
            lhs=str(max(counts, default=1)),
            rhs="1",
            details={"theta": str(theta), "tree": str(tree), "splicings": len(taus)},
        )

    def canonical_splicing_polynomial(
        self, theta: Permutation, gamma: Coloring, nu: VertexLabeling, tree: Forest
    ) -> List[SplicingWord]:
        """One word per colored splicing involution, read along theta o tau from point 1."""
        nu.require_theta_invariant(theta)
        words = []
        for tau in self.splice_set(tree, nu, gamma):
            cycle_map = compose(theta, tau)
            letters = []
            x = 0
            for _ in range(theta.n):
                letters.append(Letter(x, nu(x), gamma(x), tau(x) == x))
                x = cycle_map(x)
            if x != 0 or len({letter.index for letter in letters}) != theta.n:
                raise InvalidStructureError(f"{theta} o {tau} is not a single cycle")
            words.append(SplicingWord(tau, tuple(letters)))
        self.logger.debug(f"{len(words)} splicing words for tree {tree}")
        return words
