from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial, prod
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple
import logging

from app.core.config import settings
from app.core.errors import CapExceededError, InvalidStructureError
from app.models.forest import Forest, weight_matrix
from app.models.ncpairing import enumerate_nc_pairings
from app.models.permutation import Coloring, MapInstance, Permutation
from app.models.polynomial import RationalPolynomial
from app.models.splicing import VertexLabeling
from app.schemas.verification import CheckReport, MainTheoremReport, TreeContribution
from app.services.arboreal_service import ArborealService
from app.services.mapcount_service import MapCountService
from app.services.splicing_service import SplicingService

Covariance = Callable[[Hashable, Hashable], object]


def semicircular_moment(word: Sequence[Hashable], cov: Covariance):
    """
    phi(z_1 ... z_m) for a free semicircular family: the sum over non-crossing
    pairings of the product of pair covariances.

    Pairing position ``start`` with ``j`` splits the word into the inside
    (start, j) and the outside (j, end), so intervals are memoized.
    """
    if len(word) % 2:
        return 0
    memo: Dict[Tuple[int, int], object] = {}

    def interval(start: int, end: int):
        if start >= end:
            return 1
        key = (start, end)
        if key in memo:
            return memo[key]
        total = 0
        for j in range(start + 1, end, 2):
            c = cov(word[start], word[j])
            if not c:
                continue
            inside = interval(start + 1, j)
            if not inside:
                continue
            outside = interval(j + 1, end)
            if outside:
                total = c * inside * outside + total
        memo[key] = total
        return total

    return interval(0, len(word))


def arb_bound(theta: Permutation) -> Fraction:
    """2^(n-2k+2) (n-k)! prod n_i / (n-2k+2)!, or 0 when n < 2k-2."""
    sizes = [len(c) for c in theta.cycles()]
    n, k = theta.n, len(sizes)
    if n < 2 * k - 2:
        return Fraction(0)
    return Fraction(2 ** (n - 2 * k + 2) * factorial(n - k) * prod(sizes), factorial(n - 2 * k + 2))


@dataclass
class ArbEvaluation:
    value: Fraction
    per_tree: List[TreeContribution] = field(default_factory=list)


class FreeWickService:
    """Free-Wick evaluation of the tree expansion and the main counting identity"""

    def __init__(self, arboreal_service: Optional[ArborealService] = None):
        self.logger = logging.getLogger(__name__)
        self.arboreal_service = arboreal_service or ArborealService()
        self.splicing_service = SplicingService()
        self.mapcount_service = MapCountService()

    def semicircular_moment(self, word: Sequence[Hashable], cov: Covariance):
        return semicircular_moment(word, cov)

    def nc_matching_count(self, theta: Permutation, gamma: Coloring) -> int:
        """Non-crossing color-respecting matchings of the single cycle of theta, read from point 1."""
        cycles = theta.cycles()
        if len(cycles) != 1:
            raise InvalidStructureError(f"{theta} is not a single cycle")
        colors = [gamma(x) for x in cycles[0]]
        return sum(
            1 for pairing in enumerate_nc_pairings(len(colors))
            if all(colors[a] == colors[b] for a, b in pairing.pairs)
        )

    def _tree_covariance(self, tree: Forest) -> Covariance:
        matrix = weight_matrix(tree)

        def cov(a, b):
            (va, ca), (vb, cb) = a, b
            if ca != cb:
                return 0
            return matrix.polynomial(va, vb)

        return cov

    def arb_evaluate(
        self,
        theta: Permutation,
        gamma: Coloring,
        nu: Optional[VertexLabeling] = None,
        override_caps: bool = False,
    ) -> ArbEvaluation:
        """Sum over spanning trees of the uniform-weight expectation of the free-Wick moments of the splicing words."""
        nu = nu or VertexLabeling.for_theta(theta)
        nu.require_theta_invariant(theta)
        n, k = theta.n, nu.k
        if n % 2 or n < 2 * k - 2:
            return ArbEvaluation(Fraction(0))
        kept_length = n - 2 * k + 2
        if kept_length > settings.MAX_KEPT_WORD_LENGTH and not override_caps:
            raise CapExceededError(
                f"kept words of length {kept_length} exceed {settings.MAX_KEPT_WORD_LENGTH}",
                "pass --override-caps or raise PLANARMAP_MAX_KEPT_WORD_LENGTH",
            )

        total = Fraction(0)
        breakdown = []
        for tree in self.arboreal_service.spanning_trees(k):
            words = self.splicing_service.canonical_splicing_polynomial(theta, gamma, nu, tree)
            cov = self._tree_covariance(tree)
            moments: Dict[Tuple, object] = {}
            poly = RationalPolynomial.zero()
            for word in words:
                letters = tuple((letter.vertex, letter.color) for letter in word.kept_letters())
                if letters not in moments:
                    moments[letters] = semicircular_moment(letters, cov)
                poly = poly + moments[letters]
            value = self.arboreal_service.expectation_over_weights(tree, poly)
            breakdown.append(TreeContribution(tree=tree.to_text(), splicings=len(words), value=str(value)))
            total += value
        self.logger.debug(f"arb_evaluate {theta} gamma={gamma.to_text()}: {total}")
        return ArbEvaluation(total, breakdown)

    def main_theorem_check(self, theta: Permutation, gamma: Coloring, override_caps: bool = False) -> MainTheoremReport:
        lhs = self.mapcount_service.count_map0(MapInstance(theta, gamma), override_caps).planar
        nu = VertexLabeling.for_theta(theta)
        rhs = self.arb_evaluate(theta, gamma, nu, override_caps)
        equal = rhs.value == lhs
        if not equal:
            self.logger.warning(f"main identity fails for {theta}, gamma={gamma.to_text()}: {lhs} != {rhs.value}")
        return MainTheoremReport(
            theta=theta.to_cycle_notation(),
            gamma=gamma.to_text(),
            nu=nu.to_text(),
            lhs_count=lhs,
            rhs_value=str(rhs.value),
            equal=equal,
            per_tree_breakdown=rhs.per_tree,
        )

    def arb_bound_check(
        self, theta: Permutation, gamma: Coloring, nu: Optional[VertexLabeling] = None, override_caps: bool = False
    ) -> CheckReport:
        value = self.arb_evaluate(theta, gamma, nu, override_caps).value
        bound = arb_bound(theta)
        return CheckReport(
            name="arb-bound",
            passed=abs(value) <= bound,
            lhs=str(value),
            rhs=str(bound),
            details={"theta": theta.to_cycle_notation(), "gamma": gamma.to_text()},
        )

    def arb_nu_independence_check(self, theta: Permutation, gamma: Coloring, override_caps: bool = False) -> CheckReport:
        """Evaluate under every numbering of the cycles of theta; all values must agree."""
        base = VertexLabeling.for_theta(theta)
        values = {}
        for relabel in permutations(range(base.k)):
            nu = VertexLabeling(tuple(relabel[v] for v in base.nu))
            values[nu.to_text()] = self.arb_evaluate(theta, gamma, nu, override_caps).value
        distinct = set(values.values())
        reference = values[base.to_text()]
        return CheckReport(
            name="arb-nu-independence",
            passed=len(distinct) == 1,
            lhs=str(reference),
            rhs=",".join(sorted(str(v) for v in distinct)),
            details={"labelings": len(values)},
        )
