from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

from app.core.config import settings
from app.core.errors import CapExceededError, SizeMismatchError
from app.models.forest import Forest, weight_matrix
from app.models.partition import (
    SetPartition,
    enumerate_partitions,
    moebius,
    partition_matrix,
)
from app.models.polynomial import Monomial, RationalPolynomial, Variable, sum_polynomials
from app.schemas.verification import CheckReport
from app.services.arboreal_service import ArborealService

CovarianceFn = Callable[[Variable, Variable], object]


def wick_expectation(
    poly: RationalPolynomial,
    cov: CovarianceFn,
    is_gaussian: Optional[Callable[[Variable], bool]] = None,
) -> RationalPolynomial:
    """
    E poly for centered jointly Gaussian variables with covariance ``cov``.

    Variables rejected by ``is_gaussian`` are treated as constants. The
    moment of a monomial pairs one copy of its first variable with every
    remaining copy (Isserlis) and recurses on the exponent vector.
    """
    gaussian = is_gaussian or (lambda var: True)
    cov_cache: Dict[Tuple[Variable, Variable], RationalPolynomial] = {}
    memo: Dict[Monomial, RationalPolynomial] = {}

    def c(a: Variable, b: Variable) -> RationalPolynomial:
        key = (a, b) if a <= b else (b, a)
        if key not in cov_cache:
            cov_cache[key] = RationalPolynomial.lift(cov(*key))
        return cov_cache[key]

    def moment(state: Monomial) -> RationalPolynomial:
        if not state:
            return RationalPolynomial.one()
        if state in memo:
            return memo[state]
        first, exp = state[0]
        reduced = [(first, exp - 1)] + list(state[1:])
        total = RationalPolynomial.zero()
        for index, (other, copies) in enumerate(reduced):
            if not copies:
                continue
            pair = c(first, other)
            if not pair:
                continue
            rest = list(reduced)
            rest[index] = (other, copies - 1)
            rest_state = tuple(p for p in rest if p[1])
            inner = moment(rest_state)
            if inner:
                total = total + pair * inner * copies
        memo[state] = total
        return total

    terms = []
    for mono, coeff in poly.terms.items():
        gaussian_part = tuple(p for p in mono if gaussian(p[0]))
        if sum(e for _, e in gaussian_part) % 2:
            continue
        value = moment(gaussian_part)
        if not value:
            continue
        params = {v: e for v, e in mono if not gaussian(v)}
        terms.append(value * RationalPolynomial.monomial(params, coeff))
    return sum_polynomials(terms)


def standard_covariance(a: Variable, b: Variable) -> int:
    """Independent standard Gaussians."""
    return 1 if a == b else 0


def monomials(n: int, max_degree: int) -> List[RationalPolynomial]:
    """All monic monomials in x_1..x_n of degree <= max_degree."""
    result = []
    for degree in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), degree):
            powers: Dict[Variable, int] = {}
            for j in combo:
                powers[("x", j)] = powers.get(("x", j), 0) + 1
            result.append(RationalPolynomial.monomial(powers))
    return result


class GaussCumulantService:
    """Gaussian joint cumulants, tree operators and the forest interpolation identities"""

    def __init__(self, arboreal_service: Optional[ArborealService] = None):
        self.logger = logging.getLogger(__name__)
        self.arboreal_service = arboreal_service or ArborealService()

    # ----- polynomial operations -----

    def wick_expectation(self, poly: RationalPolynomial, cov: CovarianceFn, is_gaussian=None) -> RationalPolynomial:
        return wick_expectation(poly, cov, is_gaussian)

    def tensor_product(self, functions: Sequence[RationalPolynomial], n: int) -> RationalPolynomial:
        """Row i of Mat_{k x n} carries the variables of f_i."""
        result = RationalPolynomial.one()
        for i, f in enumerate(functions):
            for var in f.variables():
                if var[0] != "x" or not 0 <= var[1] < n:
                    raise SizeMismatchError(f"f_{i + 1} uses {var}, outside the coordinates x1..x{n}")
            result = result * f.rename(lambda var, i=i: ("X", i, var[1]))
        return result

    def tree_operator(self, tree: Forest, f: RationalPolynomial, n: int) -> RationalPolynomial:
        """prod over edges {i, i'} of sum_j D_ij D_i'j."""
        for a, b in tree.edges:
            f = sum_polynomials(
                f.derivative(("X", a, j)).derivative(("X", b, j)) for j in range(n)
            )
            if not f:
                break
        return f

    def forest_derivative(self, forest: Forest, f: RationalPolynomial) -> RationalPolynomial:
        """prod over edges of the directional derivative along e_ij + e_ji, i.e. d/dQ(i,j)."""
        for a, b in forest.edges:
            f = f.derivative(("Q", a, b))
        return f

    def at_matrix(self, f: RationalPolynomial, matrix: Sequence[Sequence[object]]) -> RationalPolynomial:
        """Substitute Q(i,j) by matrix[i][j]."""
        mapping = {var: matrix[var[1]][var[2]] for var in f.variables() if var[0] == "Q"}
        return f.substitute(mapping)

    def at_weight_matrix(self, f: RationalPolynomial, forest: Forest) -> RationalPolynomial:
        wt = weight_matrix(forest)
        mapping = {var: wt.polynomial(var[1], var[2]) for var in f.variables() if var[0] == "Q"}
        return f.substitute(mapping)

    # ----- cumulants and the tree expansion -----

    def _matrix_covariance(self, entry: Callable[[int, int], object]) -> CovarianceFn:
        def cov(a: Variable, b: Variable):
            if a[2] != b[2]:
                return 0
            return entry(a[1], b[1])

        return cov

    def gaussian_joint_cumulant(self, functions: Sequence[RationalPolynomial], n: int):
        """sum over partitions Phi of mu(Phi : 1_k) E (f_1 x ... x f_k)(sqrt([Phi]) Z)."""
        k = len(functions)
        product_poly = self.tensor_product(functions, n)
        top = SetPartition.one(k)
        total = Fraction(0)
        for phi in enumerate_partitions(k):
            weight = moebius(phi, top)
            matrix = partition_matrix(phi)
            value = wick_expectation(product_poly, self._matrix_covariance(lambda i, j: matrix[i][j]))
            total += weight * value.constant_term()
        return total

    def malliavin_rhs(self, functions: Sequence[RationalPolynomial], n: int):
        """sum over trees T of E (L_T (f_1 x ... x f_k))(sqrt(wt_T) Z)."""
        k = len(functions)
        product_poly = self.tensor_product(functions, n)
        total = Fraction(0)
        for tree in self.arboreal_service.spanning_trees(k):
            derived = self.tree_operator(tree, product_poly, n)
            if not derived:
                continue
            wt = weight_matrix(tree)
            moment = wick_expectation(derived, self._matrix_covariance(wt.polynomial))
            total += self.arboreal_service.expectation_over_weights(tree, moment)
        return total

    def malliavin_check(self, functions: Sequence[RationalPolynomial], n: int) -> CheckReport:
        lhs = self.gaussian_joint_cumulant(functions, n)
        rhs = self.malliavin_rhs(functions, n)
        passed = lhs == rhs
        if not passed:
            self.logger.warning(f"tree expansion of the cumulant fails: {lhs} != {rhs}")
        return CheckReport(
            name="malliavin",
            passed=passed,
            lhs=str(lhs),
            rhs=str(rhs),
            details={"functions": [str(f) for f in functions], "n": n},
        )

    def exhaustive_malliavin_grid(self, k_max: int, n_max: int, degree_max: int) -> Iterator[CheckReport]:
        """Every multiset of k monic monomials, k <= k_max, in n <= n_max variables of degree <= degree_max."""
        for n in range(1, n_max + 1):
            basis = monomials(n, degree_max)
            for k in range(1, k_max + 1):
                for combo in combinations_with_replacement(basis, k):
                    yield self.malliavin_check(list(combo), n)

    # ----- forest interpolation -----

    def _guard(self, f: RationalPolynomial, k: int):
        if k > settings.BKAR_MAX_K or f.degree() > settings.BKAR_MAX_DEGREE:
            raise CapExceededError(
                f"forest identity refused for k={k}, degree {f.degree()}",
                "raise PLANARMAP_BKAR_MAX_K or PLANARMAP_BKAR_MAX_DEGREE",
            )
        for var in f.variables():
            if var[0] != "Q" or var[2] >= k:
                raise SizeMismatchError(f"{var} is not a coordinate of Sym_{k}")

    def _forest_sum(self, f: RationalPolynomial, forests: Sequence[Forest]):
        total = Fraction(0)
        for forest in forests:
            derived = self.forest_derivative(forest, f)
            if not derived:
                continue
            total += self.arboreal_service.expectation_over_weights(forest, self.at_weight_matrix(derived, forest))
        return total

    def bkar_check(self, f: RationalPolynomial, k: int) -> CheckReport:
        """f([1_k]) == sum over forests of E (d_F f)(wt_F)."""
        self._guard(f, k)
        lhs = self.at_matrix(f, partition_matrix(SetPartition.one(k))).constant_term()
        rhs = self._forest_sum(f, self.arboreal_service.forests(k))
        return CheckReport(name="bkar", passed=lhs == rhs, lhs=str(lhs), rhs=str(rhs), details={"f": str(f), "k": k})

    def generalized_bkar_check(self, f: RationalPolynomial, k: int, pi: SetPartition) -> CheckReport:
        """f([Pi]) == sum over forests with every edge inside a block of Pi."""
        self._guard(f, k)
        owner = pi.block_of()
        forests = [
            forest for forest in self.arboreal_service.forests(k)
            if all(owner[a] == owner[b] for a, b in forest.edges)
        ]
        lhs = self.at_matrix(f, partition_matrix(pi)).constant_term()
        rhs = self._forest_sum(f, forests)
        return CheckReport(
            name="generalized-bkar", passed=lhs == rhs, lhs=str(lhs), rhs=str(rhs),
            details={"f": str(f), "k": k, "partition": str(pi)},
        )

    def connected_bkar_check(self, f: RationalPolynomial, k: int) -> CheckReport:
        """sum over Pi of mu(Pi : 1_k) f([Pi]) == sum over trees of E (d_T f)(wt_T)."""
        self._guard(f, k)
        top = SetPartition.one(k)
        lhs = sum(
            (moebius(pi, top) * self.at_matrix(f, partition_matrix(pi)).constant_term() for pi in enumerate_partitions(k)),
            Fraction(0),
        )
        rhs = self._forest_sum(f, self.arboreal_service.spanning_trees(k))
        return CheckReport(
            name="connected-bkar", passed=lhs == rhs, lhs=str(lhs), rhs=str(rhs), details={"f": str(f), "k": k}
        )

    # ----- the two-function identity -----

    def interpolation_integral(self, f: RationalPolynomial, g: RationalPolynomial, n: int) -> Fraction:
        """
        int_0^1 E grad f(y) . grad g(t y + sqrt(1 - t^2) w) dt.

        The square root is carried as a symbol s; after the Gaussian
        expectation over y and w only even powers s^(2m) survive and become
        (1 - t^2)^m, leaving a polynomial in t integrated exactly.
        """
        t, s = RationalPolynomial.variable(("t",)), RationalPolynomial.variable(("s",))
        mixed = {("x", j): t * RationalPolynomial.variable(("y", j)) + s * RationalPolynomial.variable(("w", j)) for j in range(n)}
        integrand = sum_polynomials(
            f.derivative(("x", j)).rename(lambda var: ("y", var[1])) * g.derivative(("x", j)).substitute(mixed)
            for j in range(n)
        )
        expectation = wick_expectation(integrand, standard_covariance, lambda var: var[0] in ("y", "w"))
        one_minus_t2 = RationalPolynomial.one() - t * t
        in_t = sum_polynomials(
            RationalPolynomial.monomial({v: e for v, e in mono if v != ("s",)}, coeff)
            * one_minus_t2 ** (dict(mono).get(("s",), 0) // 2)
            for mono, coeff in expectation.terms.items()
        )
        total = Fraction(0)
        for mono, coeff in in_t.terms.items():
            total += coeff * Fraction(1, dict(mono).get(("t",), 0) + 1)
        return total

    def covariance_identity_check(self, f: RationalPolynomial, g: RationalPolynomial, n: int) -> CheckReport:
        covariance = self.gaussian_joint_cumulant([f, g], n)
        tree_sum = self.malliavin_rhs([f, g], n)
        integral = self.interpolation_integral(f, g, n)
        passed = covariance == tree_sum == integral
        return CheckReport(
            name="covariance-identity",
            passed=passed,
            lhs=str(covariance),
            rhs=str(tree_sum),
            details={"f": str(f), "g": str(g), "n": n, "interpolation_integral": str(integral)},
        )


def random_polynomial(rng, n: int, max_degree: int, terms: int = 3) -> RationalPolynomial:
    """Small random polynomial in x_1..x_n with integer coefficients in [-3, 3]."""
    basis = monomials(n, max_degree)
    poly = RationalPolynomial.zero()
    for _ in range(terms):
        poly = poly + basis[int(rng.integers(len(basis)))] * int(rng.integers(-3, 4))
    return poly
