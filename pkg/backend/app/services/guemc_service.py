from fractions import Fraction
from math import prod
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import CapExceededError, InvalidStructureError
from app.models.forest import Forest, weight_matrix
from app.models.partition import joint_cumulant
from app.models.permutation import (
    Coloring,
    MapInstance,
    Permutation,
    cycle_count,
    compose,
    double_factorial,
    enumerate_matchings,
)
from app.models.polynomial import GaussianRational, I, RationalPolynomial, sum_polynomials
from app.models.splicing import VertexLabeling
from app.schemas.montecarlo import ConvergencePoint, ConvergenceReport
from app.schemas.verification import CheckReport
from app.services.arboreal_service import ArborealService
from app.services.mapcount_service import MapCountService
from app.services.splicing_service import SplicingService

PolyMatrix = List[List[RationalPolynomial]]


def sample_gue(N: int, rng: np.random.Generator, batch: Optional[int] = None) -> np.ndarray:
    """
    Hermitian matrices with E X(i,j) X(i',j') = delta(i,j') delta(i',j).

    The diagonal is real N(0,1); off-diagonal real and imaginary parts are
    independent N(0,1/2).
    """
    shape = (N, N) if batch is None else (batch, N, N)
    H = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return (H + np.swapaxes(H, -1, -2).conj()) / 2


def _cycle_shift(m: int) -> Permutation:
    return Permutation(tuple((x + 1) % m for x in range(m)))


def gue_moment_exact(m: int, N: int) -> int:
    """E tr X^m = sum over pairings pi of N^(number of cycles of shift o pi)."""
    if m == 0:
        return N
    if m % 2:
        return 0
    shift = _cycle_shift(m)
    return sum(N ** cycle_count(compose(shift, pi)) for pi in enumerate_matchings(m))


# ----- finite-N polynomial matrices -----

def hat_matrix(key: Tuple, N: int) -> PolyMatrix:
    """
    N x N matrix of GUE entries in real variables ("u", *key, a, b).

    Diagonal u(a,a) has variance 1; off-diagonal u have variance 1/2 and
    entry (a,b) is u(a,b) + i u(b,a) above the diagonal, u(b,a) - i u(a,b) below.
    """

    def u(a: int, b: int) -> RationalPolynomial:
        return RationalPolynomial.variable(("u",) + tuple(key) + (a, b))

    rows = []
    for a in range(N):
        row = []
        for b in range(N):
            if a == b:
                row.append(u(a, a))
            elif a < b:
                row.append(u(a, b) + u(b, a) * I)
            else:
                row.append(u(b, a) - u(a, b) * I)
        rows.append(row)
    return rows


def matmul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    N = len(A)
    return [[sum_polynomials(A[a][c] * B[c][b] for c in range(N)) for b in range(N)] for a in range(N)]


def trace_of_product(matrices: Sequence[PolyMatrix], N: int) -> RationalPolynomial:
    if not matrices:
        return RationalPolynomial.constant(N)
    result = matrices[0]
    for M in matrices[1:]:
        result = matmul(result, M)
    return sum_polynomials(result[a][a] for a in range(N))


def entry_variance(var) -> Fraction:
    a, b = var[-2], var[-1]
    return Fraction(1) if a == b else Fraction(1, 2)


def real_part_if_real(value):
    if isinstance(value, GaussianRational) and value.im == 0:
        return value.re
    return value


def independent_expectation(poly: RationalPolynomial):
    """E poly when every variable is an independent centered Gaussian with entry_variance."""
    total = 0
    for mono, coeff in poly.terms.items():
        if any(e % 2 for _, e in mono):
            continue
        total = coeff * prod((entry_variance(v) ** (e // 2) * double_factorial(e - 1) for v, e in mono), start=Fraction(1)) + total
    return real_part_if_real(total)


class GueMonteCarloService:
    """GUE sampling for the large-N cumulant limit and exact finite-N identities"""

    def __init__(self, arboreal_service: Optional[ArborealService] = None):
        self.logger = logging.getLogger(__name__)
        self.arboreal_service = arboreal_service or ArborealService()
        self.splicing_service = SplicingService()
        self.mapcount_service = MapCountService()

    # ----- sampling -----

    def sample_gue(self, N: int, seed: Optional[int] = None) -> np.ndarray:
        if N < 1:
            raise InvalidStructureError(f"matrix size must be positive, got {N}")
        return sample_gue(N, np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed))

    def trace_observables(self, theta: Permutation, gamma: Coloring, N: int, samples: int, rng: np.random.Generator) -> np.ndarray:
        """Array (samples, k) of tr(X_gamma(i_1) ... X_gamma(i_m)) per cycle, one GUE per color."""
        cycles = theta.cycles()
        colors = sorted(set(gamma.colors))
        batch_size = max(1, settings.MC_BATCH)
        chunks = []
        remaining = samples
        while remaining > 0:
            batch = min(batch_size, remaining)
            draws = {c: sample_gue(N, rng, batch) for c in colors}
            columns = []
            for cycle in cycles:
                product_matrix = draws[gamma(cycle[0])]
                for x in cycle[1:]:
                    product_matrix = product_matrix @ draws[gamma(x)]
                columns.append(np.trace(product_matrix, axis1=1, axis2=2))
            chunks.append(np.stack(columns, axis=1))
            remaining -= batch
        return np.concatenate(chunks, axis=0)

    @staticmethod
    def empirical_cumulant(observables: np.ndarray) -> complex:
        k = observables.shape[1]

        def moment(block: FrozenSet[int]) -> complex:
            return complex(np.prod(observables[:, sorted(block)], axis=1).mean())

        return joint_cumulant(moment, k)

    def thooft_estimate(
        self, theta: Permutation, gamma: Coloring, N: int, samples: int, seed: int
    ) -> ConvergencePoint:
        """Empirical joint cumulant of the cycle traces over N^(2 + n/2 - k), with a block jackknife error."""
        if samples < 2:
            raise InvalidStructureError(f"need at least 2 samples, got {samples}")
        rng = np.random.default_rng(seed)
        observables = self.trace_observables(theta, gamma, N, samples, rng)
        k = observables.shape[1]
        scale = float(N) ** (2 + theta.n / 2 - k)
        estimate = self.empirical_cumulant(observables).real / scale

        blocks = np.array_split(np.arange(samples), min(settings.JACKKNIFE_BLOCKS, samples))
        leave_out = []
        for block in blocks:
            mask = np.ones(samples, dtype=bool)
            mask[block] = False
            leave_out.append(self.empirical_cumulant(observables[mask]).real / scale)
        leave_out = np.array(leave_out)
        B = len(blocks)
        standard_error = float(np.sqrt((B - 1) / B * np.sum((leave_out - leave_out.mean()) ** 2)))
        self.logger.debug(f"tHooft estimate {theta} N={N}: {estimate:.4f} +- {standard_error:.4f}")
        return ConvergencePoint(N=N, samples=samples, seed=seed, estimate=float(estimate), standard_error=standard_error)

    def convergence_report(
        self,
        theta: Permutation,
        gamma: Coloring,
        grid: Optional[Sequence[int]] = None,
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> ConvergenceReport:
        grid = list(grid or settings.MC_GRID)
        samples = settings.MC_SAMPLES if samples is None else samples
        seed = settings.DEFAULT_SEED if seed is None else seed
        target = self.mapcount_service.count_map0(MapInstance(theta, gamma)).planar
        children = np.random.SeedSequence(seed).spawn(len(grid))
        points = []
        for N, child in zip(grid, children):
            child_seed = int(child.generate_state(1)[0])
            points.append(self.thooft_estimate(theta, gamma, N, samples, child_seed))
            self.logger.info(f"N={N}: estimate {points[-1].estimate:.4f} (target {target})")
        largest = max(points, key=lambda p: p.N)
        smallest = min(points, key=lambda p: p.N)
        error_large = abs(largest.estimate - target)
        error_small = abs(smallest.estimate - target)
        # the error may not grow by more than 5 combined standard errors
        slack = 5 * float(np.hypot(largest.standard_error, smallest.standard_error))
        return ConvergenceReport(
            theta=theta.to_cycle_notation(),
            gamma=gamma.to_text(),
            seed=seed,
            target=target,
            points=points,
            within_tolerance=error_large <= 5 * largest.standard_error,
            improves_with_N=error_large <= error_small + slack,
        )

    # ----- exact finite-N identities -----

    def _guard(self, theta: Permutation, N: int, k: int):
        if N > settings.GHASTLY_MAX_N or theta.n > settings.GHASTLY_MAX_POINTS or k > settings.GHASTLY_MAX_VERTICES:
            raise CapExceededError(
                f"finite-N symbolic check refused for N={N}, n={theta.n}, k={k}",
                "raise PLANARMAP_GHASTLY_MAX_N / _MAX_POINTS / _MAX_VERTICES",
            )

    def tree_operator_finite(self, tree: Forest, f: RationalPolynomial, colors: Sequence[int], N: int) -> RationalPolynomial:
        """prod over edges {i,i'} of sum over colors j and a, b of the mixed second partial in x_ij(a,b), x_i'j(a,b)."""
        for i, i2 in tree.edges:
            terms = []
            for j in colors:
                for a in range(N):
                    for b in range(N):
                        d = f.derivative(("u", i, j, a, b)).derivative(("u", i2, j, a, b))
                        if d:
                            terms.append(d if a == b else d * Fraction(1, 2))
            f = sum_polynomials(terms)
        return f

    def ghastly_identity_check(
        self, theta: Permutation, gamma: Coloring, nu: VertexLabeling, tree: Forest, N: int
    ) -> CheckReport:
        nu.require_theta_invariant(theta)
        self._guard(theta, N, nu.k)
        matrices: Dict[Tuple[int, int], PolyMatrix] = {}

        def X(x: int) -> PolyMatrix:
            key = (nu(x), gamma(x))
            if key not in matrices:
                matrices[key] = hat_matrix(key, N)
            return matrices[key]

        product_of_traces = prod(
            (trace_of_product([X(x) for x in cycle], N) for cycle in theta.cycles()), start=RationalPolynomial.one()
        )
        lhs = self.tree_operator_finite(tree, product_of_traces, sorted(set(gamma.colors)), N)
        rhs = sum_polynomials(
            trace_of_product([X(letter.index) for letter in word.kept_letters()], N)
            for word in self.splicing_service.canonical_splicing_polynomial(theta, gamma, nu, tree)
        )
        passed = lhs == rhs
        if not passed:
            self.logger.warning(f"finite-N splicing identity fails for {theta}, tree {tree}, N={N}")
        return CheckReport(
            name="ghastly",
            passed=passed,
            lhs=str(lhs),
            rhs=str(rhs),
            details={"theta": theta.to_cycle_notation(), "gamma": gamma.to_text(), "tree": tree.to_text(), "N": N},
        )

    def finite_n_cumulant(self, theta: Permutation, gamma: Coloring, N: int):
        """kappa(tr(X...), ..., tr(X...)) exactly, one GUE per color."""
        self._guard(theta, N, len(theta.cycles()))
        traces = [
            trace_of_product([hat_matrix((gamma(x),), N) for x in cycle], N) for cycle in theta.cycles()
        ]

        def moment(block: FrozenSet[int]):
            return independent_expectation(prod((traces[i] for i in sorted(block)), start=RationalPolynomial.one()))

        return real_part_if_real(joint_cumulant(moment, len(traces)))

    def tree_trace_expectation(self, theta: Permutation, gamma: Coloring, nu: VertexLabeling, tree: Forest, N: int):
        """E tr of the splicing polynomial at the wt-mixed GUE family, by the genus expansion of each word."""
        wt = weight_matrix(tree)
        moment = RationalPolynomial.zero()
        for word in self.splicing_service.canonical_splicing_polynomial(theta, gamma, nu, tree):
            letters = word.kept_letters()
            m = len(letters)
            if m == 0:
                moment = moment + N
                continue
            shift = _cycle_shift(m)
            for pi in enumerate_matchings(m):
                weight = RationalPolynomial.one()
                for a, b in pi.pairs():
                    if letters[a].color != letters[b].color:
                        weight = RationalPolynomial.zero()
                        break
                    weight = weight * wt.polynomial(letters[a].vertex, letters[b].vertex)
                if weight:
                    moment = moment + weight * N ** cycle_count(compose(shift, pi))
        return self.arboreal_service.expectation_over_weights(tree, moment)

    def exact_and_scary_check(self, theta: Permutation, gamma: Coloring, N: int) -> CheckReport:
        nu = VertexLabeling.for_theta(theta)
        self._guard(theta, N, nu.k)
        lhs = self.finite_n_cumulant(theta, gamma, N)
        rhs = sum(
            (self.tree_trace_expectation(theta, gamma, nu, tree, N) for tree in self.arboreal_service.spanning_trees(nu.k)),
            Fraction(0),
        )
        passed = lhs == rhs
        return CheckReport(
            name="exact-and-scary",
            passed=passed,
            lhs=str(lhs),
            rhs=str(rhs),
            details={"theta": theta.to_cycle_notation(), "gamma": gamma.to_text(), "N": N},
        )
