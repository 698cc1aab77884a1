from typing import Callable, Dict, List
import logging

import numpy as np

from app.core.config import settings
from app.core.errors import InvalidStructureError
from app.models.forest import parse_forest
from app.models.permutation import Coloring, MapInstance, Permutation, permutation_with_cycle_type
from app.models.polynomial import RationalPolynomial, parse_polynomial
from app.models.splicing import VertexLabeling, parse_labeling
from app.schemas.sweep import SweepConfig, SweepReport
from app.schemas.verification import CheckReport, MainTheoremReport, VerificationSummary, VerifyRequest
from app.services.arboreal_service import ArborealService
from app.services.freewick_service import FreeWickService
from app.services.gausscumulant_service import GaussCumulantService
from app.services.guemc_service import GueMonteCarloService
from app.services.mapcount_service import MapCountService, instances_of_degree
from app.services.splicing_service import SplicingService, fiber_compositions

CHECKS = (
    "main",
    "malliavin",
    "bkar",
    "connected-bkar",
    "kirchhoff",
    "splice-count",
    "ghastly",
    "exact-and-scary",
    "bounds",
)


def main_report_as_check(report: MainTheoremReport) -> CheckReport:
    return CheckReport(
        name="main",
        passed=report.equal,
        lhs=str(report.lhs_count),
        rhs=report.rhs_value,
        details=report.model_dump(),
    )


def infer_dimension(polys: List[RationalPolynomial], tag: str) -> int:
    """Smallest dimension covering every coordinate index used."""
    indices = [max(var[1:]) for p in polys for var in p.variables() if var[0] == tag]
    return max(indices, default=0) + 1


class VerifyService:
    """Dispatches identity checks by name"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.arboreal_service = ArborealService()
        self.mapcount_service = MapCountService()
        self.splicing_service = SplicingService()
        self.freewick_service = FreeWickService(self.arboreal_service)
        self.gausscumulant_service = GaussCumulantService(self.arboreal_service)
        self.guemc_service = GueMonteCarloService(self.arboreal_service)
        self._dispatch: Dict[str, Callable[[VerifyRequest], List[CheckReport]]] = {
            "main": self.verify_main,
            "malliavin": self.verify_malliavin,
            "bkar": self.verify_bkar,
            "connected-bkar": self.verify_connected_bkar,
            "kirchhoff": self.verify_kirchhoff,
            "splice-count": self.verify_splice_count,
            "ghastly": self.verify_ghastly,
            "exact-and-scary": self.verify_exact_and_scary,
            "bounds": self.verify_bounds,
        }

    def run(self, check: str, request: VerifyRequest) -> VerificationSummary:
        if check not in self._dispatch:
            raise InvalidStructureError(f"unknown check {check!r}; choose one of {', '.join(CHECKS)}")
        reports = self._dispatch[check](request)
        summary = VerificationSummary.from_reports(check, reports)
        self.logger.info(f"verify {check}: {len(reports)} report(s), {'pass' if summary.passed else 'FAIL'}")
        return summary

    # ----- request parsing -----

    def _instance(self, request: VerifyRequest) -> MapInstance:
        if not request.theta:
            raise InvalidStructureError("this check needs --theta")
        return MapInstance.parse(request.theta, request.gamma, request.n)

    def _labeling(self, request: VerifyRequest, theta: Permutation) -> VertexLabeling:
        if request.nu:
            return parse_labeling(request.nu, theta.n)
        return VertexLabeling.for_theta(theta)

    def _functions(self, request: VerifyRequest) -> List[RationalPolynomial]:
        if not request.functions:
            raise InvalidStructureError("this check needs --functions")
        return [parse_polynomial(text) for text in request.functions]

    def _sym_polynomial(self, request: VerifyRequest):
        if not request.polynomial:
            raise InvalidStructureError("this check needs --polynomial")
        f = parse_polynomial(request.polynomial)
        k = request.k or infer_dimension([f], "Q")
        return f, k

    def _sweep_instances(self, request: VerifyRequest) -> List[MapInstance]:
        rng = np.random.default_rng(settings.DEFAULT_SEED if request.seed is None else request.seed)
        instances = []
        for n in request.sweep_n or []:
            for theta in instances_of_degree(n):
                instances.append(MapInstance(theta, Coloring.constant(n)))
                for _ in range(request.colorings):
                    colors = tuple(int(c) for c in rng.integers(0, n, size=n))
                    instances.append(MapInstance(theta, Coloring(colors)))
        return instances

    # ----- checks -----

    def verify_main(self, request: VerifyRequest) -> List[CheckReport]:
        instances = self._sweep_instances(request) if request.sweep_n else [self._instance(request)]
        return [
            main_report_as_check(self.freewick_service.main_theorem_check(inst.theta, inst.gamma, request.override_caps))
            for inst in instances
        ]

    def verify_bounds(self, request: VerifyRequest) -> List[CheckReport]:
        instances = self._sweep_instances(request) if request.sweep_n else [self._instance(request)]
        reports = []
        for inst in instances:
            if inst.gamma.is_constant():
                bound = self.mapcount_service.check_kahuna_bound(inst, request.override_caps)
                reports.append(CheckReport(
                    name=bound.name, passed=bound.holds, lhs=bound.lhs, rhs=bound.rhs, details={"theta": bound.theta}
                ))
            reports.append(self.freewick_service.arb_bound_check(inst.theta, inst.gamma, None, request.override_caps))
        return reports

    def verify_malliavin(self, request: VerifyRequest) -> List[CheckReport]:
        if request.grid:
            return list(self.gausscumulant_service.exhaustive_malliavin_grid(
                request.k_max or 2, request.n_max or 1, 2 if request.degree_max is None else request.degree_max
            ))
        functions = self._functions(request)
        if request.k is not None and request.k != len(functions):
            raise InvalidStructureError(f"--k {request.k} but {len(functions)} functions given")
        n = request.n or infer_dimension(functions, "x")
        return [self.gausscumulant_service.malliavin_check(functions, n)]

    def verify_bkar(self, request: VerifyRequest) -> List[CheckReport]:
        f, k = self._sym_polynomial(request)
        return [self.gausscumulant_service.bkar_check(f, k)]

    def verify_connected_bkar(self, request: VerifyRequest) -> List[CheckReport]:
        f, k = self._sym_polynomial(request)
        return [self.gausscumulant_service.connected_bkar_check(f, k)]

    def verify_kirchhoff(self, request: VerifyRequest) -> List[CheckReport]:
        ks = range(1, (request.k_max or 1) + 1) if request.k is None else [request.k]
        return [self.arboreal_service.kirchhoff_check(k) for k in ks]

    def verify_splice_count(self, request: VerifyRequest) -> List[CheckReport]:
        if request.n_max or request.k_max:
            reports = []
            for n in range(1, (request.n_max or 8) + 1):
                for k in range(1, min(n, request.k_max or 4) + 1):
                    for sizes in fiber_compositions(n, k):
                        reports.append(self.splicing_service.splice_count_check(VertexLabeling.from_fiber_sizes(sizes)))
            return reports
        if request.theta:
            theta = self._instance(request).theta
            return [self.splicing_service.splice_count_check(self._labeling(request, theta))]
        if request.nu:
            labels = [int(t) for t in request.nu.replace(",", " ").split()]
            return [self.splicing_service.splice_count_check(parse_labeling(request.nu, len(labels)))]
        raise InvalidStructureError("splice-count needs --nu, --theta or --n-max/--k-max")

    def verify_ghastly(self, request: VerifyRequest) -> List[CheckReport]:
        inst = self._instance(request)
        nu = self._labeling(request, inst.theta)
        N = request.N or 1
        if request.tree is not None:
            trees = [parse_forest(request.tree, nu.k)]
        else:
            trees = self.arboreal_service.spanning_trees(nu.k)
        return [self.guemc_service.ghastly_identity_check(inst.theta, inst.gamma, nu, tree, N) for tree in trees]

    def verify_exact_and_scary(self, request: VerifyRequest) -> List[CheckReport]:
        inst = self._instance(request)
        Ns = [request.N] if request.N else list(range(1, settings.GHASTLY_MAX_N + 1))
        return [self.guemc_service.exact_and_scary_check(inst.theta, inst.gamma, N) for N in Ns]

    # ----- sweeps -----

    def run_sweep(self, config: SweepConfig, override_caps: bool = False) -> SweepReport:
        """Generating tables per shape, the counting bound per entry, and the main identity per listed instance."""
        report = SweepReport()
        for shape in config.shapes:
            rows = self.mapcount_service.generating_table(
                shape, [config.max_order] * len(shape), config.degree_cap, config.workers
            )
            report.rows.extend(rows)
            if config.check_bounds:
                for row in rows:
                    lengths = [m for v, m in zip(row.orders, row.shape) for _ in range(v)]
                    inst = MapInstance(permutation_with_cycle_type(lengths), Coloring.constant(row.degree))
                    report.bounds.append(self.mapcount_service.check_kahuna_bound(inst, override_caps=True))
        for spec in config.instances:
            inst = spec.to_instance()
            caps = override_caps or spec.override_caps
            report.checks.append(main_report_as_check(self.freewick_service.main_theorem_check(inst.theta, inst.gamma, caps)))
            if spec.nu is not None:
                nu = parse_labeling(spec.nu, inst.n)
                report.checks.append(self.freewick_service.arb_bound_check(inst.theta, inst.gamma, nu, caps))
        self.logger.info(
            f"sweep: {len(report.rows)} table rows, {len(report.bounds)} bounds, {len(report.checks)} instance checks"
        )
        return report
