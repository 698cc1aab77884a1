"""
Command-line front door: ``count``, ``verify``, ``sweep`` and ``mc``.

Reports are JSON on stdout; logs go to stderr. Exit codes: 0 all checks
pass, 1 a check failed, 2 usage or parse error, 3 resource cap.
"""
from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import logging
import sys

import pandas as pd
from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.errors import CapExceededError, PlanarMapError
from app.core.logging import configure_logging
from app.models.permutation import MapInstance
from app.schemas.mapcount import GeneratingTableRequest, GeneratingTableRow
from app.schemas.montecarlo import MonteCarloRequest
from app.schemas.sweep import SweepConfig, SweepReport
from app.schemas.verification import VerifyRequest
from app.services.guemc_service import GueMonteCarloService
from app.services.mapcount_service import MapCountService
from app.services.verify_service import CHECKS, VerifyService

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3

logger = logging.getLogger(__name__)


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def emit(model: BaseModel) -> None:
    sys.stdout.write(model.model_dump_json(indent=2) + "\n")


def table_frame(rows: Sequence[GeneratingTableRow]) -> pd.DataFrame:
    frame = pd.DataFrame([row.model_dump() for row in rows])
    for column in ("shape", "orders"):
        if column in frame:
            frame[column] = frame[column].map(lambda values: " ".join(str(v) for v in values))
    return frame


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=settings.LOG_LEVEL, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--override-caps", action="store_true", help="Lift the enumeration caps")
    common.add_argument(
        "--workers", type=positive_int, default=settings.WORKERS, help="Worker processes for sweeps (PLANARMAP_WORKERS)"
    )

    parser = argparse.ArgumentParser(prog="planarmap", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", parents=[common], help="Count planar colored maps, or tabulate coefficients")
    count.add_argument("--theta", help="Cycle notation, e.g. '(1 2 3 4)'")
    count.add_argument("--gamma", default="constant", help="'constant' or a 1-based coloring '1,1,2,2'")
    count.add_argument("--n", type=positive_int, help="Degree when fixed points are omitted")
    count.add_argument("--shape", type=positive_int, nargs="+", help="Cycle lengths of a generating table")
    count.add_argument("--max-orders", type=positive_int, nargs="+", help="Largest multiplicity per cycle length")
    count.add_argument("--degree-cap", type=positive_int)
    count.add_argument("--csv", action="store_true", help="Emit CSV instead of JSON")

    verify = sub.add_parser("verify", parents=[common], help="Run an identity check")
    verify.add_argument("check", choices=CHECKS)
    verify.add_argument("--theta")
    verify.add_argument("--gamma", default="constant")
    verify.add_argument("--nu", help="1-based theta-invariant labeling")
    verify.add_argument("--n", type=positive_int)
    verify.add_argument("--k", type=positive_int)
    verify.add_argument("--functions", help="Polynomials separated by ';', e.g. 'x1^2;x1^2'")
    verify.add_argument("--polynomial", help="Polynomial in q[i,j] coordinates")
    verify.add_argument("--tree", help="Spanning tree as '1-2,2-3'")
    verify.add_argument("--N", dest="N", type=positive_int, help="Matrix size for finite-N checks")
    verify.add_argument("--sweep-n", type=positive_int, nargs="+", help="Sweep every cycle type of these degrees")
    verify.add_argument("--colorings", type=int, default=0, help="Random colorings per cycle type")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--n-max", type=positive_int)
    verify.add_argument("--k-max", type=positive_int)
    verify.add_argument("--degree-max", type=int)
    verify.add_argument("--grid", action="store_true", help="Exhaustive monomial grid (malliavin)")

    sweep = sub.add_parser("sweep", parents=[common], help="Run a YAML sweep file")
    sweep.add_argument("config", type=Path)

    mc = sub.add_parser("mc", parents=[common], help="Monte-Carlo convergence of GUE cumulants")
    mc.add_argument("--theta", required=True)
    mc.add_argument("--gamma", default="constant")
    mc.add_argument("--n", type=positive_int)
    mc.add_argument("--N", dest="grid", type=positive_int, nargs="+", help=f"Matrix sizes, default {settings.MC_GRID}")
    mc.add_argument("--samples", type=positive_int, help=f"Draws per N, default {settings.MC_SAMPLES}")
    mc.add_argument("--seed", type=int)
    return parser


def cmd_count(args: argparse.Namespace) -> int:
    service = MapCountService()
    if args.shape:
        request = GeneratingTableRequest(
            shape=args.shape, max_orders=args.max_orders or [1] * len(args.shape), degree_cap=args.degree_cap
        )
        rows = service.generating_table(request.shape, request.max_orders, request.degree_cap, args.workers)
        if args.csv:
            sys.stdout.write(table_frame(rows).to_csv(index=False))
        else:
            sys.stdout.write(SweepReport(rows=rows).model_dump_json(indent=2, include={"rows"}) + "\n")
        return EXIT_OK
    if not args.theta:
        raise PlanarMapError("count needs --theta or --shape")
    report = service.count_map0(MapInstance.parse(args.theta, args.gamma, args.n), args.override_caps)
    if args.csv:
        frame = pd.DataFrame([report.model_dump(exclude={"genus_histogram"})])
        sys.stdout.write(frame.to_csv(index=False))
    else:
        emit(report)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    request = VerifyRequest(
        theta=args.theta,
        gamma=args.gamma,
        nu=args.nu,
        n=args.n,
        k=args.k,
        functions=[f for f in args.functions.split(";") if f.strip()] if args.functions else None,
        polynomial=args.polynomial,
        tree=args.tree,
        N=args.N,
        override_caps=args.override_caps,
        sweep_n=args.sweep_n,
        colorings=args.colorings,
        seed=args.seed,
        n_max=args.n_max,
        k_max=args.k_max,
        degree_max=args.degree_max,
        grid=args.grid,
    )
    summary = VerifyService().run(args.check, request)
    emit(summary)
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


def write_sweep_outputs(config: SweepConfig, report: SweepReport) -> None:
    if config.json_output is not None:
        config.json_output.write_text(report.model_dump_json(indent=2) + "\n")
        logger.info(f"wrote {config.json_output}")
    if config.csv_output is not None:
        config.csv_output.write_text(table_frame(report.rows).to_csv(index=False))
        logger.info(f"wrote {config.csv_output}")


def cmd_sweep(args: argparse.Namespace) -> int:
    config = SweepConfig.load(args.config)
    if config.workers is None:
        config.workers = args.workers
    report = VerifyService().run_sweep(config, args.override_caps)
    write_sweep_outputs(config, report)
    emit(report)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_mc(args: argparse.Namespace) -> int:
    request = MonteCarloRequest(
        theta=args.theta, gamma=args.gamma, n=args.n, grid=args.grid, samples=args.samples, seed=args.seed
    )
    inst = MapInstance.parse(request.theta, request.gamma, request.n)
    report = GueMonteCarloService().convergence_report(
        inst.theta, inst.gamma, request.grid, request.samples, request.seed
    )
    emit(report)
    return EXIT_OK if report.within_tolerance and report.improves_with_N else EXIT_CHECK_FAILED


COMMANDS = {"count": cmd_count, "verify": cmd_verify, "sweep": cmd_sweep, "mc": cmd_mc}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except CapExceededError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_CAP
    except (PlanarMapError, ValidationError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
