import json

import pandas as pd
import pytest

from app.cli import EXIT_CAP, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_count_square(capsys):
    code, out = run(capsys, "count", "--theta", "(1 2 3 4)", "--gamma", "constant")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["planar"] == 2
    assert report["total"] == 3


def test_count_colored_edge(capsys):
    code, out = run(capsys, "count", "--theta", "(1 2)", "--gamma", "1,2")
    assert code == EXIT_OK
    assert json.loads(out)["planar"] == 0


def test_count_with_fixed_points(capsys):
    code, out = run(capsys, "count", "--theta", "(1 2)", "--n", "4")
    assert code == EXIT_OK
    assert json.loads(out)["theta"] == "(1 2)(3)(4)"


def test_count_parse_error(capsys):
    assert main(["count", "--theta", "(1 2"]) == EXIT_USAGE
    assert "column" in capsys.readouterr().err


def test_count_cap(capsys):
    theta = "(" + " ".join(str(i) for i in range(1, 15)) + ")"
    assert main(["count", "--theta", theta]) == EXIT_CAP
    assert "--override-caps" in capsys.readouterr().err


def test_count_table_csv(capsys):
    code, out = run(capsys, "count", "--shape", "2", "--max-orders", "4", "--csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert lines[0].startswith("shape,orders,degree,planar")


def test_output_is_deterministic(capsys):
    _, first = run(capsys, "verify", "main", "--theta", "(1 2)(3 4)")
    _, second = run(capsys, "verify", "main", "--theta", "(1 2)(3 4)")
    assert first == second


def test_verify_main(capsys):
    code, out = run(capsys, "verify", "main", "--theta", "(1 2)(3 4)")
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["passed"]
    assert summary["reports"][0]["lhs"] == "2"
    assert summary["reports"][0]["rhs"] == "2"


def test_verify_main_sweep(capsys):
    code, out = run(capsys, "verify", "main", "--sweep-n", "2", "4", "--colorings", "1", "--seed", "5")
    assert code == EXIT_OK
    # 2 cycle types of degree 2 and 5 of degree 4, each monochrome and once randomly colored
    assert len(json.loads(out)["reports"]) == 2 * (2 + 5)


def test_verify_kirchhoff(capsys):
    code, out = run(capsys, "verify", "kirchhoff", "--k", "4")
    assert code == EXIT_OK
    assert json.loads(out)["reports"][0]["details"]["trees"] == 16


def test_verify_malliavin(capsys):
    code, out = run(capsys, "verify", "malliavin", "--k", "3", "--functions", "x1^2;x1^2;x1^2", "--n", "1")
    assert code == EXIT_OK
    assert json.loads(out)["reports"][0]["lhs"] == "8"


def test_verify_malliavin_arity_mismatch(capsys):
    assert main(["verify", "malliavin", "--k", "2", "--functions", "x1;x1;x1"]) == EXIT_USAGE


def test_verify_malliavin_grid(capsys):
    code, out = run(capsys, "verify", "malliavin", "--grid", "--k-max", "2", "--n-max", "1", "--degree-max", "2")
    assert code == EXIT_OK
    assert len(json.loads(out)["reports"]) == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "bkar", "--polynomial", "q[1,2]^2 q[2,3]"],
        ["verify", "connected-bkar", "--polynomial", "q[1,2] q[2,3]"],
        ["verify", "splice-count", "--n-max", "5", "--k-max", "3"],
        ["verify", "splice-count", "--nu", "1,1,2,3"],
        ["verify", "ghastly", "--theta", "(1 2)(3 4)", "--N", "2"],
        ["verify", "exact-and-scary", "--theta", "(1 2)(3 4)"],
        ["verify", "bounds", "--theta", "(1 2 3)(4 5 6)"],
    ],
)
def test_verify_checks_pass(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == EXIT_OK, out
    assert json.loads(out)["passed"]


def test_verify_unknown_check(capsys):
    assert main(["verify", "nonsense"]) == EXIT_USAGE


def test_verify_missing_input(capsys):
    assert main(["verify", "main"]) == EXIT_USAGE
    assert "--theta" in capsys.readouterr().err


def test_mc_rejects_zero_samples(capsys):
    assert main(["mc", "--theta", "(1 2 3 4)", "--samples", "0"]) == EXIT_USAGE


def test_mc_is_reproducible(capsys):
    argv = ["mc", "--theta", "(1 2 3 4)", "--N", "4", "8", "--samples", "200", "--seed", "7"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second
    report = json.loads(first)
    assert report["target"] == 2
    assert [p["N"] for p in report["points"]] == [4, 8]


def test_sweep_writes_tables(tmp_path, capsys):
    config = tmp_path / "sweep.yaml"
    config.write_text(
        'shapes: [[2]]\n'
        'max_order: 4\n'
        'json_output: table.json\n'
        'csv_output: table.csv\n'
        'instances:\n'
        '  - theta: "(1 2)(3 4)"\n'
    )
    code, out = run(capsys, "sweep", str(config))
    assert code == EXIT_OK
    report = json.loads(out)
    assert len(report["rows"]) == 4
    assert len(report["bounds"]) == 4
    assert report["checks"][0]["passed"]
    assert json.loads((tmp_path / "table.json").read_text()) == report
    table = pd.read_csv(tmp_path / "table.csv")
    assert list(table["degree"]) == [2, 4, 6, 8]


def test_sweep_includes_planar_pairs(tmp_path, capsys):
    config = tmp_path / "sweep.yaml"
    config.write_text("shapes: [[4], [2, 2]]\nmax_order: 1\n")
    code, out = run(capsys, "sweep", str(config))
    assert code == EXIT_OK
    assert [row["planar"] for row in json.loads(out)["rows"]] == [2, 2]


def test_empty_sweep(tmp_path, capsys):
    config = tmp_path / "sweep.yaml"
    config.write_text("shapes: []\n")
    code, out = run(capsys, "sweep", str(config))
    assert code == EXIT_OK
    assert json.loads(out)["rows"] == []


def test_sweep_errors(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("shapes: [[2]\n")
    assert main(["sweep", str(bad)]) == EXIT_USAGE
    assert "line" in capsys.readouterr().err

    not_a_mapping = tmp_path / "list.yaml"
    not_a_mapping.write_text("- 1\n- 2\n")
    assert main(["sweep", str(not_a_mapping)]) == EXIT_USAGE

    unwritable = tmp_path / "unwritable.yaml"
    unwritable.write_text('shapes: [[2]]\nmax_order: 1\njson_output: missing/dir/table.json\n')
    assert main(["sweep", str(unwritable)]) == EXIT_USAGE

    capped = tmp_path / "capped.yaml"
    capped.write_text("shapes: [[4]]\nmax_order: 4\n")
    assert main(["sweep", str(capped)]) == EXIT_CAP


def test_failed_check_exit_code(monkeypatch, capsys):
    """A mathematical discrepancy exits with 1"""
    from app.services import freewick_service

    monkeypatch.setattr(freewick_service, "semicircular_moment", lambda word, cov: 0)
    assert main(["verify", "main", "--theta", "(1 2 3 4)"]) == EXIT_CHECK_FAILED


def test_mc_fails_when_error_grows_with_n(monkeypatch, capsys):
    """An estimate that drifts away at larger N exits with 1 even inside its own error bar"""
    from app.schemas.montecarlo import ConvergencePoint, ConvergenceReport

    def drifting_report(self, theta, gamma, grid, samples, seed):
        points = [ConvergencePoint(N=N, samples=samples, seed=0, estimate=2.0, standard_error=0.0) for N in grid]
        return ConvergenceReport(
            theta=theta.to_cycle_notation(), gamma=gamma.to_text(), seed=seed or 0, target=2, points=points,
            within_tolerance=True, improves_with_N=False,
        )

    monkeypatch.setattr("app.cli.GueMonteCarloService.convergence_report", drifting_report)
    code, out = run(capsys, "mc", "--theta", "(1 2 3 4)", "--N", "4", "8", "--samples", "10")
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out)["improves_with_N"] is False
