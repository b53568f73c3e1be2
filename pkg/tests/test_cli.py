import csv
import json
import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest
from click.testing import CliRunner

from harmonic_zeros import create_cli
from harmonic_zeros.commands.common import run_report
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.figures import FigureService
from harmonic_zeros.services.report import ReportDocument, RunConfig
from harmonic_zeros.services.theorems import SweepRow


@pytest.fixture(scope="module")
def cli():
    return create_cli()


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, cli, *args):
    return runner.invoke(cli, [str(arg) for arg in args], catch_exceptions=False)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def assert_svg(path):
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


def test_zeros_f1(runner, cli, tmp_path):
    result = invoke(runner, cli, "zeros", "--n", 9, "--k", 4, "--a", 1, "--b", 0.5, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "zeros.csv")
    assert rows[0] == ["re", "im", "sense", "order", "residual"]
    assert len(rows) == 10
    report = read_json(tmp_path / "report.json")
    assert report["schema"] == 1
    assert report["summary"]["total"] == len(report["census"]["zeros"]) == 9
    assert_svg(tmp_path / "zeros.svg")


def test_zeros_f2(runner, cli, tmp_path):
    result = invoke(runner, cli, "zeros", "--n", 9, "--k", 4, "--a", 4.5, "--b", 7, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "zeros.csv")[1:]
    assert len(rows) == 17
    assert sum(1 for row in rows if row[2] == "Reversing") == 4


def test_zeros_rejects_n_not_above_k(runner, cli, tmp_path):
    result = invoke(runner, cli, "zeros", "--n", 4, "--k", 4, "--a", 1, "--b", 2, "--out", tmp_path)
    assert result.exit_code == 2
    assert "INVALID_PARAMETER" in result.output
    assert not (tmp_path / "report.json").exists()


def test_zeros_json_only(runner, cli, tmp_path):
    result = invoke(
        runner, cli, "zeros", "--n", 5, "--k", 2, "--a", 1, "--b", 4, "--out", tmp_path, "--format", "json"
    )
    assert result.exit_code == 0, result.output
    assert sorted(path.name for path in tmp_path.iterdir()) == ["report.json"]


def test_zeros_output_is_deterministic(runner, cli, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        result = invoke(runner, cli, "zeros", "--n", 9, "--k", 4, "--a", 4.5, "--b", 7, "--out", out)
        assert result.exit_code == 0, result.output
    assert (first / "zeros.csv").read_bytes() == (second / "zeros.csv").read_bytes()
    assert (first / "zeros.svg").read_bytes() == (second / "zeros.svg").read_bytes()
    reports = [read_json(out / "report.json") for out in (first, second)]
    for report in reports:
        report.pop("generated_at")
        report.pop("wall_time_ms")
    assert reports[0] == reports[1]


@pytest.mark.parametrize("a, b, loops", [(1, 0.5, 5), (4.5, 7, 1)])
def test_curve(runner, cli, tmp_path, a, b, loops):
    result = invoke(
        runner, cli, "curve", "--n", 9, "--k", 4, "--a", a, "--b", b, "--out", tmp_path, "--with-zeros"
    )
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "curve.csv")
    assert rows[0] == ["loop_index", "t", "re", "im"]
    assert len({row[0] for row in rows[1:]}) == loops
    assert_svg(tmp_path / "curve.svg")


def test_curve_rejects_equal_coefficients(runner, cli, tmp_path):
    result = invoke(runner, cli, "curve", "--n", 9, "--k", 4, "--a", 3, "--b", 3, "--out", tmp_path)
    assert result.exit_code == 2
    assert "DEGENERATE_FAMILY" in result.output


def test_verify_annuli(runner, cli, tmp_path):
    result = invoke(runner, cli, "verify", "--n", 9, "--k", 4, "--a", 7, "--b", 14, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "report.json")
    assert report["annuli"]["inner_count"] == 4
    assert report["annuli"]["gap_violations"] == []
    assert report["annuli_omitted"] is None
    assert_svg(tmp_path / "annuli.svg")


def test_verify_certificate(runner, cli, tmp_path):
    result = invoke(runner, cli, "verify", "--n", 9, "--k", 4, "--a", 1, "--b", 20, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "report.json")
    assert report["certificate"]["status"] == "HOLDS"
    assert report["certificate"]["implied_total"] == report["census"]["total"] == 17


def test_verify_f2_includes_annuli(runner, cli, tmp_path):
    result = invoke(runner, cli, "verify", "--n", 9, "--k", 4, "--a", 4.5, "--b", 7, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "report.json")
    assert report["annuli"]["inner_count"] == 4
    assert report["unit_disc"]["turns"] == -4


def test_verify_omits_annuli_when_close(runner, cli, tmp_path):
    result = invoke(runner, cli, "verify", "--n", 9, "--k", 4, "--a", 1, "--b", 0.5, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = read_json(tmp_path / "report.json")
    assert report["annuli"] is None
    assert "|b - a| > 2" in report["annuli_omitted"]
    assert not (tmp_path / "annuli.svg").exists()


def test_sweep(runner, cli, tmp_path):
    result = invoke(
        runner, cli, "sweep", "--n", 5, "--k", 2, "--a-range", "1", "--b-range", "2:6:2",
        "--grid-density", 12, "--out", tmp_path, "--quiet",
    )
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "sweep.csv")
    assert rows[0] == [
        "n", "k", "a", "b", "total", "predicted", "reversing", "dominance", "agreement", "certified",
    ]
    assert [row[3] for row in rows[1:]] == ["2.0", "4.0", "6.0"]
    assert_svg(tmp_path / "sweep.svg")
    assert read_json(tmp_path / "report.json")["stabilization"]["key"] == "b"


def test_sweep_empty_range(runner, cli, tmp_path):
    result = invoke(
        runner, cli, "sweep", "--n", 9, "--k", 4, "--a-range", "5:1:1", "--b-range", "1", "--out", tmp_path
    )
    assert result.exit_code == 2


def test_sweep_all_cells_failed(runner, cli, tmp_path):
    result = invoke(
        runner, cli, "sweep", "--n", 9, "--k", 4, "--a-range", "3", "--b-range", "3", "--out", tmp_path, "--quiet"
    )
    assert result.exit_code == 2
    assert "ERROR:DEGENERATE_FAMILY" in (tmp_path / "sweep.csv").read_text()


def test_report_json_round_trips(tmp_path, f2_params, f2_census):
    document = ReportDocument("zeros", f2_params, census=f2_census).to_dict()
    path = OutputHelper.write_json(str(tmp_path / "report.json"), document)
    assert read_json(path) == document


def test_zeros_rejects_too_few_curve_samples(runner, cli, tmp_path):
    result = invoke(
        runner, cli, "zeros", "--n", 9, "--k", 4, "--a", 1, "--b", 0.5,
        "--samples-per-loop", 16, "--out", tmp_path,
    )
    assert result.exit_code == 2
    assert "samples_per_loop" in result.output
    assert not (tmp_path / "report.json").exists()


def test_inconsistent_census_fails_after_writing(tmp_path, f2_params, f2_census):
    assert ReportDocument("zeros", f2_params, census=f2_census).consistent
    cfg = RunConfig(9, 4, 4.5, 7.0, output_dir=str(tmp_path), formats="json")

    def compute(report):
        report.census = replace(f2_census, total=f2_census.total + 1)

    with pytest.raises(SystemExit) as excinfo:
        run_report(cfg, ReportDocument("zeros", f2_params, cfg), compute, lambda report: [])
    assert excinfo.value.code == 3
    written = read_json(tmp_path / "report.json")
    assert written["error"]["error"] == "CERTIFICATION_FAILED"
    assert written["summary"]["consistent"] is False


def test_figures_are_deterministic_svg(f2_census):
    figures = FigureService(size=200)
    first, second = figures.render_zeros(f2_census), figures.render_zeros(f2_census)
    assert first == second
    assert ET.fromstring(first.encode()).tag.endswith("svg")


def test_sweep_heatmap_marks_failed_cells():
    rows = [
        SweepRow(5, 2, 1.0, 2.0, total=5),
        SweepRow(5, 2, 2.0, 2.0, error="DEGENERATE_FAMILY"),
    ]
    svg = FigureService(size=200).render_sweep(rows)
    root = ET.fromstring(svg.encode())
    assert root.tag.endswith("svg")
    # matplotlib writes hatches as SVG patterns
    assert "<pattern" in svg
