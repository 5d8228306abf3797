import json
import subprocess
import sys

import pytest

from coupled_painleve import cli
from coupled_painleve.cli import SuiteConfig, UsageError, main, render, run
from coupled_painleve.weyl import PRESENTATIONS, WeylPresentation


def test_relations_d5_all_pass():
    report = run(SuiteConfig(systems=("D5",), suites=("relations",), points=5))
    assert report.records and report.ok
    assert {r.status for r in report.records} == {"pass"}
    assert all(r.check_id.startswith("relations/D5/(") for r in report.records)


def test_translations_b4_report_shifts():
    report = run(SuiteConfig(systems=("B4",), suites=("translations",)))
    assert len(report.records) == 4
    for r in report.records:
        assert r.status == "pass"
        assert r.witness["shift"] == r.witness["expected"]


def test_relation_that_is_not_minimal_is_a_warning(monkeypatch):
    fake = dict(PRESENTATIONS)
    fake["D5"] = WeylPresentation("D5", ("s0",), (("s0", 4),))
    monkeypatch.setattr(cli, "PRESENTATIONS", fake)
    report = run(SuiteConfig(systems=("D5",), suites=("relations",), points=3))
    assert [r.status for r in report.records] == ["warning"]
    assert report.ok and report.summary["warning"] == 1


def test_failing_relation_gives_exit_code_one(monkeypatch, capsys):
    fake = dict(PRESENTATIONS)
    fake["D5"] = WeylPresentation("D5", ("s0", "s2"), (("s0 s2", 2),))
    monkeypatch.setattr(cli, "PRESENTATIONS", fake)
    assert main(["--system", "d5", "--suite", "relations", "--points", "3"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"]["fail"] == 1


@pytest.mark.parametrize("argv", [
    ["--suite", ""],
    ["--system", "e8"],
    ["--suite", "nonsense"],
    ["--points", "0"],
    ["--series-order", "1"],
    ["--seed", "-1"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_config_validation_directly():
    with pytest.raises(UsageError):
        SuiteConfig(systems=()).validate()


def test_json_is_byte_identical_across_runs(tmp_path):
    argv = ["--system", "b4,a4", "--suite", "symmetry,translations,divisors", "--points", "3", "--seed", "7"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["schema"] == cli.SCHEMA
    assert all("wall_time" not in r for r in doc["records"])


def test_timings_are_opt_in():
    report = run(SuiteConfig(systems=("B3",), suites=("divisors",), timings=True))
    doc = json.loads(render(report))
    assert all(isinstance(r["wall_time"], float) for r in doc["records"])


def test_seed_changes_sample_points_but_not_verdicts():
    a = run(SuiteConfig(systems=("A4",), suites=("symmetry",), points=3, seed=1))
    b = run(SuiteConfig(systems=("A4",), suites=("symmetry",), points=3, seed=2))
    assert [r.status for r in a.records] == [r.status for r in b.records]


def test_markdown_report():
    report = run(SuiteConfig(systems=("D4_2",), suites=("charts", "symmetry"), points=3))
    text = render(report, "markdown")
    assert text.startswith("# Verification report")
    assert "## symmetry" in text and "## charts" in text
    assert "| `symmetry/D4_2/" in text


def test_unknown_format():
    report = run(SuiteConfig(systems=("B3",), suites=("divisors",)))
    with pytest.raises(UsageError):
        render(report, "xml")


def test_degeneration_suites():
    report = run(SuiteConfig(systems=("D4_2", "B3"), suites=("degenerations", "subgroup-limits"), points=3))
    ids = {r.check_id for r in report.records}
    assert "degenerations/D4_2->B3/limit" in ids
    assert "subgroup-limits/D4_2->B3/s0" in ids
    assert report.ok


def test_numeric_suite_and_export(tmp_path):
    report = run(SuiteConfig(systems=("B3",), suites=("numeric",), export_trajectories=str(tmp_path)))
    assert report.ok
    assert report.record("numeric/B3/energy").status == "pass"
    assert (tmp_path / "B3.csv").read_text().startswith("t,x,y,z,w")


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "coupled_painleve.cli", "--system", "b3", "--suite", "divisors",
         "--format", "markdown"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0
    assert "# Verification report" in out.stdout
