"""Tests of the command-line surface and its exit codes."""

from __future__ import annotations

import os

import pytest
from typer.testing import CliRunner

from patrol.cli import EXIT_FAILURE, EXIT_INVALID, app

pytestmark = pytest.mark.usefixtures("prefect_harness")

runner = CliRunner()


def test_run_is_reproducible(demo_path, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        result = runner.invoke(app, ["run", demo_path, "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "anomalies detected: 3" in result.output
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
    assert (first / "run.json").read_bytes() == (second / "run.json").read_bytes()


def test_run_without_detection(demo_path, tmp_path):
    result = runner.invoke(app, ["run", demo_path, "--ad", "off", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "(WoAD" in result.output
    assert "anomalies detected: --" in result.output


def test_invalid_scenario_exits_2(tmp_path):
    scenario = tmp_path / "bad.json"
    scenario.write_text('{"seed": 1, "frames": []}', encoding="utf-8")
    result = runner.invoke(app, ["run", str(scenario), "--out", str(tmp_path)])
    assert result.exit_code == EXIT_INVALID


def test_bad_run_log_exits_2(tmp_path):
    log = tmp_path / "run.json"
    log.write_text('{"ticks": []}', encoding="utf-8")
    result = runner.invoke(app, ["replay", str(log)])
    assert result.exit_code == EXIT_INVALID


def test_replay_prints_summary(fixture_path, tmp_path):
    result = runner.invoke(
        app,
        ["replay", fixture_path("table4.json"), "--survey", "4", "2", "6", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    assert "accuracy: 82.14%" in result.output
    assert "preference score: 83.33%" in result.output
    assert (tmp_path / "report.json").is_file()


def test_profile_prints_timeouts(fixture_path):
    result = runner.invoke(app, ["profile", fixture_path("latency_125.json"), "--t-max", "30"])
    assert result.exit_code == 0, result.output
    assert "llm" in result.output
    assert "t_max 30.000 s" in result.output


def test_infeasible_budget_exits_3(fixture_path):
    result = runner.invoke(app, ["profile", fixture_path("latency_125.json"), "--t-max", "0.5"])
    assert result.exit_code == EXIT_FAILURE


def test_compare_prints_both_conditions(demo_path, tmp_path):
    result = runner.invoke(app, ["compare", demo_path, "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "WoAD" in result.output and "WAD" in result.output
    assert (tmp_path / "comparison.csv").is_file()


def test_archive_from_run_log(demo_path, tmp_path):
    result = runner.invoke(app, ["run", demo_path, "--out", str(tmp_path / "run")])
    assert result.exit_code == 0, result.output

    archive = tmp_path / "archive"
    result = runner.invoke(
        app, ["archive", demo_path, str(tmp_path / "run" / "run.json"), "--out", str(archive)]
    )
    assert result.exit_code == 0, result.output
    assert len(result.output.splitlines()) == 3
    assert sorted(os.listdir(archive)) == sorted(os.listdir(tmp_path / "run" / "archive"))
