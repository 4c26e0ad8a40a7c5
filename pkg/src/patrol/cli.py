"""
Command-line entry point.

Exit codes: 0 on success, 2 when a scenario or run log fails validation,
3 on any other failure. Diagnostics go to standard error, the human summary
to standard output and machine output to files.
"""

from __future__ import annotations

from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import typer

from .core.models import ScenarioInvalid
from .flows.archive import cmd_archive
from .flows.compare import patrol_compare
from .flows.profile import format_allocation, patrol_profile
from .flows.replay import patrol_replay
from .flows.report import format_summary, summary_rows
from .flows.run import patrol_run
from .perception.models import Backend
from .scenario.loader import LogSchemaError, load_run_log, load_scenario

EXIT_INVALID = 2
EXIT_FAILURE = 3

app = typer.Typer(
    name="patrol",
    help="Proactive anomaly detection and mitigation for a patrolling robot.",
    no_args_is_help=True,
    add_completion=False,
)


class Switch(StrEnum):
    """On/off flag value."""

    ON = "on"
    OFF = "off"


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except (ScenarioInvalid, LogSchemaError) as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(EXIT_INVALID) from e
    except typer.Exit:
        raise
    except Exception as e:  # pylint: disable=broad-exception-caught
        typer.echo(f"error: {type(e).__name__}: {e}", err=True)
        raise typer.Exit(EXIT_FAILURE) from e


# pylint: disable=too-many-arguments,too-many-positional-arguments
@app.command("run")
def run_command(
    scenario: Path = typer.Argument(..., help="Scenario JSON file."),
    ad: Optional[Switch] = typer.Option(None, "--ad", help="Anomaly detection on or off."),
    backend: Optional[Backend] = typer.Option(None, "--backend", help="Model backend."),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Latency budget in seconds."),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Overrides the scenario seed."),
) -> None:
    """Run a scenario and write run.json, report.json, report.csv and the archive."""
    with _exit_codes():
        report = patrol_run(
            str(scenario),
            ad_enabled=None if ad is None else ad == Switch.ON,
            backend=backend,
            t_max_s=t_max,
            out_dir=str(out) if out else None,
            seed=seed,
        )
        typer.echo(format_summary(report))


@app.command("replay")
def replay_command(
    log: Path = typer.Argument(..., help="Run log written by `run`."),
    survey: Optional[Tuple[int, int, int]] = typer.Option(
        None, "--survey", help="Favourable, neutral and total survey answers."
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="Where to write the report."),
) -> None:
    """Recompute the metrics of a run log."""
    with _exit_codes():
        report = patrol_replay(str(log), survey=survey, out_dir=str(out) if out else None)
        typer.echo(format_summary(report))


@app.command("profile")
def profile_command(
    logs: List[Path] = typer.Argument(..., help="Run logs to profile."),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Latency budget in seconds."),
    out: Optional[Path] = typer.Option(None, "--out", help="Where to write budget.json."),
) -> None:
    """Derive stage profiles from run logs and allocate the latency budget."""
    with _exit_codes():
        profiles, alloc = patrol_profile(
            [str(p) for p in logs], t_max_s=t_max, out_dir=str(out) if out else None
        )
        typer.echo(format_allocation(profiles, alloc))


@app.command("compare")
def compare_command(
    scenario: Path = typer.Argument(..., help="Scenario JSON file."),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Overrides the scenario seed."),
) -> None:
    """Run a scenario without and with anomaly detection and write comparison.csv."""
    with _exit_codes():
        reports = patrol_compare(str(scenario), out_dir=str(out) if out else None, seed=seed)
        typer.echo(summary_rows(reports).to_string(index=False, na_rep="--"))


@app.command("archive")
def archive_command(
    scenario: Path = typer.Argument(..., help="Scenario the run log was produced from."),
    log: Path = typer.Argument(..., help="Run log written by `run`."),
    out: Path = typer.Option(Path("archive"), "--out", help="Archive directory."),
) -> None:
    """Write the frame, heatmap and report of every anomaly of a run log."""
    with _exit_codes():
        loaded = load_scenario(str(scenario))
        run_log = load_run_log(str(log))
        specs = {spec.frame_id: spec for spec in loaded.file.frames}
        for tick in run_log.ticks:
            if not tick.archive:
                continue
            spec = specs.get(tick.record.frame_id)
            if spec is None:
                raise ScenarioInvalid(
                    f"{scenario}: run log frame {tick.record.frame_id} is not in the scenario"
                )
            paths = cmd_archive(
                tick.record, tick.heatmap, spec.to_frame(tick.record.captured_at), str(out)
            )
            typer.echo(paths.report)


def main() -> None:
    """Console script entry point."""
    app()


if __name__ == "__main__":
    main()
