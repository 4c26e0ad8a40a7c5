"""
Evaluation report of a run log: detection metrics, latency bins, navigation
and the action log.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import Callable, List, Sequence, Tuple

import pandas as pd
from pydantic import Field

from ..bus.models import RunLog
from ..core.models import FrozenModel
from ..metrics.evaluation import (
    DomainError,
    EmptyInput,
    accuracy,
    confusion,
    detection_rate,
    f1_score,
    latency_histogram,
    precision,
    preference_score,
    recall,
    share_within,
)
from ..metrics.models import ConfusionCounts, LatencyHistogram
from ..mitigation.models import ActionLogEntry
from ..navsim.models import NavMetrics
from .flows_utils import write_canonical_json

REPORT_VERSION = 1
LATENCY_THRESHOLDS_S: Tuple[float, ...] = (8.0, 14.0)
WITHOUT_AD = "WoAD"
WITH_AD = "WAD"
CSV_COLUMNS: Tuple[str, ...] = (
    "condition",
    "trajectory_m",
    "time_s",
    "anomalies_detected",
    "sudden_stops",
    "accuracy",
    "detection_rate",
    "mean_latency_s",
    "final_epsilon",
)


class SurveyCounts(FrozenModel):
    """Preference survey answers: useful, neutral and total."""

    u: int = Field(ge=0)
    n: int = Field(ge=0)
    t: int = Field(gt=0)


class EvalReport(FrozenModel):
    """Metrics recomputed from a run log."""

    version: int = REPORT_VERSION
    scenario: str
    seed: int
    ad_enabled: bool
    tick_count: int
    anomalies_detected: int | None
    confusion: ConfusionCounts | None = None
    accuracy: float | None = None
    precision: float | None = None
    recall: float | None = None
    f1_score: float | None = None
    detection_rate: float
    preference_score: float | None = None
    latency: LatencyHistogram
    share_under_8s: float
    share_under_14s: float
    nav: NavMetrics | None = None
    final_epsilon: float
    actions: Tuple[ActionLogEntry, ...] = ()

    @property
    def condition(self) -> str:
        """WAD with anomaly detection, WoAD without."""
        return WITH_AD if self.ad_enabled else WITHOUT_AD


def _optional(metric: Callable[[ConfusionCounts], float], counts: ConfusionCounts) -> float | None:
    try:
        return metric(counts)
    except DomainError:
        return None


def build_report(
    log: RunLog, survey: SurveyCounts | None = None, logger: Logger | None = None
) -> EvalReport:
    """
    Recompute every metric from a run log without re-running the pipeline.

    Ticks without a truth label count as neutral in the detection rate and
    are left out of the confusion matrix.

    Args:
        log (RunLog): Run log with at least one tick.
        survey (SurveyCounts, optional): Preference survey answers.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        EvalReport: The report.

    Raises:
        EmptyInput: If the log has no ticks.
        DomainError: If the survey counts are inconsistent.
    """
    if not log.ticks:
        raise EmptyInput("run log has no ticks")

    pairs = [
        (tick.truth.anomaly, tick.record.is_anomaly)
        for tick in log.ticks
        if tick.truth is not None
    ]
    counts = confusion(pairs) if pairs else None
    correct = sum(1 for tick in log.ticks if tick.correct)
    neutral = sum(1 for tick in log.ticks if tick.correct is None)
    latencies = [tick.trace.t_total_s for tick in log.ticks]

    report = EvalReport(
        scenario=log.scenario,
        seed=log.seed,
        ad_enabled=log.ad_enabled,
        tick_count=len(log.ticks),
        anomalies_detected=len(log.anomaly_records) if log.ad_enabled else None,
        confusion=counts,
        accuracy=accuracy(counts) if counts else None,
        precision=_optional(precision, counts) if counts else None,
        recall=_optional(recall, counts) if counts else None,
        f1_score=_optional(f1_score, counts) if counts else None,
        detection_rate=detection_rate(correct, neutral, len(log.ticks)),
        preference_score=(
            preference_score(survey.u, survey.n, survey.t) if survey else None
        ),
        latency=latency_histogram(latencies),
        share_under_8s=share_within(latencies, LATENCY_THRESHOLDS_S[0]),
        share_under_14s=share_within(latencies, LATENCY_THRESHOLDS_S[1]),
        nav=log.nav,
        final_epsilon=log.final_epsilon,
        actions=tuple(entry for tick in log.ticks for entry in tick.actions),
    )
    if logger:
        logger.info(
            "Report for '%s' (%s): %d ticks, detection rate %.2f%%, mean latency %.3f s",
            report.scenario,
            report.condition,
            report.tick_count,
            report.detection_rate,
            report.latency.mean_s,
        )
    return report


def summary_rows(reports: Sequence[EvalReport]) -> pd.DataFrame:
    """One row per report with the navigation comparison columns."""
    rows: List[dict] = []
    for report in reports:
        rows.append(
            {
                "condition": report.condition,
                "trajectory_m": report.nav.trajectory_m if report.nav else None,
                "time_s": report.nav.time_s if report.nav else None,
                "anomalies_detected": report.anomalies_detected,
                "sudden_stops": report.nav.sudden_stops if report.nav else None,
                "accuracy": report.accuracy,
                "detection_rate": report.detection_rate,
                "mean_latency_s": report.latency.mean_s,
                "final_epsilon": report.final_epsilon,
            }
        )
    df = pd.DataFrame(rows, columns=list(CSV_COLUMNS))
    # nullable integers keep "3" from turning into "3.000"
    for column in ("anomalies_detected", "sudden_stops"):
        df[column] = df[column].astype("Int64")
    return df


def write_summary_csv(
    reports: Sequence[EvalReport], file_path: str, logger: Logger | None = None
) -> str:
    """Write the summary rows as CSV; missing values are written as `--`."""
    os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)
    summary_rows(reports).to_csv(file_path, index=False, na_rep="--", float_format="%.3f")
    if logger:
        logger.info("Saved summary to %s", file_path)
    return file_path


def write_report(report: EvalReport, out_dir: str, logger: Logger | None = None) -> Tuple[str, str]:
    """
    Write `report.json` and `report.csv` into a directory.

    Returns:
        Tuple[str, str]: The JSON and CSV paths.
    """
    json_path = write_canonical_json(report, os.path.join(out_dir, "report.json"), logger)
    csv_path = write_summary_csv([report], os.path.join(out_dir, "report.csv"), logger)
    return json_path, csv_path


def format_summary(report: EvalReport) -> str:
    """Human-readable summary printed by the CLI."""
    lines = [
        f"scenario: {report.scenario} ({report.condition}, seed {report.seed})",
        f"ticks: {report.tick_count}",
        "anomalies detected: "
        + ("--" if report.anomalies_detected is None else str(report.anomalies_detected)),
        f"detection rate: {report.detection_rate:.2f}%",
    ]
    if report.accuracy is not None:
        lines.append(f"accuracy: {report.accuracy:.2f}%")
    if report.preference_score is not None:
        lines.append(f"preference score: {report.preference_score:.2f}%")
    lines.append(
        f"latency: min {report.latency.min_s:.3f} s, mean {report.latency.mean_s:.3f} s, "
        f"max {report.latency.max_s:.3f} s"
    )
    lines.append(
        f"under 8 s: {report.share_under_8s:.2f}%, under 14 s: {report.share_under_14s:.2f}%"
    )
    if report.nav is not None:
        lines.append(
            f"trajectory {report.nav.trajectory_m:.2f} m, time {report.nav.time_s:.1f} s, "
            f"sudden stops {report.nav.sudden_stops}"
        )
    lines.append(f"final epsilon: {report.final_epsilon:.3f}")
    return "\n".join(lines)
