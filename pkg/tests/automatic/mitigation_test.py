"""Tests of the rulebook, risk table, responders and the epsilon tracker."""

from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from patrol.core.models import (
    AnomalyClass,
    AnomalyRecord,
    DetectionOutcome,
    Directive,
    MitigationAction,
    Severity,
)
from patrol.mitigation.epsilon import EpsilonTracker, update_epsilon
from patrol.mitigation.models import Delivery, KeywordRule, RiskTable
from patrol.mitigation.responders import SimulatedSinks, execute_action
from patrol.mitigation.risk import (
    UnknownHazardClass,
    default_risk_table,
    hazard_sets_from,
    load_risk_table,
    risk_of_loss,
    store_risk_table,
    uncovered_losses,
)
from patrol.mitigation.rulebook import (
    NO_MATCH_SELECTION,
    UNPARSED_SELECTION,
    RulebookError,
    default_rulebook,
    load_rulebook,
    parse_rulebook,
    select_actions,
    store_rulebook,
)
from patrol.perception.models import ParsedClassification
from patrol.perception.parser import UnparsedResponse


def _parsed(anomaly_class: AnomalyClass, description: str) -> ParsedClassification:
    directive = {
        AnomalyClass.HAZARDOUS: Directive.REPORT,
        AnomalyClass.CONFLICT: Directive.AVOID,
        AnomalyClass.CLEAR: Directive.RESUME,
    }[anomaly_class]
    return ParsedClassification(
        anomaly_class=anomaly_class, description=description, directive=directive
    )


@pytest.mark.parametrize(
    "anomaly_class, description, severity, actions",
    [
        (
            AnomalyClass.HAZARDOUS,
            "person holding a firearm",
            Severity.HIGH,
            (MitigationAction.SIREN, MitigationAction.NOTIFY),
        ),
        (
            AnomalyClass.HAZARDOUS,
            "people fighting",
            Severity.HIGH,
            (MitigationAction.WARN, MitigationAction.ALERT),
        ),
        (AnomalyClass.CONFLICT, "box obstruction", Severity.MEDIUM, (MitigationAction.REPLAN,)),
        (
            AnomalyClass.CONFLICT,
            "liquid spill",
            Severity.MEDIUM,
            (MitigationAction.REPORT, MitigationAction.AVOID),
        ),
        (AnomalyClass.HAZARDOUS, "smoke", Severity.HIGH, (MitigationAction.REPORT,)),
        (AnomalyClass.CONFLICT, "crowd", Severity.MEDIUM, (MitigationAction.AVOID,)),
        (AnomalyClass.CLEAR, "a spill was mopped", Severity.LOW, (MitigationAction.RESUME,)),
    ],
)
def test_action_selection(anomaly_class, description, severity, actions):
    selection = select_actions(_parsed(anomaly_class, description), default_rulebook())
    assert selection.severity == severity
    assert selection.actions == actions


def test_most_severe_rule_wins():
    selection = select_actions(
        _parsed(AnomalyClass.HAZARDOUS, "a spill next to a firearm"), default_rulebook()
    )
    assert selection.rule is not None and selection.rule.keyword == "firearm"


def test_unparsed_answer_stops_safely():
    unparsed = UnparsedResponse("gibberish", "missing class token")
    selection = select_actions(unparsed, default_rulebook())
    assert selection == UNPARSED_SELECTION
    assert selection.actions == (MitigationAction.SAFE_STOP, MitigationAction.REPORT)
    assert NO_MATCH_SELECTION.actions == (MitigationAction.RESUME,)


def test_empty_rulebook_is_rejected():
    with pytest.raises(RulebookError):
        select_actions(_parsed(AnomalyClass.CLEAR, "ok"), ())


def test_high_severity_needs_hazardous_class():
    with pytest.raises(ValidationError):
        KeywordRule(
            keyword="spill",
            anomaly_class=AnomalyClass.CONFLICT,
            severity=Severity.HIGH,
            actions=(MitigationAction.AVOID,),
        )


def test_rulebook_file_round_trip(tmp_path):
    path = str(tmp_path / "rules.json")
    store_rulebook(default_rulebook(), path)
    assert load_rulebook(path) == default_rulebook()


def test_rulebook_errors_name_the_line():
    text = '[\n  {"keyword": "smoke", "class": "Hazardous",\n   "severity": "Urgent", "actions": ["Report"]}\n]'
    with pytest.raises(RulebookError, match="line 3"):
        parse_rulebook(text)
    duplicate = (
        '[{"keyword": "x", "class": "Conflict", "severity": "Low", "actions": ["Avoid"]},'
        ' {"keyword": "X", "class": "Conflict", "severity": "Low", "actions": ["Avoid"]}]'
    )
    with pytest.raises(RulebookError, match="duplicate"):
        parse_rulebook(duplicate)


def test_risk_of_loss():
    table = default_risk_table()
    assert risk_of_loss("firearm", table) == 0.9
    assert risk_of_loss("spill", table, "slip") == 0.3
    with pytest.raises(UnknownHazardClass):
        risk_of_loss("meteor", table)
    with pytest.raises(UnknownHazardClass):
        risk_of_loss("spill", table, "fire")
    with pytest.raises(ValidationError):
        RiskTable(entries={"spill": {"slip": 1.5}})


def test_hazard_sets_cover_the_risk_table(tmp_path):
    table = default_risk_table()
    sets = hazard_sets_from(table)
    assert uncovered_losses(sets, table) == {}
    assert uncovered_losses(sets.register_loss("smoke", "burn"), table) == {}

    partial = sets.model_copy(update={"hazardous": ("firearm",)})
    assert uncovered_losses(partial, table) == {
        "injury": "fight",
        "collision": "obstruction",
        "slip": "spill",
    }

    path = str(tmp_path / "risk.json")
    store_risk_table(table, path)
    assert load_risk_table(path) == table


def _record(anomaly_class=AnomalyClass.HAZARDOUS, description="firearm detected"):
    return AnomalyRecord(frame_id=8, anomaly_class=anomaly_class, description=description)


def test_notify_calls_and_emails():
    sinks = SimulatedSinks()
    entry = execute_action(MitigationAction.NOTIFY, sinks, _record(), at=42.0)
    assert entry.deliveries == (Delivery.SIMULATED_CALL, Delivery.SIMULATED_EMAIL)
    assert entry.triggered_by == 8
    assert entry.at == 42.0
    assert len(sinks.calls) == 1 and len(sinks.emails) == 1


def test_siren_turns_off_on_resume():
    sinks = SimulatedSinks()
    on = execute_action(MitigationAction.SIREN, sinks, _record(), at=1.0)
    assert on.deliveries == (Delivery.SIREN_ON,)
    assert sinks.siren_on
    execute_action(MitigationAction.RESUME, sinks, _record(AnomalyClass.CLEAR, ""), at=2.0)
    assert not sinks.siren_on


def test_warning_is_spoken():
    sinks = SimulatedSinks()
    entry = execute_action(MitigationAction.WARN, sinks, _record(description="fight"), at=0.0)
    assert entry.deliveries == (Delivery.LOG_ONLY,)
    assert sinks.spoken == ["Warning: fight ahead"]


@pytest.mark.parametrize(
    "action", [MitigationAction.REPLAN, MitigationAction.REPORT, MitigationAction.SAFE_STOP]
)
def test_navigation_actions_are_logged(action):
    sinks = SimulatedSinks()
    entry = execute_action(action, sinks, _record(), at=0.0)
    assert entry.deliveries == (Delivery.LOG_ONLY,)
    assert sinks.log_lines == [entry.message]


def _outcome(correct: bool | None, latency_s: float = 0.0, frame_id: int = 1):
    record = _record().model_copy(update={"frame_id": frame_id})
    return DetectionOutcome(record=record, correct=correct, latency_s=latency_s)


def test_epsilon_follows_learning_law():
    tracker = EpsilonTracker(t_max_s=30.0)
    for n in range(1, 201):
        epsilon = update_epsilon(tracker, _outcome(True, frame_id=n))
        assert epsilon == pytest.approx(1 - 0.9**n, abs=1e-12)
    assert len(tracker.history) == 200
    assert tracker.history[-1].frame_id == 200


def test_epsilon_score_weights():
    tracker = EpsilonTracker(t_max_s=30.0)
    assert tracker.score(_outcome(True, latency_s=15.0)) == pytest.approx(0.85)
    assert tracker.score(_outcome(False, latency_s=0.0)) == pytest.approx(0.3)
    assert tracker.score(_outcome(None, latency_s=60.0)) == pytest.approx(0.35)


def test_epsilon_stays_in_unit_interval():
    tracker = EpsilonTracker(epsilon=1.0)
    for _ in range(5):
        assert 0 <= update_epsilon(tracker, _outcome(False, latency_s=100.0)) <= 1
    assert tracker.epsilon == pytest.approx(0.9**5)


def test_random_outcomes_follow_the_update_rule():
    rng = np.random.default_rng(23)
    tracker = EpsilonTracker(t_max_s=30.0, epsilon=float(rng.uniform()))
    expected = tracker.epsilon
    for n in range(10_000):
        correct = (True, False, None)[int(rng.integers(0, 3))]
        latency_s = float(rng.uniform(0.0, 90.0))
        correctness = 0.5 if correct is None else float(correct)
        score = 0.7 * correctness + 0.3 * max(0.0, 1.0 - latency_s / 30.0)
        expected = min(1.0, max(0.0, expected + 0.1 * (score - expected)))

        epsilon = update_epsilon(tracker, _outcome(correct, latency_s=latency_s, frame_id=n + 1))
        assert 0.0 <= epsilon <= 1.0
        assert epsilon == pytest.approx(expected, abs=1e-9)


def test_disabled_tracker_stays_at_zero():
    tracker = EpsilonTracker(enabled=False)
    assert update_epsilon(tracker, _outcome(True)) == 0.0
    assert tracker.history == []
