"""Tests of the detection loop on single frames and on the hallway scenario."""

from __future__ import annotations

from typing import Any

import pytest

from patrol.bus.models import BusMode, PipelineConfig, RunLog
from patrol.bus.pipeline import draw_delays, init_pipeline, run_scenario, run_tick, state_of
from patrol.core.models import AnomalyClass, MitigationAction, Severity
from patrol.scenario.loader import LoadedScenario, load_scenario
from patrol.scenario.models import StageDelays

from .builders import make_frame


def _config(loaded: LoadedScenario, **overrides: Any) -> PipelineConfig:
    settings = loaded.file.pipeline
    values: dict = {
        "capture": settings.capture,
        "ad_enabled": settings.ad_enabled,
        "t_max_s": settings.t_max_s,
    }
    values.update(overrides)
    return PipelineConfig(**values)


def _run(loaded: LoadedScenario, seed: int | None = None, **overrides: Any) -> RunLog:
    handle = init_pipeline(
        _config(loaded, **overrides),
        rulebook=loaded.rulebook,
        risk_table=loaded.risk_table,
        lexicon=loaded.lexicon,
        constraints=loaded.file.constraints,
    )
    try:
        return run_scenario(handle, loaded, seed=seed)
    finally:
        handle.close()


@pytest.fixture(scope="module")
def hallway(demo_path) -> LoadedScenario:
    return load_scenario(demo_path)


@pytest.fixture(scope="module")
def wad_log(hallway) -> RunLog:
    return _run(hallway)


@pytest.fixture(scope="module")
def woad_log(hallway) -> RunLog:
    return _run(hallway, ad_enabled=False)


def test_hallway_anomalies_are_classified(wad_log):
    records = {r.frame_id: r for r in wad_log.anomaly_records}
    assert sorted(records) == [3, 6, 8]
    assert records[3].anomaly_class == AnomalyClass.CONFLICT
    assert records[6].anomaly_class == AnomalyClass.CONFLICT
    assert records[8].anomaly_class == AnomalyClass.HAZARDOUS
    assert records[8].severity == Severity.HIGH
    assert records[8].hazard_class == "firearm"
    assert records[8].risk_of_loss == 0.9


def test_hallway_actions_follow_rulebook(wad_log):
    actions = {t.record.frame_id: [a.action for a in t.actions] for t in wad_log.ticks}
    assert actions[3] == [MitigationAction.REPORT, MitigationAction.AVOID]
    assert actions[6] == [MitigationAction.REPLAN]
    assert actions[8] == [MitigationAction.SIREN, MitigationAction.NOTIFY]
    assert actions[1] == [MitigationAction.RESUME]


def test_hallway_ticks_request_archive_and_replan(wad_log):
    flagged = [(t.record.frame_id, t.replan_zone) for t in wad_log.ticks if t.archive]
    assert flagged == [(3, "spill-a"), (6, "box-b"), (8, "firearm-c")]
    assert wad_log.ticks[2].heatmap is not None
    assert wad_log.ticks[2].heatmap.shape == (3, 3)


def test_declared_delays_are_charged_exactly(wad_log):
    first, second = wad_log.ticks[:2]
    assert first.trace.total_us == 6_017_000
    assert first.started_at == 0.0
    # the second frame is captured at 5 s but waits for the first tick
    assert second.started_at == 6.017
    assert all(t.trace.total_us > 0 for t in wad_log.ticks)


def test_epsilon_grows_on_correct_detections(wad_log):
    assert all(t.correct for t in wad_log.ticks)
    history = list(wad_log.epsilon_history)
    assert len(history) == 10
    assert history == sorted(history)
    assert 0 < wad_log.final_epsilon == history[-1] < 1


def test_constraints_are_checked_every_tick(wad_log):
    assert all(t.verdict is not None and t.verdict.satisfied for t in wad_log.ticks)


def test_detection_avoids_zones_without_stopping(wad_log, woad_log):
    assert wad_log.nav is not None and woad_log.nav is not None
    assert wad_log.nav.anomalies_detected == 3
    assert wad_log.nav.sudden_stops == 0
    assert woad_log.nav.anomalies_detected is None
    assert woad_log.nav.sudden_stops >= 2
    assert wad_log.nav.reached_goal and woad_log.nav.reached_goal


def test_disabled_detection_only_resumes(woad_log):
    assert woad_log.anomaly_records == ()
    assert woad_log.final_epsilon == 0.0
    assert woad_log.epsilon_history == ()
    assert {a.action for t in woad_log.ticks for a in t.actions} == {MitigationAction.RESUME}
    assert all(t.trace.llm_us == 0 for t in woad_log.ticks)


def test_runs_are_reproducible(hallway, wad_log):
    again = _run(hallway)
    assert again.model_dump() == wad_log.model_dump()


def test_seed_changes_drawn_delays(hallway, wad_log):
    other = _run(hallway, seed=8)
    assert other.ticks[0].trace == wad_log.ticks[0].trace
    assert [t.trace for t in other.ticks[1:]] != [t.trace for t in wad_log.ticks[1:]]
    assert [t.record.anomaly_class for t in other.ticks] == [
        t.record.anomaly_class for t in wad_log.ticks
    ]


def test_concurrent_bus_matches_deterministic(hallway, wad_log):
    concurrent = _run(hallway, bus_mode=BusMode.CONCURRENT, queue_size=1)
    assert concurrent.model_dump() == wad_log.model_dump()


def test_drawn_delays_respect_minimums(hallway):
    delays = draw_delays(hallway.file, seed=7)
    assert delays[1] == StageDelays(camera_s=1.0, blip_s=2.0, heatmap_s=0.5, llm_s=2.517)
    for frame_id in range(2, 11):
        assert delays[frame_id].blip_s >= 0.9
        assert delays[frame_id].llm_s >= 1.0


def test_state_is_placed_on_frame_cell(hallway):
    spec = hallway.file.frames[2]
    state = state_of(spec, hallway.file)
    assert state.q == (1.25, 2.5, 0.0)
    assert state.v == (0.0, 0.0, 0.0)


def test_unlabelled_tick_is_neutral():
    handle = init_pipeline(PipelineConfig())
    try:
        tick = run_tick(handle, make_frame(tags=("hallway", "firearm")), labelled=False)
    finally:
        handle.close()
    assert tick.truth is None
    assert tick.correct is None
    assert tick.record.anomaly_class == AnomalyClass.HAZARDOUS
    assert handle.reports == [tick.record]
    assert handle.tracker.history[0].score == pytest.approx(0.35 + 0.3)


def test_disabled_detection_costs_no_classifier_time():
    handle = init_pipeline(PipelineConfig(ad_enabled=False))
    try:
        tick = run_tick(
            handle,
            make_frame(tags=("firearm",), anomaly=True),
            delays=StageDelays(camera_s=0.5, blip_s=1.0, heatmap_s=0.25, llm_s=9.0),
        )
    finally:
        handle.close()
    assert tick.record.anomaly_class == AnomalyClass.CLEAR
    assert tick.correct is False
    assert tick.trace.t_total_s == 1.75
    assert tick.epsilon == 0.0
