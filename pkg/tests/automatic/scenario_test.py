"""Tests of scenario and run log loading."""

from __future__ import annotations

import json

import pytest

from patrol.core.models import ScenarioInvalid
from patrol.mitigation.rulebook import default_rulebook, store_rulebook
from patrol.scenario.loader import LogSchemaError, load_run_log, load_scenario, parse_scenario


def _scenario(**fields) -> str:
    document = {"seed": 1, "frames": [{"frame_id": 1, "scene_tags": ["hallway"]}]}
    document.update(fields)
    return json.dumps(document, indent=2)


def test_demo_scenario_loads(demo_path):
    loaded = load_scenario(demo_path)
    assert loaded.file.name == "hallway-patrol"
    assert loaded.file.seed == 7
    assert [f.frame_id for f in loaded.file.frames] == list(range(1, 11))
    assert loaded.rulebook == default_rulebook()
    assert loaded.risk_table.entries["firearm"]["injury"] == 0.9
    assert loaded.file.world is not None
    assert [z.zone_id for z in loaded.file.world.zones] == ["spill-a", "box-b", "firearm-c"]
    assert loaded.file.constraints is not None


def test_defaults_fill_missing_sections():
    loaded = parse_scenario(_scenario())
    assert loaded.file.world is None
    assert loaded.file.pipeline.ad_enabled is None
    assert loaded.lexicon["hallway"] == "a hallway"


def test_duplicate_frame_ids_name_the_line():
    text = _scenario(frames=[{"frame_id": 2}, {"frame_id": 2}])
    with pytest.raises(ScenarioInvalid, match=r"line 3 \(frames\).*repeat"):
        parse_scenario(text)


def test_bad_field_names_its_path():
    text = _scenario(frames=[{"frame_id": 1, "captured_at": -1.0}])
    with pytest.raises(ScenarioInvalid, match=r"frames\.0\.captured_at"):
        parse_scenario(text)


def test_unknown_zone_is_rejected():
    text = _scenario(frames=[{"frame_id": 1, "zone_id": "nowhere"}])
    with pytest.raises(ScenarioInvalid, match="unknown zone 'nowhere'"):
        parse_scenario(text)


def test_state_dimension_must_match():
    state = {"q": [0.0, 0.0], "v": [0.0, 0.0]}
    text = _scenario(state_dim=3, frames=[{"frame_id": 1, "state": state}])
    with pytest.raises(ScenarioInvalid, match="dimension 2"):
        parse_scenario(text)


def test_tags_need_a_phrase():
    text = _scenario(frames=[{"frame_id": 1, "scene_tags": ["hallway", "ufo"]}])
    with pytest.raises(ScenarioInvalid, match="ufo"):
        parse_scenario(text)
    extended = parse_scenario(
        _scenario(
            frames=[{"frame_id": 1, "scene_tags": ["ufo"]}],
            lexicon={"ufo": "a hovering saucer"},
        )
    )
    assert extended.lexicon["ufo"] == "a hovering saucer"


def test_rulebook_reference_is_resolved(tmp_path):
    store_rulebook(default_rulebook()[:1], str(tmp_path / "rules.json"))
    loaded = parse_scenario(_scenario(rulebook="rules.json"), base_dir=str(tmp_path))
    assert loaded.rulebook == default_rulebook()[:1]
    with pytest.raises(ScenarioInvalid, match="rulebook"):
        parse_scenario(_scenario(rulebook="missing.json"), base_dir=str(tmp_path))
    with pytest.raises(ScenarioInvalid):
        parse_scenario(_scenario(rulebook=[]))


def test_unreadable_scenario(tmp_path):
    with pytest.raises(ScenarioInvalid, match="cannot read"):
        load_scenario(str(tmp_path / "absent.json"))
    broken = tmp_path / "broken.json"
    broken.write_text('{\n  "seed": 1,\n  "frames": [\n', encoding="utf-8")
    with pytest.raises(ScenarioInvalid, match="line"):
        load_scenario(str(broken))


def test_run_log_loads(fixture_path):
    log = load_run_log(fixture_path("table4.json"))
    assert len(log.ticks) == 196


def test_run_log_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"ticks": []}), encoding="utf-8")
    with pytest.raises(LogSchemaError, match="no ticks"):
        load_run_log(str(empty))

    garbage = tmp_path / "garbage.json"
    garbage.write_text("not json", encoding="utf-8")
    with pytest.raises(LogSchemaError, match="line 1"):
        load_run_log(str(garbage))

    with pytest.raises(LogSchemaError, match="cannot read"):
        load_run_log(str(tmp_path / "absent.json"))
