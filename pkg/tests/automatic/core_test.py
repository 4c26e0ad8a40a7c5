"""
Tests of the robot state types, the virtual clock, constraint checking and
JSON loading with line numbers.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from patrol.core.clock import VirtualClock, to_s, to_us
from patrol.core.constraints import Constraint, ConstraintSet, check_constraints
from patrol.core.jsonfile import JsonSchemaError, load_json_file, parse_json_text
from patrol.core.models import (
    EnvObject,
    Goal,
    HazardSets,
    RobotState,
    Trajectory,
    TrajectorySample,
    WorldFrame,
    snapshot_state,
)

from .builders import make_frame, make_state


def test_clock_counts_whole_microseconds():
    clock = VirtualClock()
    clock.advance_us(to_us(1.0))
    clock.advance_us(to_us(2.517))
    assert clock.now_us() == 3_517_000
    assert clock.now_s() == pytest.approx(3.517)
    assert to_s(to_us(0.1) * 3) == 0.3


def test_clock_never_goes_backwards():
    clock = VirtualClock(start_us=10)
    assert clock.advance_to_us(5) == 10
    assert clock.advance_to_us(20) == 20
    with pytest.raises(ValueError):
        clock.advance_us(-1)


def test_state_dimensions_are_checked():
    assert make_state().dim == 3
    with pytest.raises(ValidationError):
        RobotState(q=(0.0,), v=(0.0,))
    with pytest.raises(ValidationError):
        RobotState(q=(0.0, 0.0), v=(0.0, 0.0, 0.0))
    with pytest.raises(ValidationError):
        RobotState(
            q=(0.0, 0.0), v=(0.0, 0.0), env_objects=(EnvObject(q_env=(1.0, 2.0, 3.0)),)
        )


def test_goal_matches_state_dimension():
    assert Goal(target=(1.0, 2.0, 0.0)).matches(make_state())
    assert not Goal(target=(1.0, 2.0)).matches(make_state())


def test_goal_dimension_is_validated():
    state = make_state()
    assert Goal.for_state((1.0, 2.0, 0.0), state).matches(state)
    with pytest.raises(ValidationError):
        Goal.for_state((1.0, 2.0), state)
    with pytest.raises(ValidationError):
        Goal(target=(1.0,))


def test_trajectory_times_strictly_increase():
    samples = (
        TrajectorySample(t=0.0, position=(0.0, 0.0), velocity=(1.0, 0.0)),
        TrajectorySample(t=1.5, position=(1.5, 0.0), velocity=(1.0, 0.0)),
    )
    assert Trajectory(samples=samples).duration == 1.5
    with pytest.raises(ValidationError):
        Trajectory(samples=(samples[1],))
    with pytest.raises(ValidationError):
        Trajectory(samples=(samples[0], samples[0]))


def test_frame_feature_maps_share_shape():
    with pytest.raises(ValidationError):
        WorldFrame(frame_id=1, feature_maps=(((1.0, 2.0),), ((1.0,), (2.0,))))
    with pytest.raises(ValidationError):
        WorldFrame(frame_id=1, feature_maps=(((1.0,),),), weights=(1.0, 2.0))


def test_snapshot_is_an_immutable_copy():
    state = make_state(q=(1.0, 2.0, 0.5), v=(0.1, 0.0, 0.0))
    frame = make_frame(frame_id=4, captured_at=12.5)
    snap = snapshot_state(state, frame)
    assert (snap.frame_id, snap.captured_at, snap.q) == (4, 12.5, (1.0, 2.0, 0.5))
    assert snap.to_bytes() == snapshot_state(state, frame).to_bytes()
    with pytest.raises(ValidationError):
        snap.frame_id = 5  # type: ignore[misc]


def test_loss_registration_grows_hazard_set():
    sets = HazardSets(hazardous=("spill",))
    grown = sets.register_loss("wet-floor", "slip")
    assert grown.is_hazardous("wet-floor")
    assert grown.loss == ("slip",)
    assert not sets.is_hazardous("wet-floor")


@pytest.fixture
def omega() -> ConstraintSet:
    return ConstraintSet(
        constraints=(
            Constraint(id="max-speed", field="speed", op="<=", bound=1.5),
            Constraint(id="in-hallway", field="q[0]", op="<=", bound=2.5),
            Constraint(id="clearance", field="min_env_distance", op=">=", bound=0.5),
        )
    )


def test_constraints_hold(omega):
    verdict = check_constraints(make_state(q=(1.0, 3.0, 0.0), v=(0.6, 0.8, 0.0)), omega)
    assert verdict.satisfied
    assert verdict.violated_ids == ()


def test_violations_are_reported_in_declaration_order(omega):
    state = make_state(
        q=(3.0, 0.0, 0.0),
        v=(2.0, 0.0, 0.0),
        env_objects=(EnvObject(label="box", q_env=(0.3, 0.0, 0.0)),),
    )
    verdict = check_constraints(state, omega)
    assert not verdict.satisfied
    assert verdict.violated_ids == ("max-speed", "in-hallway", "clearance")


def test_random_states_match_direct_evaluation(omega):
    rng = np.random.default_rng(3)
    for _ in range(1000):
        q = tuple(float(x) for x in rng.uniform(-4.0, 4.0, size=3))
        v = tuple(float(x) for x in rng.uniform(-2.0, 2.0, size=3))
        objects = tuple(
            EnvObject(q_env=tuple(float(x) for x in rng.uniform(-2.0, 2.0, size=3)))
            for _ in range(int(rng.integers(0, 4)))
        )
        speed = math.hypot(*v)
        clearance = min((math.hypot(*o.q_env[:2]) for o in objects), default=math.inf)
        expected = tuple(
            cid
            for cid, holds in (
                ("max-speed", speed <= 1.5),
                ("in-hallway", q[0] <= 2.5),
                ("clearance", clearance >= 0.5),
            )
            if not holds
        )

        verdict = check_constraints(make_state(q=q, v=v, env_objects=objects), omega)
        assert verdict.violated_ids == expected
        assert verdict.satisfied == (not expected)


def test_unreadable_field_counts_as_violated():
    omega = ConstraintSet(constraints=(Constraint(id="far", field="q[7]", bound=1.0),))
    verdict = check_constraints(make_state(), omega)
    assert verdict.violated_ids == ("far",)
    assert "q[7]" in verdict.diagnostics[0]


def test_constraint_set_is_never_empty():
    with pytest.raises(ValidationError):
        ConstraintSet(constraints=())


ADAPTER: TypeAdapter[ConstraintSet] = TypeAdapter(ConstraintSet)


def test_schema_error_points_at_line():
    text = '{\n  "constraints": [\n    {"id": "a", "field": "speed",\n     "bound": "fast"}\n  ]\n}\n'
    with pytest.raises(JsonSchemaError) as info:
        parse_json_text(text, ADAPTER)
    assert info.value.line == 4
    assert info.value.path == "constraints.0.bound"


def test_syntax_error_points_at_line():
    with pytest.raises(JsonSchemaError) as info:
        parse_json_text('{\n  "constraints": [\n  ,]\n}', ADAPTER)
    assert info.value.line == 3


def test_load_json_file(tmp_path):
    path = tmp_path / "omega.json"
    path.write_text('{"constraints": [{"id": "a", "field": "speed", "bound": 1}]}')
    omega = load_json_file(str(path), ADAPTER)
    assert omega.constraints[0].text == "speed <= 1"
