"""
Anomaly detection factor epsilon.

epsilon moves toward a per-outcome score by a fixed learning rate:

    score = w_c * correct + w_l * max(0, 1 - latency / t_max)
    epsilon <- clamp(epsilon + lr * (score - epsilon), 0, 1)

After n perfect zero-latency outcomes from 0, epsilon = 1 - (1 - lr)^n.
A disabled tracker stays at 0.
"""

from __future__ import annotations

from typing import List

from pydantic import BaseModel, Field

from ..core.models import DetectionOutcome, FrozenModel

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_CORRECTNESS_WEIGHT = 0.7
DEFAULT_LATENCY_WEIGHT = 0.3
UNKNOWN_CORRECTNESS = 0.5


class EpsilonStep(FrozenModel):
    """One applied update."""

    frame_id: int
    correct: bool | None
    latency_s: float
    score: float
    delta: float
    epsilon: float


class EpsilonTracker(BaseModel):
    """Mutable epsilon state, owned by the sequential tick loop."""

    enabled: bool = True
    epsilon: float = Field(default=0.0, ge=0, le=1)
    t_max_s: float = Field(default=30.0, gt=0)
    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0, le=1)
    w_c: float = DEFAULT_CORRECTNESS_WEIGHT
    w_l: float = DEFAULT_LATENCY_WEIGHT
    history: List[EpsilonStep] = []

    def score(self, outcome: DetectionOutcome) -> float:
        """Correctness/latency score of an outcome, in [0, 1]."""
        if outcome.correct is None:
            correctness = UNKNOWN_CORRECTNESS
        else:
            correctness = 1.0 if outcome.correct else 0.0
        timeliness = max(0.0, 1.0 - outcome.latency_s / self.t_max_s)
        return self.w_c * correctness + self.w_l * timeliness


def update_epsilon(tracker: EpsilonTracker, outcome: DetectionOutcome) -> float:
    """
    Apply one detection outcome to the tracker.

    Args:
        tracker (EpsilonTracker): Tracker to update in place.
        outcome (DetectionOutcome): Scored detection.

    Returns:
        float: The new epsilon; always 0 for a disabled tracker.
    """
    if not tracker.enabled:
        tracker.epsilon = 0.0
        return 0.0

    score = tracker.score(outcome)
    previous = tracker.epsilon
    updated = previous + tracker.learning_rate * (score - previous)
    tracker.epsilon = min(1.0, max(0.0, updated))
    tracker.history.append(
        EpsilonStep(
            frame_id=outcome.record.frame_id,
            correct=outcome.correct,
            latency_s=outcome.latency_s,
            score=score,
            delta=tracker.epsilon - previous,
            epsilon=tracker.epsilon,
        )
    )
    return tracker.epsilon
