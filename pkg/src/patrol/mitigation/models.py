# models do not have public methods
# pylint: disable=too-few-public-methods

"""Rulebook, risk table and action log types."""

from __future__ import annotations

from enum import StrEnum
from typing import Dict, Literal, Tuple

from pydantic import ConfigDict, Field, field_validator, model_validator

from ..core.models import AnomalyClass, FrozenModel, MitigationAction, Severity

RuleClass = Literal[AnomalyClass.HAZARDOUS, AnomalyClass.CONFLICT]


class KeywordRule(FrozenModel):
    """Maps an anomaly keyword to its class, severity and ordered actions."""

    model_config = ConfigDict(populate_by_name=True)

    keyword: str = Field(min_length=1)
    anomaly_class: RuleClass = Field(alias="class")
    severity: Severity
    actions: Tuple[MitigationAction, ...] = Field(min_length=1)
    description: str | None = None

    @model_validator(mode="after")
    def _check_severity_class(self) -> "KeywordRule":
        if self.severity == Severity.HIGH and self.anomaly_class != AnomalyClass.HAZARDOUS:
            raise ValueError(
                f"rule '{self.keyword}': High severity requires class Hazardous"
            )
        return self

    @property
    def response_description(self) -> str:
        """Description used in the canned classifier response."""
        return self.description or f"{self.keyword} detected"


class RiskTable(FrozenModel):
    """Loss probability R_i(S_h) per hazard class and loss class."""

    entries: Dict[str, Dict[str, float]]

    @field_validator("entries")
    @classmethod
    def _check_probabilities(
        cls, entries: Dict[str, Dict[str, float]]
    ) -> Dict[str, Dict[str, float]]:
        for hazard, losses in entries.items():
            if not losses:
                raise ValueError(f"hazard class '{hazard}' has no loss classes")
            for loss, probability in losses.items():
                if not 0 <= probability <= 1:
                    raise ValueError(
                        f"R({hazard} -> {loss}) = {probability} is outside [0, 1]"
                    )
        return entries


class Delivery(StrEnum):
    """How an action reached the outside world."""

    SIMULATED_CALL = "SimulatedCall"
    SIMULATED_EMAIL = "SimulatedEmail"
    SIREN_ON = "SirenOn"
    LOG_ONLY = "LogOnly"
    WEBHOOK = "Webhook"


class WebhookConfig(FrozenModel):
    """Webhook that receives the calls and emails of real responders."""

    url: str = Field(min_length=1)
    timeout_s: float = Field(default=5.0, gt=0)


class ActionLogEntry(FrozenModel):
    """One executed mitigation action."""

    action: MitigationAction
    triggered_by: int
    at: float = Field(ge=0)
    deliveries: Tuple[Delivery, ...] = Field(min_length=1)
    message: str = ""


class ActionSelection(FrozenModel):
    """Severity and ordered actions chosen for a classification."""

    severity: Severity
    actions: Tuple[MitigationAction, ...] = Field(min_length=1)
    rule: KeywordRule | None = None
