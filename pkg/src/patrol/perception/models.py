# models do not have public methods
# pylint: disable=too-few-public-methods

"""Types exchanged by the caption and classification ports."""

from __future__ import annotations

from enum import StrEnum

from pydantic import Field, model_validator

from ..core.models import AnomalyClass, Directive, FrozenModel

LEGAL_PAIRS = {
    AnomalyClass.HAZARDOUS: Directive.REPORT,
    AnomalyClass.CONFLICT: Directive.AVOID,
    AnomalyClass.CLEAR: Directive.RESUME,
}


class Backend(StrEnum):
    """Which implementation produced a perception output."""

    SCRIPTED = "Scripted"
    REMOTE = "Remote"


class Caption(FrozenModel):
    """Caption L = f(X, H) of one frame."""

    text: str = Field(min_length=1)
    source_frame: int = 0
    backend: Backend = Backend.SCRIPTED
    # set when the captioner failed; text then holds a placeholder
    error: str | None = None


class PromptContext(FrozenModel):
    """Combined representation psi(H, X) handed to the classifier."""

    caption: str
    heatmap_summary: str
    rendered: str
    source_frame: int = 0


class ParsedClassification(FrozenModel):
    """Grammar-conformant classifier answer."""

    anomaly_class: AnomalyClass
    description: str = ""
    directive: Directive

    @model_validator(mode="after")
    def _check_pairing(self) -> "ParsedClassification":
        expected = LEGAL_PAIRS.get(self.anomaly_class)
        if expected is None:
            raise ValueError(f"{self.anomaly_class} is not a classifier output class")
        if self.directive != expected:
            raise ValueError(
                f"{self.anomaly_class} must pair with {expected}, got {self.directive}"
            )
        return self


class RemoteEndpointConfig(FrozenModel):
    """Remote classifier/captioner endpoint."""

    base_url: str
    api_key_env_var: str = "PATROL_API_KEY"
    timeout_s: float = Field(default=10.0, gt=0)
    retries: int = Field(default=1, ge=0)
