"""Response mapping, responders, risk of loss and the detection factor."""

from .epsilon import EpsilonStep, EpsilonTracker, update_epsilon
from .models import (
    ActionLogEntry,
    ActionSelection,
    Delivery,
    KeywordRule,
    RiskTable,
    WebhookConfig,
)
from .responders import (
    SimulatedSinks,
    SinkUnavailable,
    WebhookSink,
    execute_action,
    make_sinks,
)
from .risk import (
    UnknownHazardClass,
    default_risk_table,
    hazard_sets_from,
    load_risk_table,
    risk_of_loss,
    store_risk_table,
    uncovered_losses,
)
from .rulebook import (
    NO_MATCH_SELECTION,
    UNPARSED_SELECTION,
    Rulebook,
    RulebookError,
    canned_responses,
    default_rulebook,
    load_rulebook,
    lookup_rule,
    parse_rulebook,
    select_actions,
    store_rulebook,
)

__all__ = [
    "NO_MATCH_SELECTION",
    "UNPARSED_SELECTION",
    "ActionLogEntry",
    "ActionSelection",
    "Delivery",
    "EpsilonStep",
    "EpsilonTracker",
    "KeywordRule",
    "RiskTable",
    "Rulebook",
    "RulebookError",
    "SimulatedSinks",
    "SinkUnavailable",
    "UnknownHazardClass",
    "WebhookConfig",
    "WebhookSink",
    "canned_responses",
    "default_risk_table",
    "default_rulebook",
    "execute_action",
    "hazard_sets_from",
    "load_risk_table",
    "load_rulebook",
    "lookup_rule",
    "make_sinks",
    "parse_rulebook",
    "risk_of_loss",
    "select_actions",
    "store_risk_table",
    "store_rulebook",
    "uncovered_losses",
]
