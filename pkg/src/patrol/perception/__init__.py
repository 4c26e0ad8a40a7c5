"""Caption and classification ports, prompt rendering and response parsing."""

from .keywords import best_keyword, contains_keyword
from .models import (
    LEGAL_PAIRS,
    Backend,
    Caption,
    ParsedClassification,
    PromptContext,
    RemoteEndpointConfig,
)
from .parser import UnparsedResponse, parse_response
from .prompt import PROMPT_TEMPLATE, render_prompt
from .remote import (
    RemoteClient,
    RemoteProtocolError,
    RemoteReply,
    RemoteTimeout,
    remote_caption,
    remote_classify,
)
from .scripted import (
    DEFAULT_LEXICON,
    EMPTY_SCENE_PHRASE,
    UnknownTag,
    response_severity,
    scripted_caption,
    scripted_classify,
)

__all__ = [
    "DEFAULT_LEXICON",
    "EMPTY_SCENE_PHRASE",
    "LEGAL_PAIRS",
    "PROMPT_TEMPLATE",
    "Backend",
    "Caption",
    "ParsedClassification",
    "PromptContext",
    "RemoteClient",
    "RemoteEndpointConfig",
    "RemoteProtocolError",
    "RemoteReply",
    "RemoteTimeout",
    "UnknownTag",
    "UnparsedResponse",
    "best_keyword",
    "contains_keyword",
    "parse_response",
    "remote_caption",
    "remote_classify",
    "render_prompt",
    "response_severity",
    "scripted_caption",
    "scripted_classify",
]
