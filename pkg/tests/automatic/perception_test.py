"""
Tests of the classifier response grammar, keyword matching, prompt rendering
and the scripted backends.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from patrol.core.models import AnomalyClass, Directive
from patrol.mitigation.rulebook import canned_responses, default_rulebook
from patrol.perception.keywords import best_keyword, contains_keyword
from patrol.perception.models import LEGAL_PAIRS, Caption, ParsedClassification
from patrol.perception.parser import UnparsedResponse, parse_response
from patrol.perception.prompt import render_prompt
from patrol.perception.scripted import (
    DEFAULT_LEXICON,
    UnknownTag,
    scripted_caption,
    scripted_classify,
)
from patrol.saliency.heatmap import HeatmapSummary

from .builders import make_frame


@pytest.mark.parametrize(
    "raw, anomaly_class, description, directive",
    [
        (
            "HAZARDOUS: firearm detected REPORT",
            AnomalyClass.HAZARDOUS,
            "firearm detected",
            Directive.REPORT,
        ),
        ("  clear: quiet hallway resume", AnomalyClass.CLEAR, "quiet hallway", Directive.RESUME),
        (
            "'CONFLICT: box in the way' and 'AVOID'",
            AnomalyClass.CONFLICT,
            "box in the way",
            Directive.AVOID,
        ),
        (
            "CONFLICT: report the spill, then AVOID. Stay safe.",
            AnomalyClass.CONFLICT,
            "report the spill, then",
            Directive.AVOID,
        ),
    ],
)
def test_grammar_conformant_answers(raw, anomaly_class, description, directive):
    parsed = parse_response(raw)
    assert parsed == ParsedClassification(
        anomaly_class=anomaly_class, description=description, directive=directive
    )


@pytest.mark.parametrize(
    "raw, reason",
    [
        ("HAZARDOUS: firearm detected AVOID", "illegal class/directive pairing"),
        ("CLEAR: all good", "missing directive token"),
        ("Sure! HAZARDOUS: firearm REPORT", "missing class token"),
        ("", "missing class token"),
    ],
)
def test_ungrammatical_answers(raw, reason):
    with pytest.raises(UnparsedResponse) as info:
        parse_response(raw)
    assert info.value.reason == reason
    assert info.value.raw == raw


@pytest.mark.parametrize(
    "raw",
    [":", "HAZARDOUS", "CLEAR:", "\x00\x01", "CLEAR: RESUME RESUME", "report avoid", "{}" * 50],
)
def test_parser_is_total(raw):
    try:
        result = parse_response(raw)
    except UnparsedResponse:
        return
    assert isinstance(result, ParsedClassification)


def test_non_text_is_unparsed():
    with pytest.raises(UnparsedResponse) as info:
        parse_response(None)  # type: ignore[arg-type]
    assert info.value.reason == "response is not text"


CLASS_TOKENS = {
    "HAZARDOUS": AnomalyClass.HAZARDOUS,
    "CONFLICT": AnomalyClass.CONFLICT,
    "CLEAR": AnomalyClass.CLEAR,
}
DIRECTIVE_TOKENS = {
    "REPORT": Directive.REPORT,
    "AVOID": Directive.AVOID,
    "RESUME": Directive.RESUME,
}


@pytest.mark.parametrize("class_token", list(CLASS_TOKENS))
@pytest.mark.parametrize("directive_token", list(DIRECTIVE_TOKENS))
def test_every_class_directive_pair(class_token, directive_token):
    raw = f"{class_token}: something on the floor {directive_token}"
    anomaly_class = CLASS_TOKENS[class_token]
    directive = DIRECTIVE_TOKENS[directive_token]

    if LEGAL_PAIRS[anomaly_class] != directive:
        with pytest.raises(UnparsedResponse) as info:
            parse_response(raw)
        assert info.value.reason == "illegal class/directive pairing"
        return
    assert parse_response(raw) == ParsedClassification(
        anomaly_class=anomaly_class, description="something on the floor", directive=directive
    )


def test_long_padding_parses_quickly():
    started = time.perf_counter()
    assert parse_response("CLEAR:" + " " * 2000 + "x RESUME").description == "x"
    assert parse_response("CLEAR:" + " " * 20_000 + "'" + "\t" * 20_000 + "RESUME").description == ""
    assert parse_response("CLEAR: x" + " and" * 5000 + " RESUME").description.startswith("x and")
    with pytest.raises(UnparsedResponse):
        parse_response(" " * 20_000 + "'" + " " * 20_000 + "x")
    with pytest.raises(UnparsedResponse):
        parse_response("HAZARDOUS" + " " * 20_000 + "REPORT")
    assert time.perf_counter() - started < 1.0


FUZZ_PIECES = (
    "HAZARDOUS",
    "conflict",
    "Clear",
    ":",
    "REPORT",
    "avoid",
    "Resume",
    "and",
    "sand",
    "'",
    '"',
    " ",
    "\t",
    "\n",
    "spill",
    "\x00",
)


def test_parser_is_total_on_random_text():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        raw = "".join(str(p) for p in rng.choice(FUZZ_PIECES, size=rng.integers(0, 16)))
        try:
            result = parse_response(raw)
        except UnparsedResponse as e:
            assert e.raw == raw
            continue
        assert result.directive == LEGAL_PAIRS[result.anomaly_class]
        assert result.description == result.description.strip(" \t\r\n'\"")


def test_keywords_match_whole_words():
    assert contains_keyword("two FIREARMS on the floor", "firearm")
    assert contains_keyword("people fighting", "fight")
    assert not contains_keyword("firearmless corridor", "firearm")


def test_best_keyword_precedence():
    ranks = {"spill": 2, "firearm": 3, "box": 2, "obstruction": 2}
    assert best_keyword("a spill next to a firearm", ranks) == "firearm"
    assert best_keyword("a box obstruction", ranks) == "obstruction"
    assert best_keyword("nothing here", ranks) is None


def test_prompt_embeds_caption_and_summary():
    caption = Caption(text="a view of a hallway", source_frame=9)
    summary = HeatmapSummary(source_frame=9, text="no salient regions")
    ctx = render_prompt(caption, summary)
    assert ctx.source_frame == 9
    assert "The image caption is: 'a view of a hallway'." in ctx.rendered
    assert "The heatmap analysis shows: 'no salient regions'." in ctx.rendered
    assert "'HAZARDOUS: [brief description]'" in ctx.rendered


def test_scripted_caption_follows_tag_order():
    caption = scripted_caption(make_frame(tags=("hallway", "spill")))
    assert caption.text == "a view of a hallway, a liquid spill on the floor"
    assert scripted_caption(make_frame(tags=())).text == "a view of an empty scene"
    with pytest.raises(UnknownTag):
        scripted_caption(make_frame(tags=("unicorn",)))


def _ctx(text: str):
    return render_prompt(Caption(text=text), HeatmapSummary(text="no salient regions"))


def test_scripted_classifier_picks_most_severe_keyword():
    responses = canned_responses(default_rulebook())
    raw = scripted_classify(_ctx("a liquid spill near a person holding a firearm"), responses)
    assert raw == "HAZARDOUS: firearm detected REPORT"
    assert parse_response(raw).anomaly_class == AnomalyClass.HAZARDOUS


def test_scripted_classifier_clears_quiet_scenes():
    responses = canned_responses(default_rulebook())
    raw = scripted_classify(_ctx("a view of a hallway"), responses)
    assert raw == "CLEAR: a view of a hallway RESUME"
    with pytest.raises(ValueError):
        scripted_classify(_ctx("a view of a hallway"), {})


def test_scripted_caption_keeps_any_tag_order():
    rng = np.random.default_rng(11)
    pool = sorted(DEFAULT_LEXICON)
    for _ in range(200):
        picked = rng.choice(pool, size=int(rng.integers(1, 6)), replace=False)
        tags = tuple(str(tag) for tag in rng.permutation(picked))
        caption = scripted_caption(make_frame(tags=tags))
        assert caption.text == "a view of " + ", ".join(DEFAULT_LEXICON[tag] for tag in tags)
