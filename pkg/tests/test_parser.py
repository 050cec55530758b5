import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_text
from rtmml.algebra import AFTER, EQUAL, RelationSet, Tense, View
from rtmml.model import AnnotatedDocument, DocAnn, LinkAnn, PointRef, TimeRefAnn, VerbAnn
from rtmml.parser import (
    RTMMLParseError,
    RTMMLValidationError,
    parse_rtmml,
    read_rtmml,
    serialize_rtmml,
    validate,
)
from rtmml.tokenizer import tokenize

FIXTURES = [
    "yesterday.rtmml",
    "yesterday_link.rtmml",
    "reported_speech.rtmml",
    "copperfield.rtmml",
    "saddam.rtmml",
    "wsj_0533.rtmml",
    "strict_cycle.rtmml",
    "single_verb.rtmml",
]


def minimal(body: str, text: str = "Yesterday, John ate well.") -> str:
    return f'<rtmml>\n{text}\n<seg type="token" />\n{body}\n</rtmml>'


def test_yesterday_example():
    doc = parse_rtmml(fixture_text("yesterday.rtmml"))
    assert doc.text == "Yesterday, John ate well."
    assert len(doc.timerefxs) == 1 and doc.timerefxs[0].target == (0,)
    (v1,) = doc.verbs
    assert v1.id == "v1" and v1.target == (3,)
    assert (v1.view, v1.tense) == (View.SIMPLE, Tense.PAST)
    assert (v1.sr, v1.er, v1.se) == (AFTER, EQUAL, AFTER)
    assert v1.r == PointRef("timex", "t1")
    assert v1.s == PointRef("doc")
    assert doc.doc.time == "now"


def test_disjunctive_relation_attribute():
    doc = parse_rtmml(minimal('<verb xml:id="v1" target="#token3" sr="&lt;=" />'))
    assert doc.verbs[0].sr == RelationSet("<=")
    # raw '<' inside a relation attribute is tolerated in lenient mode
    doc = parse_rtmml(minimal('<verb xml:id="v1" target="#token3" sr="<=" />'))
    assert doc.verbs[0].sr == RelationSet("<=")
    with pytest.raises(RTMMLParseError):
        parse_rtmml(minimal('<verb xml:id="v1" target="#token3" sr="<=" />'), strict=True)


def test_empty_document():
    doc = parse_rtmml("<rtmml></rtmml>")
    assert doc == AnnotatedDocument()
    assert validate(doc).valid


def test_copperfield_shape():
    doc = parse_rtmml(fixture_text("copperfield.rtmml"))
    assert len(doc.verbs) == 6
    assert [l.kind for l in doc.links] == ["SAME_TIMEFRAME", "SAME_TIMEFRAME"]
    assert doc.links[0].targets == ("v1", "v2", "v3", "v4")
    assert doc.doc == DocAnn("1850", "BEFORE")
    assert doc.verbs[4].r == PointRef("verb", "v4", "e")
    # v5 and v6 share a target range in the source markup
    assert doc.verbs[4].target == doc.verbs[5].target == (26, 27, 28)
    words = {v.id: doc.target_text(v.target) for v in doc.verbs}
    assert words["v1"] == "had put"
    assert words["v2"] == "took"
    assert words["v3"] == "blew"
    assert words["v4"] == "thought"
    assert words["v5"] == "would gradually blow"


def test_rtmlink_target_attribute_syntax():
    doc = parse_rtmml(fixture_text("wsj_0533.rtmml"))
    (link,) = doc.links
    assert link.kind == "POSITIONS"
    assert link.source == "t1" and link.targets == ("v1",)


@pytest.mark.parametrize(
    "body, message",
    [
        ('<verb xml:id="v1" target="#token3" sr="" />', "sr"),
        ('<verb xml:id="v1" target="#token3" view="simple" tense="past" /><verb xml:id="v1" target="#token2" view="simple" tense="past" />', "duplicate"),
        ('<verb xml:id="v1" target="#tokenX" view="simple" tense="past" />', "malformed"),
        ('<verb xml:id="v1" target="#token3" view="middle" tense="past" />', "middle"),
        ('<rtmlink xml:id="l1"><link target="#v1" /></rtmlink>', "type"),
        ('<rtmlink xml:id="l1" type="CAUSES"><link target="#v1" /></rtmlink>', "CAUSES"),
    ],
)
def test_parse_errors(body, message):
    with pytest.raises(RTMMLParseError, match=message):
        read_rtmml(minimal(body))


def test_malformed_xml_and_root():
    with pytest.raises(RTMMLParseError):
        read_rtmml("<rtmml><verb></rtmml>")
    with pytest.raises(RTMMLParseError):
        read_rtmml("<TimeML></TimeML>")
    with pytest.raises(RTMMLParseError):
        read_rtmml('<rtmml><seg type="char" /></rtmml>')


def test_unknown_attribute_lenient_and_strict():
    body = '<verb xml:id="v1" target="#token3" view="simple" tense="past" colour="red" />'
    doc, report = read_rtmml(minimal(body))
    assert report.codes() == ["UNKNOWN_ATTRIBUTE"]
    assert report.valid
    with pytest.raises(RTMMLParseError):
        read_rtmml(minimal(body), strict=True)
    _, report = read_rtmml(minimal("<foo />"))
    assert report.codes() == ["UNKNOWN_ELEMENT"]


def test_dangling_ref():
    doc, _ = read_rtmml(fixture_text("dangling.rtmml"))
    report = validate(doc)
    assert report.codes() == ["DANGLING_REF"]
    assert report.errors[0].location == "v1@r"
    with pytest.raises(RTMMLValidationError):
        parse_rtmml(fixture_text("dangling.rtmml"))


def test_named_point_is_not_dangling():
    doc = parse_rtmml(minimal('<verb xml:id="v1" target="#token3" view="simple" tense="past" s="sv1" />'))
    assert doc.verbs[0].s == PointRef("named", "sv1")


def test_saddam_fixture_valid():
    doc, report = read_rtmml(fixture_text("saddam.rtmml"))
    report.extend(validate(doc))
    assert report.issues == []
    words = {v.id: doc.target_text(v.target) for v in doc.verbs}
    assert words == {"v1": "appeared", "v2": "had rejected"}


def test_contradictory_tense():
    doc, _ = read_rtmml(minimal('<verb xml:id="v1" target="#token3" view="simple" tense="past" sr="&lt;" />'))
    assert "CONTRADICTORY_TENSE" in validate(doc).codes()


def test_contradictory_relations_without_tense():
    doc, _ = read_rtmml(minimal('<verb xml:id="v1" target="#token3" sr=">" er="=" se="&lt;" />'))
    assert validate(doc).codes() == ["CONTRADICTORY_RELATIONS"]


@pytest.mark.parametrize(
    "body, code",
    [
        ('<verb xml:id="v1" target="#token9" view="simple" tense="past" />', "TARGET_RANGE"),
        ('<verb xml:id="v1" target="#token3" />', "MISSING_TENSE"),
        ('<verb xml:id="v1" target="#token3" view="simple" tense="past" r="#v7.e" />', "DANGLING_REF"),
        (
            '<verb xml:id="v1" target="#token3" view="simple" tense="past" />'
            '<rtmlink xml:id="l1" type="REPORTS"><link target="#v1" /></rtmlink>',
            "LINK_ARITY",
        ),
        (
            '<verb xml:id="v1" target="#token3" view="simple" tense="past" />'
            '<rtmlink xml:id="l1" type="SAME_TIMEFRAME"><link target="#v1" /></rtmlink>',
            "LINK_ARITY",
        ),
        (
            '<verb xml:id="v1" target="#token3" view="simple" tense="past" />'
            '<rtmlink xml:id="l1" type="SAME_TIMEFRAME"><link target="#v1" /><link target="#v2" /></rtmlink>',
            "DANGLING_REF",
        ),
        (
            '<timerefx xml:id="t1" target="#token0" />'
            '<verb xml:id="v1" target="#token3" view="simple" tense="past" />'
            '<rtmlink xml:id="l1" type="REPORTS"><link source="#t1" /><link target="#v1" /></rtmlink>',
            "LINK_ENTITY",
        ),
        (
            '<verb xml:id="v1" target="#token3" view="simple" tense="past" />'
            '<verb xml:id="v2" target="#token2" view="simple" tense="past" />'
            '<rtmlink xml:id="l1" type="POSITIONS"><link source="#v1" /><link target="#v2" /></rtmlink>',
            "LINK_ENTITY",
        ),
    ],
)
def test_validation_errors(body, code):
    doc, _ = read_rtmml(minimal(body))
    report = validate(doc)
    assert code in [i.code for i in report.errors]
    assert all(i.location for i in report.issues)


def test_time_format_warning():
    doc, _ = read_rtmml(minimal('<doc time="last week" /><verb xml:id="v1" target="#token3" view="simple" tense="past" />'))
    report = validate(doc)
    assert report.valid and report.codes() == ["TIME_FORMAT"]
    for ok in ("now", "1850", "1990-08-15", "1990-08-15T00:44", "1989-10"):
        doc, _ = read_rtmml(minimal(f'<doc time="{ok}" /><verb xml:id="v1" target="#token3" view="simple" tense="past" />'))
        assert validate(doc).issues == []


def test_report_formats():
    doc, _ = read_rtmml(fixture_text("dangling.rtmml"))
    report = validate(doc)
    assert report.to_text().startswith("error DANGLING_REF v1@r ")
    data = json.loads(report.to_json())
    assert data["valid"] is False and data["issues"][0]["code"] == "DANGLING_REF"


def test_serialize_empty():
    assert serialize_rtmml(AnnotatedDocument()).split() == ["<rtmml>", "<seg", 'type="token"', "/>", "</rtmml>"]


def test_serialize_relation_canonical_order():
    doc = AnnotatedDocument(
        text="a b",
        tokens=tuple(tokenize("a b")),
        verbs=(VerbAnn("v1", (1,), sr=RelationSet("><")),),
    )
    out = serialize_rtmml(doc)
    assert 'sr="&lt;>"' in out
    assert parse_rtmml(out).verbs[0].sr == RelationSet("<>")


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    doc, _ = read_rtmml(fixture_text(name))
    again, report = read_rtmml(serialize_rtmml(doc))
    assert again == doc
    assert report.issues == []


WORDS = st.sampled_from(["John", "said", "left", "Yes,", "we", '"ok".', "5,745", "C$4.3", "it."])
RELS = st.one_of(st.none(), st.integers(1, 7).map(RelationSet))


@st.composite
def documents(draw):
    text = " ".join(draw(st.lists(WORDS, min_size=1, max_size=12)))
    tokens = tuple(tokenize(text))
    n = len(tokens)
    target = st.sets(st.integers(0, n - 1), min_size=1, max_size=3).map(lambda s: tuple(sorted(s)))
    n_t = draw(st.integers(0, 2))
    timexes = tuple(
        TimeRefAnn(f"t{i + 1}", draw(target), draw(st.sampled_from([None, "1990-08-15", "now"])))
        for i in range(n_t)
    )
    n_v = draw(st.integers(0, 3))
    verb_ids = [f"v{i + 1}" for i in range(n_v)]
    refs = [PointRef("doc")] + [PointRef("timex", t.id) for t in timexes]
    refs += [PointRef("verb", v, p) for v in verb_ids for p in "ser"] + [PointRef("named", "s_other")]
    verbs = []
    for vid in verb_ids:
        verbs.append(
            VerbAnn(
                vid,
                draw(target),
                view=draw(st.sampled_from([None, *View])),
                tense=draw(st.sampled_from([None, *Tense])),
                se=draw(RELS),
                er=draw(RELS),
                sr=draw(RELS),
                s=draw(st.one_of(st.none(), st.sampled_from(refs))),
                e=draw(st.one_of(st.none(), st.sampled_from(refs))),
                r=draw(st.one_of(st.none(), st.sampled_from(refs))),
            )
        )
    links = []
    if n_v >= 2:
        links.append(LinkAnn("l1", "SAME_TIMEFRAME", None, tuple(verb_ids)))
        links.append(LinkAnn("l2", "REPORTS", verb_ids[0], (verb_ids[1],)))
    if n_v and n_t:
        links.append(LinkAnn("l3", "POSITIONS", timexes[0].id, (verb_ids[-1],)))
    doc = DocAnn(
        draw(st.sampled_from([None, "now", "1850"])), draw(st.sampled_from([None, "BEFORE"]))
    )
    return AnnotatedDocument(text, tokens, doc, tuple(verbs), timexes, tuple(links))


@settings(max_examples=300)
@given(documents())
def test_round_trip_property(doc):
    again, _ = read_rtmml(serialize_rtmml(doc))
    assert again == doc
