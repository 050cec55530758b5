import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtmml.tokenizer import TargetError, format_target, resolve_target, tokenize

WSJ = (
    "At the close of business Thursday, 5,745,188 shares of Connaught and C$44.3 million "
    "face amount of debentures, convertible into 1,826,596 common shares, had been "
    "tendered to its offer."
)

# written out by hand from the splitting rule, not produced by tokenize()
WSJ_TOKENS = [
    "At", "the", "close", "of", "business", "Thursday", ",", "5,745,188", "shares", "of",
    "Connaught", "and", "C$44.3", "million", "face", "amount", "of", "debentures", ",",
    "convertible", "into", "1,826,596", "common", "shares", ",", "had", "been", "tendered",
    "to", "its", "offer", ".",
]


def texts(s):
    return [t.text for t in tokenize(s)]


def test_yesterday_sentence():
    assert texts("Yesterday, John ate well.") == ["Yesterday", ",", "John", "ate", "well", "."]
    assert tokenize("Yesterday, John ate well.")[3].text == "ate"


def test_empty():
    assert tokenize("") == []
    assert tokenize("   \n ") == []


def test_wsj_sentence_by_hand():
    assert texts(WSJ) == WSJ_TOKENS
    toks = tokenize(WSJ)
    assert toks[7].text == "5,745,188"
    assert [t.text for t in toks[2:6]] == ["close", "of", "business", "Thursday"]
    assert [t.text for t in toks[25:28]] == ["had", "been", "tendered"]


def test_quotes_and_hyphens():
    assert texts('John said, "Yes, we have left".') == [
        "John", "said", ",", '"', "Yes", ",", "we", "have", "left", '"', ".",
    ]
    assert "cease-fire" in texts("the August 1988 cease-fire of the war")


def test_offsets_point_into_text():
    s = "  (Hello), world!  "
    for t in tokenize(s):
        assert s[t.char_start : t.char_end] == t.text
        assert t.char_start < t.char_end


@given(st.text(alphabet=st.sampled_from(list("ab1,.;\"'() -$\n")), max_size=40))
def test_tokens_cover_non_whitespace(s):
    toks = tokenize(s)
    assert [t.index for t in toks] == list(range(len(toks)))
    assert "".join(t.text for t in toks) == "".join(s.split())
    for a, b in zip(toks, toks[1:]):
        assert a.char_end <= b.char_start
    # re-tokenizing the space-joined tokens gives the same texts
    assert texts(" ".join(t.text for t in toks)) == [t.text for t in toks]


@pytest.mark.parametrize(
    "spec, n, expected",
    [
        ("#token3", 6, (3,)),
        ("#range(#token7,#token10)", 20, (7, 8, 9, 10)),
        ("#range(#token2,#token3)", 50, (2, 3)),
        ("#token5,#token3", 6, (3, 5)),
        ("#token1, #range(#token3,#token4)", 6, (1, 3, 4)),
        ("\n   #token0", 1, (0,)),
    ],
)
def test_resolve_target(spec, n, expected):
    assert resolve_target(spec, n) == expected


def test_resolve_target_strict_order():
    with pytest.raises(TargetError):
        resolve_target("#token5,#token3", 6, strict=True)


@pytest.mark.parametrize(
    "spec, n",
    [("#token6", 6), ("#range(#token4,#token2)", 9), ("token3", 9), ("#token3,", 9), ("#range(#token1)", 9)],
)
def test_resolve_target_errors(spec, n):
    with pytest.raises(TargetError):
        resolve_target(spec, n)


@given(st.sets(st.integers(0, 30), min_size=1))
def test_format_target_round_trip(indices):
    spec = format_target(indices)
    out = resolve_target(spec, 31)
    assert out == tuple(sorted(indices))
    assert all(a < b for a, b in zip(out, out[1:]))
