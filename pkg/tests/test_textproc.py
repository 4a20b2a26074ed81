import pytest
from hypothesis import given, strategies as st

from caselaw_ir.textproc import (
    Entity,
    bigrams,
    build_gazetteer,
    default_stopwords,
    extract_entities,
    load_gazetteer,
    load_stopwords,
    normalize_gazetteer,
    save_gazetteer,
    tokenize,
    tokenize_case,
)


def test_tokenize_strips_punctuation_and_stopwords():
    assert tokenize("The Court, dismissed.", {"the"}) == ["court", "dismissed"]


def test_tokenize_empty():
    assert tokenize("", set()) == []


def test_tokenize_case_folds():
    assert tokenize("FRAUD fraud", set()) == ["fraud", "fraud"]


def test_tokenize_drops_pure_punctuation():
    assert tokenize("a -- b ... !?", set()) == ["a", "b"]


def test_tokenize_keeps_internal_punctuation():
    assert tokenize("question/answer isn't", set()) == ["question/answer", "isn't"]


_word = st.text(
    alphabet=st.characters(
        codec="utf-8", categories=("L", "N", "P", "S"), max_codepoint=0x2FFF
    ),
    min_size=1,
    max_size=8,
)


@given(st.lists(_word, max_size=30))
def test_tokenize_idempotent_on_its_own_output(pieces):
    text = " ".join(pieces)
    once = tokenize(text, {"the", "of"})
    twice = tokenize(" ".join(once), {"the", "of"})
    assert twice == once


def test_bigrams_examples():
    assert bigrams(["a", "b", "c"]) == [("a", "b"), ("b", "c")]
    assert bigrams(["a"]) == []
    assert bigrams(["a", "a", "a"]) == [("a", "a"), ("a", "a")]


@given(st.lists(st.sampled_from("abc"), max_size=40))
def test_bigram_count(tokens):
    assert len(bigrams(tokens)) == max(0, len(tokens) - 1)


def test_extract_entities_basic():
    ents = extract_entities(
        ["federal", "court", "of", "canada"], {("federal", "court")}
    )
    assert ents == [Entity(("federal", "court"), (0, 0))]


def test_extract_entities_empty_gazetteer():
    assert extract_entities(["a", "b"], set()) == []


def test_extract_entities_longest_wins():
    ents = extract_entities(["a", "b"], {("a",), ("a", "b")})
    assert ents == [Entity(("a", "b"), (0, 0))]


def test_extract_entities_leftmost_and_nonoverlapping():
    # after matching at 0-1, the scan resumes at 2
    ents = extract_entities(["x", "y", "y", "z"], {("x", "y"), ("y", "z")})
    assert [e.surface_tokens for e in ents] == [("x", "y"), ("y", "z")]
    assert [e.span for e in ents] == [(0, 0), (0, 2)]


def test_extract_entities_rejects_empty_pattern():
    with pytest.raises(ValueError):
        extract_entities(["a"], {()})


@given(
    tokens=st.lists(st.sampled_from("abcd"), max_size=25),
    gaz=st.sets(
        st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd")), max_size=6
    ),
)
def test_extract_entities_spans_sorted_and_disjoint(tokens, gaz):
    ents = extract_entities(tokens, gaz)
    spans = [(e.span[1], e.span[1] + len(e.surface_tokens)) for e in ents]
    assert spans == sorted(spans)
    for (a_start, a_end), (b_start, _) in zip(spans, spans[1:]):
        assert a_end <= b_start
    for e in ents:
        start = e.span[1]
        assert tuple(tokens[start : start + len(e.surface_tokens)]) == e.surface_tokens


def test_tokenize_case_flattens_and_extracts_per_paragraph():
    doc = tokenize_case(
        "d1",
        ("The Federal Court ruled.", "Federal Court again."),
        {"the"},
        {("federal", "court")},
    )
    assert doc.flat_tokens == ("federal", "court", "ruled", "federal", "court", "again")
    assert doc.paragraphs_tokens == (
        ("federal", "court", "ruled"),
        ("federal", "court", "again"),
    )
    assert [e.span for e in doc.entities] == [(0, 0), (1, 0)]


def test_build_gazetteer_capitalized_runs():
    gaz = build_gazetteer(
        ["He cited Federal Court of Appeal and the Supreme Court."], {"the", "of"}
    )
    # "of" is lowercase so the first run is "Federal Court"; stopwords drop "of"
    assert ("federal", "court") in gaz
    assert ("supreme", "court") in gaz


def test_normalize_gazetteer_applies_tokenizer():
    out = normalize_gazetteer([("Federal", "Court,")], {"the"})
    assert out == {("federal", "court")}


def test_stopword_and_gazetteer_files(tmp_path):
    sw = tmp_path / "stop.txt"
    sw.write_text("the\nof\n\n", encoding="utf-8")
    assert load_stopwords(sw) == {"the", "of"}
    gz = tmp_path / "gaz.txt"
    save_gazetteer({("federal", "court"), ("supreme", "court")}, gz)
    assert load_gazetteer(gz) == {("federal", "court"), ("supreme", "court")}


def test_default_stopwords_shipped():
    sw = default_stopwords()
    assert "the" in sw and "of" in sw
    assert len(sw) > 100
