"""Scorer tests, anchored by a brute-force oracle that re-implements every
formula with plain loops over the fixture documents."""

import math

import pytest
from hypothesis import given, strategies as st

from caselaw_ir.lexical import (
    CollectionStats,
    DuetFeatures,
    ScoringParams,
    bigram_lmir,
    bm25,
    build_stats,
    duet_features,
    lm_score,
    lm_term_probability,
    sdr_similarity,
    tfidf,
    word_view,
)
from caselaw_ir.textproc import Entity, TokenizedDoc
from oracles import o_bigram_lmir, o_duet, o_sdr

EPS = 1e-10


def close(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def _doc(doc_id, tokens, entities=()):
    return TokenizedDoc(doc_id, (tuple(tokens),), tuple(tokens), tuple(entities))


def _stats(**kwargs):
    defaults = dict(
        num_docs=1,
        avg_doc_len=1.0,
        df={},
        cf={},
        total_tokens=1,
        bigram_cf={},
        total_bigrams=0,
    )
    defaults.update(kwargs)
    return CollectionStats(**defaults)


# ---------------------------------------------------------- build_stats ---


def test_build_stats_counts():
    docs = [_doc("d1", ["a", "b"]), _doc("d2", ["a"])]
    stats = build_stats(docs)
    assert stats.num_docs == 2
    assert stats.df["a"] == 2 and stats.cf["a"] == 2
    assert stats.df["b"] == 1
    assert stats.avg_doc_len == 1.5
    assert stats.total_tokens == 3


def test_build_stats_bigrams():
    stats = build_stats([_doc("d1", ["a", "b", "c"])])
    assert stats.bigram_cf[("a", "b")] == 1
    assert stats.total_bigrams == 2


def test_build_stats_rejects_empty():
    with pytest.raises(ValueError):
        build_stats([])
    with pytest.raises(ValueError, match="zero tokens"):
        build_stats([_doc("d1", [])])


# --------------------------------------------------------- hand examples ---


def _two_doc_stats():
    # doc "dx" = [t, t, x], doc "dy" = [y]: N=2, avgdl=2, df(t)=1
    return build_stats([_doc("dx", ["t", "t", "x"]), _doc("dy", ["y"])])


def test_bm25_hand_example():
    stats = _two_doc_stats()
    got = bm25(word_view(["t"]), word_view(["t", "t", "x"]), stats)
    assert abs(got - math.log(2) * 4.4 / 3.65) < 1e-9


def test_bm25_absent_term_contributes_zero():
    stats = _two_doc_stats()
    assert bm25(word_view(["y"]), word_view(["t", "t", "x"]), stats) == 0.0


def test_tfidf_hand_example():
    stats = _two_doc_stats()
    got = tfidf(word_view(["t"]), word_view(["t", "t", "x"]), stats)
    assert close(got, 2 * math.log(1.5))


def test_tfidf_disjoint_vocabulary_zero():
    stats = _two_doc_stats()
    assert tfidf(word_view(["zz"]), word_view(["t", "t", "x"]), stats) == 0.0


def test_tfidf_duplicate_query_terms_double():
    stats = _two_doc_stats()
    single = tfidf(word_view(["t"]), word_view(["t", "t", "x"]), stats)
    double = tfidf(word_view(["t", "t"]), word_view(["t", "t", "x"]), stats)
    assert close(double, 2 * single)


def test_lm_dirichlet_hand_example():
    p = lm_term_probability(tf=0, doc_len=100, cf=1, total_cf=100, mode="dirichlet")
    assert close(p, 20 / 2100)


def test_lm_jm_hand_example():
    p = lm_term_probability(tf=1, doc_len=2, cf=1, total_cf=2, mode="jm")
    assert close(p, 0.5)


def test_lm_mle_single_term_doc_scores_zero():
    stats = build_stats([_doc("d", ["only"])])
    assert lm_score(word_view(["only"]), word_view(["only"]), stats, "mle") == 0.0


def test_lm_rejects_empty_doc():
    stats = _two_doc_stats()
    for mode in ("mle", "jm", "dirichlet", "twoway"):
        with pytest.raises(ValueError, match="zero-length"):
            lm_score(word_view(["t"]), word_view([]), stats, mode)


def test_lm_normalizes_on_closed_vocabulary():
    """Acceptance: every mode's p(.|d) sums to 1 on a 50-term vocabulary."""
    import numpy as np

    rng = np.random.default_rng(4)
    vocab = [f"w{i}" for i in range(50)]
    cf = {t: int(rng.integers(1, 40)) for t in vocab}
    total = sum(cf.values())
    tf = {t: (int(rng.integers(0, 6)) if rng.random() < 0.4 else 0) for t in vocab}
    if sum(tf.values()) == 0:
        tf[vocab[0]] = 3
    d_len = sum(tf.values())
    no_floor = ScoringParams(epsilon=0.0)
    for mode in ("mle", "jm", "dirichlet", "twoway"):
        mass = sum(
            lm_term_probability(tf[t], d_len, cf[t], total, mode, no_floor)
            for t in vocab
        )
        assert abs(mass - 1.0) < 1e-9, mode


def test_bigram_lmir_hand_example():
    # collection bigram prob of (a, b) is 1/10
    stats = _stats(bigram_cf={("a", "b"): 1}, total_bigrams=10)
    got = bigram_lmir(_doc("q", ["a", "b"]), _doc("d", ["a", "b", "c"]), stats)
    assert abs(got - math.log(0.8 * 0.5 + 0.2 * 0.1)) < 1e-9


def test_bigram_lmir_absent_everywhere_floors_at_epsilon():
    stats = _stats(bigram_cf={("a", "b"): 1}, total_bigrams=10)
    got = bigram_lmir(_doc("q", ["x", "y"]), _doc("d", ["a", "b"]), stats)
    assert close(got, math.log(EPS))


def test_bigram_lmir_rejects_short_query():
    stats = _stats(total_bigrams=1, bigram_cf={("a", "b"): 1})
    with pytest.raises(ValueError, match="fewer than 2"):
        bigram_lmir(_doc("q", ["a"]), _doc("d", ["a", "b"]), stats)


def test_bigram_lmir_identical_doc_is_maximal():
    # five equal-length docs; the query scores strictly highest against itself
    docs = [
        _doc("d1", ["appeal", "dismissed", "with", "costs", "today", "only"]),
        _doc("d2", ["appeal", "allowed", "with", "costs", "denied", "fully"]),
        _doc("d3", ["motion", "granted", "against", "payment", "terms", "here"]),
        _doc("d4", ["contract", "breach", "damages", "awarded", "appeal", "costs"]),
        _doc("d5", ["notice", "served", "appeal", "dismissed", "costs", "split"]),
    ]
    stats = build_stats(docs)
    query = docs[0]
    scores = {d.doc_id: bigram_lmir(query, d, stats) for d in docs}
    best = max(scores, key=scores.get)
    assert best == "d1"
    assert all(scores["d1"] > s for did, s in scores.items() if did != "d1")


# ------------------------------------------------- entity-side behaviour ---


def test_entity_tf_capped_at_one():
    ent = Entity(("alpha", "beta"), (0, 0))
    query = _doc("q", ["alpha", "beta", "x"], [ent])
    # phrase occurs twice in the doc stream; presence caps tf at 1
    doc_twice = _doc("d2x", ["alpha", "beta", "alpha", "beta"], [ent, Entity(("alpha", "beta"), (0, 2))])
    doc_once = _doc("d1x", ["alpha", "beta", "pad", "pad"], [ent])
    stats = build_stats([doc_twice, doc_once])
    f_twice = duet_features(query, doc_twice, stats).values
    f_once = duet_features(query, doc_once, stats).values
    assert f_twice[6] == f_once[6]  # Qe-Dw BM25 identical despite double count


def test_duet_without_entities_yields_baseline_values():
    query = _doc("q", ["shared"])
    stats = build_stats([query])
    feats = duet_features(query, query, stats).values
    assert feats[6] == 0.0 and feats[7] == 0.0 and feats[8] == 0.0  # empty Qe
    assert feats[9] == 0.0                                          # no doc entities
    assert close(feats[10], math.log(EPS))                          # floored Dirichlet


def test_duet_rejects_empty_query():
    stats = build_stats([_doc("d", ["a"])])
    with pytest.raises(ValueError, match="no tokens"):
        duet_features(_doc("q", []), _doc("d", ["a"]), stats)


def test_duet_shape_and_finiteness(fixture_query, fixture_docs, fixture_stats):
    for doc in fixture_docs.values():
        feats = duet_features(fixture_query, doc, fixture_stats)
        assert len(feats.values) == 11
        assert all(math.isfinite(v) for v in feats.values)


def test_duet_features_requires_exactly_eleven():
    with pytest.raises(ValueError):
        DuetFeatures((0.0,) * 10)


# --------------------------------------------------- oracle equivalence ---


def test_duet_matches_oracle(fixture_query, fixture_docs, fixture_stats):
    docs = list(fixture_docs.values())
    for doc in docs:
        got = duet_features(fixture_query, doc, fixture_stats).values
        want = o_duet(fixture_query, doc, docs)
        for k, (g, w) in enumerate(zip(got, want)):
            assert close(g, w), f"feature {k + 1}: {g} != {w}"


def test_sdr_matches_oracle(fixture_query, fixture_docs, fixture_stats):
    docs = list(fixture_docs.values())
    for doc in docs:
        for space in ("word", "entity"):
            got = sdr_similarity(fixture_query, doc, fixture_stats, space)
            want = o_sdr(fixture_query, doc, docs, space)
            assert close(got, want), (doc.doc_id, space)


def test_bigram_lmir_matches_oracle(fixture_query, fixture_docs, fixture_stats):
    docs = list(fixture_docs.values())
    for doc in docs:
        got = bigram_lmir(fixture_query, doc, fixture_stats)
        want = o_bigram_lmir(fixture_query, doc, docs)
        assert close(got, want), doc.doc_id


# ----------------------------------------------------------- properties ---


def test_sdr_identical_docs(fixture_docs, fixture_stats):
    for doc in fixture_docs.values():
        assert close(sdr_similarity(doc, doc, fixture_stats, "word"), 1.0)


def test_sdr_disjoint_docs():
    d1, d2 = _doc("d1", ["a", "b"]), _doc("d2", ["c", "d"])
    stats = build_stats([d1, d2])
    assert sdr_similarity(d1, d2, stats, "word") == 0.0


def test_sdr_hand_computed_two_term_fixture():
    d1, d2 = _doc("d1", ["a", "b"]), _doc("d2", ["a", "c"])
    stats = build_stats([d1, d2])
    idf_a = math.log(3 / 3)  # df=2 -> 0; shared term contributes nothing
    idf_b = math.log(3 / 2)
    idf_c = math.log(3 / 2)
    va = {"a": idf_a, "b": idf_b}
    vb = {"a": idf_a, "c": idf_c}
    dot = va["a"] * vb["a"]
    na = math.sqrt(sum(v * v for v in va.values()))
    nb = math.sqrt(sum(v * v for v in vb.values()))
    assert close(sdr_similarity(d1, d2, stats, "word"), dot / (na * nb))


def test_sdr_bounded_and_symmetric(fixture_query, fixture_docs, fixture_stats):
    for doc in fixture_docs.values():
        for space in ("word", "entity"):
            s = sdr_similarity(fixture_query, doc, fixture_stats, space)
            assert 0.0 <= s <= 1.0 + 1e-12
            assert close(s, sdr_similarity(doc, fixture_query, fixture_stats, space))


@given(tf=st.integers(min_value=1, max_value=30))
def test_bm25_strictly_increases_with_tf(tf):
    # doc length held fixed at 31 while one term's frequency rises
    stats = _two_doc_stats()
    lower = bm25(word_view(["t"]), word_view(["t"] * tf + ["x"] * (31 - tf)), stats)
    higher = bm25(
        word_view(["t"]), word_view(["t"] * (tf + 1) + ["x"] * (30 - tf)), stats
    )
    assert higher > lower


def test_scorers_are_pure(fixture_query, fixture_docs, fixture_stats):
    doc = next(iter(fixture_docs.values()))
    a = duet_features(fixture_query, doc, fixture_stats).values
    b = duet_features(fixture_query, doc, fixture_stats).values
    assert a == b


def test_feature_dump_round_trip(tmp_path, fixture_query, fixture_docs, fixture_stats):
    from caselaw_ir.lexical import read_feature_dump, write_feature_dump

    rows = [
        {
            "qid": "q",
            "cid": doc.doc_id,
            "duet": list(duet_features(fixture_query, doc, fixture_stats).values),
            "sdr_w": sdr_similarity(fixture_query, doc, fixture_stats, "word"),
            "sdr_e": sdr_similarity(fixture_query, doc, fixture_stats, "entity"),
            "lmir": bigram_lmir(fixture_query, doc, fixture_stats),
        }
        for doc in fixture_docs.values()
    ]
    path = tmp_path / "features.jsonl"
    write_feature_dump(rows, path)
    loaded = read_feature_dump(path)
    assert loaded == rows  # floats survive bit-exactly via repr
