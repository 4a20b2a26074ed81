import pytest

from caselaw_ir.cascade import (
    CascadeResult,
    cascade_topk,
    read_cascade_dump,
    survivors_by_query,
    write_cascade_dump,
)
from caselaw_ir.lexical import bigram_lmir, build_stats
from caselaw_ir.rng import Pcg32
from caselaw_ir.textproc import TokenizedDoc


def _doc(doc_id, tokens):
    return TokenizedDoc(doc_id, (tuple(tokens),), tuple(tokens), ())


def _random_docs(n, seed=0, vocab=("a", "b", "c", "d", "e"), length=6):
    rng = Pcg32(seed)
    docs = []
    for j in range(n):
        tokens = [vocab[rng.below(len(vocab))] for _ in range(length)]
        docs.append(_doc(f"c{j:03d}", tokens))
    return docs


def test_keeps_30_of_200():
    docs = _random_docs(200, seed=1)
    stats = build_stats(docs)
    query = _doc("q", ["a", "b", "c"])
    result = cascade_topk(query, docs, stats, k=30)
    assert len(result.kept) == 30
    scores = [s for _, s in result.kept]
    assert scores == sorted(scores, reverse=True)


def test_k_larger_than_pool_keeps_all_ordered():
    docs = _random_docs(7, seed=2)
    stats = build_stats(docs)
    result = cascade_topk(_doc("q", ["a", "b"]), docs, stats, k=30)
    assert len(result.kept) == 7
    scores = [s for _, s in result.kept]
    assert scores == sorted(scores, reverse=True)


def test_matches_brute_force_order():
    docs = _random_docs(5, seed=3)
    stats = build_stats(docs)
    query = _doc("q", ["a", "b", "c", "d"])
    result = cascade_topk(query, docs, stats, k=5)
    brute = sorted(
        ((d.doc_id, bigram_lmir(query, d, stats)) for d in docs),
        key=lambda item: (-item[1], item[0]),
    )
    assert list(result.kept) == brute


def test_kept_are_k_largest_scores():
    docs = _random_docs(50, seed=4)
    stats = build_stats(docs)
    query = _doc("q", ["a", "b", "c"])
    k = 10
    result = cascade_topk(query, docs, stats, k=k)
    all_scores = sorted(
        (bigram_lmir(query, d, stats) for d in docs), reverse=True
    )
    assert [s for _, s in result.kept] == all_scores[:k]


def test_tie_break_by_cid():
    docs = [_doc("zz", ["a", "b"]), _doc("aa", ["a", "b"])]
    stats = build_stats(docs)
    result = cascade_topk(_doc("q", ["a", "b"]), docs, stats, k=2)
    assert result.kept_ids == ["aa", "zz"]


def test_rejects_bad_k():
    docs = _random_docs(3, seed=5)
    stats = build_stats(docs)
    with pytest.raises(ValueError):
        cascade_topk(_doc("q", ["a", "b"]), docs, stats, k=0)


def test_propagates_short_query_error():
    docs = _random_docs(3, seed=6)
    stats = build_stats(docs)
    with pytest.raises(ValueError, match="fewer than 2"):
        cascade_topk(_doc("q", ["a"]), docs, stats, k=2)


def test_result_validates_ordering():
    with pytest.raises(ValueError, match="non-increasing"):
        CascadeResult("q", (("a", 0.1), ("b", 0.5)), k=2)


def test_dump_round_trip(tmp_path):
    docs = _random_docs(6, seed=7)
    stats = build_stats(docs)
    result = cascade_topk(_doc("q1", ["a", "b", "c"]), docs, stats, k=4)
    path = tmp_path / "cascade.tsv"
    write_cascade_dump([result], path)
    loaded = read_cascade_dump(path)
    assert loaded == {"q1": list(result.kept)}
    assert survivors_by_query(loaded) == {"q1": result.kept_ids}
