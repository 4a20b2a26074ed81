import numpy as np
import pytest
from hypothesis import given, strategies as st

from caselaw_ir.corpus import EntailmentTopic
from caselaw_ir.entail import (
    CONTENT_BUDGET,
    EntailDecision,
    PairRequest,
    build_entail_pairs,
    classify_pairs,
    decide_standalone,
    read_pair_dump,
    read_score_file,
    truncate_asymmetric,
    truncate_symmetric,
    write_pair_dump,
    write_score_file,
)
from caselaw_ir.pli import EncoderError, toy_hash_encoder


def toks(n, prefix="w"):
    return tuple(f"{prefix}{i}" for i in range(n))


# ----------------------------------------------------------- truncation ---


def test_symmetric_under_budget_unchanged():
    f, p = truncate_symmetric(toks(50), toks(100))
    assert (len(f), len(p)) == (50, 100)


def test_symmetric_slack_transfers_to_paragraph():
    f, p = truncate_symmetric(toks(200), toks(500))
    assert (len(f), len(p)) == (200, 309)
    assert len(f) + len(p) == CONTENT_BUDGET


def test_symmetric_both_over_budget():
    f, p = truncate_symmetric(toks(600), toks(600))
    assert (len(f), len(p)) == (254, 255)


def test_symmetric_slack_transfers_to_fragment():
    f, p = truncate_symmetric(toks(500), toks(100))
    assert (len(f), len(p)) == (409, 100)


def test_symmetric_one_over_budget_boundary():
    # 254 + 256 = 510: only the paragraph crosses its cap, so it absorbs the cut
    f, p = truncate_symmetric(toks(254), toks(256))
    assert (len(f), len(p)) == (254, 255)
    # 255 + 255 = 510: the fragment loses the odd token, per the remainder rule
    f, p = truncate_symmetric(toks(255), toks(255))
    assert (len(f), len(p)) == (254, 255)


def test_asymmetric_fragment_capped_then_paragraph():
    f, p = truncate_asymmetric(toks(200), toks(500))
    assert (len(f), len(p)) == (128, 381)


def test_asymmetric_under_budget_unchanged():
    f, p = truncate_asymmetric(toks(50), toks(100))
    assert (len(f), len(p)) == (50, 100)


def test_asymmetric_empty_paragraph_passthrough():
    f, p = truncate_asymmetric(toks(128), ())
    assert (len(f), len(p)) == (128, 0)


@given(nf=st.integers(0, 900), np_=st.integers(0, 900))
def test_truncation_budget_and_prefix_property(nf, np_):
    frag, para = toks(nf, "f"), toks(np_, "p")
    for truncate in (truncate_symmetric, truncate_asymmetric):
        f, p = truncate(frag, para)
        assert len(f) + len(p) <= CONTENT_BUDGET
        assert f == frag[: len(f)]   # heads kept, never reordered
        assert p == para[: len(p)]
    f, p = truncate_asymmetric(frag, para)
    assert len(f) == min(nf, 128)


# ------------------------------------------------------- pair building ---


def _topic(n_paras, frag_words=20, para_words=30):
    return EntailmentTopic(
        "e1",
        " ".join(f"frag{i}" for i in range(frag_words)),
        tuple(
            " ".join(f"p{k}w{i}" for i in range(para_words)) for k in range(n_paras)
        ),
    )


def test_one_request_per_paragraph():
    pairs = build_entail_pairs(_topic(36), "symmetric")
    assert len(pairs) == 36
    assert [p.para_idx for p in pairs] == list(range(1, 37))


def test_requests_respect_budget():
    topic = _topic(4, frag_words=400, para_words=700)
    for mode in ("symmetric", "asymmetric"):
        for pair in build_entail_pairs(topic, mode):
            assert len(pair.text_a) + len(pair.text_b) <= CONTENT_BUDGET


def test_mode_changes_only_token_counts():
    topic = _topic(5, frag_words=300, para_words=600)
    sym = build_entail_pairs(topic, "symmetric")
    asym = build_entail_pairs(topic, "asymmetric")
    assert [p.para_idx for p in sym] == [p.para_idx for p in asym]
    assert len(sym) == len(asym)
    assert all(s.qid == a.qid for s, a in zip(sym, asym))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError, match="unknown truncation mode"):
        build_entail_pairs(_topic(2), "sideways")


def test_pair_request_validates_budget():
    with pytest.raises(ValueError, match="exceeds the content budget"):
        PairRequest("q", 1, toks(400), toks(400))


# ----------------------------------------------------------- classifying ---


def test_classify_pairs_deterministic():
    pairs = build_entail_pairs(_topic(6), "symmetric")
    enc = toy_hash_encoder(16, seed=2)
    a = classify_pairs(pairs, enc)
    b = classify_pairs(pairs, enc)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert all(abs(float(p.sum()) - 1.0) < 1e-6 for p in a)


def test_classify_pairs_error_names_paragraph():
    class Boom:
        dim = 4

        def encode_pair(self, a, b):
            raise RuntimeError("nope")

    pairs = build_entail_pairs(_topic(2), "symmetric")
    with pytest.raises(EncoderError, match="para 1"):
        classify_pairs(pairs, Boom())


def test_scores_round_trip_through_file(tmp_path):
    pairs = build_entail_pairs(_topic(5), "asymmetric")
    enc = toy_hash_encoder(16, seed=3)
    probs = classify_pairs(pairs, enc)
    rows = [(p.qid, p.para_idx, pr) for p, pr in zip(pairs, probs)]
    path = tmp_path / "scores.jsonl"
    write_score_file(rows, path)
    loaded = read_score_file(path)
    for p, pr in zip(pairs, probs):
        assert np.array_equal(loaded[(p.qid, p.para_idx)], pr)


def test_pair_dump_round_trip(tmp_path):
    pairs = build_entail_pairs(_topic(3), "symmetric")
    path = tmp_path / "pairs.jsonl"
    write_pair_dump(pairs, path)
    assert read_pair_dump(path) == pairs


# -------------------------------------------------------------- decisions ---


def probs(*p1s):
    return [np.array([1.0 - p, p]) for p in p1s]


def test_decide_threshold_rule():
    decision = decide_standalone("q", probs(0.2, 0.7, 0.6))
    assert decision.selected_idx == frozenset({2, 3})


def test_decide_fallback_to_argmax():
    decision = decide_standalone("q", probs(0.4, 0.1, 0.3))
    assert decision.selected_idx == frozenset({1})


def test_decide_argmax_tie_takes_smallest_index():
    decision = decide_standalone("q", probs(0.3, 0.4, 0.4))
    assert decision.selected_idx == frozenset({2})


def test_decide_single_paragraph_always_selected():
    decision = decide_standalone("q", probs(0.01))
    assert decision.selected_idx == frozenset({1})


def test_decide_rejects_empty():
    with pytest.raises(ValueError):
        decide_standalone("q", [])


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=20))
def test_decision_never_empty(p1s):
    decision = decide_standalone("q", probs(*p1s))
    assert decision.selected_idx
    assert all(1 <= i <= len(p1s) for i in decision.selected_idx)


def test_decision_type_rejects_empty_selection():
    with pytest.raises(ValueError, match="at least one"):
        EntailDecision("q", frozenset(), (0.1, 0.2))
