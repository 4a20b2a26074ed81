"""Collection statistics and exact-matching scorers.

Three unit spaces are scored, crossing word and entity representations of
query and document:

* word / word        -- raw term frequencies over the token streams;
* entity / word      -- each query entity's full surface sequence is matched
                        against the document word stream (contained or not,
                        so frequencies are capped at 1); document length and
                        average length are those of the word stream; a
                        phrase's document/collection frequency is the number
                        of documents whose stream contains it;
* word / entity      -- query words against the deduplicated token bag of
                        the document's entities (capped at 1); lengths and
                        frequencies live in that entity-token space.

Entity-side frequencies are presence counts everywhere: occurrence counts
carry no signal for entities, so cf equals df in both entity spaces.

Scorers: BM25 (k1=1.2, b=0.75), TF-IDF, the language-model family (MLE,
Jelinek-Mercer, Dirichlet, and two-way = JM applied on top of Dirichlet),
document-to-document tf-idf cosine similarity, and bigram language-model
retrieval with linear smoothing.  All scorers are pure functions of
(query, doc, stats, params).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .textproc import TokenizedDoc, Tokens, bigrams

WORD = "word"
ENTITY_AS_QUERY = "entity-as-query"
ENTITY_AS_DOC = "entity-as-doc"

DUET_FEATURE_ORDER = "duet-v1"
DUET_FEATURE_NAMES = (
    "qw_dw_bm25",
    "qw_dw_tfidf",
    "qw_dw_lm",
    "qw_dw_lm_jm",
    "qw_dw_lm_dirichlet",
    "qw_dw_lm_twoway",
    "qe_dw_bm25",
    "qe_dw_tfidf",
    "qe_dw_lm_dirichlet",
    "qw_de_tfidf",
    "qw_de_lm_dirichlet",
)


@dataclass(frozen=True)
class ScoringParams:
    """Smoothing and BM25 constants, fixed here and echoed into run metadata."""

    k1: float = 1.2
    b: float = 0.75
    lam: float = 0.1          # weight on the document model in JM / two-way
    mu: float = 2000.0        # Dirichlet pseudo-count mass
    lambda_bigram: float = 0.8
    epsilon: float = 1e-10


DEFAULT_PARAMS = ScoringParams()


@dataclass(frozen=True)
class TermView:
    """One side of an interaction: a multiset of matchable units.

    Entity views carry presence counts (every count is 1); word views carry
    raw counts plus the underlying token sequence so entity phrases can be
    matched against it.
    """

    unit_kind: str
    counts: Mapping
    length: int
    tokens: Tokens | None = None


@dataclass(frozen=True)
class DuetFeatures:
    """The 11 ranking features, canonical order fixed by DUET_FEATURE_NAMES."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != 11:
            raise ValueError(f"expected 11 features, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("duet features must be finite")


@dataclass(frozen=True)
class CollectionStats:
    """Immutable corpus statistics for all three unit spaces."""

    num_docs: int
    avg_doc_len: float
    df: Mapping[str, int]
    cf: Mapping[str, int]
    total_tokens: int
    bigram_cf: Mapping[tuple[str, str], int]
    total_bigrams: int
    # entity-phrase space (documents seen as word streams containing phrases)
    ent_df: Mapping[Tokens, int] = field(default_factory=dict)
    ent_total: int = 0
    # entity-token space (documents seen as deduplicated entity token bags)
    etok_df: Mapping[str, int] = field(default_factory=dict)
    etok_total: int = 0
    etok_avg_len: float = 0.0


def build_stats(docs: Sequence[TokenizedDoc]) -> CollectionStats:
    """Exact counts over a document collection."""
    if not docs:
        raise ValueError("cannot build statistics over an empty collection")
    df: Counter = Counter()
    cf: Counter = Counter()
    bigram_cf: Counter = Counter()
    total_tokens = 0
    total_bigrams = 0
    for doc in docs:
        counts = Counter(doc.flat_tokens)
        cf.update(counts)
        df.update(counts.keys())
        total_tokens += len(doc.flat_tokens)
        grams = bigrams(doc.flat_tokens)
        bigram_cf.update(grams)
        total_bigrams += len(grams)
    if total_tokens == 0:
        raise ValueError("collection has zero tokens")

    phrase_vocab = {e.surface_tokens for doc in docs for e in doc.entities}
    ent_df: Counter = Counter()
    for doc in docs:
        for phrase in contained_phrases(doc.flat_tokens, phrase_vocab):
            ent_df[phrase] += 1

    etok_df: Counter = Counter()
    for doc in docs:
        etok_df.update(_entity_token_set(doc))
    etok_total = sum(etok_df.values())

    n = len(docs)
    return CollectionStats(
        num_docs=n,
        avg_doc_len=total_tokens / n,
        df=dict(df),
        cf=dict(cf),
        total_tokens=total_tokens,
        bigram_cf=dict(bigram_cf),
        total_bigrams=total_bigrams,
        ent_df=dict(ent_df),
        ent_total=sum(ent_df.values()),
        etok_df=dict(etok_df),
        etok_total=etok_total,
        etok_avg_len=etok_total / n,
    )


def contained_phrases(
    tokens: Sequence[str], vocab: Iterable[Tokens]
) -> set[Tokens]:
    """Subset of vocab phrases appearing contiguously in the token sequence."""
    by_first: dict[str, list[Tokens]] = {}
    for p in vocab:
        by_first.setdefault(p[0], []).append(p)
    toks = tuple(tokens)
    found: set[Tokens] = set()
    for i, tok in enumerate(toks):
        for p in by_first.get(tok, ()):
            if p not in found and toks[i : i + len(p)] == p:
                found.add(p)
    return found


def phrase_contained(phrase: Tokens, tokens: Tokens) -> bool:
    n = len(phrase)
    return any(tokens[i : i + n] == phrase for i in range(len(tokens) - n + 1))


def word_view(tokens: Sequence[str]) -> TermView:
    toks = tuple(tokens)
    return TermView(WORD, Counter(toks), len(toks), toks)


def entity_query_view(doc: TokenizedDoc) -> TermView:
    surfaces = {e.surface_tokens for e in doc.entities}
    return TermView(ENTITY_AS_QUERY, {s: 1 for s in surfaces}, len(surfaces))


def entity_doc_view(doc: TokenizedDoc) -> TermView:
    toks = _entity_token_set(doc)
    return TermView(ENTITY_AS_DOC, {t: 1 for t in toks}, len(toks))


def _entity_token_set(doc: TokenizedDoc) -> set[str]:
    return {t for e in doc.entities for t in e.surface_tokens}


@dataclass(frozen=True)
class _Space:
    df: Mapping
    cf: Mapping
    total_cf: int
    avg_len: float
    num_docs: int


def _space_for(query: TermView, doc: TermView, stats: CollectionStats) -> _Space:
    pair = (query.unit_kind, doc.unit_kind)
    if pair == (WORD, WORD):
        return _Space(stats.df, stats.cf, stats.total_tokens,
                      stats.avg_doc_len, stats.num_docs)
    if pair == (ENTITY_AS_QUERY, WORD):
        # phrases live on word streams: word lengths, presence-capped counts
        return _Space(stats.ent_df, stats.ent_df, stats.ent_total,
                      stats.avg_doc_len, stats.num_docs)
    if pair == (WORD, ENTITY_AS_DOC):
        return _Space(stats.etok_df, stats.etok_df, stats.etok_total,
                      stats.etok_avg_len, stats.num_docs)
    raise ValueError(f"unsupported interaction {pair}")


def _tf(unit, query: TermView, doc: TermView) -> int:
    if query.unit_kind == ENTITY_AS_QUERY:
        if doc.tokens is None:
            raise ValueError("entity-as-query scoring needs the doc token stream")
        return 1 if phrase_contained(unit, doc.tokens) else 0
    tf = doc.counts.get(unit, 0)
    if doc.unit_kind == ENTITY_AS_DOC:
        tf = min(tf, 1)
    return tf


def bm25(
    query: TermView,
    doc: TermView,
    stats: CollectionStats,
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5))."""
    space = _space_for(query, doc, stats)
    k1, b = params.k1, params.b
    score = 0.0
    for unit, qcount in query.counts.items():
        tf = _tf(unit, query, doc)
        if tf == 0:
            continue
        df = space.df.get(unit, 0)
        idf = math.log(1.0 + (space.num_docs - df + 0.5) / (df + 0.5))
        denom = tf + k1 * (1.0 - b + b * doc.length / space.avg_len)
        score += qcount * idf * tf * (k1 + 1.0) / denom
    return score


def tfidf(
    query: TermView,
    doc: TermView,
    stats: CollectionStats,
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Sum of tf(t, d) * ln((N + 1) / (df(t) + 1)) over query units."""
    space = _space_for(query, doc, stats)
    score = 0.0
    for unit, qcount in query.counts.items():
        tf = _tf(unit, query, doc)
        if tf == 0:
            continue
        score += qcount * tf * math.log((space.num_docs + 1.0) / (space.df.get(unit, 0) + 1.0))
    return score


LM_MODES = ("mle", "jm", "dirichlet", "twoway")


def lm_term_probability(
    tf: float,
    doc_len: float,
    cf: float,
    total_cf: float,
    mode: str,
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Smoothed per-term probability; floors at params.epsilon."""
    background = cf / total_cf if total_cf > 0 else 0.0
    if mode == "mle":
        p = tf / doc_len if doc_len > 0 else 0.0
    elif mode == "jm":
        p = params.lam * (tf / doc_len if doc_len > 0 else 0.0) \
            + (1.0 - params.lam) * background
    elif mode == "dirichlet":
        p = (tf + params.mu * background) / (doc_len + params.mu)
    elif mode == "twoway":
        p = params.lam * (tf + params.mu * background) / (doc_len + params.mu) \
            + (1.0 - params.lam) * background
    else:
        raise ValueError(f"unknown smoothing mode {mode!r}")
    return max(p, params.epsilon)


def _lm_sum(
    query: TermView,
    doc: TermView,
    stats: CollectionStats,
    mode: str,
    params: ScoringParams,
) -> float:
    space = _space_for(query, doc, stats)
    score = 0.0
    for unit, qcount in query.counts.items():
        p = lm_term_probability(
            _tf(unit, query, doc), doc.length,
            space.cf.get(unit, 0), space.total_cf, mode, params,
        )
        score += qcount * math.log(p)
    return score


def lm_score(
    query: TermView,
    doc: TermView,
    stats: CollectionStats,
    mode: str,
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Query log-likelihood under the smoothed document language model."""
    if mode not in LM_MODES:
        raise ValueError(f"unknown smoothing mode {mode!r}")
    if doc.length == 0:
        raise ValueError("cannot score a zero-length document view")
    return _lm_sum(query, doc, stats, mode, params)


def duet_features(
    query: TokenizedDoc,
    doc: TokenizedDoc,
    stats: CollectionStats,
    params: ScoringParams = DEFAULT_PARAMS,
) -> DuetFeatures:
    """The 11-dimensional word-entity interaction feature vector.

    Entity-side interactions of documents without entities fall back to the
    all-absent values of each formula (zero sums for empty query entity
    sets; epsilon-floored probabilities against an empty entity bag).
    """
    if not query.flat_tokens:
        raise ValueError(f"query {query.doc_id!r} has no tokens")
    if not doc.flat_tokens:
        raise ValueError(f"document {doc.doc_id!r} has no tokens")
    qw = word_view(query.flat_tokens)
    dw = word_view(doc.flat_tokens)
    qe = entity_query_view(query)
    de = entity_doc_view(doc)
    return DuetFeatures(
        (
            bm25(qw, dw, stats, params),
            tfidf(qw, dw, stats, params),
            _lm_sum(qw, dw, stats, "mle", params),
            _lm_sum(qw, dw, stats, "jm", params),
            _lm_sum(qw, dw, stats, "dirichlet", params),
            _lm_sum(qw, dw, stats, "twoway", params),
            bm25(qe, dw, stats, params),
            tfidf(qe, dw, stats, params),
            _lm_sum(qe, dw, stats, "dirichlet", params),
            tfidf(qw, de, stats, params),
            _lm_sum(qw, de, stats, "dirichlet", params),
        )
    )


def sdr_similarity(
    query: TokenizedDoc,
    doc: TokenizedDoc,
    stats: CollectionStats,
    space: str = "word",
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Document-to-document cosine over tf-idf vectors.

    Word space uses raw term frequencies; entity space uses presence of
    collection phrases in each document's word stream (capped at 1).
    idf = ln((N + 1) / (df + 1)).  Returns 0 when either vector is zero.
    """
    if space == "word":
        a = Counter(query.flat_tokens)
        b = Counter(doc.flat_tokens)
        df = stats.df
    elif space == "entity":
        vocab = stats.ent_df.keys()
        a = {p: 1 for p in contained_phrases(query.flat_tokens, vocab)}
        b = {p: 1 for p in contained_phrases(doc.flat_tokens, vocab)}
        df = stats.ent_df
    else:
        raise ValueError(f"unknown similarity space {space!r}")

    def weight(unit, count):
        return count * math.log((stats.num_docs + 1.0) / (df.get(unit, 0) + 1.0))

    va = {u: weight(u, c) for u, c in a.items()}
    vb = {u: weight(u, c) for u, c in b.items()}
    dot = sum(w * vb[u] for u, w in va.items() if u in vb)
    na = math.sqrt(sum(w * w for w in va.values()))
    nb = math.sqrt(sum(w * w for w in vb.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def bigram_lmir(
    query: TokenizedDoc,
    doc: TokenizedDoc,
    stats: CollectionStats,
    params: ScoringParams = DEFAULT_PARAMS,
) -> float:
    """Bigram query log-likelihood with linear smoothing.

    Per query bigram g:  ln(lambda_b * tf(g, d) / max(1, |bigrams(d)|)
                             + (1 - lambda_b) * cf(g) / total_bigrams
                             + epsilon)
    """
    if not 0.0 < params.lambda_bigram < 1.0:
        raise ValueError("lambda_bigram must lie strictly between 0 and 1")
    q_grams = bigrams(query.flat_tokens)
    if not q_grams:
        raise ValueError(f"query {query.doc_id!r} has fewer than 2 tokens")
    d_counts = Counter(bigrams(doc.flat_tokens))
    d_len = max(1, len(doc.flat_tokens) - 1)
    lam_b = params.lambda_bigram
    score = 0.0
    for g in q_grams:
        background = (
            stats.bigram_cf.get(g, 0) / stats.total_bigrams
            if stats.total_bigrams > 0
            else 0.0
        )
        score += math.log(
            lam_b * d_counts.get(g, 0) / d_len
            + (1.0 - lam_b) * background
            + params.epsilon
        )
    return score


def write_feature_dump(rows: Iterable[dict], path) -> None:
    """One JSON object per (qid, cid): duet features plus SDR and LMIR."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(
                json.dumps(
                    {
                        "qid": row["qid"],
                        "cid": row["cid"],
                        "duet": list(row["duet"]),
                        "sdr_w": row["sdr_w"],
                        "sdr_e": row["sdr_e"],
                        "lmir": row["lmir"],
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_feature_dump(path) -> list[dict]:
    import json

    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows
