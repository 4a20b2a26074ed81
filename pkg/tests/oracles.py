"""Brute-force re-implementations of every lexical formula, used as the
independent side of the scorer-equivalence checks.  Plain loops only; no
code shared with the package implementations."""

import math
from collections import Counter

K1, B = 1.2, 0.75
LAM, MU = 0.1, 2000.0
LAMB = 0.8
EPS = 1e-10


def o_contained(phrase, tokens):
    n = len(phrase)
    return any(
        tuple(tokens[i : i + n]) == tuple(phrase) for i in range(len(tokens) - n + 1)
    )


def o_word_stats(docs):
    df, cf = Counter(), Counter()
    total = 0
    for d in docs:
        total += len(d.flat_tokens)
        cf.update(d.flat_tokens)
        df.update(set(d.flat_tokens))
    return df, cf, total, total / len(docs), len(docs)


def o_phrase_stats(docs):
    vocab = {e.surface_tokens for d in docs for e in d.entities}
    df = Counter()
    for phrase in vocab:
        for d in docs:
            if o_contained(phrase, d.flat_tokens):
                df[phrase] += 1
    return vocab, df, sum(df.values())


def o_etok_stats(docs):
    df = Counter()
    for d in docs:
        df.update({t for e in d.entities for t in e.surface_tokens})
    total = sum(df.values())
    return df, total, total / len(docs)


def o_bm25(q_units, tf_of, d_len, df, n_docs, avgdl):
    score = 0.0
    for unit in q_units:  # every occurrence contributes
        tf = tf_of(unit)
        if tf == 0:
            continue
        idf = math.log(1 + (n_docs - df.get(unit, 0) + 0.5) / (df.get(unit, 0) + 0.5))
        score += idf * tf * (K1 + 1) / (tf + K1 * (1 - B + B * d_len / avgdl))
    return score


def o_tfidf(q_units, tf_of, df, n_docs):
    return sum(tf_of(u) * math.log((n_docs + 1) / (df.get(u, 0) + 1)) for u in q_units)


def o_lm(q_units, tf_of, d_len, cf, total, mode):
    score = 0.0
    for u in q_units:
        bg = cf.get(u, 0) / total if total > 0 else 0.0
        if mode == "mle":
            p = tf_of(u) / d_len if d_len > 0 else 0.0
        elif mode == "jm":
            p = LAM * (tf_of(u) / d_len if d_len > 0 else 0.0) + (1 - LAM) * bg
        elif mode == "dirichlet":
            p = (tf_of(u) + MU * bg) / (d_len + MU)
        elif mode == "twoway":
            p = LAM * (tf_of(u) + MU * bg) / (d_len + MU) + (1 - LAM) * bg
        score += math.log(max(p, EPS))
    return score


def o_duet(query, doc, docs):
    df, cf, total, avgdl, n = o_word_stats(docs)
    _vocab, pdf, ptotal = o_phrase_stats(docs)
    edf, etotal, _eavg = o_etok_stats(docs)

    qw = list(query.flat_tokens)
    d_counts = Counter(doc.flat_tokens)
    d_len = len(doc.flat_tokens)
    tf_w = lambda t: d_counts.get(t, 0)

    q_ents = sorted({e.surface_tokens for e in query.entities})
    tf_e = lambda p: 1 if o_contained(p, doc.flat_tokens) else 0

    d_etoks = {t for e in doc.entities for t in e.surface_tokens}
    tf_de = lambda t: 1 if t in d_etoks else 0

    return [
        o_bm25(qw, tf_w, d_len, df, n, avgdl),
        o_tfidf(qw, tf_w, df, n),
        o_lm(qw, tf_w, d_len, cf, total, "mle"),
        o_lm(qw, tf_w, d_len, cf, total, "jm"),
        o_lm(qw, tf_w, d_len, cf, total, "dirichlet"),
        o_lm(qw, tf_w, d_len, cf, total, "twoway"),
        o_bm25(q_ents, tf_e, d_len, pdf, n, avgdl),
        o_tfidf(q_ents, tf_e, pdf, n),
        o_lm(q_ents, tf_e, d_len, pdf, ptotal, "dirichlet"),
        o_tfidf(qw, tf_de, edf, n),
        o_lm(qw, tf_de, len(d_etoks), edf, etotal, "dirichlet"),
    ]


def o_sdr(query, doc, docs, space):
    df, _cf, _total, _avg, n = o_word_stats(docs)
    if space == "word":
        a, b = Counter(query.flat_tokens), Counter(doc.flat_tokens)
    else:
        vocab, df, _ = o_phrase_stats(docs)
        a = {p: 1 for p in vocab if o_contained(p, query.flat_tokens)}
        b = {p: 1 for p in vocab if o_contained(p, doc.flat_tokens)}
    va = {u: c * math.log((n + 1) / (df.get(u, 0) + 1)) for u, c in a.items()}
    vb = {u: c * math.log((n + 1) / (df.get(u, 0) + 1)) for u, c in b.items()}
    dot = sum(w * vb[u] for u, w in va.items() if u in vb)
    na = math.sqrt(sum(w * w for w in va.values()))
    nb = math.sqrt(sum(w * w for w in vb.values()))
    return 0.0 if na == 0 or nb == 0 else dot / (na * nb)


def o_bigram_lmir(query, doc, docs):
    coll = Counter()
    total = 0
    for d in docs:
        grams = list(zip(d.flat_tokens, d.flat_tokens[1:]))
        coll.update(grams)
        total += len(grams)
    d_grams = Counter(zip(doc.flat_tokens, doc.flat_tokens[1:]))
    d_len = max(1, len(doc.flat_tokens) - 1)
    score = 0.0
    for g in zip(query.flat_tokens, query.flat_tokens[1:]):
        bg = coll.get(g, 0) / total if total > 0 else 0.0
        score += math.log(LAMB * d_grams.get(g, 0) / d_len + (1 - LAMB) * bg + EPS)
    return score
