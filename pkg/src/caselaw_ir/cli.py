"""Command-line orchestration of the pipeline.

Subcommands cover every stage: ingest, split, features-duet, train-duet,
rank-duet, cascade, pli-pairs, pli-train, pli-score, entail-pairs,
entail-score, combine-train, combine-apply, evaluate, gen-synthetic.

Every command resolves its settings from an optional ``--config`` file plus
flag overrides, writes only its declared outputs, and drops a ``<output>.meta``
sidecar echoing the command line and the fully resolved configuration (no
timestamps, so identical inputs reproduce byte-identical artifacts).
Exit codes: 0 success, 1 stage failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cascade as cascade_mod
from . import corpus as corpus_mod
from . import duet as duet_mod
from . import entail as entail_mod
from . import lexical
from . import ltr
from . import metrics
from . import pli as pli_mod
from . import synthetic
from .config import PipelineConfig, parse_config, render_config
from .textproc import (
    build_gazetteer,
    default_stopwords,
    load_gazetteer,
    load_stopwords,
    normalize_gazetteer,
    save_gazetteer,
    tokenize,
    tokenize_case,
)


# ----------------------------------------------------------- shared glue ---


def _config_from(args) -> PipelineConfig:
    cfg = parse_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    for field in dataclasses.fields(PipelineConfig):
        override = getattr(args, field.name, None)
        if override is not None:
            setattr(cfg, field.name, override)
    cfg.validate()
    return cfg


def _workers(cfg: PipelineConfig) -> int:
    return cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)


def _parallel_map(fn, items, workers: int):
    """Order-preserving map over pure functions, bounded by the worker count."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _scoring_params(cfg: PipelineConfig) -> lexical.ScoringParams:
    return lexical.ScoringParams(
        k1=cfg.k1,
        b=cfg.b,
        lam=cfg.lam,
        mu=cfg.mu,
        lambda_bigram=cfg.lambda_bigram,
        epsilon=cfg.epsilon,
    )


def _stopwords(cfg: PipelineConfig):
    return load_stopwords(cfg.stopwords) if cfg.stopwords else default_stopwords()


def _gazetteer(cfg: PipelineConfig, topics, stopwords):
    if cfg.gazetteer:
        return normalize_gazetteer(load_gazetteer(cfg.gazetteer), stopwords)
    texts = []
    for t in topics:
        texts.extend(t.query.paragraphs)
        for c in t.candidates:
            texts.extend(c.paragraphs)
    return build_gazetteer(texts, stopwords)


def _tokenized_topics(topics, stopwords, gazetteer):
    """(tokenized queries by qid, tokenized candidates by qid then cid)."""
    queries = {}
    candidates = {}
    for t in topics:
        queries[t.qid] = tokenize_case(t.qid, t.query.paragraphs, stopwords, gazetteer)
        candidates[t.qid] = {
            c.id: tokenize_case(c.id, c.paragraphs, stopwords, gazetteer)
            for c in t.candidates
        }
    return queries, candidates


def _candidate_stats(candidates_by_qid):
    """Statistics over the union of candidate documents (deduplicated by id)."""
    seen = {}
    for cands in candidates_by_qid.values():
        for cid, doc in cands.items():
            seen.setdefault(cid, doc)
    return lexical.build_stats(list(seen.values()))


def _write_meta(primary_output: str | Path, command: str, args, cfg: PipelineConfig):
    flags = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "config") and v is not None
    }
    lines = [f"command={command}"]
    lines.extend(f"arg.{k}={v}" for k, v in flags.items())
    body = "".join(line + "\n" for line in lines) + render_config(cfg)
    Path(f"{primary_output}.meta").write_text(body, encoding="utf-8")


def _load_labeled_retrieval(cfg: PipelineConfig):
    topics = corpus_mod.load_retrieval_corpus(cfg.corpus)
    if cfg.labels:
        labels = corpus_mod.load_retrieval_labels(cfg.labels)
        topics = corpus_mod.attach_retrieval_labels(topics, labels)
    return topics


def _encoder(args, cfg: PipelineConfig):
    enc_seed = getattr(args, "encoder_seed", None)
    if enc_seed is None:
        enc_seed = cfg.seed
    return pli_mod.toy_hash_encoder(cfg.encoder_dim, enc_seed)


def _split_sets(path):
    split = corpus_mod.load_split(path)
    return split.train_topic_ids, split.validation_topic_ids


# -------------------------------------------------------------- commands ---


def cmd_ingest(args) -> int:
    cfg = _config_from(args)
    if args.task == 1:
        topics = corpus_mod.load_retrieval_corpus(cfg.corpus)
        if cfg.labels:
            labels = corpus_mod.load_retrieval_labels(cfg.labels)
            topics = corpus_mod.attach_retrieval_labels(topics, labels)
        text = corpus_mod.serialize_retrieval_corpus(topics)
        summary = f"topics={len(topics)} candidates={sum(len(t.candidates) for t in topics)}"
    else:
        topics = corpus_mod.load_entailment_corpus(cfg.entail_corpus or cfg.corpus)
        if cfg.entail_labels or cfg.labels:
            labels = corpus_mod.load_entailment_labels(cfg.entail_labels or cfg.labels)
            topics = corpus_mod.attach_entailment_labels(topics, labels)
        text = corpus_mod.serialize_entailment_corpus(topics)
        summary = f"topics={len(topics)} paragraphs={sum(len(t.paragraphs) for t in topics)}"
    Path(args.out).write_text(text, encoding="utf-8")
    _write_meta(args.out, "ingest", args, cfg)
    print(f"ingest ok: {summary}")
    return 0


def cmd_split(args) -> int:
    cfg = _config_from(args)
    if args.task == 1:
        ids = [t.qid for t in corpus_mod.load_retrieval_corpus(cfg.corpus)]
    else:
        ids = [t.id for t in corpus_mod.load_entailment_corpus(cfg.entail_corpus or cfg.corpus)]
    split = corpus_mod.split_dataset(ids, cfg.ratio, cfg.seed)
    Path(args.out).write_text(
        corpus_mod.serialize_split(split, cfg.ratio), encoding="utf-8"
    )
    _write_meta(args.out, "split", args, cfg)
    print(
        f"split ok: train={len(split.train_topic_ids)} "
        f"validation={len(split.validation_topic_ids)}"
    )
    return 0


def cmd_features_duet(args) -> int:
    cfg = _config_from(args)
    params = _scoring_params(cfg)
    topics = _load_labeled_retrieval(cfg)
    stopwords = _stopwords(cfg)
    gazetteer = _gazetteer(cfg, topics, stopwords)
    queries, candidates = _tokenized_topics(topics, stopwords, gazetteer)
    stats = _candidate_stats(candidates)

    def one_pair(pair):
        qid, cid = pair
        query, doc = queries[qid], candidates[qid][cid]
        return {
            "qid": qid,
            "cid": cid,
            "duet": list(lexical.duet_features(query, doc, stats, params).values),
            "sdr_w": lexical.sdr_similarity(query, doc, stats, "word", params),
            "sdr_e": lexical.sdr_similarity(query, doc, stats, "entity", params),
            "lmir": lexical.bigram_lmir(query, doc, stats, params),
        }

    pairs = [(t.qid, c.id) for t in topics for c in t.candidates]
    rows = _parallel_map(one_pair, pairs, _workers(cfg))
    lexical.write_feature_dump(rows, args.out)
    _write_meta(args.out, "features-duet", args, cfg)
    print(f"features-duet ok: pairs={len(rows)}")
    return 0


def _duet_topics_from_dump(rows, labels):
    by_qid: dict[str, list] = {}
    for row in rows:
        by_qid.setdefault(row["qid"], []).append(
            (row["cid"], lexical.DuetFeatures(tuple(row["duet"])))
        )
    return [
        duet_mod.TopicFeatures(qid, tuple(cands), labels.get(qid, frozenset()))
        for qid, cands in sorted(by_qid.items())
    ]


def cmd_train_duet(args) -> int:
    cfg = _config_from(args)
    rows = lexical.read_feature_dump(args.features)
    labels = corpus_mod.load_retrieval_labels(cfg.labels)
    train_ids, val_ids = _split_sets(args.split)
    topics = _duet_topics_from_dump(rows, labels)
    train_topics = [t for t in topics if t.qid in train_ids]
    val_topics = [t for t in topics if t.qid in val_ids]
    result = duet_mod.train(
        train_topics,
        duet_mod.TrainConfig(
            learning_rate=cfg.duet_lr,
            weight_decay=cfg.duet_weight_decay,
            max_epochs=cfg.duet_epochs,
            seed=cfg.seed,
        ),
        val_topics,
    )
    duet_mod.save_duet_model(result.model, args.out)
    _write_meta(args.out, "train-duet", args, cfg)
    best = result.history[result.best_epoch - 1]
    print(
        f"train-duet ok: best_epoch={result.best_epoch} "
        f"val_f1={best['val_f1']:.4f} train_loss={best['train_loss']:.4f}"
    )
    return 0


def cmd_rank_duet(args) -> int:
    cfg = _config_from(args)
    rows = lexical.read_feature_dump(args.features)
    model = duet_mod.load_duet_model(args.model)
    topics = _duet_topics_from_dump(rows, {})
    selections = {}
    rankings = {}
    for topic in topics:
        ranked = duet_mod.rank_candidates(model, topic.rows)
        rankings[topic.qid] = ranked
        selections[topic.qid] = tuple(cid for cid, _ in ranked[:5])
    metrics.write_run_file(metrics.RunResult(selections), args.out_run)
    metrics.write_ranking_file(rankings, args.out_ranking)
    _write_meta(args.out_run, "rank-duet", args, cfg)
    print(f"rank-duet ok: queries={len(selections)}")
    return 0


def cmd_cascade(args) -> int:
    cfg = _config_from(args)
    params = _scoring_params(cfg)
    topics = _load_labeled_retrieval(cfg)
    stopwords = _stopwords(cfg)
    gazetteer = _gazetteer(cfg, topics, stopwords)
    queries, candidates = _tokenized_topics(topics, stopwords, gazetteer)
    stats = _candidate_stats(candidates)
    results = [
        cascade_mod.cascade_topk(
            queries[t.qid], list(candidates[t.qid].values()), stats,
            k=cfg.cascade_k, params=params,
        )
        for t in topics
    ]
    cascade_mod.write_cascade_dump(results, args.out)
    _write_meta(args.out, "cascade", args, cfg)
    print(f"cascade ok: queries={len(results)} k={cfg.cascade_k}")
    return 0


def cmd_pli_pairs(args) -> int:
    cfg = _config_from(args)
    topics = {t.qid: t for t in _load_labeled_retrieval(cfg)}
    survivors = cascade_mod.survivors_by_query(
        cascade_mod.read_cascade_dump(args.cascade)
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        count = 0
        for qid in sorted(survivors):
            topic = topics[qid]
            cands = {c.id: c for c in topic.candidates}
            q_paras = topic.query.paragraphs[: cfg.n_max]
            for cid in survivors[qid]:
                c_paras = cands[cid].paragraphs[: cfg.m_max]
                for i, qp in enumerate(q_paras):
                    for j, cp in enumerate(c_paras):
                        fh.write(
                            json.dumps(
                                {
                                    "qid": qid, "cid": cid, "i": i, "j": j,
                                    "text_a": qp, "text_b": cp,
                                },
                                ensure_ascii=False, separators=(",", ":"),
                            )
                            + "\n"
                        )
                        count += 1
    _write_meta(args.out, "pli-pairs", args, cfg)
    print(f"pli-pairs ok: cells={count}")
    return 0


def _interaction_maps(cfg, args, topics, survivors):
    """(qid, cid) -> (InteractionMap, first-paragraph probs)."""
    if getattr(args, "embeddings", None) or cfg.embeddings:
        cells = pli_mod.load_embeddings(getattr(args, "embeddings", None) or cfg.embeddings)
        return pli_mod.maps_from_embeddings(cells)
    enc = _encoder(args, cfg)
    wanted = [
        (qid, cid) for qid in sorted(survivors) for cid in survivors[qid]
    ]
    by_qid = {t.qid: t for t in topics}

    def build(pair):
        qid, cid = pair
        topic = by_qid[qid]
        cand = next(c for c in topic.candidates if c.id == cid)
        imap = pli_mod.build_interaction_map(
            topic.query, cand, enc, cfg.n_max, cfg.m_max
        )
        _vec, probs = enc.encode_pair(topic.query.paragraphs[0], cand.paragraphs[0])
        return (qid, cid), (imap, np.asarray(probs))

    return dict(_parallel_map(build, wanted, _workers(cfg)))


def cmd_pli_train(args) -> int:
    cfg = _config_from(args)
    topics = _load_labeled_retrieval(cfg)
    labels = corpus_mod.load_retrieval_labels(cfg.labels)
    survivors = cascade_mod.survivors_by_query(
        cascade_mod.read_cascade_dump(args.cascade)
    )
    train_ids, val_ids = _split_sets(args.split)
    maps = _interaction_maps(cfg, args, topics, survivors)

    def examples_for(ids):
        out = []
        for (qid, cid), (imap, _probs) in sorted(maps.items()):
            if qid in ids:
                out.append((imap, 1 if cid in labels.get(qid, frozenset()) else 0))
        return out

    result = pli_mod.train_pli(
        examples_for(train_ids),
        pli_mod.PliTrainConfig(
            lr=cfg.pli_lr,
            weight_decay=cfg.pli_weight_decay,
            max_epochs=cfg.pli_epochs,
            seed=cfg.seed,
            hidden=cfg.gru_hidden,
        ),
        examples_for(val_ids),
    )
    pli_mod.save_pli_model(result.model, args.out)
    _write_meta(args.out, "pli-train", args, cfg)
    best = result.history[result.best_epoch - 1]
    print(
        f"pli-train ok: best_epoch={result.best_epoch} "
        f"val_f1={best['val_f1']:.4f} train_acc={best['train_accuracy']:.4f}"
    )
    return 0


def write_pli_scores(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for qid, cid, probs, fp_probs in rows:
            fh.write(
                json.dumps(
                    {
                        "qid": qid,
                        "cid": cid,
                        "probs": [float(probs[0]), float(probs[1])],
                        "firstpara_probs": [float(fp_probs[0]), float(fp_probs[1])],
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_pli_scores(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            out[(obj["qid"], obj["cid"])] = (
                np.asarray(obj["probs"], dtype=np.float64),
                np.asarray(obj["firstpara_probs"], dtype=np.float64),
            )
    return out


def cmd_pli_score(args) -> int:
    cfg = _config_from(args)
    topics = _load_labeled_retrieval(cfg)
    survivors = cascade_mod.survivors_by_query(
        cascade_mod.read_cascade_dump(args.cascade)
    )
    model = pli_mod.load_pli_model(args.model)
    maps = _interaction_maps(cfg, args, topics, survivors)
    rows = []
    selections = {}
    for (qid, cid), (imap, fp_probs) in sorted(maps.items()):
        probs = pli_mod.predict_probs(model, imap)
        rows.append((qid, cid, probs, fp_probs))
        if probs[1] >= 0.5:
            selections.setdefault(qid, []).append(cid)
    write_pli_scores(rows, args.out)
    if args.out_run:
        run = metrics.RunResult(
            {qid: tuple(cids) for qid, cids in selections.items()}
        )
        metrics.write_run_file(run, args.out_run)
    _write_meta(args.out, "pli-score", args, cfg)
    print(f"pli-score ok: pairs={len(rows)}")
    return 0


def cmd_entail_pairs(args) -> int:
    cfg = _config_from(args)
    topics = corpus_mod.load_entailment_corpus(cfg.entail_corpus or cfg.corpus)
    pairs = []
    for topic in topics:
        pairs.extend(entail_mod.build_entail_pairs(topic, args.mode))
    entail_mod.write_pair_dump(pairs, args.out)
    _write_meta(args.out, "entail-pairs", args, cfg)
    print(f"entail-pairs ok: pairs={len(pairs)} mode={args.mode}")
    return 0


def cmd_entail_score(args) -> int:
    cfg = _config_from(args)
    pairs = entail_mod.read_pair_dump(args.pairs)
    if getattr(args, "embeddings", None) or cfg.embeddings:
        cells = pli_mod.load_embeddings(getattr(args, "embeddings", None) or cfg.embeddings)
        probs_by_key = {
            (qid, i + 1): probs
            for (qid, _cid, i, _j), (_vec, probs) in cells.items()
        }
        scored = [
            (p.qid, p.para_idx, probs_by_key[(p.qid, p.para_idx)]) for p in pairs
        ]
    else:
        enc = _encoder(args, cfg)
        probs = entail_mod.classify_pairs(pairs, enc)
        scored = [(p.qid, p.para_idx, pr) for p, pr in zip(pairs, probs)]
    entail_mod.write_score_file(scored, args.out)
    if args.out_run:
        by_qid: dict[str, list] = {}
        for qid, idx, pr in scored:
            by_qid.setdefault(qid, []).append((idx, pr))
        selections = {}
        for qid, rows in sorted(by_qid.items()):
            rows.sort()
            decision = entail_mod.decide_standalone(qid, [pr for _, pr in rows])
            selections[qid] = tuple(str(i) for i in sorted(decision.selected_idx))
        metrics.write_run_file(metrics.RunResult(selections), args.out_run)
    _write_meta(args.out, "entail-score", args, cfg)
    print(f"entail-score ok: pairs={len(scored)}")
    return 0


def _assemble_task1_rows(cfg, args):
    rows = lexical.read_feature_dump(args.features)
    lex = {(r["qid"], r["cid"]): r for r in rows}
    pli_scores = read_pli_scores(args.pli_scores)
    labels = corpus_mod.load_retrieval_labels(cfg.labels) if cfg.labels else {}
    out = []
    for (qid, cid), (probs, fp_probs) in sorted(pli_scores.items()):
        r = lex[(qid, cid)]
        features = ltr.assemble_task1(
            lexical.DuetFeatures(tuple(r["duet"])),
            r["sdr_w"],
            r["sdr_e"],
            probs,
            fp_probs,
        )
        label = None
        if qid in labels:
            label = 1 if cid in labels[qid] else 0
        out.append(
            {"qid": qid, "cid": cid, "features": list(features.values), "label": label}
        )
    return out


def _assemble_task2_rows(cfg, args):
    topics = corpus_mod.load_entailment_corpus(cfg.entail_corpus or cfg.corpus)
    sym = entail_mod.read_score_file(args.sym_scores)
    asym = entail_mod.read_score_file(args.asym_scores)
    labels = (
        corpus_mod.load_entailment_labels(cfg.entail_labels or cfg.labels)
        if (cfg.entail_labels or cfg.labels)
        else {}
    )
    stopwords = _stopwords(cfg)
    params = _scoring_params(cfg)
    out = []
    for topic in topics:
        para_docs = [
            lexical.word_view(tokenize(p, stopwords)) for p in topic.paragraphs
        ]
        topic_stats = lexical.build_stats(
            [
                tokenize_case(f"{topic.id}#p{i}", (p,), stopwords)
                for i, p in enumerate(topic.paragraphs, start=1)
            ]
        )
        frag_view = lexical.word_view(tokenize(topic.fragment, stopwords))
        for idx, para in enumerate(topic.paragraphs, start=1):
            features = ltr.assemble_task2(
                sym[(topic.id, idx)],
                asym[(topic.id, idx)],
                lexical.bm25(frag_view, para_docs[idx - 1], topic_stats, params),
                idx,
                len(para.split()),
            )
            label = None
            if topic.id in labels:
                label = 1 if idx in labels[topic.id] else 0
            out.append(
                {
                    "qid": topic.id,
                    "para_idx": idx,
                    "features": list(features.values),
                    "label": label,
                }
            )
    return out


def cmd_combine_train(args) -> int:
    cfg = _config_from(args)
    train_ids, _val_ids = _split_sets(args.split)
    if args.task == 1:
        rows = _assemble_task1_rows(cfg, args)
        layout, c_value = ltr.TASK1_LAYOUT, cfg.c_task1
    else:
        rows = _assemble_task2_rows(cfg, args)
        layout, c_value = ltr.TASK2_LAYOUT, cfg.c_task2
    if args.out_features:
        ltr.write_feature_file(layout, rows, args.out_features)
    examples: dict[str, list] = {}
    for row in rows:
        if row["qid"] in train_ids and row.get("label") is not None:
            examples.setdefault(row["qid"], []).append(
                (np.asarray(row["features"]), row["label"])
            )
    model = ltr.ranksvm_train(
        examples, C=c_value, seed=cfg.seed, iterations=cfg.svm_iterations
    )
    ltr.save_rank_model(model, args.out)
    _write_meta(args.out, "combine-train", args, cfg)
    print(f"combine-train ok: task={args.task} rows={len(rows)} C={c_value}")
    return 0


def cmd_combine_apply(args) -> int:
    cfg = _config_from(args)
    model = ltr.load_rank_model(args.model)
    layout, rows = ltr.read_feature_file(args.features)
    key = "cid" if layout == ltr.TASK1_LAYOUT else "para_idx"
    by_qid: dict[str, list] = {}
    for row in rows:
        score = ltr.predict(model, np.asarray(row["features"]))
        by_qid.setdefault(row["qid"], []).append((row[key], score))
    selections = {}
    rankings = {}
    for qid, scored in sorted(by_qid.items()):
        if layout == ltr.TASK1_LAYOUT:
            ordered = sorted(scored, key=lambda item: (-item[1], item[0]))
            selections[qid] = tuple(ltr.select_task1(scored))
        else:
            scored.sort()
            values = [s for _idx, s in scored]
            ordered = sorted(
                ((str(idx), s) for idx, s in scored), key=lambda item: (-item[1], item[0])
            )
            # map selected positions back to the paragraph ids they score
            positions = sorted(ltr.select_task2(values))
            selections[qid] = tuple(str(scored[pos - 1][0]) for pos in positions)
        rankings[qid] = [(str(doc_id), s) for doc_id, s in ordered]
    metrics.write_run_file(metrics.RunResult(selections), args.out_run)
    if args.out_ranking:
        metrics.write_ranking_file(rankings, args.out_ranking)
    _write_meta(args.out_run, "combine-apply", args, cfg)
    print(f"combine-apply ok: queries={len(selections)}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config_from(args)
    run = metrics.read_run_file(args.run)
    if args.task == 1:
        qrels = {
            qid: frozenset(ids)
            for qid, ids in corpus_mod.load_retrieval_labels(args.qrels).items()
        }
    else:
        qrels = {
            qid: frozenset(str(i) for i in ids)
            for qid, ids in corpus_mod.load_entailment_labels(args.qrels).items()
        }
    report = metrics.micro_metrics(run, qrels)
    payload = report.to_json()
    sys.stdout.write(payload)
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        _write_meta(args.out, "evaluate", args, cfg)
    return 0


def cmd_gen_synthetic(args) -> int:
    cfg = _config_from(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    topics, labels, gazetteer = synthetic.generate_retrieval_corpus(
        args.queries, args.candidates, cfg.seed, n_relevant=args.relevant
    )
    (out_dir / "task1-corpus.jsonl").write_text(
        corpus_mod.serialize_retrieval_corpus(topics), encoding="utf-8"
    )
    (out_dir / "task1-qrels.jsonl").write_text(
        corpus_mod.serialize_retrieval_labels(labels), encoding="utf-8"
    )
    e_topics, e_labels = synthetic.generate_entailment_corpus(
        args.entail_queries, cfg.seed
    )
    (out_dir / "task2-corpus.jsonl").write_text(
        corpus_mod.serialize_entailment_corpus(e_topics), encoding="utf-8"
    )
    (out_dir / "task2-qrels.jsonl").write_text(
        corpus_mod.serialize_entailment_labels(e_labels), encoding="utf-8"
    )
    save_gazetteer(gazetteer, out_dir / "gazetteer.txt")
    _write_meta(out_dir / "task1-corpus.jsonl", "gen-synthetic", args, cfg)
    print(
        f"gen-synthetic ok: task1={len(topics)}x{args.candidates} "
        f"task2={len(e_topics)}"
    )
    return 0


# ------------------------------------------------------------ arg parser ---


def _add_common(parser):
    parser.add_argument("--config", help="pipeline config file (key=value sections)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--workers", type=int, help="bound stage parallelism")
    parser.add_argument("--output-dir", dest="output_dir", help="artifact directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caselaw-ir",
        description="Legal case retrieval and entailment pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalise a corpus")
    _add_common(p)
    p.add_argument("--task", type=int, choices=(1, 2), required=True)
    p.add_argument("--corpus", help="corpus file")
    p.add_argument("--labels", help="labels file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="deterministic train/validation split")
    _add_common(p)
    p.add_argument("--task", type=int, choices=(1, 2), default=1)
    p.add_argument("--corpus")
    p.add_argument("--ratio", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("features-duet", help="lexical features per (query, candidate)")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--labels")
    p.add_argument("--stopwords")
    p.add_argument("--gazetteer")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features_duet)

    p = sub.add_parser("train-duet", help="train the pairwise hinge ranker")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--labels")
    p.add_argument("--split", required=True)
    p.add_argument("--duet-lr", dest="duet_lr", type=float)
    p.add_argument("--duet-epochs", dest="duet_epochs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_duet)

    p = sub.add_parser("rank-duet", help="rank and select top-5 per query")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out-run", dest="out_run", required=True)
    p.add_argument("--out-ranking", dest="out_ranking", required=True)
    p.set_defaults(func=cmd_rank_duet)

    p = sub.add_parser("cascade", help="bigram-LMIR top-k recall filter")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--stopwords")
    p.add_argument("--gazetteer")
    p.add_argument("--k", dest="cascade_k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("pli-pairs", help="paragraph-pair requests for survivors")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--cascade", required=True)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--m-max", dest="m_max", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pli_pairs)

    p = sub.add_parser("pli-train", help="train the interaction classifier")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--labels")
    p.add_argument("--cascade", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--encoder-dim", dest="encoder_dim", type=int)
    p.add_argument("--encoder-seed", dest="encoder_seed", type=int)
    p.add_argument("--hidden", dest="gru_hidden", type=int)
    p.add_argument("--pli-lr", dest="pli_lr", type=float)
    p.add_argument("--pli-epochs", dest="pli_epochs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pli_train)

    p = sub.add_parser("pli-score", help="score survivors with the classifier")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--cascade", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--encoder-dim", dest="encoder_dim", type=int)
    p.add_argument("--encoder-seed", dest="encoder_seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--out-run", dest="out_run")
    p.set_defaults(func=cmd_pli_score)

    p = sub.add_parser("entail-pairs", help="build truncated fragment/paragraph pairs")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--mode", choices=("symmetric", "asymmetric"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_entail_pairs)

    p = sub.add_parser("entail-score", help="score entailment pairs")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--embeddings")
    p.add_argument("--encoder-dim", dest="encoder_dim", type=int)
    p.add_argument("--encoder-seed", dest="encoder_seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--out-run", dest="out_run")
    p.set_defaults(func=cmd_entail_score)

    p = sub.add_parser("combine-train", help="train the feature-combination ranker")
    _add_common(p)
    p.add_argument("--task", type=int, choices=(1, 2), required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--features", help="task 1: lexical feature dump")
    p.add_argument("--pli-scores", dest="pli_scores", help="task 1: pli score file")
    p.add_argument("--corpus", help="task 2: entailment corpus")
    p.add_argument("--sym-scores", dest="sym_scores", help="task 2: symmetric scores")
    p.add_argument("--asym-scores", dest="asym_scores", help="task 2: asymmetric scores")
    p.add_argument("--labels")
    p.add_argument("--c", dest="c_override", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--out-features", dest="out_features")
    p.set_defaults(func=cmd_combine_train)

    p = sub.add_parser("combine-apply", help="score and select with the ranker")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True, help="feature file with layout header")
    p.add_argument("--out-run", dest="out_run", required=True)
    p.add_argument("--out-ranking", dest="out_ranking")
    p.set_defaults(func=cmd_combine_apply)

    p = sub.add_parser("evaluate", help="micro P/R/F1 of a run against labels")
    _add_common(p)
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--task", type=int, choices=(1, 2), default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-synthetic", help="deterministic synthetic corpora")
    _add_common(p)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--candidates", type=int, default=50)
    p.add_argument("--relevant", type=int, default=5)
    p.add_argument("--entail-queries", dest="entail_queries", type=int, default=10)
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "c_override", None) is not None:
        if args.task == 1:
            args.c_task1 = args.c_override
        else:
            args.c_task2 = args.c_override
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # stage failure -> exit 1 with module error text
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
