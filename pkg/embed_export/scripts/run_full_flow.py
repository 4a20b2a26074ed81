#!/usr/bin/env python3
"""Full cross-package flow on synthetic data.

The pipeline package generates a corpus and paragraph-pair requests; this
package builds a local stand-in model, fine-tunes it on labeled
first-paragraph pairs, and exports embeddings; the pipeline then trains
and scores its interaction classifier from that interchange file.
Requires both packages importable (installed, or run from the repo root).
"""

import argparse
import json
import sys
from pathlib import Path

HERE = Path(__file__).resolve()
sys.path.insert(0, str(HERE.parents[1] / "src"))
sys.path.insert(0, str(HERE.parents[2] / "src"))

from caselaw_ir.cli import main as pipeline  # noqa: E402
from embed_export.cli import main as exporter  # noqa: E402


def run(entry, *argv):
    rc = entry([str(a) for a in argv])
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/full-flow")
    ap.add_argument("--queries", type=int, default=4)
    ap.add_argument("--candidates", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2)
    ap.add_argument("--epochs", type=int, default=2)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = out / "task1-corpus.jsonl"
    qrels = out / "task1-qrels.jsonl"

    run(pipeline, "gen-synthetic", "--out-dir", out, "--queries", args.queries,
        "--candidates", args.candidates, "--relevant", 2, "--seed", args.seed)
    run(pipeline, "split", "--corpus", corpus, "--seed", args.seed,
        "--out", out / "split.json")
    run(pipeline, "cascade", "--corpus", corpus,
        "--gazetteer", out / "gazetteer.txt", "--k", 4, "--out", out / "cascade.tsv")
    run(pipeline, "pli-pairs", "--corpus", corpus, "--cascade", out / "cascade.tsv",
        "--n-max", 3, "--m-max", 3, "--out", out / "pli-pairs.jsonl")

    # tokenizer corpus and labeled first-paragraph pairs for fine-tuning
    texts = []
    for line in open(corpus, encoding="utf-8"):
        obj = json.loads(line)
        texts.extend(obj["query_paragraphs"])
        for c in obj["candidates"]:
            texts.extend(c["paragraphs"])
    (out / "texts.txt").write_text("\n".join(texts), encoding="utf-8")
    labels = {
        json.loads(l)["qid"]: set(json.loads(l)["relevant"])
        for l in open(qrels, encoding="utf-8")
    }
    with open(out / "ft-pairs.jsonl", "w", encoding="utf-8") as fh:
        for line in open(out / "pli-pairs.jsonl", encoding="utf-8"):
            obj = json.loads(line)
            if obj["i"] == 0 and obj["j"] == 0:
                obj["label"] = 1 if obj["cid"] in labels[obj["qid"]] else 0
                fh.write(json.dumps(obj) + "\n")

    run(exporter, "make-tiny-model", "--corpus", out / "texts.txt",
        "--out", out / "tiny", "--vocab-size", 600, "--seed", args.seed)
    run(exporter, "finetune", "--model", out / "tiny",
        "--pairs", out / "ft-pairs.jsonl", "--out", out / "tuned",
        "--epochs", args.epochs, "--lr", 1e-4, "--batch-size", 8,
        "--seed", args.seed)
    run(exporter, "encode", "--model", out / "tuned" / "best",
        "--pairs", out / "pli-pairs.jsonl", "--out", out / "embeddings.jsonl",
        "--name", "tuned-tiny")

    run(pipeline, "pli-train", "--corpus", corpus, "--labels", qrels,
        "--cascade", out / "cascade.tsv", "--split", out / "split.json",
        "--embeddings", out / "embeddings.jsonl", "--hidden", 8,
        "--pli-lr", 0.1, "--pli-epochs", 3, "--seed", args.seed,
        "--out", out / "pli.json")
    run(pipeline, "pli-score", "--corpus", corpus, "--cascade", out / "cascade.tsv",
        "--model", out / "pli.json", "--embeddings", out / "embeddings.jsonl",
        "--out", out / "pli-scores.jsonl")
    print(f"full flow complete; artifacts in {out}")


if __name__ == "__main__":
    main()
