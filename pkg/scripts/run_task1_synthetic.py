#!/usr/bin/env python3
"""End-to-end retrieval experiment on synthetic data.

Generates a corpus with planted relevance, runs every stage (lexical
features, hinge ranker, cascade, interaction classifier with the toy
encoder, feature combination), and prints the micro metrics of all three
runs.  Repeatable: same seed, same bytes.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from caselaw_ir.cli import main as cli  # noqa: E402


def sh(*argv):
    rc = cli([str(a) for a in argv])
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/task1-synthetic")
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--candidates", type=int, default=50)
    ap.add_argument("--relevant", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--cascade-k", type=int, default=30)
    ap.add_argument("--encoder-dim", type=int, default=16)
    ap.add_argument("--hidden", type=int, default=16)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = out / "task1-corpus.jsonl"
    qrels = out / "task1-qrels.jsonl"

    sh("gen-synthetic", "--out-dir", out, "--queries", args.queries,
       "--candidates", args.candidates, "--relevant", args.relevant,
       "--seed", args.seed)
    sh("split", "--corpus", corpus, "--seed", args.seed, "--out", out / "split.json")
    sh("features-duet", "--corpus", corpus, "--gazetteer", out / "gazetteer.txt",
       "--out", out / "lex.jsonl")
    sh("train-duet", "--features", out / "lex.jsonl", "--labels", qrels,
       "--split", out / "split.json", "--duet-lr", 0.05, "--seed", args.seed,
       "--out", out / "duet.json")
    sh("rank-duet", "--features", out / "lex.jsonl", "--model", out / "duet.json",
       "--out-run", out / "run1.tsv", "--out-ranking", out / "rank1.tsv")
    sh("cascade", "--corpus", corpus, "--gazetteer", out / "gazetteer.txt",
       "--k", args.cascade_k, "--out", out / "cascade.tsv")
    sh("pli-train", "--corpus", corpus, "--labels", qrels,
       "--cascade", out / "cascade.tsv", "--split", out / "split.json",
       "--encoder-dim", args.encoder_dim, "--hidden", args.hidden,
       "--pli-lr", 0.1, "--pli-epochs", 5, "--seed", args.seed,
       "--out", out / "pli.json")
    sh("pli-score", "--corpus", corpus, "--cascade", out / "cascade.tsv",
       "--model", out / "pli.json", "--encoder-dim", args.encoder_dim,
       "--seed", args.seed, "--out", out / "pli-scores.jsonl",
       "--out-run", out / "run2.tsv")
    sh("combine-train", "--task", 1, "--features", out / "lex.jsonl",
       "--pli-scores", out / "pli-scores.jsonl", "--labels", qrels,
       "--split", out / "split.json", "--seed", args.seed,
       "--out", out / "svm.json", "--out-features", out / "t1feat.jsonl")
    sh("combine-apply", "--model", out / "svm.json",
       "--features", out / "t1feat.jsonl",
       "--out-run", out / "run3.tsv", "--out-ranking", out / "rank3.tsv")

    print("\nmicro metrics per run:")
    for name, run_file in (
        ("run1 (hinge ranker, top-5)", "run1.tsv"),
        ("run2 (interaction classifier)", "run2.tsv"),
        ("run3 (feature combination)", "run3.tsv"),
    ):
        report = out / f"report-{run_file.removesuffix('.tsv')}.json"
        sh("evaluate", "--run", out / run_file, "--qrels", qrels,
           "--task", 1, "--out", report)
        print(f"  {name}: {json.loads(report.read_text())}")


if __name__ == "__main__":
    main()
