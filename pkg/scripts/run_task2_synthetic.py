#!/usr/bin/env python3
"""End-to-end entailment experiment on synthetic data.

Builds symmetric- and asymmetric-truncation pair files, scores them with
the toy encoder, combines the scores with BM25 and structural features, and
prints micro metrics for the standalone and combined selections.
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
    ap.add_argument("--out-dir", default="out/task2-synthetic")
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--encoder-dim", type=int, default=16)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sh("gen-synthetic", "--out-dir", out, "--queries", 2, "--candidates", 4,
       "--entail-queries", args.queries, "--seed", args.seed)
    corpus = out / "task2-corpus.jsonl"
    qrels = out / "task2-qrels.jsonl"

    sh("split", "--task", 2, "--corpus", corpus, "--seed", args.seed,
       "--out", out / "split.json")
    sh("entail-pairs", "--corpus", corpus, "--mode", "symmetric",
       "--out", out / "pairs-sym.jsonl")
    sh("entail-pairs", "--corpus", corpus, "--mode", "asymmetric",
       "--out", out / "pairs-asym.jsonl")
    sh("entail-score", "--pairs", out / "pairs-sym.jsonl",
       "--encoder-dim", args.encoder_dim, "--seed", args.seed,
       "--out", out / "scores-sym.jsonl", "--out-run", out / "run-sym.tsv")
    sh("entail-score", "--pairs", out / "pairs-asym.jsonl",
       "--encoder-dim", args.encoder_dim, "--encoder-seed", args.seed + 1,
       "--out", out / "scores-asym.jsonl", "--out-run", out / "run-asym.tsv")
    sh("combine-train", "--task", 2, "--corpus", corpus,
       "--sym-scores", out / "scores-sym.jsonl",
       "--asym-scores", out / "scores-asym.jsonl",
       "--labels", qrels, "--split", out / "split.json", "--seed", args.seed,
       "--out", out / "svm2.json", "--out-features", out / "t2feat.jsonl")
    sh("combine-apply", "--model", out / "svm2.json",
       "--features", out / "t2feat.jsonl",
       "--out-run", out / "run-combined.tsv",
       "--out-ranking", out / "rank-combined.tsv")

    print("\nmicro metrics per run:")
    for name, run_file in (
        ("symmetric standalone", "run-sym.tsv"),
        ("asymmetric standalone", "run-asym.tsv"),
        ("combined", "run-combined.tsv"),
    ):
        report = out / f"report-{run_file.removesuffix('.tsv')}.json"
        sh("evaluate", "--run", out / run_file, "--qrels", qrels,
           "--task", 2, "--out", report)
        print(f"  {name}: {json.loads(report.read_text())}")


if __name__ == "__main__":
    main()
