"""CLI: make-tiny-model, finetune, encode."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .encode import encode_pairs
from .finetune import finetune
from .jobs import ExportJob
from .model import make_tiny_model


def cmd_make_tiny_model(args) -> int:
    texts = Path(args.corpus).read_text(encoding="utf-8").splitlines()
    out = make_tiny_model(
        args.out,
        [t for t in texts if t.strip()],
        vocab_size=args.vocab_size,
        hidden_size=args.hidden,
        num_layers=args.layers,
        seed=args.seed,
    )
    print(f"make-tiny-model ok: {out}")
    return 0


def cmd_finetune(args) -> int:
    job = ExportJob(
        model_path=args.model,
        pairs_path=args.pairs,
        output_path=args.out,
        max_length=args.max_length,
        batch_size=args.batch_size,
        epochs=args.epochs,
        learning_rate=args.lr,
        mode=args.mode,
        seed=args.seed,
    )
    best = finetune(job)
    print(f"finetune ok: {best}")
    return 0


def cmd_encode(args) -> int:
    job = ExportJob(
        model_path=args.model,
        pairs_path=args.pairs,
        output_path=args.out,
        max_length=args.max_length,
        batch_size=args.batch_size,
        mode=args.mode,
        seed=args.seed,
    )
    out = encode_pairs(job, encoder_name=args.name)
    print(f"encode ok: {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Sentence-pair fine-tuning and CLS embedding export",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-tiny-model", help="local tokenizer + random init model")
    p.add_argument("--corpus", required=True, help="one text per line")
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-size", type=int, default=2000)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_tiny_model)

    p = sub.add_parser("finetune", help="end-to-end sentence-pair fine-tuning")
    p.add_argument("--model", required=True, help="base model directory")
    p.add_argument("--pairs", required=True, help="labeled pair-request file")
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--max-length", type=int, default=512)
    p.add_argument("--mode", choices=("symmetric", "asymmetric"), default="symmetric")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("encode", help="batch encode pairs to the interchange file")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--max-length", type=int, default=512)
    p.add_argument("--mode", choices=("symmetric", "asymmetric"), default="symmetric")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", help="encoder name recorded in the header")
    p.set_defaults(func=cmd_encode)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
