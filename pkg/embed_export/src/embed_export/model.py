"""Model and tokenizer construction.

Published pretrained checkpoints are not reachable from the build
environment, so `make_tiny_model` materialises a small randomly
initialised BERT with a WordPiece tokenizer trained on local text.  The
resulting directory then serves as the "pretrained model path" for
fine-tuning and encoding; any real checkpoint directory works the same
way.
"""

from __future__ import annotations

import os
from pathlib import Path

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

import torch
from tokenizers import BertWordPieceTokenizer
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast


def make_tiny_model(
    out_dir: str | Path,
    corpus_texts: list[str],
    vocab_size: int = 2000,
    hidden_size: int = 32,
    num_layers: int = 2,
    num_heads: int = 2,
    seed: int = 0,
) -> Path:
    """Train a WordPiece tokenizer on the given texts and pair it with a
    randomly initialised sequence-pair classifier; returns the model dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus_file = out_dir / "tokenizer-corpus.txt"
    corpus_file.write_text("\n".join(corpus_texts), encoding="utf-8")

    wp = BertWordPieceTokenizer(lowercase=True)
    wp.train(
        [str(corpus_file)],
        vocab_size=vocab_size,
        min_frequency=1,
        special_tokens=["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"],
    )
    tokenizer_json = out_dir / "trained-tokenizer.json"
    wp.save(str(tokenizer_json))
    tokenizer = BertTokenizerFast(
        tokenizer_file=str(tokenizer_json), do_lower_case=True
    )
    tokenizer.save_pretrained(out_dir)

    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=num_heads,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=512,
        num_labels=2,
    )
    torch.manual_seed(seed)
    model = BertForSequenceClassification(config)
    model.save_pretrained(out_dir)
    return out_dir


def load_model(model_path: str | Path):
    model = BertForSequenceClassification.from_pretrained(model_path)
    tokenizer = BertTokenizerFast.from_pretrained(model_path)
    return model, tokenizer
