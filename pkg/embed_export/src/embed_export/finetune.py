"""End-to-end fine-tuning on sentence-pair classification.

Every parameter updates (no frozen encoder here); cross-entropy loss,
AdamW at the configured learning rate, one checkpoint per epoch, and the
checkpoint with the best validation F1 is retained as ``best``.  With
epochs=0 the base model passes through unchanged (encode-only jobs).
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path
from typing import Sequence

import torch

from .encode import _build_inputs, _pad_batch
from .jobs import ExportJob, PairRecord, read_pair_requests
from .model import load_model


def _batches(pairs, order, batch_size):
    for start in range(0, len(order), batch_size):
        yield [pairs[k] for k in order[start : start + batch_size]]


def _forward(model, tokenizer, chunk, job, labels=None):
    rows = _build_inputs(tokenizer, chunk, job.mode, job.max_length, job.fragment_cap)
    input_ids, token_types, attention = _pad_batch(rows, tokenizer.pad_token_id)
    kwargs = dict(
        input_ids=input_ids, token_type_ids=token_types, attention_mask=attention
    )
    if labels is not None:
        kwargs["labels"] = torch.tensor(labels, dtype=torch.long)
    return model(**kwargs)


@torch.no_grad()
def _validation_f1(model, tokenizer, pairs: Sequence[PairRecord], job) -> float:
    model.eval()
    tp = fp = fn = 0
    for start in range(0, len(pairs), job.batch_size):
        chunk = list(pairs[start : start + job.batch_size])
        logits = _forward(model, tokenizer, chunk, job).logits
        preds = torch.argmax(logits, dim=-1).tolist()
        for rec, pred in zip(chunk, preds):
            if pred == 1 and rec.label == 1:
                tp += 1
            elif pred == 1 and rec.label == 0:
                fp += 1
            elif pred == 0 and rec.label == 1:
                fn += 1
    return 2.0 * tp / (2.0 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0


def finetune(
    job: ExportJob,
    labeled_pairs: Sequence[PairRecord] | None = None,
    validation_pairs: Sequence[PairRecord] | None = None,
) -> Path:
    """Returns the directory of the retained (best or passthrough) model.

    Without an explicit validation set, every fifth pair is held out
    (deterministic, position-based).
    """
    out_dir = Path(job.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    best_dir = out_dir / "best"
    model, tokenizer = load_model(job.model_path)

    if job.epochs == 0:
        model.save_pretrained(best_dir)
        tokenizer.save_pretrained(best_dir)
        _write_history(out_dir, [])
        return best_dir

    if labeled_pairs is None:
        labeled_pairs = read_pair_requests(job.pairs_path)
    labeled_pairs = [p for p in labeled_pairs if p.label is not None]
    if not labeled_pairs:
        raise ValueError("fine-tuning needs labeled pairs")
    if {p.label for p in labeled_pairs} != {0, 1}:
        raise ValueError("fine-tuning needs both classes")
    if validation_pairs is None:
        validation_pairs = [p for k, p in enumerate(labeled_pairs) if k % 5 == 4]
        train_pairs = [p for k, p in enumerate(labeled_pairs) if k % 5 != 4]
        if not validation_pairs or not train_pairs:
            train_pairs = validation_pairs = list(labeled_pairs)
    else:
        train_pairs = list(labeled_pairs)
        validation_pairs = list(validation_pairs)

    torch.manual_seed(job.seed)
    generator = torch.Generator().manual_seed(job.seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=job.learning_rate)
    history = []
    best_f1 = -1.0
    for epoch in range(1, job.epochs + 1):
        model.train()
        order = torch.randperm(len(train_pairs), generator=generator).tolist()
        total_loss = 0.0
        for chunk in _batches(train_pairs, order, job.batch_size):
            optimizer.zero_grad()
            out = _forward(model, tokenizer, chunk, job, labels=[p.label for p in chunk])
            out.loss.backward()
            optimizer.step()
            total_loss += float(out.loss.detach()) * len(chunk)
        val_f1 = _validation_f1(model, tokenizer, validation_pairs, job)
        checkpoint = out_dir / f"checkpoint-epoch-{epoch}"
        model.save_pretrained(checkpoint)
        history.append(
            {
                "epoch": epoch,
                "train_loss": total_loss / len(train_pairs),
                "val_f1": val_f1,
            }
        )
        if val_f1 > best_f1:
            best_f1 = val_f1
            if best_dir.exists():
                shutil.rmtree(best_dir)
            model.save_pretrained(best_dir)
            tokenizer.save_pretrained(best_dir)
    _write_history(out_dir, history)
    return best_dir


def _write_history(out_dir: Path, history) -> None:
    (out_dir / "history.json").write_text(
        json.dumps(history, separators=(",", ":")) + "\n", encoding="utf-8"
    )
