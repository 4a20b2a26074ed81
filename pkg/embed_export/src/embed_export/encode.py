"""Batch encoding of paragraph pairs into the embeddings interchange file.

Subword budget re-check: the upstream pair builder counts whitespace
tokens, so pairs may still exceed the encoder window after subword
tokenization.  Per contract only text_b is re-truncated to fit; in
asymmetric mode text_a is first capped at the fragment budget (128
subwords) and never cut below min(original, cap).  If text_a alone
overflows the whole window (symmetric mode, no paragraph left to cut), it
is hard-capped as a last resort.

Output: header {"dim": hidden_size, "encoder": name}, then one record per
request with the final-layer CLS vector and the classifier softmax.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import torch

from .jobs import ExportJob, PairRecord, read_pair_requests
from .model import load_model


def truncate_subwords(
    ids_a: list[int],
    ids_b: list[int],
    mode: str,
    max_length: int,
    fragment_cap: int = 128,
) -> tuple[list[int], list[int]]:
    """Fit two subword id lists into max_length minus 3 special tokens."""
    budget = max_length - 3
    if mode == "asymmetric":
        ids_a = ids_a[:fragment_cap]
    if len(ids_a) + len(ids_b) > budget:
        ids_b = ids_b[: max(0, budget - len(ids_a))]
    if len(ids_a) > budget:
        ids_a = ids_a[:budget]
    return ids_a, ids_b


def _build_inputs(tokenizer, pairs, mode, max_length, fragment_cap):
    rows = []
    for rec in pairs:
        ids_a = tokenizer(rec.text_a, add_special_tokens=False)["input_ids"]
        ids_b = tokenizer(rec.text_b, add_special_tokens=False)["input_ids"]
        ids_a, ids_b = truncate_subwords(ids_a, ids_b, mode, max_length, fragment_cap)
        input_ids = (
            [tokenizer.cls_token_id]
            + ids_a
            + [tokenizer.sep_token_id]
            + ids_b
            + [tokenizer.sep_token_id]
        )
        token_types = [0] * (len(ids_a) + 2) + [1] * (len(ids_b) + 1)
        rows.append((input_ids, token_types))
    return rows


def _pad_batch(rows, pad_id):
    width = max(len(ids) for ids, _ in rows)
    input_ids, token_types, attention = [], [], []
    for ids, types in rows:
        pad = width - len(ids)
        input_ids.append(ids + [pad_id] * pad)
        token_types.append(types + [0] * pad)
        attention.append([1] * len(ids) + [0] * pad)
    return (
        torch.tensor(input_ids, dtype=torch.long),
        torch.tensor(token_types, dtype=torch.long),
        torch.tensor(attention, dtype=torch.long),
    )


@torch.no_grad()
def encode_records(
    model, tokenizer, pairs: Sequence[PairRecord], job: ExportJob
) -> list[tuple[PairRecord, list[float], list[float]]]:
    model.eval()
    out = []
    for start in range(0, len(pairs), job.batch_size):
        chunk = list(pairs[start : start + job.batch_size])
        rows = _build_inputs(tokenizer, chunk, job.mode, job.max_length, job.fragment_cap)
        input_ids, token_types, attention = _pad_batch(rows, tokenizer.pad_token_id)
        try:
            result = model(
                input_ids=input_ids,
                token_type_ids=token_types,
                attention_mask=attention,
                output_hidden_states=True,
            )
        except Exception as exc:
            keys = [(r.qid, r.cid, r.i, r.j) for r in chunk]
            raise RuntimeError(f"encoder failed on batch {keys}: {exc}") from exc
        cls = result.hidden_states[-1][:, 0, :]
        probs = torch.softmax(result.logits, dim=-1)
        for rec, vec, pr in zip(chunk, cls, probs):
            out.append((rec, [float(x) for x in vec], [float(x) for x in pr]))
    return out


def encode_pairs(job: ExportJob, encoder_name: str | None = None) -> Path:
    """Encode a pair-request file into the interchange format."""
    model, tokenizer = load_model(job.model_path)
    torch.manual_seed(job.seed)
    pairs = read_pair_requests(job.pairs_path)
    encoded = encode_records(model, tokenizer, pairs, job)
    name = encoder_name or Path(job.model_path).name
    out_path = Path(job.output_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {"dim": model.config.hidden_size, "encoder": name},
                separators=(",", ":"),
            )
            + "\n"
        )
        for rec, vec, probs in encoded:
            fh.write(
                json.dumps(
                    {
                        "qid": rec.qid,
                        "cid": rec.cid,
                        "i": rec.i,
                        "j": rec.j,
                        "vec": vec,
                        "probs": probs,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
    return out_path
