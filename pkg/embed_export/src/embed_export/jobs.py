"""Export job description and pair-request file parsing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass
class ExportJob:
    model_path: str
    pairs_path: str = ""
    output_path: str = ""
    max_length: int = 512          # subword budget including special tokens
    batch_size: int = 16
    epochs: int = 0                # 0 = encode-only passthrough
    learning_rate: float = 1e-5
    mode: str = "symmetric"        # truncation re-check: symmetric | asymmetric
    seed: int = 0
    fragment_cap: int = 128        # asymmetric subword cap on text_a

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0 (0 = encode-only)")
        if self.mode not in ("symmetric", "asymmetric"):
            raise ValueError(f"unknown truncation re-check mode {self.mode!r}")
        if self.max_length < 8:
            raise ValueError("max_length too small for any pair")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class PairRecord:
    """One request: interchange cell key plus the two texts.

    Entailment-style requests (qid / para_idx) map onto the grid key as
    (qid, cid="", i=para_idx - 1, j=0) so one interchange format serves
    both tasks.
    """

    qid: str
    cid: str
    i: int
    j: int
    text_a: str
    text_b: str
    label: int | None = None


def read_pair_requests(path: str | Path) -> list[PairRecord]:
    """Accepts both the grid format (qid/cid/i/j) and the entailment format
    (qid/para_idx); raises with the offending line number on bad input."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                label = obj.get("label")
                if "para_idx" in obj:
                    rec = PairRecord(
                        obj["qid"], "", int(obj["para_idx"]) - 1, 0,
                        obj["text_a"], obj["text_b"],
                        None if label is None else int(label),
                    )
                else:
                    rec = PairRecord(
                        obj["qid"], obj["cid"], int(obj["i"]), int(obj["j"]),
                        obj["text_a"], obj["text_b"],
                        None if label is None else int(label),
                    )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
            records.append(rec)
    return records
