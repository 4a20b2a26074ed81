"""Entailment-task pipeline: pair construction, truncation budgets, scoring.

Each topic pairs its decision fragment with every candidate paragraph.  A
pair must fit an encoder window of 512 tokens, 3 of which are reserved for
special markers, leaving a content budget of 509.  Budgets are counted in
whitespace tokens here; an encoder with a subword vocabulary re-checks the
budget after subword tokenization and may further truncate the paragraph
side only (never the fragment).

Two budget policies:

* symmetric  -- both sides capped at floor(509 / 2) = 254; unused budget on
  one side transfers to the other; the odd leftover token goes to the
  paragraph side.  Heads are kept, tails cut.
* asymmetric -- the fragment keeps at most its first 128 tokens, then the
  paragraph is cut to whatever fits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import EntailmentTopic
from .pli import EncoderError, EncoderProvider

BUDGET_TOTAL = 512
BUDGET_SPECIALS = 3
CONTENT_BUDGET = BUDGET_TOTAL - BUDGET_SPECIALS  # 509
FRAGMENT_CAP = 128

_SYM_FRAG_CAP = CONTENT_BUDGET // 2        # 254
_SYM_PARA_CAP = CONTENT_BUDGET - _SYM_FRAG_CAP  # 255, odd token to the paragraph


@dataclass(frozen=True)
class PairRequest:
    qid: str
    para_idx: int  # 1-based
    text_a: tuple[str, ...]
    text_b: tuple[str, ...]
    budget_total: int = BUDGET_TOTAL
    budget_specials: int = BUDGET_SPECIALS

    def __post_init__(self):
        object.__setattr__(self, "text_a", tuple(self.text_a))
        object.__setattr__(self, "text_b", tuple(self.text_b))
        if self.para_idx < 1:
            raise ValueError("para_idx is 1-based")
        budget = self.budget_total - self.budget_specials
        if len(self.text_a) + len(self.text_b) > budget:
            raise ValueError(
                f"pair ({self.qid!r}, {self.para_idx}) exceeds the content "
                f"budget: {len(self.text_a)} + {len(self.text_b)} > {budget}"
            )


@dataclass(frozen=True)
class EntailDecision:
    qid: str
    selected_idx: frozenset[int]
    scores: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "selected_idx", frozenset(self.selected_idx))
        if not self.selected_idx:
            raise ValueError("decision must select at least one paragraph")
        bad = [i for i in self.selected_idx if not 1 <= i <= len(self.scores)]
        if bad:
            raise ValueError(f"selected indices out of range: {sorted(bad)}")


def truncate_symmetric(
    frag: Sequence[str], para: Sequence[str]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    frag, para = tuple(frag), tuple(para)
    if len(frag) + len(para) <= CONTENT_BUDGET:
        return frag, para
    frag_budget = _SYM_FRAG_CAP + max(0, _SYM_PARA_CAP - len(para))
    para_budget = _SYM_PARA_CAP + max(0, _SYM_FRAG_CAP - len(frag))
    return frag[:frag_budget], para[:para_budget]


def truncate_asymmetric(
    frag: Sequence[str], para: Sequence[str]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    frag = tuple(frag)[:FRAGMENT_CAP]
    para = tuple(para)[: CONTENT_BUDGET - len(frag)]
    return frag, para


TRUNCATION_MODES = {
    "symmetric": truncate_symmetric,
    "asymmetric": truncate_asymmetric,
}


def build_entail_pairs(topic: EntailmentTopic, mode: str) -> list[PairRequest]:
    """One request per candidate paragraph, in paragraph order."""
    if mode not in TRUNCATION_MODES:
        raise ValueError(f"unknown truncation mode {mode!r}")
    truncate = TRUNCATION_MODES[mode]
    frag_tokens = tuple(topic.fragment.split())
    out = []
    for idx, para in enumerate(topic.paragraphs, start=1):
        a, b = truncate(frag_tokens, tuple(para.split()))
        out.append(PairRequest(topic.id, idx, a, b))
    return out


def classify_pairs(
    pairs: Sequence[PairRequest], enc: EncoderProvider
) -> list[np.ndarray]:
    """Entailment probabilities per paragraph; probs[1] is the positive class."""
    out = []
    for pair in pairs:
        try:
            _vec, probs = enc.encode_pair(" ".join(pair.text_a), " ".join(pair.text_b))
        except Exception as exc:
            raise EncoderError(
                f"encoder failed on pair ({pair.qid!r}, para {pair.para_idx}): {exc}",
                i=pair.para_idx,
            ) from exc
        out.append(np.asarray(probs, dtype=np.float64))
    return out


def decide_standalone(qid: str, scores: Sequence[np.ndarray]) -> EntailDecision:
    """Select paragraphs with positive probability >= 0.5.

    Falls back to the single best-scoring paragraph when nothing clears the
    threshold, so a decision is never empty.  Ties go to the smallest index.
    """
    if len(scores) == 0:
        raise ValueError("no paragraph scores to decide over")
    positive = [float(p[1]) for p in scores]
    selected = {i for i, p in enumerate(positive, start=1) if p >= 0.5}
    if not selected:
        best = max(range(len(positive)), key=lambda i: (positive[i], -i))
        selected = {best + 1}
    return EntailDecision(qid, frozenset(selected), tuple(positive))


def write_pair_dump(pairs: Sequence[PairRequest], path: str | Path) -> None:
    """One JSON object per pair: texts joined back to strings."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(
                json.dumps(
                    {
                        "qid": p.qid,
                        "para_idx": p.para_idx,
                        "text_a": " ".join(p.text_a),
                        "text_b": " ".join(p.text_b),
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_pair_dump(path: str | Path) -> list[PairRequest]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                out.append(
                    PairRequest(
                        obj["qid"],
                        int(obj["para_idx"]),
                        tuple(obj["text_a"].split()),
                        tuple(obj["text_b"].split()),
                    )
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return out


def write_score_file(
    rows: Sequence[tuple[str, int, np.ndarray]], path: str | Path
) -> None:
    """Lines of {"qid", "para_idx", "probs": [p0, p1]}."""
    with open(path, "w", encoding="utf-8") as fh:
        for qid, para_idx, probs in rows:
            fh.write(
                json.dumps(
                    {
                        "qid": qid,
                        "para_idx": para_idx,
                        "probs": [float(probs[0]), float(probs[1])],
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_score_file(path: str | Path) -> dict[tuple[str, int], np.ndarray]:
    out: dict[tuple[str, int], np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            key = (obj["qid"], int(obj["para_idx"]))
            if key in out:
                raise ValueError(f"{path}: line {lineno}: duplicate score for {key}")
            out[key] = np.asarray(obj["probs"], dtype=np.float64)
    return out
