"""Sigmoid-scored linear ranker over duet features, trained pairwise.

The relevance score is sigmoid(w . v + b).  Training minimises the pairwise
hinge loss  sum_{d+} sum_{d-} max(0, 1 - f(q, d+) + f(q, d-))  by plain
subgradient descent, one update per topic over all of that topic's
(relevant, irrelevant) pairs.  Topic order is reshuffled each epoch from the
seeded generator, weights start at zero, and the epoch snapshot with the
best validation micro-F1 of the top-5 selection is returned (ties go to the
earliest epoch).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .lexical import DUET_FEATURE_ORDER, DuetFeatures
from .metrics import RunResult, micro_metrics
from .rng import Pcg32


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass
class DuetModel:
    w: np.ndarray
    b: float

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.shape != (11,):
            raise ValueError(f"weight vector must have 11 entries, got {self.w.shape}")
        if not (np.all(np.isfinite(self.w)) and math.isfinite(self.b)):
            raise ValueError("model parameters must be finite")

    def copy(self) -> "DuetModel":
        return DuetModel(self.w.copy(), self.b)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    weight_decay: float = 0.0
    max_epochs: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")


@dataclass(frozen=True)
class TopicFeatures:
    """Scored candidates of one query: (cid, features) rows plus labels."""

    qid: str
    rows: tuple[tuple[str, DuetFeatures], ...]
    relevant: frozenset[str] = frozenset()


@dataclass
class DuetTrainResult:
    model: DuetModel                    # best epoch snapshot by validation F1
    final_model: DuetModel
    best_epoch: int
    history: list[dict] = field(default_factory=list)


def score(model: DuetModel, v: DuetFeatures) -> float:
    return sigmoid(float(model.w @ np.asarray(v.values)) + model.b)


def hinge_loss(
    model: DuetModel, pos: Sequence[DuetFeatures], neg: Sequence[DuetFeatures]
) -> float:
    if not pos or not neg:
        raise ValueError("need at least one relevant and one irrelevant example")
    f_pos = [score(model, v) for v in pos]
    f_neg = [score(model, v) for v in neg]
    return sum(max(0.0, 1.0 - fp + fn) for fp in f_pos for fn in f_neg)


def hinge_gradient(
    model: DuetModel, pos: Sequence[DuetFeatures], neg: Sequence[DuetFeatures]
) -> tuple[np.ndarray, float]:
    """Subgradient of the pairwise hinge loss w.r.t. (w, b)."""
    dw = np.zeros(11)
    db = 0.0
    pos_v = [np.asarray(v.values) for v in pos]
    neg_v = [np.asarray(v.values) for v in neg]
    f_pos = [sigmoid(float(model.w @ v) + model.b) for v in pos_v]
    f_neg = [sigmoid(float(model.w @ v) + model.b) for v in neg_v]
    for fp, vp in zip(f_pos, pos_v):
        sp = fp * (1.0 - fp)
        for fn, vn in zip(f_neg, neg_v):
            if 1.0 - fp + fn > 0.0:
                sn = fn * (1.0 - fn)
                dw += -sp * vp + sn * vn
                db += -sp + sn
    return dw, db


def rank_candidates(
    model: DuetModel, rows: Sequence[tuple[str, DuetFeatures]]
) -> list[tuple[str, float]]:
    """All candidates, score descending, ties by candidate id ascending."""
    scored = [(cid, score(model, v)) for cid, v in rows]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


def rank_top5(
    model: DuetModel, rows: Sequence[tuple[str, DuetFeatures]], k: int = 5
) -> list[tuple[str, float]]:
    return rank_candidates(model, rows)[:k]


def _validation_f1(model: DuetModel, validation: Sequence[TopicFeatures]) -> float:
    selections = {
        t.qid: tuple(cid for cid, _ in rank_top5(model, t.rows)) for t in validation
    }
    qrels = {t.qid: t.relevant for t in validation}
    return micro_metrics(RunResult(selections), qrels).f1


def train(
    topics: Sequence[TopicFeatures],
    cfg: TrainConfig,
    validation: Sequence[TopicFeatures],
) -> DuetTrainResult:
    """Pairwise hinge training with per-epoch validation snapshots."""
    usable = []
    for t in topics:
        pos = [v for cid, v in t.rows if cid in t.relevant]
        neg = [v for cid, v in t.rows if cid not in t.relevant]
        if not pos or not neg:
            warnings.warn(
                f"topic {t.qid!r} skipped: needs both relevant and irrelevant "
                f"candidates ({len(pos)} relevant, {len(neg)} irrelevant)"
            )
            continue
        usable.append((pos, neg))
    if not usable:
        raise ValueError("no trainable topics (each needs both label classes)")

    model = DuetModel(np.zeros(11), 0.0)
    rng = Pcg32(cfg.seed, stream=1)
    order = list(range(len(usable)))
    best: DuetModel | None = None
    best_f1 = -1.0
    best_epoch = 0
    history: list[dict] = []
    for epoch in range(1, cfg.max_epochs + 1):
        rng.shuffle(order)
        for idx in order:
            pos, neg = usable[idx]
            dw, db = hinge_gradient(model, pos, neg)
            model.w = model.w - cfg.learning_rate * (dw + cfg.weight_decay * model.w)
            model.b = model.b - cfg.learning_rate * db
        train_loss = sum(hinge_loss(model, pos, neg) for pos, neg in usable)
        val_f1 = _validation_f1(model, validation) if validation else 0.0
        history.append({"epoch": epoch, "train_loss": train_loss, "val_f1": val_f1})
        if val_f1 > best_f1:
            best = model.copy()
            best_f1 = val_f1
            best_epoch = epoch
    assert best is not None
    return DuetTrainResult(
        model=best, final_model=model.copy(), best_epoch=best_epoch, history=history
    )


def save_duet_model(model: DuetModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "w": [float(x) for x in model.w],
                "b": float(model.b),
                "feature_order": DUET_FEATURE_ORDER,
            },
            separators=(",", ":"),
        )
        + "\n",
        encoding="utf-8",
    )


def load_duet_model(path: str | Path) -> DuetModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("feature_order") != DUET_FEATURE_ORDER:
        raise ValueError(
            f"model expects feature order {obj.get('feature_order')!r}; "
            f"this build provides {DUET_FEATURE_ORDER!r}"
        )
    return DuetModel(np.asarray(obj["w"], dtype=np.float64), float(obj["b"]))
