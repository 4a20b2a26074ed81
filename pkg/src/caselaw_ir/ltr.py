"""Feature combination and pairwise ranking SVM for both tasks.

Task-1 vectors (17 dims): the 11 duet features, word/entity document
similarities, the interaction classifier's softmax pair, and the
first-paragraph sentence-pair softmax pair.  Task-2 vectors (7 dims): the
symmetric- and asymmetric-truncation head softmax pairs, the
fragment/paragraph BM25 score, the 1-based paragraph position, and the
paragraph token count.

The ranker is a linear SVM over within-query preference pairs:

    minimise  0.5 ||w||^2 + C * sum_pairs max(0, 1 - w . (x+ - x-))

solved by deterministic full-batch subgradient descent in the equivalent
averaged form (lambda = 1 / (C * P) with P pairs), step 1 / (lambda * t),
iterates projected onto the ||w|| <= 1/sqrt(lambda) ball and averaged over
the run.  Features are min-max scaled with bounds fitted on training data
only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .lexical import DuetFeatures

TASK1_LAYOUT = "task1-v1"
TASK2_LAYOUT = "task2-v1"
TASK1_DIM = 17
TASK2_DIM = 7

DEFAULT_ITERATIONS = 1000


def _check_probs(pair, what: str) -> tuple[float, float]:
    pair = (float(pair[0]), float(pair[1]))
    if len(pair) != 2:
        raise ValueError(f"{what} must have 2 entries")
    if abs(pair[0] + pair[1] - 1.0) > 1e-6 or pair[0] < 0 or pair[1] < 0:
        raise ValueError(f"{what} {pair} is not a probability pair")
    return pair


@dataclass(frozen=True)
class Task1Features:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != TASK1_DIM:
            raise ValueError(f"expected {TASK1_DIM} features, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("features must be finite")
        _check_probs(self.values[13:15], "interaction softmax (dims 14-15)")
        _check_probs(self.values[15:17], "first-paragraph softmax (dims 16-17)")


@dataclass(frozen=True)
class Task2Features:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != TASK2_DIM:
            raise ValueError(f"expected {TASK2_DIM} features, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("features must be finite")
        _check_probs(self.values[0:2], "symmetric-run softmax (dims 1-2)")
        _check_probs(self.values[2:4], "asymmetric-run softmax (dims 3-4)")
        for pos, name in ((5, "position id"), (6, "paragraph length")):
            v = self.values[pos]
            if v < 1 or v != int(v):
                raise ValueError(f"{name} (dim {pos + 1}) must be a positive integer")


def assemble_task1(
    duet: DuetFeatures,
    sdr_w: float,
    sdr_e: float,
    pli_probs: Sequence[float],
    firstpara_probs: Sequence[float],
) -> Task1Features:
    return Task1Features(
        duet.values
        + (float(sdr_w), float(sdr_e))
        + tuple(float(p) for p in pli_probs)
        + tuple(float(p) for p in firstpara_probs)
    )


def assemble_task2(
    sym_probs: Sequence[float],
    asym_probs: Sequence[float],
    bm25_score: float,
    para_idx: int,
    para_len: int,
) -> Task2Features:
    return Task2Features(
        tuple(float(p) for p in sym_probs)
        + tuple(float(p) for p in asym_probs)
        + (float(bm25_score), float(para_idx), float(para_len))
    )


@dataclass
class RankModel:
    w: np.ndarray
    C: float
    scaler: tuple[tuple[float, float], ...]  # per-feature (min, max)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.scaler = tuple((float(lo), float(hi)) for lo, hi in self.scaler)
        if self.C <= 0:
            raise ValueError("C must be positive")
        if len(self.scaler) != self.w.shape[0]:
            raise ValueError("scaler length must match weight dimension")
        if not np.all(np.isfinite(self.w)):
            raise ValueError("weights must be finite")

    def scale(self, features: Sequence[float]) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.shape != self.w.shape:
            raise ValueError(f"feature dim {x.shape} != model dim {self.w.shape}")
        out = np.empty_like(x)
        for k, (lo, hi) in enumerate(self.scaler):
            out[k] = (x[k] - lo) / (hi - lo) if hi > lo else 0.0
        return out


def _fit_scaler(rows: np.ndarray) -> tuple[tuple[float, float], ...]:
    return tuple(
        (float(rows[:, k].min()), float(rows[:, k].max()))
        for k in range(rows.shape[1])
    )


def ranksvm_train(
    examples: Mapping[str, Sequence[tuple[Sequence[float], int]]],
    C: float,
    seed: int = 0,
    iterations: int = DEFAULT_ITERATIONS,
) -> RankModel:
    """Fit the pairwise linear SVM on within-query preference pairs.

    Deterministic: weights start at zero and the full pair batch enters
    every subgradient step, so the seed has no stochastic role; it is kept
    for interface stability.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    all_rows = [
        np.asarray(x, dtype=np.float64)
        for rows in examples.values()
        for x, _ in rows
    ]
    if not all_rows:
        raise ValueError("no training rows")
    matrix = np.stack(all_rows)
    scaler = _fit_scaler(matrix)
    model = RankModel(np.zeros(matrix.shape[1]), C, scaler)

    diffs = []
    for rows in examples.values():
        pos = [model.scale(x) for x, rel in rows if rel == 1]
        neg = [model.scale(x) for x, rel in rows if rel == 0]
        for xp in pos:
            for xn in neg:
                diffs.append(xp - xn)
    if not diffs:
        raise ValueError("no within-query preference pair with both labels")
    D = np.stack(diffs)
    P = D.shape[0]

    lam = 1.0 / (C * P)
    radius = 1.0 / math.sqrt(lam)
    w = np.zeros(matrix.shape[1])
    w_sum = np.zeros_like(w)
    for t in range(1, iterations + 1):
        active = (D @ w) < 1.0
        subgrad = lam * w - (D[active].sum(axis=0) / P if active.any() else 0.0)
        w = w - (1.0 / (lam * t)) * subgrad
        norm = float(np.linalg.norm(w))
        if norm > radius:
            w = w * (radius / norm)
        w_sum += w
    model.w = w_sum / iterations
    return model


def ranksvm_objective(model: RankModel, diffs: np.ndarray) -> float:
    """0.5 ||w||^2 + C * sum of pair hinges, over pre-scaled diff vectors."""
    hinges = np.maximum(0.0, 1.0 - diffs @ model.w)
    return 0.5 * float(model.w @ model.w) + model.C * float(hinges.sum())


def predict(model: RankModel, features: Sequence[float]) -> float:
    return float(model.w @ model.scale(features))


def select_task1(scored: Sequence[tuple[str, float]]) -> list[str]:
    """All non-negative scores; pad by score until 3 selections exist.

    Returns candidate ids in score-descending order (ties by id).
    """
    ordered = sorted(scored, key=lambda item: (-item[1], item[0]))
    selected = [cid for cid, s in ordered if s >= 0.0]
    if len(selected) < 3:
        for cid, s in ordered:
            if len(selected) >= 3:
                break
            if s < 0.0:
                selected.append(cid)
    return selected


def select_task2(scores: Sequence[float]) -> frozenset[int]:
    """1-based indices with non-negative scores; top-1 fallback if none."""
    if len(scores) == 0:
        raise ValueError("no scores to select over")
    selected = {i for i, s in enumerate(scores, start=1) if s >= 0.0}
    if not selected:
        best = max(range(len(scores)), key=lambda i: (scores[i], -i))
        selected = {best + 1}
    return frozenset(selected)


def write_feature_file(
    layout: str, rows: Sequence[dict], path: str | Path
) -> None:
    """Header {"layout": ...}, then one object per row.

    Task-1 rows carry "qid"/"cid", task-2 rows "qid"/"para_idx"; both carry
    "features" and an optional "label".
    """
    if layout not in (TASK1_LAYOUT, TASK2_LAYOUT):
        raise ValueError(f"unknown layout {layout!r}")
    key = "cid" if layout == TASK1_LAYOUT else "para_idx"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"layout": layout}, separators=(",", ":")) + "\n")
        for row in rows:
            obj = {
                "qid": row["qid"],
                key: row[key],
                "features": [float(v) for v in row["features"]],
            }
            if row.get("label") is not None:
                obj["label"] = int(row["label"])
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def read_feature_file(path: str | Path) -> tuple[str, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ValueError(f"{path}: missing layout header")
        header = json.loads(header_line)
        layout = header.get("layout")
        if layout not in (TASK1_LAYOUT, TASK2_LAYOUT):
            raise ValueError(f"{path}: unknown layout {layout!r}")
        dim = TASK1_DIM if layout == TASK1_LAYOUT else TASK2_DIM
        rows = []
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            if len(obj["features"]) != dim:
                raise ValueError(
                    f"{path}: line {lineno}: expected {dim} features, "
                    f"got {len(obj['features'])}"
                )
            rows.append(obj)
    return layout, rows


def save_rank_model(model: RankModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            {
                "w": [float(x) for x in model.w],
                "C": model.C,
                "scaler": [[lo, hi] for lo, hi in model.scaler],
            },
            separators=(",", ":"),
        )
        + "\n",
        encoding="utf-8",
    )


def load_rank_model(path: str | Path) -> RankModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return RankModel(
        np.asarray(obj["w"], dtype=np.float64),
        float(obj["C"]),
        tuple((float(lo), float(hi)) for lo, hi in obj["scaler"]),
    )
