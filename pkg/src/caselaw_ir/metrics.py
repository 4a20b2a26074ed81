"""Micro-averaged precision / recall / F1 over run selections.

Counts are summed over every labeled query before dividing, so queries with
many labels weigh more than queries with few (micro, not macro averaging).
All 0/0 cases resolve to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Mapping


@dataclass(frozen=True)
class RunResult:
    """Per-query selected ids, with an optional full scored ranking."""

    selections: dict[str, tuple[str, ...]]
    rankings: dict[str, tuple[tuple[str, float], ...]] | None = None

    def __post_init__(self):
        normalized = {}
        for qid, sel in self.selections.items():
            sel = tuple(sel)
            if len(set(sel)) != len(sel):
                raise ValueError(f"query {qid!r}: duplicate selections")
            normalized[qid] = sel
        object.__setattr__(self, "selections", normalized)


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f1: float
    tp: int
    retrieved: int
    labeled: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":")) + "\n"


def micro_metrics(run: RunResult, qrels: Mapping[str, Iterable[str]]) -> MetricReport:
    """Micro P/R/F1 of the run's selections against the labels.

    Every query present in the run must be labeled; labeled queries missing
    from the run count as empty selections.
    """
    labels = {qid: frozenset(ids) for qid, ids in qrels.items()}
    unknown = set(run.selections) - set(labels)
    if unknown:
        raise ValueError(f"run contains unlabeled queries: {sorted(unknown)}")
    tp = 0
    retrieved = 0
    labeled = 0
    for qid, lab in labels.items():
        sel = set(run.selections.get(qid, ()))
        tp += len(sel & lab)
        retrieved += len(sel)
        labeled += len(lab)
    precision = tp / retrieved if retrieved else 0.0
    recall = tp / labeled if labeled else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return MetricReport(precision, recall, f1, tp, retrieved, labeled)


def write_run_file(run: RunResult, path: str | Path) -> None:
    """Selection lines: "qid\\tid"; queries and ids in deterministic order."""
    lines = []
    for qid in sorted(run.selections):
        for doc_id in run.selections[qid]:
            lines.append(f"{qid}\t{doc_id}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_run_file(path: str | Path) -> RunResult:
    selections: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'qid\\tid'")
            selections.setdefault(parts[0], []).append(parts[1])
    return RunResult({qid: tuple(ids) for qid, ids in selections.items()})


def write_ranking_file(
    rankings: Mapping[str, Iterable[tuple[str, float]]], path: str | Path
) -> None:
    """Ranking lines: "qid\\tid\\trank\\tscore" (rank 1-based)."""
    lines = []
    for qid in sorted(rankings):
        for rank, (doc_id, score) in enumerate(rankings[qid], start=1):
            lines.append(f"{qid}\t{doc_id}\t{rank}\t{score!r}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_ranking_file(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    out: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'qid\\tid\\trank\\tscore'"
                )
            out.setdefault(parts[0], []).append((parts[1], float(parts[3])))
    return out
