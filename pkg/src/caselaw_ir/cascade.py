"""First-stage recall filter: keep the top-k candidates by bigram LMIR.

Cheap bigram language-model scores prune the candidate pool before the
expensive paragraph-interaction classifier runs; only survivors are scored
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import RetrievalTopic
from .lexical import CollectionStats, DEFAULT_PARAMS, ScoringParams, bigram_lmir
from .textproc import TokenizedDoc


@dataclass(frozen=True)
class CascadeResult:
    qid: str
    kept: tuple[tuple[str, float], ...]  # (cid, lmir score), score non-increasing
    k: int

    def __post_init__(self):
        scores = [s for _, s in self.kept]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("kept scores must be non-increasing")

    @property
    def kept_ids(self) -> list[str]:
        return [cid for cid, _ in self.kept]


def cascade_topk(
    topic_query: TokenizedDoc,
    candidates: Sequence[TokenizedDoc],
    stats: CollectionStats,
    k: int = 30,
    params: ScoringParams = DEFAULT_PARAMS,
) -> CascadeResult:
    """Rank candidates by bigram LMIR descending (ties by cid) and keep k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    scored = [
        (doc.doc_id, bigram_lmir(topic_query, doc, stats, params))
        for doc in candidates
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return CascadeResult(topic_query.doc_id, tuple(scored[:k]), k)


def write_cascade_dump(
    results: Sequence[CascadeResult], path: str | Path
) -> None:
    """Lines: "qid\\tcid\\trank\\tscore"."""
    lines = []
    for res in results:
        for rank, (cid, s) in enumerate(res.kept, start=1):
            lines.append(f"{res.qid}\t{cid}\t{rank}\t{s!r}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_cascade_dump(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    out: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'qid\\tcid\\trank\\tscore'"
                )
            out.setdefault(parts[0], []).append((parts[1], float(parts[3])))
    return out


def survivors_by_query(
    dump: Mapping[str, Sequence[tuple[str, float]]]
) -> dict[str, list[str]]:
    return {qid: [cid for cid, _ in rows] for qid, rows in dump.items()}
