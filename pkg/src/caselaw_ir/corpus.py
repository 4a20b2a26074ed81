"""Corpus loading, validation, and train/validation splitting.

File formats (UTF-8, LF, one JSON object per line):

* retrieval corpus:   {"qid", "query_paragraphs": [...static...],
                       "candidates": [{"cid", "paragraphs": [...]}, ...]}
* retrieval labels:   {"qid", "relevant": ["cid", ...]}
* entailment corpus:  {"qid", "fragment", "paragraphs": [...]}
* entailment labels:  {"qid", "entailing": [int, ...]}   (1-based)

A corpus file may start with a header line, recognised by its "format" key,
e.g. ``{"format": "retrieval-corpus-v1", "profile": "coliee2020-task1"}``.
The "coliee2020-task1" profile declares 200 candidates per query; a header
may also carry an explicit "candidates_per_query".  When a count is
declared, every topic is checked against it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .rng import Pcg32

RETRIEVAL_FORMAT = "retrieval-corpus-v1"
ENTAILMENT_FORMAT = "entailment-corpus-v1"

# Known corpus shapes; a profile pins the per-topic candidate count.
PROFILES = {"coliee2020-task1": {"candidates_per_query": 200}}


class CorpusFormatError(ValueError):
    """Malformed or invariant-violating corpus content."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CaseDocument:
    """A case as an ordered list of raw-text paragraphs."""

    id: str
    paragraphs: tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise CorpusFormatError("document id must be non-empty")
        object.__setattr__(self, "paragraphs", tuple(self.paragraphs))
        if not self.paragraphs:
            raise CorpusFormatError(f"document {self.id!r} has no paragraphs")
        for i, p in enumerate(self.paragraphs):
            if not isinstance(p, str) or not p.strip():
                raise CorpusFormatError(
                    f"document {self.id!r} paragraph {i + 1} is empty"
                )


@dataclass(frozen=True)
class RetrievalTopic:
    query: CaseDocument
    candidates: tuple[CaseDocument, ...]
    relevant_ids: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        seen = set()
        for c in self.candidates:
            if c.id in seen:
                raise CorpusFormatError(
                    f"topic {self.qid!r}: duplicate candidate id {c.id!r}"
                )
            seen.add(c.id)
        if self.relevant_ids is not None:
            object.__setattr__(self, "relevant_ids", frozenset(self.relevant_ids))
            unknown = self.relevant_ids - seen
            if unknown:
                raise CorpusFormatError(
                    f"topic {self.qid!r}: relevant ids not among candidates: "
                    f"{sorted(unknown)}"
                )

    @property
    def qid(self) -> str:
        return self.query.id

    @property
    def candidate_ids(self) -> list[str]:
        return [c.id for c in self.candidates]

    def with_labels(self, relevant: Iterable[str]) -> "RetrievalTopic":
        return RetrievalTopic(self.query, self.candidates, frozenset(relevant))


@dataclass(frozen=True)
class EntailmentTopic:
    id: str
    fragment: str
    paragraphs: tuple[str, ...]
    entailing_idx: frozenset[int] | None = None

    def __post_init__(self):
        if not self.id:
            raise CorpusFormatError("topic id must be non-empty")
        if not self.fragment or not self.fragment.strip():
            raise CorpusFormatError(f"topic {self.id!r}: empty decision fragment")
        object.__setattr__(self, "paragraphs", tuple(self.paragraphs))
        if not self.paragraphs:
            raise CorpusFormatError(f"topic {self.id!r} has no paragraphs")
        for i, p in enumerate(self.paragraphs):
            if not isinstance(p, str) or not p.strip():
                raise CorpusFormatError(f"topic {self.id!r} paragraph {i + 1} is empty")
        if self.entailing_idx is not None:
            object.__setattr__(self, "entailing_idx", frozenset(self.entailing_idx))
            bad = [i for i in self.entailing_idx
                   if not 1 <= i <= len(self.paragraphs)]
            if bad:
                raise CorpusFormatError(
                    f"topic {self.id!r}: entailing indices out of range "
                    f"(1..{len(self.paragraphs)}): {sorted(bad)}"
                )

    def with_labels(self, entailing: Iterable[int]) -> "EntailmentTopic":
        return EntailmentTopic(
            self.id, self.fragment, self.paragraphs, frozenset(entailing)
        )


@dataclass(frozen=True)
class DatasetSplit:
    train_topic_ids: frozenset[str]
    validation_topic_ids: frozenset[str]
    seed: int


def _iter_records(path: Path, expected_format: str):
    """Yield (line_number, record) pairs, consuming an optional header."""
    header = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError("record is not a JSON object", lineno)
            if "format" in obj:
                if lineno != 1 or header is not None:
                    raise CorpusFormatError("header allowed only on line 1", lineno)
                if obj["format"] != expected_format:
                    raise CorpusFormatError(
                        f"unexpected format {obj['format']!r}; "
                        f"expected {expected_format!r}",
                        lineno,
                    )
                header = obj
                continue
            yield lineno, header, obj


def _declared_candidate_count(header: dict | None) -> int | None:
    if header is None:
        return None
    if "candidates_per_query" in header:
        return int(header["candidates_per_query"])
    profile = header.get("profile")
    if profile is not None:
        if profile not in PROFILES:
            raise CorpusFormatError(f"unknown profile {profile!r}", 1)
        return PROFILES[profile]["candidates_per_query"]
    return None


def _require(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise CorpusFormatError(f"missing field {key!r}", lineno)
    return obj[key]


def load_retrieval_corpus(path: str | Path) -> list[RetrievalTopic]:
    """Load Task-1 topics; file order preserved."""
    path = Path(path)
    topics: list[RetrievalTopic] = []
    seen_qids: set[str] = set()
    for lineno, header, obj in _iter_records(path, RETRIEVAL_FORMAT):
        qid = _require(obj, "qid", lineno)
        if qid in seen_qids:
            raise CorpusFormatError(f"duplicate topic id {qid!r}", lineno)
        seen_qids.add(qid)
        try:
            query = CaseDocument(qid, _require(obj, "query_paragraphs", lineno))
            candidates = tuple(
                CaseDocument(_require(c, "cid", lineno), _require(c, "paragraphs", lineno))
                for c in _require(obj, "candidates", lineno)
            )
            topic = RetrievalTopic(query, candidates)
        except CorpusFormatError as exc:
            if exc.line is None:
                raise CorpusFormatError(str(exc), lineno) from exc
            raise
        declared = _declared_candidate_count(header)
        if declared is not None and len(topic.candidates) != declared:
            raise CorpusFormatError(
                f"topic {qid!r} has {len(topic.candidates)} candidates; "
                f"header declares {declared}",
                lineno,
            )
        topics.append(topic)
    return topics


def load_entailment_corpus(path: str | Path) -> list[EntailmentTopic]:
    """Load Task-2 topics; file order preserved."""
    path = Path(path)
    topics: list[EntailmentTopic] = []
    seen: set[str] = set()
    for lineno, _header, obj in _iter_records(path, ENTAILMENT_FORMAT):
        qid = _require(obj, "qid", lineno)
        if qid in seen:
            raise CorpusFormatError(f"duplicate topic id {qid!r}", lineno)
        seen.add(qid)
        try:
            topics.append(
                EntailmentTopic(
                    qid,
                    _require(obj, "fragment", lineno),
                    tuple(_require(obj, "paragraphs", lineno)),
                )
            )
        except CorpusFormatError as exc:
            if exc.line is None:
                raise CorpusFormatError(str(exc), lineno) from exc
            raise
    return topics


def load_retrieval_labels(path: str | Path) -> dict[str, frozenset[str]]:
    labels: dict[str, frozenset[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from exc
            qid = _require(obj, "qid", lineno)
            if qid in labels:
                raise CorpusFormatError(f"duplicate label line for {qid!r}", lineno)
            labels[qid] = frozenset(_require(obj, "relevant", lineno))
    return labels


def load_entailment_labels(path: str | Path) -> dict[str, frozenset[int]]:
    labels: dict[str, frozenset[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from exc
            qid = _require(obj, "qid", lineno)
            if qid in labels:
                raise CorpusFormatError(f"duplicate label line for {qid!r}", lineno)
            idx = _require(obj, "entailing", lineno)
            if not all(isinstance(i, int) for i in idx):
                raise CorpusFormatError("entailing indices must be integers", lineno)
            labels[qid] = frozenset(idx)
    return labels


def attach_retrieval_labels(
    topics: Sequence[RetrievalTopic], labels: dict[str, frozenset[str]]
) -> list[RetrievalTopic]:
    return [
        t.with_labels(labels[t.qid]) if t.qid in labels else t for t in topics
    ]


def attach_entailment_labels(
    topics: Sequence[EntailmentTopic], labels: dict[str, frozenset[int]]
) -> list[EntailmentTopic]:
    return [t.with_labels(labels[t.id]) if t.id in labels else t for t in topics]


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def serialize_retrieval_corpus(
    topics: Sequence[RetrievalTopic], header: dict | None = None
) -> str:
    """Canonical byte form: fixed key order, compact separators, LF lines."""
    lines = []
    if header is not None:
        lines.append(_dump(header))
    for t in topics:
        lines.append(
            _dump(
                {
                    "qid": t.qid,
                    "query_paragraphs": list(t.query.paragraphs),
                    "candidates": [
                        {"cid": c.id, "paragraphs": list(c.paragraphs)}
                        for c in t.candidates
                    ],
                }
            )
        )
    return "".join(line + "\n" for line in lines)


def serialize_entailment_corpus(
    topics: Sequence[EntailmentTopic], header: dict | None = None
) -> str:
    lines = []
    if header is not None:
        lines.append(_dump(header))
    for t in topics:
        lines.append(
            _dump(
                {
                    "qid": t.id,
                    "fragment": t.fragment,
                    "paragraphs": list(t.paragraphs),
                }
            )
        )
    return "".join(line + "\n" for line in lines)


def serialize_retrieval_labels(labels: dict[str, frozenset[str]]) -> str:
    return "".join(
        _dump({"qid": qid, "relevant": sorted(labels[qid])}) + "\n"
        for qid in sorted(labels)
    )


def serialize_entailment_labels(labels: dict[str, frozenset[int]]) -> str:
    return "".join(
        _dump({"qid": qid, "entailing": sorted(labels[qid])}) + "\n"
        for qid in sorted(labels)
    )


def split_dataset(topic_ids: Sequence[str], ratio: float, seed: int) -> DatasetSplit:
    """Deterministic validation split.

    Ids are sorted lexicographically, Fisher-Yates shuffled with
    ``Pcg32(seed)`` (see :mod:`caselaw_ir.rng` for the exact recipe), and the
    first ``round(ratio * n)`` become the validation set.  Candidates are
    never split away from their topic because splitting acts on topic ids.
    """
    ids = list(topic_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("topic ids must be unique")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie strictly between 0 and 1")
    if len(ids) < 2:
        raise ValueError("cannot split fewer than 2 topics")
    ids.sort()
    Pcg32(seed).shuffle(ids)
    n_val = int(ratio * len(ids) + 0.5)  # round half up
    return DatasetSplit(
        train_topic_ids=frozenset(ids[n_val:]),
        validation_topic_ids=frozenset(ids[:n_val]),
        seed=seed,
    )


def serialize_split(split: DatasetSplit, ratio: float) -> str:
    return _dump(
        {
            "train": sorted(split.train_topic_ids),
            "validation": sorted(split.validation_topic_ids),
            "ratio": ratio,
            "seed": split.seed,
        }
    ) + "\n"


def load_split(path: str | Path) -> DatasetSplit:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return DatasetSplit(
        train_topic_ids=frozenset(obj["train"]),
        validation_topic_ids=frozenset(obj["validation"]),
        seed=int(obj["seed"]),
    )
