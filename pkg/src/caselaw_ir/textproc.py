"""Tokenization, stopword removal, gazetteer entity extraction, bigrams.

Every lexical scorer consumes the output of this module.  Tokenization is
deliberately simple and fully deterministic: split on Unicode whitespace,
strip leading/trailing punctuation and symbol characters from each piece,
lowercase, drop empties and stopwords.

Entity extraction is gazetteer-driven (leftmost-longest greedy matching)
rather than statistical, so that results are reproducible.  Entities are
extracted from the stopword-filtered token stream; gazetteer entries must
therefore be normalised through the same tokenizer (see
:func:`normalize_gazetteer`).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

Tokens = tuple[str, ...]


@dataclass(frozen=True)
class Entity:
    """A gazetteer match: surface tokens plus (paragraph, token offset) span."""

    surface_tokens: Tokens
    span: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "surface_tokens", tuple(self.surface_tokens))
        if not self.surface_tokens:
            raise ValueError("entity surface must be non-empty")


@dataclass(frozen=True)
class TokenizedDoc:
    doc_id: str
    paragraphs_tokens: tuple[Tokens, ...]
    flat_tokens: Tokens
    entities: tuple[Entity, ...]


def _is_strippable(ch: str) -> bool:
    # Unicode punctuation (P*) plus symbols (S*), covering string.punctuation.
    return unicodedata.category(ch)[0] in ("P", "S")


def _clean_piece(piece: str) -> str:
    start, end = 0, len(piece)
    while start < end and _is_strippable(piece[start]):
        start += 1
    while end > start and _is_strippable(piece[end - 1]):
        end -= 1
    return piece[start:end]


def tokenize(text: str, stopwords: frozenset[str] | set[str]) -> list[str]:
    """Whitespace split, edge punctuation stripped, lowercased, filtered."""
    out = []
    for piece in text.split():
        # strip once more after lowercasing: case folding may expand characters
        tok = _clean_piece(_clean_piece(piece).lower())
        if tok and tok not in stopwords:
            out.append(tok)
    return out


def bigrams(tokens: Sequence[str]) -> list[tuple[str, str]]:
    return [(tokens[i], tokens[i + 1]) for i in range(len(tokens) - 1)]


def extract_entities(
    tokens: Sequence[str],
    gazetteer: Iterable[Sequence[str]],
    paragraph_index: int = 0,
) -> list[Entity]:
    """Leftmost-longest greedy gazetteer matching; matches never overlap."""
    patterns = {tuple(g) for g in gazetteer}
    if any(len(p) == 0 for p in patterns):
        raise ValueError("gazetteer entries must be non-empty token sequences")
    if not patterns:
        return []
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for p in patterns:
        by_first.setdefault(p[0], []).append(p)
    for cands in by_first.values():
        cands.sort(key=len, reverse=True)  # longest candidate wins ties
    out: list[Entity] = []
    toks = tuple(tokens)
    i = 0
    while i < len(toks):
        match = None
        for p in by_first.get(toks[i], ()):
            if toks[i : i + len(p)] == p:
                match = p
                break
        if match is not None:
            out.append(Entity(match, (paragraph_index, i)))
            i += len(match)
        else:
            i += 1
    return out


def tokenize_case(
    doc_id: str,
    paragraphs: Sequence[str],
    stopwords: frozenset[str] | set[str],
    gazetteer: Iterable[Sequence[str]] = (),
) -> TokenizedDoc:
    """Tokenize per paragraph; entities never cross paragraph boundaries."""
    patterns = [tuple(g) for g in gazetteer]
    para_tokens = []
    entities: list[Entity] = []
    for pi, para in enumerate(paragraphs):
        toks = tuple(tokenize(para, stopwords))
        para_tokens.append(toks)
        if patterns:
            entities.extend(extract_entities(toks, patterns, paragraph_index=pi))
    flat = tuple(t for toks in para_tokens for t in toks)
    return TokenizedDoc(doc_id, tuple(para_tokens), flat, tuple(entities))


def build_gazetteer(
    texts: Iterable[str], stopwords: frozenset[str] | set[str]
) -> set[Tokens]:
    """Heuristic gazetteer: maximal runs of >=2 capitalized words.

    Each run is normalised through :func:`tokenize`; entries shorter than two
    tokens after stopword filtering are dropped so entries stay multi-word.
    """
    out: set[Tokens] = set()
    for text in texts:
        run: list[str] = []
        for piece in text.split():
            cleaned = _clean_piece(piece)
            if cleaned and cleaned[0].isupper() and cleaned[0].isalpha():
                run.append(cleaned)
            else:
                _flush_run(run, stopwords, out)
                run = []
        _flush_run(run, stopwords, out)
    return out


def _flush_run(run, stopwords, out):
    if len(run) >= 2:
        entry = tuple(tokenize(" ".join(run), stopwords))
        if len(entry) >= 2:
            out.add(entry)


def normalize_gazetteer(
    entries: Iterable[Sequence[str]], stopwords: frozenset[str] | set[str]
) -> set[Tokens]:
    """Re-tokenize raw gazetteer entries so they match the filtered stream."""
    out: set[Tokens] = set()
    for entry in entries:
        toks = tuple(tokenize(" ".join(entry), stopwords))
        if toks:
            out.add(toks)
    return out


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def default_stopwords() -> frozenset[str]:
    """The versioned English list shipped with the package."""
    text = resources.files("caselaw_ir").joinpath("data/stopwords_en.txt").read_text(
        encoding="utf-8"
    )
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def load_gazetteer(path: str | Path) -> set[Tokens]:
    """One space-separated token sequence per line."""
    out: set[Tokens] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = tuple(line.split())
            if toks:
                out.add(toks)
    return out


def save_gazetteer(entries: Iterable[Tokens], path: str | Path) -> None:
    lines = sorted(" ".join(e) for e in entries)
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
