"""Deterministic synthetic corpora with planted relevance.

Every query gets a private set of rare marker words and a pair of signature
entity phrases; its relevant candidates repeat those markers and entities
while irrelevant candidates draw from the shared vocabulary plus their own
noise markers.  Rankers that pick up the shared rare vocabulary therefore
beat random selection by a wide margin, which is what the end-to-end
pipeline checks ride on.

All randomness flows from Pcg32 streams of the one seed, so identical
arguments reproduce byte-identical corpora.
"""

from __future__ import annotations

from .corpus import EntailmentTopic, RetrievalTopic, CaseDocument
from .rng import Pcg32
from .textproc import Tokens

COMMON_WORDS = (
    "claim appeal motion hearing judgment order costs damages evidence "
    "witness contract breach notice filing record reasons decision review "
    "statute provision section party counsel argument submission finding "
    "standard burden remedy relief injunction application dismissal trial "
    "cross duty leave ruling award term period agreement payment interest "
    "settlement liability negligence causation loss mitigation procedure "
    "service disclosure privilege admissibility exhibit transcript factum"
).split()

FUNCTION_WORDS = "the of to in for on and at by with from".split()

ENTITY_FIRST = (
    "Federal Supreme Provincial Maritime Northern Eastern Commercial "
    "Appellate Industrial Municipal"
).split()
ENTITY_SECOND = "Court Tribunal Board Commission Authority Panel".split()


def _entity_phrases() -> list[tuple[str, str]]:
    return [(a, b) for a in ENTITY_FIRST for b in ENTITY_SECOND]


def _paragraph(
    rng: Pcg32,
    n_tokens: int,
    markers: list[str],
    entities: list[tuple[str, str]],
    marker_rate: float,
    entity_rate: float,
) -> str:
    words: list[str] = []
    while len(words) < n_tokens:
        roll = rng.uniform()
        if markers and roll < marker_rate:
            words.append(markers[rng.below(len(markers))])
        elif entities and roll < marker_rate + entity_rate:
            words.extend(entities[rng.below(len(entities))])
        elif roll < marker_rate + entity_rate + 0.2:
            words.append(FUNCTION_WORDS[rng.below(len(FUNCTION_WORDS))])
        else:
            words.append(COMMON_WORDS[rng.below(len(COMMON_WORDS))])
    return " ".join(words[:n_tokens]) + "."


def _document(
    rng: Pcg32,
    doc_id: str,
    n_paras: tuple[int, int],
    para_len: tuple[int, int],
    markers: list[str],
    entities: list[tuple[str, str]],
    marker_rate: float,
    entity_rate: float = 0.05,
) -> CaseDocument:
    count = n_paras[0] + rng.below(n_paras[1] - n_paras[0] + 1)
    paras = tuple(
        _paragraph(
            rng,
            para_len[0] + rng.below(para_len[1] - para_len[0] + 1),
            markers,
            entities,
            marker_rate,
            entity_rate,
        )
        for _ in range(count)
    )
    return CaseDocument(doc_id, paras)


def generate_retrieval_corpus(
    n_queries: int,
    n_candidates: int,
    seed: int,
    n_relevant: int = 5,
) -> tuple[list[RetrievalTopic], dict[str, frozenset[str]], set[Tokens]]:
    """Topics (unlabeled), labels, and the entity gazetteer actually used."""
    if n_queries < 1 or n_candidates < 2:
        raise ValueError("need at least 1 query and 2 candidates")
    n_relevant = min(n_relevant, n_candidates - 1)
    if n_relevant < 1:
        raise ValueError("need at least 1 relevant candidate per query")
    rng = Pcg32(seed, stream=11)
    phrases = _entity_phrases()
    topics = []
    labels: dict[str, frozenset[str]] = {}
    for qi in range(n_queries):
        qid = f"q{qi:03d}"
        markers = [f"mk{qi:03d}x{k}" for k in range(8)]
        signature = [
            phrases[rng.below(len(phrases))],
            phrases[rng.below(len(phrases))],
        ]
        query = _document(
            rng, qid, (3, 5), (14, 26), markers, signature, marker_rate=0.18
        )
        candidates = []
        relevant = set()
        for cj in range(n_candidates):
            cid = f"{qid}-c{cj:03d}"
            if cj < n_relevant:
                doc = _document(
                    rng, cid, (2, 5), (12, 24), markers, signature, marker_rate=0.15
                )
                relevant.add(cid)
            else:
                noise = [f"nz{qi:03d}c{cj:03d}x{k}" for k in range(4)]
                stray = [phrases[rng.below(len(phrases))]]
                doc = _document(
                    rng, cid, (2, 5), (12, 24), noise, stray, marker_rate=0.08
                )
            candidates.append(doc)
        topics.append(RetrievalTopic(query, tuple(candidates)))
        labels[qid] = frozenset(relevant)
    gazetteer = {(a.lower(), b.lower()) for a, b in phrases}
    return topics, labels, gazetteer


def generate_entailment_corpus(
    n_queries: int,
    seed: int,
    n_paragraphs: tuple[int, int] = (8, 20),
) -> tuple[list[EntailmentTopic], dict[str, frozenset[int]]]:
    rng = Pcg32(seed, stream=13)
    phrases = _entity_phrases()
    topics = []
    labels: dict[str, frozenset[int]] = {}
    for qi in range(n_queries):
        qid = f"e{qi:03d}"
        markers = [f"em{qi:03d}x{k}" for k in range(6)]
        signature = [phrases[rng.below(len(phrases))]]
        fragment = _paragraph(
            rng, 16 + rng.below(12), markers, signature, marker_rate=0.25,
            entity_rate=0.05,
        )
        count = n_paragraphs[0] + rng.below(n_paragraphs[1] - n_paragraphs[0] + 1)
        n_entailing = 1 + rng.below(2)  # 1 or 2, matching the real label scale
        entailing = set()
        while len(entailing) < n_entailing:
            entailing.add(1 + rng.below(count))
        paras = []
        for pi in range(1, count + 1):
            if pi in entailing:
                paras.append(
                    _paragraph(
                        rng, 18 + rng.below(16), markers, signature,
                        marker_rate=0.22, entity_rate=0.05,
                    )
                )
            else:
                noise = [f"en{qi:03d}p{pi:02d}x{k}" for k in range(3)]
                paras.append(
                    _paragraph(
                        rng, 18 + rng.below(16), noise,
                        [phrases[rng.below(len(phrases))]],
                        marker_rate=0.06, entity_rate=0.04,
                    )
                )
        topics.append(EntailmentTopic(qid, fragment, tuple(paras)))
        labels[qid] = frozenset(entailing)
    return topics, labels
