import pytest

from caselaw_ir.lexical import build_stats
from caselaw_ir.textproc import tokenize_case

# Small corpus with planted entities, shared by the scorer-oracle tests.
FIXTURE_STOPWORDS = frozenset(
    {"the", "an", "a", "to", "was", "were", "over", "it", "had", "of"}
)
FIXTURE_GAZETTEER = {
    ("federal", "court"),
    ("supreme", "court"),
    ("justice", "walker"),
}
FIXTURE_RAW_DOCS = {
    "d1": (
        "The Federal Court dismissed the appeal.",
        "Justice Walker presided over costs.",
    ),
    "d2": (
        "The Supreme Court allowed it.",
        "Costs followed the event appeal appeal.",
    ),
    "d3": (
        "Federal Court procedure requires notice.",
        "The motion was denied.",
    ),
    "d4": (
        "An unrelated contract dispute.",
        "Payment terms were breached badly.",
    ),
    "d5": (
        "The appeal concerned Justice Walker.",
        "Federal Court costs were awarded again.",
    ),
}
FIXTURE_RAW_QUERY = (
    "The appellant asked the Federal Court to revisit costs.",
    "Justice Walker had dismissed the appeal.",
)


@pytest.fixture(scope="session")
def fixture_docs():
    return {
        doc_id: tokenize_case(doc_id, paras, FIXTURE_STOPWORDS, FIXTURE_GAZETTEER)
        for doc_id, paras in FIXTURE_RAW_DOCS.items()
    }


@pytest.fixture(scope="session")
def fixture_query():
    return tokenize_case("q", FIXTURE_RAW_QUERY, FIXTURE_STOPWORDS, FIXTURE_GAZETTEER)


@pytest.fixture(scope="session")
def fixture_stats(fixture_docs):
    return build_stats(list(fixture_docs.values()))
