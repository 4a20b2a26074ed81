import json
import sys
from pathlib import Path

import pytest

# the primary package's src/, for the interchange contract test
sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from embed_export.model import make_tiny_model

CORPUS_TEXTS = [
    "the appeal was dismissed with costs awarded to the respondent",
    "the federal court allowed the motion for summary judgment",
    "payment terms of the agreement were breached by the supplier",
    "notice of appeal must be served within thirty days",
    "the tribunal found no breach of procedural fairness",
    "damages were assessed with reference to the contract price",
    "the decision fragment entails the holding of paragraph four",
    "costs follow the event unless the court orders otherwise",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("model") / "tiny"
    return make_tiny_model(out, CORPUS_TEXTS, vocab_size=400, hidden_size=32, seed=0)


@pytest.fixture()
def grid_pairs_file(tmp_path):
    """3 x 2 paragraph grid for one (query, candidate) pair."""
    path = tmp_path / "pairs.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(3):
            for j in range(2):
                fh.write(
                    json.dumps(
                        {
                            "qid": "q1",
                            "cid": "c1",
                            "i": i,
                            "j": j,
                            "text_a": f"the appeal was dismissed in part {i}",
                            "text_b": f"costs were awarded against paragraph {j}",
                        }
                    )
                    + "\n"
                )
    return path
