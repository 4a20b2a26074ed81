"""Pipeline configuration: a flat dataclass parsed from a sectioned
key=value file.

Format: ``[paths]`` and ``[params]`` sections, one ``key=value`` per line,
``#`` comments, blank lines ignored.  Values are parsed by the declared
field type.  Defaults mirror the published run settings (cascade depth 30,
paragraph limits 54x40, GRU width 256, duet lr 1e-4, downstream lr 1e-4
with 1e-6 decay, C=20 for the retrieval combiner and C=1 for entailment,
validation ratio 0.2) and are echoed verbatim into run metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

_PATH_KEYS = {
    "corpus",
    "labels",
    "entail_corpus",
    "entail_labels",
    "stopwords",
    "gazetteer",
    "embeddings",
    "output_dir",
}


@dataclass
class PipelineConfig:
    # paths ([paths] section); empty string means "not provided"
    corpus: str = ""
    labels: str = ""
    entail_corpus: str = ""
    entail_labels: str = ""
    stopwords: str = ""
    gazetteer: str = ""
    embeddings: str = ""
    output_dir: str = "out"
    # hyperparameters ([params] section)
    lam: float = 0.1
    mu: float = 2000.0
    lambda_bigram: float = 0.8
    k1: float = 1.2
    b: float = 0.75
    epsilon: float = 1e-10
    cascade_k: int = 30
    n_max: int = 54
    m_max: int = 40
    gru_hidden: int = 256
    duet_lr: float = 1e-4
    duet_weight_decay: float = 0.0
    duet_epochs: int = 20
    pli_lr: float = 1e-4
    pli_weight_decay: float = 1e-6
    pli_epochs: int = 60
    c_task1: float = 20.0
    c_task2: float = 1.0
    svm_iterations: int = 1000
    ratio: float = 0.2
    seed: int = 0
    encoder_dim: int = 32
    workers: int = 0  # 0 = number of available cores

    def validate(self) -> None:
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie strictly between 0 and 1")
        if self.cascade_k < 1 or self.n_max < 1 or self.m_max < 1:
            raise ValueError("cascade_k, n_max, m_max must be positive")
        if min(self.duet_lr, self.pli_lr) <= 0:
            raise ValueError("learning rates must be positive")
        if min(self.c_task1, self.c_task2) <= 0:
            raise ValueError("C values must be positive")
        if min(self.duet_epochs, self.pli_epochs, self.svm_iterations) < 1:
            raise ValueError("epoch and iteration budgets must be at least 1")
        if self.encoder_dim < 2:
            raise ValueError("encoder_dim must be at least 2")


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def parse_config(path: str | Path) -> PipelineConfig:
    cfg = PipelineConfig()
    section = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in ("paths", "params"):
                    raise ValueError(f"{path}: line {lineno}: unknown section {section!r}")
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
            expected = "paths" if key in _PATH_KEYS else "params"
            if section is not None and section != expected:
                raise ValueError(
                    f"{path}: line {lineno}: key {key!r} belongs in [{expected}]"
                )
            try:
                setattr(cfg, key, _parse_value(key, value))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    cfg.validate()
    return cfg


def render_config(cfg: PipelineConfig) -> str:
    """Canonical echo of every resolved value, suitable for run metadata."""
    lines = ["[paths]"]
    for f in fields(cfg):
        if f.name in _PATH_KEYS:
            lines.append(f"{f.name}={getattr(cfg, f.name)}")
    lines.append("[params]")
    for f in fields(cfg):
        if f.name not in _PATH_KEYS:
            lines.append(f"{f.name}={getattr(cfg, f.name)!r}")
    return "".join(line + "\n" for line in lines)
