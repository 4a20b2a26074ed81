"""Paragraph-interaction classifier: encode every (query paragraph,
candidate paragraph) pair, maxpool over the candidate axis, aggregate the
row sequence with a forward GRU plus additive attention, and classify with
a linear head.

The paragraph-pair encoder is frozen behind the :class:`EncoderProvider`
contract; only the downstream parameters train.  Equations, with h_0 = 0:

    z_t = sigmoid(Wz x_t + Uz h_{t-1} + bz)          update gate
    r_t = sigmoid(Wr x_t + Ur h_{t-1} + br)          reset gate
    c_t = tanh(Wh x_t + Uh (r_t * h_{t-1}) + bh)     candidate state
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t

    u_t = tanh(Wa h_t + ba);  alpha = softmax_t(u_t . u_ctx)
    d   = sum_t alpha_t h_t
    p   = softmax(head_w d + head_b)                 index 1 = relevant

Training is per-example SGD on the cross-entropy -ln p[label], gradients
derived analytically (verified against finite differences in the test
suite), with L2 weight decay added to the gradient.
"""

from __future__ import annotations

import json
import math
import hashlib
from dataclasses import dataclass, fields, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .corpus import CaseDocument


class EncoderProvider(Protocol):
    """Frozen paragraph-pair encoder: text pair -> (d-vector, 2 probs)."""

    dim: int

    def encode_pair(self, text_a: str, text_b: str) -> tuple[np.ndarray, np.ndarray]:
        ...


class EncoderError(RuntimeError):
    def __init__(self, message: str, i: int | None = None, j: int | None = None):
        self.i = i
        self.j = j
        super().__init__(message)


@dataclass(frozen=True)
class InteractionMap:
    """N' x M' grid of encoder vectors for one (query, candidate) pair."""

    qid: str
    cid: str
    vectors: np.ndarray  # (N', M', d)

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", v)
        if v.ndim != 3 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("interaction map must be a non-empty 3-d grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("interaction map cells must be finite")

    @property
    def n_rows(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_cols(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[2]


def build_interaction_map(
    query: CaseDocument,
    cand: CaseDocument,
    enc: EncoderProvider,
    n_max: int = 54,
    m_max: int = 40,
) -> InteractionMap:
    """Encode the first min(n, n_max) x min(m, m_max) paragraph pairs.

    Overflowing paragraphs are dropped from the tail: document order carries
    the salient material in case law, so the head is kept.
    """
    if n_max < 1 or m_max < 1:
        raise ValueError("paragraph limits must be positive")
    q_paras = query.paragraphs[:n_max]
    c_paras = cand.paragraphs[:m_max]
    grid = np.empty((len(q_paras), len(c_paras), enc.dim), dtype=np.float64)
    for i, qp in enumerate(q_paras):
        for j, cp in enumerate(c_paras):
            try:
                vec, _probs = enc.encode_pair(qp, cp)
            except Exception as exc:
                raise EncoderError(
                    f"encoder failed on paragraph pair (i={i}, j={j}) "
                    f"of ({query.id!r}, {cand.id!r}): {exc}",
                    i=i,
                    j=j,
                ) from exc
            grid[i, j, :] = vec
    return InteractionMap(query.id, cand.id, grid)


def maxpool_rows(imap: InteractionMap) -> np.ndarray:
    """Elementwise max over the candidate-paragraph axis: (N', d)."""
    return np.max(imap.vectors, axis=1)


_PARAM_FIELDS = (
    "wz", "wr", "wh", "uz", "ur", "uh", "bz", "br", "bh",
    "wa", "ba", "u_ctx", "head_w", "head_b",
)


@dataclass
class PliModel:
    wz: np.ndarray
    wr: np.ndarray
    wh: np.ndarray
    uz: np.ndarray
    ur: np.ndarray
    uh: np.ndarray
    bz: np.ndarray
    br: np.ndarray
    bh: np.ndarray
    wa: np.ndarray
    ba: np.ndarray
    u_ctx: np.ndarray
    head_w: np.ndarray
    head_b: np.ndarray

    def __post_init__(self):
        for name in _PARAM_FIELDS:
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            setattr(self, name, arr)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"parameter {name} must be finite")
        h, d = self.wz.shape
        expected = {
            "wz": (h, d), "wr": (h, d), "wh": (h, d),
            "uz": (h, h), "ur": (h, h), "uh": (h, h),
            "bz": (h,), "br": (h,), "bh": (h,),
            "wa": (h, h), "ba": (h,), "u_ctx": (h,),
            "head_w": (2, h), "head_b": (2,),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(
                    f"parameter {name} has shape {getattr(self, name).shape}, "
                    f"expected {shape}"
                )

    @property
    def hidden(self) -> int:
        return self.wz.shape[0]

    @property
    def dim(self) -> int:
        return self.wz.shape[1]

    def copy(self) -> "PliModel":
        return PliModel(*(getattr(self, n).copy() for n in _PARAM_FIELDS))

    def params(self) -> list[tuple[str, np.ndarray]]:
        return [(n, getattr(self, n)) for n in _PARAM_FIELDS]


@dataclass(frozen=True)
class PliTrainConfig:
    lr: float = 1e-4
    weight_decay: float = 1e-6
    max_epochs: int = 60
    seed: int = 0
    hidden: int = 256

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.hidden < 1:
            raise ValueError("hidden size must be positive")


def init_pli_model(dim: int, hidden: int, seed: int) -> PliModel:
    """Uniform(-0.08, 0.08) initialisation, field order fixed."""
    rng = np.random.default_rng(seed)

    def u(*shape):
        return rng.uniform(-0.08, 0.08, size=shape)

    return PliModel(
        wz=u(hidden, dim), wr=u(hidden, dim), wh=u(hidden, dim),
        uz=u(hidden, hidden), ur=u(hidden, hidden), uh=u(hidden, hidden),
        bz=u(hidden), br=u(hidden), bh=u(hidden),
        wa=u(hidden, hidden), ba=u(hidden), u_ctx=u(hidden),
        head_w=u(2, hidden), head_b=u(2),
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x))
    return e / np.sum(e)


def _forward(model: PliModel, seq: np.ndarray) -> dict:
    """Run GRU + attention over seq (T, d); returns all intermediates."""
    T = seq.shape[0]
    h = model.hidden
    hs = np.zeros((T + 1, h))  # hs[0] = h_0 = 0
    zs = np.empty((T, h))
    rs = np.empty((T, h))
    cs = np.empty((T, h))
    for t in range(T):
        x = seq[t]
        h_prev = hs[t]
        z = _sigmoid(model.wz @ x + model.uz @ h_prev + model.bz)
        r = _sigmoid(model.wr @ x + model.ur @ h_prev + model.br)
        c = np.tanh(model.wh @ x + model.uh @ (r * h_prev) + model.bh)
        hs[t + 1] = (1.0 - z) * h_prev + z * c
        zs[t], rs[t], cs[t] = z, r, c
    us = np.tanh(hs[1:] @ model.wa.T + model.ba)   # (T, h)
    scores = us @ model.u_ctx                       # (T,)
    alpha = _softmax(scores)
    d_qk = alpha @ hs[1:]                           # (h,)
    return {
        "seq": seq, "hs": hs, "zs": zs, "rs": rs, "cs": cs,
        "us": us, "alpha": alpha, "d_qk": d_qk,
    }


def gru_attend(model: PliModel, seq: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Attention-weighted aggregate of the GRU hidden states."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ValueError("sequence must be a non-empty (T, d) array")
    return _forward(model, seq)["d_qk"]


def attention_weights(model: PliModel, seq) -> np.ndarray:
    seq = np.asarray(seq, dtype=np.float64)
    return _forward(model, seq)["alpha"]


def classify(model: PliModel, d_qk: np.ndarray) -> np.ndarray:
    """Softmax over the linear head; probs[1] is the relevant-class score."""
    return _softmax(model.head_w @ np.asarray(d_qk, dtype=np.float64) + model.head_b)


def predict_probs(model: PliModel, imap: InteractionMap) -> np.ndarray:
    return classify(model, gru_attend(model, maxpool_rows(imap)))


def loss_and_grads(
    model: PliModel, seq: np.ndarray, label: int
) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy loss and analytic gradients for one pooled sequence."""
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    seq = np.asarray(seq, dtype=np.float64)
    cache = _forward(model, seq)
    hs, zs, rs, cs = cache["hs"], cache["zs"], cache["rs"], cache["cs"]
    us, alpha, d_qk = cache["us"], cache["alpha"], cache["d_qk"]
    T = seq.shape[0]

    logits = model.head_w @ d_qk + model.head_b
    p = _softmax(logits)
    loss = -math.log(max(p[label], 1e-300))

    g = {name: np.zeros_like(arr) for name, arr in model.params()}

    dlogits = p.copy()
    dlogits[label] -= 1.0
    g["head_w"] += np.outer(dlogits, d_qk)
    g["head_b"] += dlogits
    d_out = model.head_w.T @ dlogits               # dL/d d_qk

    # attention backward
    dalpha = hs[1:] @ d_out                        # (T,)
    dscores = alpha * (dalpha - float(alpha @ dalpha))
    dus = np.outer(dscores, model.u_ctx)           # (T, h)
    g["u_ctx"] += us.T @ dscores
    da = (1.0 - us ** 2) * dus                     # pre-tanh attention grads
    g["wa"] += da.T @ hs[1:]
    g["ba"] += da.sum(axis=0)
    dh_steps = alpha[:, None] * d_out[None, :] + da @ model.wa  # (T, h)

    # GRU backward through time
    dh = np.zeros(model.hidden)
    for t in range(T - 1, -1, -1):
        dh = dh + dh_steps[t]
        x, h_prev = seq[t], hs[t]
        z, r, c = zs[t], rs[t], cs[t]
        dc = dh * z
        dz = dh * (c - h_prev)
        dh_prev = dh * (1.0 - z)
        dac = (1.0 - c ** 2) * dc
        g["wh"] += np.outer(dac, x)
        g["bh"] += dac
        g["uh"] += np.outer(dac, r * h_prev)
        drh = model.uh.T @ dac
        dr = drh * h_prev
        dh_prev = dh_prev + drh * r
        daz = z * (1.0 - z) * dz
        g["wz"] += np.outer(daz, x)
        g["uz"] += np.outer(daz, h_prev)
        g["bz"] += daz
        dh_prev = dh_prev + model.uz.T @ daz
        dar = r * (1.0 - r) * dr
        g["wr"] += np.outer(dar, x)
        g["ur"] += np.outer(dar, h_prev)
        g["br"] += dar
        dh_prev = dh_prev + model.ur.T @ dar
        dh = dh_prev
    return loss, g


def pli_loss(model: PliModel, seq: np.ndarray, label: int) -> float:
    probs = classify(model, gru_attend(model, seq))
    return -math.log(max(probs[label], 1e-300))


@dataclass
class PliTrainResult:
    model: PliModel                    # best epoch snapshot by validation F1
    final_model: PliModel
    best_epoch: int
    history: list[dict] = field(default_factory=list)


def _binary_f1(model: PliModel, items: Sequence[tuple[np.ndarray, int]]) -> float:
    tp = fp = fn = 0
    for seq, label in items:
        pred = classify(model, gru_attend(model, seq))[1] >= 0.5
        if pred and label == 1:
            tp += 1
        elif pred and label == 0:
            fp += 1
        elif not pred and label == 1:
            fn += 1
    return 2.0 * tp / (2.0 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0


def train_pli(
    examples: Sequence[tuple[InteractionMap, int]],
    cfg: PliTrainConfig,
    validation: Sequence[tuple[InteractionMap, int]] = (),
) -> PliTrainResult:
    """Per-example SGD on cross-entropy; snapshot with best validation F1."""
    if not examples:
        raise ValueError("no training examples")
    labels = {label for _, label in examples}
    if labels != {0, 1}:
        raise ValueError("training data must contain both classes")
    pooled = [(maxpool_rows(m), label) for m, label in examples]
    pooled_val = [(maxpool_rows(m), label) for m, label in validation]
    dim = pooled[0][0].shape[1]

    rng = np.random.default_rng(cfg.seed)
    model = init_pli_model(dim, cfg.hidden, cfg.seed)
    best: PliModel | None = None
    best_f1 = -1.0
    best_epoch = 0
    history: list[dict] = []
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(pooled))
        epoch_loss = 0.0
        for idx in order:
            seq, label = pooled[idx]
            loss, grads = loss_and_grads(model, seq, label)
            epoch_loss += loss
            for name, arr in model.params():
                arr -= cfg.lr * (grads[name] + cfg.weight_decay * arr)
        correct = sum(
            (classify(model, gru_attend(model, seq))[1] >= 0.5) == (label == 1)
            for seq, label in pooled
        )
        val_f1 = _binary_f1(model, pooled_val) if pooled_val else 0.0
        history.append(
            {
                "epoch": epoch,
                "train_loss": epoch_loss / len(pooled),
                "train_accuracy": correct / len(pooled),
                "val_f1": val_f1,
            }
        )
        if val_f1 > best_f1:
            best = model.copy()
            best_f1 = val_f1
            best_epoch = epoch
    assert best is not None
    return PliTrainResult(
        model=best, final_model=model.copy(), best_epoch=best_epoch, history=history
    )


class ToyHashEncoder:
    """Deterministic stand-in encoder for tests and desk-scale runs.

    Each token of the concatenated pair is hashed (blake2b, salted with the
    seed) into a signed bucket of a d-vector, which is then L2-normalised.
    Two disjoint token sets collide only when their signed bucket histograms
    coincide: single-token texts collide with probability 1 / (2d); texts of
    several tokens essentially never do (the histograms must match in every
    bucket).  If every bucket cancels, the first component is set to 1 so
    non-empty text always yields a unit vector.  The probability pair is a
    fixed logistic map of the vector mean: p1 = sigmoid(8 * mean).
    """

    def __init__(self, dim: int = 32, seed: int = 0):
        if dim < 2:
            raise ValueError("dim must be at least 2")
        self.dim = dim
        self.seed = seed
        self.name = f"toy-hash-d{dim}-s{seed}"

    def _bucket(self, token: str) -> tuple[int, float]:
        digest = hashlib.blake2b(
            f"{self.seed}:{token}".encode("utf-8"), digest_size=8
        ).digest()
        value = int.from_bytes(digest, "big")
        return value % self.dim, 1.0 if (value >> 63) & 1 else -1.0

    def encode_pair(self, text_a: str, text_b: str) -> tuple[np.ndarray, np.ndarray]:
        vec = np.zeros(self.dim)
        tokens = f"{text_a} {text_b}".split()
        for tok in tokens:
            bucket, sign = self._bucket(tok)
            vec[bucket] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            if not tokens:
                return vec, np.array([0.5, 0.5])
            vec[0] = 1.0
            norm = 1.0
        vec = vec / norm
        p1 = 1.0 / (1.0 + math.exp(-8.0 * float(np.mean(vec))))
        return vec, np.array([1.0 - p1, p1])


def toy_hash_encoder(dim: int, seed: int) -> ToyHashEncoder:
    return ToyHashEncoder(dim, seed)


def write_embeddings(
    records: Sequence[tuple[str, str, int, int, np.ndarray, np.ndarray]],
    dim: int,
    encoder_name: str,
    path: str | Path,
) -> None:
    """Interchange file: header {"dim", "encoder"}, then per-cell records."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"dim": dim, "encoder": encoder_name}, separators=(",", ":"))
            + "\n"
        )
        for qid, cid, i, j, vec, probs in records:
            fh.write(
                json.dumps(
                    {
                        "qid": qid,
                        "cid": cid,
                        "i": i,
                        "j": j,
                        "vec": [float(x) for x in vec],
                        "probs": [float(x) for x in probs],
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def load_embeddings(
    path: str | Path,
) -> dict[tuple[str, str, int, int], tuple[np.ndarray, np.ndarray]]:
    """Read and validate an interchange file.

    Checks: header dim on every vector, probability pairs non-negative and
    summing to 1 within 1e-6, no duplicate cells, and a complete i x j grid
    for every (qid, cid) present.
    """
    cells: dict[tuple[str, str, int, int], tuple[np.ndarray, np.ndarray]] = {}
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ValueError(f"{path}: missing header line")
        header = json.loads(header_line)
        if "dim" not in header:
            raise ValueError(f"{path}: header must declare 'dim'")
        dim = int(header["dim"])
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            key = (obj["qid"], obj["cid"], int(obj["i"]), int(obj["j"]))
            if key in cells:
                raise ValueError(f"{path}: line {lineno}: duplicate cell {key}")
            vec = np.asarray(obj["vec"], dtype=np.float64)
            if vec.shape != (dim,):
                raise ValueError(
                    f"{path}: line {lineno}: vector dim {vec.shape[0]} != "
                    f"header dim {dim}"
                )
            probs = np.asarray(obj["probs"], dtype=np.float64)
            if probs.shape != (2,):
                raise ValueError(f"{path}: line {lineno}: probs must have 2 entries")
            if np.any(probs < 0) or abs(float(probs.sum()) - 1.0) > 1e-6:
                raise ValueError(
                    f"{path}: line {lineno}: probs {probs.tolist()} do not form "
                    "a distribution (sum != 1)"
                )
            if not (np.all(np.isfinite(vec)) and np.all(np.isfinite(probs))):
                raise ValueError(f"{path}: line {lineno}: non-finite values")
            cells[key] = (vec, probs)

    # every claimed (qid, cid) grid must be a complete rectangle
    extents: dict[tuple[str, str], tuple[int, int]] = {}
    for qid, cid, i, j in cells:
        n, m = extents.get((qid, cid), (0, 0))
        extents[(qid, cid)] = (max(n, i + 1), max(m, j + 1))
    for (qid, cid), (n, m) in extents.items():
        for i in range(n):
            for j in range(m):
                if (qid, cid, i, j) not in cells:
                    raise ValueError(
                        f"{path}: incomplete grid: missing cell "
                        f"(qid={qid!r}, cid={cid!r}, i={i}, j={j})"
                    )
    return cells


def maps_from_embeddings(
    cells: dict[tuple[str, str, int, int], tuple[np.ndarray, np.ndarray]],
) -> dict[tuple[str, str], tuple[InteractionMap, np.ndarray]]:
    """Assemble per-pair interaction maps plus the (0, 0) probability pair."""
    out: dict[tuple[str, str], tuple[InteractionMap, np.ndarray]] = {}
    extents: dict[tuple[str, str], tuple[int, int]] = {}
    for qid, cid, i, j in cells:
        n, m = extents.get((qid, cid), (0, 0))
        extents[(qid, cid)] = (max(n, i + 1), max(m, j + 1))
    for (qid, cid), (n, m) in sorted(extents.items()):
        dim = cells[(qid, cid, 0, 0)][0].shape[0]
        grid = np.empty((n, m, dim))
        for i in range(n):
            for j in range(m):
                grid[i, j, :] = cells[(qid, cid, i, j)][0]
        out[(qid, cid)] = (
            InteractionMap(qid, cid, grid),
            cells[(qid, cid, 0, 0)][1].copy(),
        )
    return out


def save_pli_model(model: PliModel, path: str | Path) -> None:
    tensors = {
        name: {"shape": list(arr.shape), "data": [float(x) for x in arr.ravel()]}
        for name, arr in model.params()
    }
    Path(path).write_text(
        json.dumps(
            {"hidden": model.hidden, "dim": model.dim, "tensors": tensors},
            separators=(",", ":"),
        )
        + "\n",
        encoding="utf-8",
    )


def load_pli_model(path: str | Path) -> PliModel:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    kwargs = {}
    for name in _PARAM_FIELDS:
        spec = obj["tensors"][name]
        kwargs[name] = np.asarray(spec["data"], dtype=np.float64).reshape(spec["shape"])
    return PliModel(**kwargs)
