"""The importance predictor: frozen title embedding -> linear layer (one
output node per skill) -> sigmoid, trained with mini-batch gradient descent
against weak labels.

Checkpoint file (line-delimited JSON):
line 1:  {"type":"header","format_version":1,"dimension":D,
          "skills":[...],"activation":"sigmoid"}
then:    {"type":"row","skill":"<id>","w":[D floats],"b":float} in skill order
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import TitleRecord
from .embedding import EmbeddingStore
from .rankeval import DEFAULT_K, mean_average_precision, rank_skills
from .rng import Xorshift64Star
from .weaklabel import WeakLabelSet

FORMAT_VERSION = 1
_EPS = 1e-7  # probability clamp for the log terms


class ModelError(Exception):
    pass


class CheckpointError(ModelError):
    pass


@dataclass
class LinearHead:
    dimension: int
    skill_order: tuple[str, ...]
    weights: np.ndarray  # (dimension, n_skills)
    bias: np.ndarray     # (n_skills,)

    def __post_init__(self):
        n = len(self.skill_order)
        if len(set(self.skill_order)) != n:
            raise ModelError("skill_order contains duplicates")
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.shape != (self.dimension, n):
            raise ModelError(
                f"weights shape {self.weights.shape} != ({self.dimension}, {n})"
            )
        if self.bias.shape != (n,):
            raise ModelError(f"bias shape {self.bias.shape} != ({n},)")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ModelError("parameters contain non-finite values")

    @classmethod
    def zeros(cls, dimension: int, skill_order: Sequence[str]) -> "LinearHead":
        order = tuple(skill_order)
        return cls(dimension, order,
                   np.zeros((dimension, len(order))), np.zeros(len(order)))


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 32
    seed: int = 42
    patience: int = 10
    eval_k: int = DEFAULT_K
    loss: str = "bce"  # "bce" (default) or "mse"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ModelError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1 or self.patience < 1:
            raise ModelError("epochs, batch_size and patience must be >= 1")
        if self.patience > self.epochs:
            raise ModelError("patience cannot exceed epochs")
        if self.loss not in ("bce", "mse"):
            raise ModelError(f"unknown loss {self.loss!r}")


@dataclass
class EpochStats:
    epoch: int
    loss: float
    dev_map: float | None


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(head: LinearHead, x: np.ndarray) -> np.ndarray:
    """Per-skill importance sigmoid(w_j . x + b_j); values in (0,1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (head.dimension,):
        raise ModelError(
            f"input dimension {x.shape} does not match head ({head.dimension},)"
        )
    return _sigmoid(x @ head.weights + head.bias)


def targets_to_vector(target: dict[str, float],
                      skill_order: Sequence[str]) -> np.ndarray:
    """Dense target vector; skills absent from the sparse map are hard zeros."""
    index = {s: i for i, s in enumerate(skill_order)}
    y = np.zeros(len(skill_order), dtype=np.float64)
    for skill, value in target.items():
        if skill in index:
            y[index[skill]] = value
    return y


def bce_loss(pred: np.ndarray, target: dict[str, float],
             skill_order: Sequence[str]) -> float:
    """Soft-target binary cross-entropy, averaged over all skills."""
    p = np.clip(np.asarray(pred, dtype=np.float64), _EPS, 1.0 - _EPS)
    y = targets_to_vector(target, skill_order)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def mse_loss(pred: np.ndarray, target: dict[str, float],
             skill_order: Sequence[str]) -> float:
    """Mean squared error alternative to BCE, averaged over all skills."""
    p = np.asarray(pred, dtype=np.float64)
    y = targets_to_vector(target, skill_order)
    return float(np.mean((p - y) ** 2))


def _logit_grad(P: np.ndarray, Y: np.ndarray, loss: str) -> np.ndarray:
    """d(mean loss)/d(logits) for one batch of predictions."""
    scale = P.shape[1] * P.shape[0]
    if loss == "mse":
        return 2.0 * (P - Y) * P * (1.0 - P) / scale
    return (P - Y) / scale


def gradient(head: LinearHead,
             batch: Sequence[tuple[np.ndarray, dict[str, float]]],
             loss: str = "bce") -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the mean loss over the batch. For BCE,
    d(loss)/d(logit_j) per sample is (p_j - y_j) / (S * |batch|)."""
    if not batch:
        raise ModelError("gradient over an empty batch")
    X = np.stack([np.asarray(x, dtype=np.float64) for x, _ in batch])
    Y = np.stack([targets_to_vector(t, head.skill_order) for _, t in batch])
    P = _sigmoid(X @ head.weights + head.bias)
    G = _logit_grad(P, Y, loss)
    return X.T @ G, G.sum(axis=0)


def train_head(
    labels: WeakLabelSet,
    dev: Sequence[TitleRecord],
    store: EmbeddingStore,
    config: TrainConfig,
    taxonomy: Sequence[str] | None = None,
) -> tuple[LinearHead, list[EpochStats]]:
    """Mini-batch gradient descent from zero initialization. After each epoch
    the dev MAP@k is computed; the best-dev parameters win, and training stops
    after `patience` epochs without improvement. With an empty dev set the
    loop runs all epochs and keeps the final parameters. Fully deterministic
    given (labels, dev, store, config)."""
    if not labels.labels:
        raise ModelError("training label set is empty")
    skill_order = tuple(sorted(taxonomy) if taxonomy is not None
                        else labels.skill_vocabulary())
    titles = sorted(labels.labels)
    for t in titles:
        if t not in store:
            raise ModelError(f"no embedding for training title {t!r}")
    X = np.stack([store.vector(t) for t in titles])
    Y = np.stack([targets_to_vector(labels.labels[t], skill_order)
                  for t in titles])
    n, dim = X.shape
    S = len(skill_order)
    W = np.zeros((dim, S))
    b = np.zeros(S)

    def dev_predictor(record: TitleRecord):
        scores = _sigmoid(store.vector(record.title) @ W + b)
        return rank_skills(scores, skill_order, config.eval_k)

    rng = Xorshift64Star(config.seed)
    history: list[EpochStats] = []
    best_W, best_b, best_map = W.copy(), b.copy(), -np.inf
    epochs_since_best = 0

    for epoch in range(config.epochs):
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            Xb, Yb = X[idx], Y[idx]
            P = _sigmoid(Xb @ W + b)
            G = _logit_grad(P, Yb, config.loss)
            W -= config.learning_rate * (Xb.T @ G)
            b -= config.learning_rate * G.sum(axis=0)

        P_all = _sigmoid(X @ W + b)
        if config.loss == "mse":
            loss = float(np.mean((P_all - Y) ** 2))
        else:
            P_all = np.clip(P_all, _EPS, 1.0 - _EPS)
            loss = float(np.mean(-(Y * np.log(P_all) + (1.0 - Y) * np.log(1.0 - P_all))))

        dev_map: float | None = None
        if dev:
            dev_map = mean_average_precision(dev, dev_predictor, config.eval_k).mean_ap
            if dev_map > best_map:
                best_W, best_b, best_map = W.copy(), b.copy(), dev_map
                epochs_since_best = 0
            else:
                epochs_since_best += 1
        history.append(EpochStats(epoch=epoch, loss=loss, dev_map=dev_map))
        if dev and epochs_since_best >= config.patience:
            break

    if not dev:
        best_W, best_b = W, b
    head = LinearHead(dim, skill_order, best_W, best_b)
    return head, history


def save_checkpoint(head: LinearHead, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({
            "type": "header",
            "format_version": FORMAT_VERSION,
            "dimension": head.dimension,
            "skills": list(head.skill_order),
            "activation": "sigmoid",
        }) + "\n")
        for j, skill in enumerate(head.skill_order):
            f.write(json.dumps({
                "type": "row",
                "skill": skill,
                "w": [float(x) for x in head.weights[:, j]],
                "b": float(head.bias[j]),
            }) + "\n")


def load_checkpoint(path) -> LinearHead:
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        if not header_line.strip():
            raise CheckpointError("checkpoint file is empty")
        header = json.loads(header_line)
        if header.get("type") != "header":
            raise CheckpointError("first line must be the header object")
        if header.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {header.get('format_version')!r}"
            )
        if header.get("activation") != "sigmoid":
            raise CheckpointError(
                f"unsupported activation {header.get('activation')!r}"
            )
        dimension = int(header["dimension"])
        skills = list(header["skills"])
        skill_set = set(skills)
        if len(skill_set) != len(skills):
            raise CheckpointError("duplicate skill in checkpoint header")
        rows: dict[str, tuple[list, float]] = {}
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") != "row":
                raise CheckpointError(f"line {line_no}: expected a row record")
            skill = obj["skill"]
            if skill in rows:
                raise CheckpointError(f"duplicate row for skill {skill!r}")
            if skill not in skill_set:
                raise CheckpointError(f"row for unknown skill {skill!r}")
            if len(obj["w"]) != dimension:
                raise CheckpointError(
                    f"weight row for skill {skill!r} has length {len(obj['w'])}, "
                    f"expected {dimension}"
                )
            rows[skill] = (obj["w"], float(obj["b"]))
        missing = [s for s in skills if s not in rows]
        if missing:
            raise CheckpointError(f"missing rows for skills {missing[:3]!r}...")
    weights = np.column_stack([np.asarray(rows[s][0], dtype=np.float64)
                               for s in skills])
    bias = np.array([rows[s][1] for s in skills], dtype=np.float64)
    return LinearHead(dimension, tuple(skills), weights, bias)
