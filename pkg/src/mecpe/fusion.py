"""Attention-fusion emotion recognizer over per-modality feature vectors.

Each modality m present in an example is projected into a shared space,
h_m = dropout(relu(W_m x_m + b_m)), scored against a learned query,
s_m = (q . h_m) / sqrt(d), and the softmax of the scores over the present
modalities weights the fused representation f = sum_m alpha_m h_m, which a
linear head maps to 7 class logits.  Training is plain mini-batch SGD on
mean cross-entropy with hand-derived gradients; everything is float64 and
deterministic given the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import EmotionLabel, LABEL_INDEX, LABEL_ORDER
from .features import MODALITIES, AlignedDataset, Example
from .metrics import weighted_label_f1


class FusionError(Exception):
    pass


class ShapeError(FusionError):
    pass


class TrainingDivergenceError(FusionError):
    def __init__(self, epoch: int, batch: int):
        self.epoch = epoch
        self.batch = batch
        super().__init__(f"non-finite loss at epoch {epoch}, batch {batch}")


@dataclass(frozen=True)
class FusionConfig:
    common_dim: int = 128
    dropout_rate: float = 0.1
    class_count: int = 7
    learning_rate: float = 0.05
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.common_dim < 1:
            raise FusionError(f"common_dim must be positive, got {self.common_dim}")
        if self.class_count != len(LABEL_ORDER):
            raise FusionError(f"class_count must be {len(LABEL_ORDER)}, got {self.class_count}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise FusionError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise FusionError("epochs and batch_size must be positive")

    def as_dict(self) -> dict:
        return {
            "common_dim": self.common_dim,
            "dropout_rate": self.dropout_rate,
            "class_count": self.class_count,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }


@dataclass
class FusionModel:
    config: FusionConfig
    input_dims: dict[str, int]
    params: dict[str, np.ndarray]

    def modalities(self) -> tuple[str, ...]:
        # canonical iteration order; fusion itself is order-independent
        return tuple(m for m in MODALITIES if m in self.input_dims)

    def copy(self) -> "FusionModel":
        return FusionModel(
            config=self.config,
            input_dims=dict(self.input_dims),
            params={k: v.copy() for k, v in self.params.items()},
        )


def init_model(config: FusionConfig, input_dims: dict[str, int]) -> FusionModel:
    """Symmetric small-scale (Glorot-uniform) weights, zero biases."""
    if not input_dims:
        raise FusionError("at least one modality is required")
    for m, d in input_dims.items():
        if m not in MODALITIES:
            raise FusionError(f"unknown modality {m!r}")
        if d < 1:
            raise FusionError(f"modality {m!r} has non-positive dim {d}")
    rng = np.random.default_rng(config.seed)
    d = config.common_dim
    params: dict[str, np.ndarray] = {}
    for m in MODALITIES:
        if m not in input_dims:
            continue
        limit = math.sqrt(6.0 / (d + input_dims[m]))
        params[f"W_{m}"] = rng.uniform(-limit, limit, size=(d, input_dims[m]))
        params[f"b_{m}"] = np.zeros(d)
    params["q"] = rng.uniform(-math.sqrt(6.0 / (d + 1)), math.sqrt(6.0 / (d + 1)), size=d)
    limit = math.sqrt(6.0 / (config.class_count + d))
    params["W_out"] = rng.uniform(-limit, limit, size=(config.class_count, d))
    params["b_out"] = np.zeros(config.class_count)
    return FusionModel(config=config, input_dims=dict(input_dims), params=params)


@dataclass(frozen=True)
class EmotionPrediction:
    key: tuple[str, int]
    probabilities: np.ndarray
    predicted: EmotionLabel
    attention: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "conversation_id": self.key[0],
            "utterance_index": self.key[1],
            "predicted": self.predicted.render(),
            "probabilities": [float(p) for p in self.probabilities],
            "attention": {m: float(w) for m, w in sorted(self.attention.items())},
        }


def prediction_from_dict(obj: dict) -> EmotionPrediction:
    return EmotionPrediction(
        key=(obj["conversation_id"], int(obj["utterance_index"])),
        probabilities=np.array(obj["probabilities"], dtype=np.float64),
        predicted=EmotionLabel.parse(obj["predicted"]),
        attention={m: float(w) for m, w in obj.get("attention", {}).items()},
    )


def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def _check_example(model: FusionModel, ex: Example) -> None:
    if not ex.mask:
        raise ShapeError(f"example {ex.key} has an empty modality mask")
    for m in ex.mask:
        if m not in model.input_dims:
            raise ShapeError(f"example {ex.key}: model has no projection for modality {m!r}")
        got = ex.features[m].shape
        if got != (model.input_dims[m],):
            raise ShapeError(
                f"example {ex.key}: modality {m!r} has shape {got}, model expects ({model.input_dims[m]},)"
            )


@dataclass
class _GroupCache:
    """Everything the backward pass needs for one mask group."""

    mods: tuple[str, ...]
    index: list[int]  # positions in the original batch
    X: dict[str, np.ndarray]
    Z: dict[str, np.ndarray]
    H: dict[str, np.ndarray]
    drop: dict[str, np.ndarray] | None
    A: np.ndarray  # (n, |mods|) attention weights
    F: np.ndarray  # (n, d) fused representation
    P: np.ndarray  # (n, classes) softmax probabilities


def _forward_groups(
    model: FusionModel,
    batch: list[Example],
    mode: str,
    rng: np.random.Generator | None,
) -> list[_GroupCache]:
    if mode not in ("train", "eval"):
        raise FusionError(f"mode must be 'train' or 'eval', got {mode!r}")
    if mode == "train" and model.config.dropout_rate > 0.0 and rng is None:
        raise FusionError("train mode with dropout needs an rng")
    for ex in batch:
        _check_example(model, ex)

    groups: dict[tuple[str, ...], list[int]] = {}
    for i, ex in enumerate(batch):
        mods = tuple(m for m in MODALITIES if m in ex.mask)
        groups.setdefault(mods, []).append(i)

    d = model.config.common_dim
    scale = 1.0 / math.sqrt(d)
    p = model.config.dropout_rate
    caches: list[_GroupCache] = []
    for mods in sorted(groups):
        index = groups[mods]
        X = {m: np.stack([batch[i].features[m] for i in index]) for m in mods}
        Z = {m: X[m] @ model.params[f"W_{m}"].T + model.params[f"b_{m}"] for m in mods}
        R = {m: np.maximum(Z[m], 0.0) for m in mods}
        drop = None
        if mode == "train" and p > 0.0:
            drop = {m: (rng.random(R[m].shape) >= p) / (1.0 - p) for m in mods}
            H = {m: R[m] * drop[m] for m in mods}
        else:
            H = R
        S = np.stack([H[m] @ model.params["q"] * scale for m in mods], axis=1)
        A = _softmax(S, axis=1)
        F = np.zeros((len(index), d))
        for j, m in enumerate(mods):
            F += A[:, j, None] * H[m]
        logits = F @ model.params["W_out"].T + model.params["b_out"]
        P = _softmax(logits, axis=1)
        caches.append(_GroupCache(mods=mods, index=index, X=X, Z=Z, H=H, drop=drop, A=A, F=F, P=P))
    return caches


def forward(
    model: FusionModel,
    example: Example,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, dict[str, float], _GroupCache]:
    """Logits, attention weights over the example's mask, and the cache."""
    cache = _forward_groups(model, [example], mode, rng)[0]
    logits = cache.F @ model.params["W_out"].T + model.params["b_out"]
    attention = {m: float(cache.A[0, j]) for j, m in enumerate(cache.mods)}
    return logits[0], attention, cache


def loss_and_grads(
    model: FusionModel,
    batch: list[Example],
    mode: str = "train",
    rng: np.random.Generator | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and gradients for every parameter.

    Backpropagates by hand through the classifier head, the attention
    softmax, dropout masks, ReLU, and the per-modality projections.
    """
    if not batch:
        raise FusionError("batch must be non-empty")
    labels = []
    for ex in batch:
        if ex.label is None:
            raise FusionError(f"example {ex.key} has no label")
        labels.append(LABEL_INDEX[ex.label])

    caches = _forward_groups(model, batch, mode, rng)
    n_total = len(batch)
    scale = 1.0 / math.sqrt(model.config.common_dim)
    grads = {k: np.zeros_like(v) for k, v in model.params.items()}
    loss = 0.0
    for cache in caches:
        y = np.array([labels[i] for i in cache.index])
        rows = np.arange(len(cache.index))
        loss += -np.log(cache.P[rows, y]).sum()

        # d(mean CE)/d(logits) = (P - onehot) / N
        dlogits = cache.P.copy()
        dlogits[rows, y] -= 1.0
        dlogits /= n_total

        grads["W_out"] += dlogits.T @ cache.F
        grads["b_out"] += dlogits.sum(axis=0)
        dF = dlogits @ model.params["W_out"]

        # fused = sum_j A_j * H_j
        dA = np.stack([np.einsum("nd,nd->n", dF, cache.H[m]) for m in cache.mods], axis=1)
        dH = {m: cache.A[:, j, None] * dF for j, m in enumerate(cache.mods)}

        # softmax over modalities
        dS = cache.A * (dA - (cache.A * dA).sum(axis=1, keepdims=True))
        for j, m in enumerate(cache.mods):
            grads["q"] += (dS[:, j, None] * cache.H[m]).sum(axis=0) * scale
            dH[m] += dS[:, j, None] * model.params["q"] * scale

        for m in cache.mods:
            dR = dH[m] * cache.drop[m] if cache.drop is not None else dH[m]
            dZ = dR * (cache.Z[m] > 0.0)
            grads[f"W_{m}"] += dZ.T @ cache.X[m]
            grads[f"b_{m}"] += dZ.sum(axis=0)
    return loss / n_total, grads


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    dev_weighted_f1: float


def train(
    model: FusionModel,
    train_set: AlignedDataset,
    dev_set: AlignedDataset,
    config: FusionConfig | None = None,
) -> tuple[FusionModel, list[EpochStats]]:
    """Mini-batch SGD with a fixed learning rate and seeded shuffling.

    Returns the parameters that scored the best dev weighted F1 and the
    per-epoch history.
    """
    config = config or model.config
    if not train_set.examples or not dev_set.examples:
        raise FusionError("train and dev splits must be non-empty")
    model = model.copy()
    shuffle_rng = np.random.default_rng([config.seed, 11])
    dropout_rng = np.random.default_rng([config.seed, 13])
    dev_gold = [ex.label for ex in dev_set.examples]
    if any(label is None for label in dev_gold):
        raise FusionError("dev examples need labels for model selection")

    best = model.copy()
    best_f1 = -1.0
    history: list[EpochStats] = []
    n = len(train_set.examples)
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n)
        total_loss = 0.0
        for batch_no, start in enumerate(range(0, n, config.batch_size)):
            batch = [train_set.examples[i] for i in order[start: start + config.batch_size]]
            loss, grads = loss_and_grads(model, batch, "train", dropout_rng)
            if not math.isfinite(loss):
                raise TrainingDivergenceError(epoch, batch_no)
            total_loss += loss * len(batch)
            for name, grad in grads.items():
                model.params[name] -= config.learning_rate * grad
        dev_pred = [p.predicted for p in predict(model, dev_set)]
        dev_f1 = weighted_label_f1(dev_gold, dev_pred)
        history.append(EpochStats(epoch=epoch, train_loss=total_loss / n, dev_weighted_f1=dev_f1))
        if dev_f1 > best_f1:
            best_f1 = dev_f1
            best = model.copy()
    return best, history


def predict(model: FusionModel, dataset: AlignedDataset) -> list[EmotionPrediction]:
    """Deterministic eval-mode forward over every example."""
    if not dataset.examples:
        return []
    caches = _forward_groups(model, dataset.examples, "eval", None)
    out: list[EmotionPrediction | None] = [None] * len(dataset.examples)
    for cache in caches:
        for row, i in enumerate(cache.index):
            probs = cache.P[row]
            predicted = LABEL_ORDER[int(np.argmax(probs))]
            attention = {m: float(cache.A[row, j]) for j, m in enumerate(cache.mods)}
            out[i] = EmotionPrediction(
                key=dataset.examples[i].key,
                probabilities=probs,
                predicted=predicted,
                attention=attention,
            )
    return [p for p in out if p is not None]


# ---------------------------------------------------------------------------
# Checkpoints

def save_model(model: FusionModel, path: str | Path) -> None:
    payload = {
        "config": model.config.as_dict(),
        "input_dims": model.input_dims,
        "params": {k: v.tolist() for k, v in model.params.items()},
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> FusionModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = FusionConfig(**payload["config"])
    params = {k: np.array(v, dtype=np.float64) for k, v in payload["params"].items()}
    return FusionModel(config=config, input_dims={str(k): int(v) for k, v in payload["input_dims"].items()}, params=params)
