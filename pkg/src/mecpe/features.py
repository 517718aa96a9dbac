"""Per-modality feature tables: interchange IO, synthesis, and alignment.

Interchange format (one file per modality): UTF-8 text, first line a header
`modality,dim`, then one line per utterance

    conversation_id,utterance_index,v1,...,v_dim

with floats written in shortest round-trip decimal form, so that
save(load(f)) reproduces f byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, EmotionLabel, LABEL_INDEX, LABEL_ORDER

MODALITIES = ("text", "audio", "visual")

# Unequal defaults on purpose: they exercise the per-modality projections.
DEFAULT_DIMS = {"text": 256, "audio": 128, "visual": 160}

Key = tuple[str, int]


class FeatureError(Exception):
    """Base class for feature table problems."""


class FeatureLoadError(FeatureError):
    pass


class AlignmentError(FeatureError):
    pass


@dataclass
class FeatureTable:
    modality: str
    dim: int
    rows: dict[Key, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)


def _check_vector(vec: np.ndarray, dim: int, key: Key) -> None:
    if vec.shape != (dim,):
        raise FeatureLoadError(f"row {key}: expected {dim} values, got {vec.shape[0]}")
    if not np.all(np.isfinite(vec)):
        raise FeatureLoadError(f"row {key}: non-finite value")


def load_features(path: str | Path, modality: str | None = None) -> FeatureTable:
    """Read an interchange file; every row is validated against the header."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split(",")
        if len(parts) != 2:
            raise FeatureLoadError(f"{path}: header must be 'modality,dim', got {header!r}")
        file_modality, dim_str = parts
        try:
            dim = int(dim_str)
        except ValueError:
            raise FeatureLoadError(f"{path}: bad dim in header: {dim_str!r}") from None
        if dim < 1:
            raise FeatureLoadError(f"{path}: dim must be positive, got {dim}")
        if modality is not None and file_modality != modality:
            raise FeatureLoadError(f"{path}: expected modality {modality!r}, file says {file_modality!r}")

        rows: dict[Key, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != dim + 2:
                where = f"key ({fields[0]}, {fields[1]})" if len(fields) >= 2 else f"line {lineno}"
                raise FeatureLoadError(
                    f"{path}:{lineno}: {where}: expected {dim} values, got {max(len(fields) - 2, 0)}"
                )
            key: Key = (fields[0], int(fields[1]))
            if key in rows:
                raise FeatureLoadError(f"{path}:{lineno}: duplicate key {key}")
            try:
                vec = np.array([float(v) for v in fields[2:]], dtype=np.float64)
            except ValueError as exc:
                raise FeatureLoadError(f"{path}:{lineno}: bad float: {exc}") from None
            _check_vector(vec, dim, key)
            rows[key] = vec
    return FeatureTable(modality=file_modality, dim=dim, rows=rows)


def save_features(table: FeatureTable, path: str | Path) -> None:
    path = Path(path)
    lines = [f"{table.modality},{table.dim}"]
    for (conv_id, index), vec in table.rows.items():
        if "," in conv_id or "\n" in conv_id:
            raise FeatureError(f"conversation id {conv_id!r} not representable in interchange format")
        _check_vector(np.asarray(vec), table.dim, (conv_id, index))
        lines.append(f"{conv_id},{index}," + ",".join(repr(float(v)) for v in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_MODALITY_STREAM = {m: i for i, m in enumerate(MODALITIES)}


def _label_embedding(label: EmotionLabel, dim: int) -> np.ndarray:
    onehot = np.zeros(len(LABEL_ORDER))
    onehot[LABEL_INDEX[label]] = 1.0
    reps = math.ceil(dim / len(LABEL_ORDER))
    return np.tile(onehot, reps)[:dim]


def synth_features(
    corpus: Corpus,
    modality: str,
    dim: int,
    signal: float,
    seed: int,
    discriminable: set[EmotionLabel] | None = None,
) -> FeatureTable:
    """Deterministic synthetic features with controllable label signal.

    Each vector is signal * onehot-embedding(gold emotion, tiled to dim)
    plus (1 - signal) * unit-variance Gaussian noise.  With signal=0 vectors
    carry no label information.  When `discriminable` is given, labels
    outside that set contribute zero signal, which builds datasets where a
    modality separates only a subset of the classes.
    """
    if dim < len(LABEL_ORDER):
        raise FeatureError(f"dim must be >= {len(LABEL_ORDER)}, got {dim}")
    if not 0.0 <= signal <= 1.0:
        raise FeatureError(f"signal must lie in [0, 1], got {signal}")
    if modality not in MODALITIES:
        raise FeatureError(f"unknown modality {modality!r}")
    rng = np.random.default_rng([seed, _MODALITY_STREAM[modality]])
    rows: dict[Key, np.ndarray] = {}
    for conv in corpus:
        for utt in conv.utterances:
            if utt.gold_emotion is None:
                raise FeatureError(
                    f"utterance ({conv.id}, {utt.index}) lacks a gold emotion; "
                    "synthesis needs labels"
                )
            base = _label_embedding(utt.gold_emotion, dim)
            if discriminable is not None and utt.gold_emotion not in discriminable:
                base = np.zeros(dim)
            noise = rng.standard_normal(dim)
            rows[(conv.id, utt.index)] = signal * base + (1.0 - signal) * noise
    return FeatureTable(modality=modality, dim=dim, rows=rows)


@dataclass(frozen=True)
class Example:
    key: Key
    features: dict[str, np.ndarray]
    mask: frozenset[str]
    label: EmotionLabel | None = None


@dataclass
class AlignedDataset:
    examples: list[Example]
    dropped: int = 0  # utterances absent from every table

    def __len__(self) -> int:
        return len(self.examples)

    def input_dims(self) -> dict[str, int]:
        dims: dict[str, int] = {}
        for ex in self.examples:
            for m in ex.mask:
                dims.setdefault(m, ex.features[m].shape[0])
        return dims


def align(
    corpus: Corpus,
    tables: list[FeatureTable],
    policy: str = "strict",
) -> AlignedDataset:
    """Join feature tables with corpus utterances, in corpus order.

    strict: every utterance must appear in every table.
    mask-missing: examples carry the mask of modalities actually present;
    utterances absent from all tables are dropped and counted.
    """
    if not tables:
        raise AlignmentError("at least one feature table is required")
    if policy not in ("strict", "mask-missing"):
        raise AlignmentError(f"unknown policy {policy!r}")
    seen = set()
    for table in tables:
        if table.modality in seen:
            raise AlignmentError(f"two tables for modality {table.modality!r}")
        seen.add(table.modality)

    missing: list[tuple[Key, str]] = []
    examples: list[Example] = []
    dropped = 0
    for conv in corpus:
        for utt in conv.utterances:
            key: Key = (conv.id, utt.index)
            feats = {t.modality: t.rows[key] for t in tables if key in t.rows}
            if policy == "strict":
                missing.extend((key, t.modality) for t in tables if key not in t.rows)
            if not feats:
                dropped += 1
                continue
            examples.append(
                Example(key=key, features=feats, mask=frozenset(feats), label=utt.gold_emotion)
            )
    if policy == "strict" and missing:
        listed = ", ".join(f"{key}/{mod}" for key, mod in missing[:10])
        extra = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        raise AlignmentError(f"missing features for {len(missing)} (key, modality) entries: {listed}{extra}")
    return AlignedDataset(examples=examples, dropped=dropped)
