"""Evaluation: weighted-F1 over emotion-cause pairs, confusion analysis,
and ablation-curve assembly.

A predicted pair is a true positive iff an unmatched gold pair in the same
conversation has the identical (emotion utterance, emotion, cause utterance)
triple; matching is one-to-one, so duplicate predictions count as false
positives.  Per-category F1 is combined into a weighted average with the
gold sample counts as weights, over the six non-neutral categories.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import EmotionCausePair, EmotionLabel, LABEL_INDEX, LABEL_ORDER, SCORED_LABELS

PairsByConversation = Mapping[str, Sequence[EmotionCausePair]]


class MetricsError(Exception):
    pass


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class CategoryScore:
    category: EmotionLabel
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)

    @property
    def n(self) -> int:
        # gold sample count for the category
        return self.tp + self.fn

    def as_dict(self) -> dict:
        return {
            "category": self.category.render(),
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "n": self.n,
        }


@dataclass(frozen=True)
class MetricsReport:
    per_category: dict[EmotionLabel, CategoryScore]
    weighted_f1: float
    macro_f1: float
    total_gold: int
    total_pred: int

    def as_dict(self) -> dict:
        return {
            "per_category": [self.per_category[c].as_dict() for c in SCORED_LABELS],
            "weighted_f1": self.weighted_f1,
            "macro_f1": self.macro_f1,
            "totals": {"gold_pairs": self.total_gold, "predicted_pairs": self.total_pred},
        }


@dataclass(frozen=True)
class ConversationMismatch:
    """Unmatched pairs of one conversation, for error reporting."""

    conversation_id: str
    matched: tuple[EmotionCausePair, ...]
    missed: tuple[EmotionCausePair, ...]  # gold pairs with no matching prediction
    spurious: tuple[EmotionCausePair, ...]  # predictions with no matching gold pair

    @property
    def error_count(self) -> int:
        return len(self.missed) + len(self.spurious)


def _match_conversation(
    gold: Sequence[EmotionCausePair], pred: Sequence[EmotionCausePair]
) -> tuple[list[EmotionCausePair], list[EmotionCausePair], list[EmotionCausePair]]:
    """One-to-one matching on identical triples; returns (matched, missed, spurious)."""
    remaining = Counter(gold)
    matched: list[EmotionCausePair] = []
    spurious: list[EmotionCausePair] = []
    for p in pred:
        if remaining[p] > 0:
            remaining[p] -= 1
            matched.append(p)
        else:
            spurious.append(p)
    missed = [pair for pair, count in remaining.items() for _ in range(count)]
    return matched, missed, spurious


def score_pairs(gold: PairsByConversation, pred: PairsByConversation) -> MetricsReport:
    """Per-category precision/recall/F1 and the weighted average over the
    six scored categories, with weights n^j = gold count of category j."""
    tp: Counter[EmotionLabel] = Counter()
    fp: Counter[EmotionLabel] = Counter()
    fn: Counter[EmotionLabel] = Counter()
    total_gold = 0
    total_pred = 0
    for conv_id in set(gold) | set(pred):
        g = list(gold.get(conv_id, ()))
        p = list(pred.get(conv_id, ()))
        for pair in g + p:
            if pair.emotion is EmotionLabel.NEUTRAL:
                raise MetricsError(f"conversation {conv_id!r}: neutral pair {pair.as_list()} is not scorable")
        total_gold += len(g)
        total_pred += len(p)
        matched, missed, spurious = _match_conversation(g, p)
        for pair in matched:
            tp[pair.emotion] += 1
        for pair in spurious:
            fp[pair.emotion] += 1
        for pair in missed:
            fn[pair.emotion] += 1

    per_category = {
        c: CategoryScore(category=c, tp=tp[c], fp=fp[c], fn=fn[c]) for c in SCORED_LABELS
    }
    total_n = sum(score.n for score in per_category.values())
    weighted = (
        sum(score.n * score.f1 for score in per_category.values()) / total_n if total_n else 0.0
    )
    macro = sum(score.f1 for score in per_category.values()) / len(SCORED_LABELS)
    return MetricsReport(
        per_category=per_category,
        weighted_f1=weighted,
        macro_f1=macro,
        total_gold=total_gold,
        total_pred=total_pred,
    )


def conversation_breakdown(
    gold: PairsByConversation, pred: PairsByConversation
) -> list[ConversationMismatch]:
    """Per-conversation matched/missed/spurious pairs, worst first."""
    rows = []
    for conv_id in sorted(set(gold) | set(pred)):
        matched, missed, spurious = _match_conversation(
            list(gold.get(conv_id, ())), list(pred.get(conv_id, ()))
        )
        rows.append(
            ConversationMismatch(
                conversation_id=conv_id,
                matched=tuple(matched),
                missed=tuple(missed),
                spurious=tuple(spurious),
            )
        )
    rows.sort(key=lambda r: (-r.error_count, r.conversation_id))
    return rows


# ---------------------------------------------------------------------------
# Emotion-level analysis (stage-1 diagnostics)

@dataclass
class ConfusionMatrix:
    """7x7 counts; rows are gold labels, columns predicted labels."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros((7, 7), dtype=np.int64))
    skipped: int = 0  # utterances without a gold label

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        names = [e.render() for e in LABEL_ORDER]
        writer.writerow(["gold\\pred"] + names)
        for i, name in enumerate(names):
            writer.writerow([name] + [int(v) for v in self.counts[i]])
        return out.getvalue()


def emotion_confusion(
    gold_labels: Mapping, predictions: Iterable
) -> ConfusionMatrix:
    """Tally gold vs predicted emotions per utterance.

    `predictions` is anything with .key and .predicted attributes;
    utterances whose key has no gold label are skipped and counted.
    """
    matrix = ConfusionMatrix()
    for pred in predictions:
        gold = gold_labels.get(pred.key)
        if gold is None:
            matrix.skipped += 1
            continue
        matrix.counts[LABEL_INDEX[gold], LABEL_INDEX[pred.predicted]] += 1
    return matrix


def neutral_leakage(matrix: ConfusionMatrix) -> float:
    """Fraction of gold non-neutral utterances predicted as neutral."""
    neutral = LABEL_INDEX[EmotionLabel.NEUTRAL]
    rows = [i for i in range(len(LABEL_ORDER)) if i != neutral]
    into_neutral = int(matrix.counts[rows, neutral].sum())
    total = int(matrix.counts[rows, :].sum())
    return _ratio(into_neutral, total)


def weighted_label_f1(gold: Sequence[EmotionLabel], pred: Sequence[EmotionLabel]) -> float:
    """Support-weighted mean of per-label F1 over all seven labels."""
    if len(gold) != len(pred):
        raise MetricsError(f"gold/pred length mismatch: {len(gold)} vs {len(pred)}")
    if not gold:
        return 0.0
    total = 0.0
    for label in LABEL_ORDER:
        support = sum(1 for g in gold if g is label)
        if not support:
            continue
        tp = sum(1 for g, p in zip(gold, pred) if g is label and p is label)
        fp = sum(1 for g, p in zip(gold, pred) if g is not label and p is label)
        f1 = _f1(_ratio(tp, tp + fp), _ratio(tp, support))
        total += support * f1
    return total / len(gold)


# ---------------------------------------------------------------------------
# Ablation curves

def ablation_curve(results: Sequence[tuple[int, MetricsReport]]) -> list[tuple[int, float]]:
    """Sorted (window, weighted F1) rows for plotting."""
    if not results:
        raise MetricsError("ablation curve needs at least one (window, report) entry")
    windows = [w for w, _ in results]
    if len(set(windows)) != len(windows):
        raise MetricsError(f"duplicate window values in {sorted(windows)}")
    return sorted((w, report.weighted_f1) for w, report in results)


def ablation_curve_csv(rows: Sequence[tuple[int, float]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["w", "weighted_f1"])
    for w, f1 in rows:
        writer.writerow([w, repr(float(f1))])
    return out.getvalue()
