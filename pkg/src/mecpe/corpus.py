"""Annotated conversation corpora: parsing, validation, and window slicing.

The canonical on-disk format is a UTF-8 JSON list of conversations:

    [{"id": "c1",
      "utterances": [{"index": 1, "speaker": "Joey", "text": "Cat.",
                      "emotion": "neutral", "media": {"video": "clip1.mp4"}}],
      "pairs": [[6, "joy", 5]]}]

A split file wraps three such lists under "train"/"dev"/"test" keys and may
carry a "manifest" with expected conversation counts per split.  An adapter
maps the public ECF release files (conversation_ID / utterance_ID / pair
encodings like "3_joy") onto the same structures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator


class CorpusError(Exception):
    """Base class for corpus loading problems."""


class ParseError(CorpusError):
    """Malformed input syntax; message carries line/offset when known."""


class ValidationError(CorpusError):
    """A corpus object breaks an invariant."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "; ".join(f"[{v.conversation_id}/{v.rule}] {v.message}" for v in violations[:5])
        extra = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"{len(violations)} violation(s): {lines}{extra}")


class UtteranceLookupError(CorpusError, LookupError):
    """Requested utterance index does not exist in the conversation."""


class EmotionLabel(Enum):
    """The seven emotion categories; all but NEUTRAL are scored."""

    ANGER = "anger"
    DISGUST = "disgust"
    FEAR = "fear"
    JOY = "joy"
    NEUTRAL = "neutral"
    SADNESS = "sadness"
    SURPRISE = "surprise"

    @classmethod
    def parse(cls, text: str) -> "EmotionLabel":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ParseError(f"unknown emotion label: {text!r}") from None

    def render(self) -> str:
        return self.value


# Fixed label order used for probability vectors and argmax tie-breaking.
LABEL_ORDER: tuple[EmotionLabel, ...] = tuple(EmotionLabel)
SCORED_LABELS: tuple[EmotionLabel, ...] = tuple(
    e for e in LABEL_ORDER if e is not EmotionLabel.NEUTRAL
)
LABEL_INDEX: dict[EmotionLabel, int] = {e: i for i, e in enumerate(LABEL_ORDER)}


@dataclass(frozen=True)
class Utterance:
    index: int  # 1-based, consecutive within a conversation
    speaker: str
    text: str
    gold_emotion: EmotionLabel | None = None
    media: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class EmotionCausePair:
    """(emotion utterance index, emotion category, cause utterance index).

    The cause may equal, precede, or follow the emotion utterance; gold
    annotations do contain future causes.
    """

    emotion_utterance: int
    emotion: EmotionLabel
    cause_utterance: int

    def as_list(self) -> list:
        return [self.emotion_utterance, self.emotion.render(), self.cause_utterance]


@dataclass(frozen=True)
class Conversation:
    id: str
    utterances: tuple[Utterance, ...]
    gold_pairs: tuple[EmotionCausePair, ...] = ()

    def utterance(self, index: int) -> Utterance:
        pos = index - 1
        if pos < 0 or pos >= len(self.utterances) or self.utterances[pos].index != index:
            raise UtteranceLookupError(f"conversation {self.id!r} has no utterance {index}")
        return self.utterances[pos]

    def has_index(self, index: int) -> bool:
        return 1 <= index <= len(self.utterances)


@dataclass(frozen=True)
class Corpus:
    conversations: tuple[Conversation, ...]

    def __iter__(self) -> Iterator[Conversation]:
        return iter(self.conversations)

    def __len__(self) -> int:
        return len(self.conversations)

    def by_id(self, conversation_id: str) -> Conversation:
        for conv in self.conversations:
            if conv.id == conversation_id:
                return conv
        raise UtteranceLookupError(f"no conversation with id {conversation_id!r}")


@dataclass(frozen=True)
class CorpusSplit:
    train: Corpus
    dev: Corpus
    test: Corpus

    def all_conversations(self) -> Iterator[Conversation]:
        for corpus in (self.train, self.dev, self.test):
            yield from corpus


@dataclass(frozen=True)
class Violation:
    conversation_id: str
    rule: str
    message: str

    def as_dict(self) -> dict[str, str]:
        return {
            "conversation_id": self.conversation_id,
            "rule": self.rule,
            "message": self.message,
        }


def validate(corpus: Corpus | CorpusSplit) -> list[Violation]:
    """Check every invariant; violations are data, not exceptions."""
    if isinstance(corpus, CorpusSplit):
        out: list[Violation] = []
        seen: dict[str, str] = {}
        for name, part in (("train", corpus.train), ("dev", corpus.dev), ("test", corpus.test)):
            out.extend(validate(part))
            for conv in part:
                if conv.id in seen:
                    out.append(
                        Violation(
                            conv.id,
                            "dup-conversation-id",
                            f"id also present in split {seen[conv.id]!r}",
                        )
                    )
                else:
                    seen[conv.id] = name
        return out

    violations: list[Violation] = []
    seen_ids: set[str] = set()
    for conv in corpus:
        if not conv.id:
            violations.append(Violation(conv.id, "id-empty", "conversation id is empty"))
        if conv.id in seen_ids:
            violations.append(Violation(conv.id, "dup-conversation-id", "duplicate conversation id"))
        seen_ids.add(conv.id)

        for pos, utt in enumerate(conv.utterances, start=1):
            if utt.index != pos:
                violations.append(
                    Violation(
                        conv.id,
                        "index-sequence",
                        f"utterance at position {pos} has index {utt.index}; "
                        "indices must be consecutive from 1",
                    )
                )
            if not utt.speaker:
                violations.append(
                    Violation(conv.id, "speaker-empty", f"utterance {utt.index} has empty speaker")
                )

        for pair in conv.gold_pairs:
            if not conv.has_index(pair.emotion_utterance) or not conv.has_index(pair.cause_utterance):
                violations.append(
                    Violation(
                        conv.id,
                        "pair-ref",
                        f"pair {pair.as_list()} references a missing utterance "
                        f"(conversation has {len(conv.utterances)} utterances)",
                    )
                )
                continue
            if pair.emotion is EmotionLabel.NEUTRAL:
                violations.append(
                    Violation(conv.id, "neutral-pair", f"pair {pair.as_list()} carries the neutral label")
                )
                continue
            gold = conv.utterance(pair.emotion_utterance).gold_emotion
            if gold is not None and gold is not pair.emotion:
                violations.append(
                    Violation(
                        conv.id,
                        "emotion-mismatch",
                        f"pair {pair.as_list()} disagrees with gold emotion "
                        f"{gold.render()!r} of utterance {pair.emotion_utterance}",
                    )
                )
    return violations


# ---------------------------------------------------------------------------
# Parsing

def _decode_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _utterance_from_canonical(entry: dict, conv_id: str) -> Utterance:
    try:
        index = int(entry["index"])
        speaker = str(entry["speaker"])
        text = str(entry["text"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"conversation {conv_id!r}: bad utterance entry {entry!r}: {exc}") from exc
    emotion = entry.get("emotion")
    media = entry.get("media") or {}
    if not isinstance(media, dict):
        raise ParseError(f"conversation {conv_id!r}: media must be an object, got {media!r}")
    return Utterance(
        index=index,
        speaker=speaker,
        text=text,
        gold_emotion=EmotionLabel.parse(emotion) if emotion is not None else None,
        media={str(k): str(v) for k, v in media.items()},
    )


def _pair_from_canonical(entry: list, conv_id: str) -> EmotionCausePair:
    if not isinstance(entry, (list, tuple)) or len(entry) != 3:
        raise ParseError(f"conversation {conv_id!r}: pair must be [eu, emotion, cu], got {entry!r}")
    eu, emotion, cu = entry
    return EmotionCausePair(int(eu), EmotionLabel.parse(str(emotion)), int(cu))


def _conversation_from_canonical(obj: dict) -> Conversation:
    if not isinstance(obj, dict):
        raise ParseError(f"conversation entry must be an object, got {type(obj).__name__}")
    conv_id = str(obj.get("id", ""))
    utterances = tuple(_utterance_from_canonical(u, conv_id) for u in obj.get("utterances", []))
    pairs = tuple(_pair_from_canonical(p, conv_id) for p in obj.get("pairs", []))
    return Conversation(id=conv_id, utterances=utterances, gold_pairs=pairs)


def _split_ecf_tag(tag: str) -> tuple[int, str | None]:
    # "3_joy" -> (3, "joy"); "2" -> (2, None); "2_some span_text" -> (2, ...)
    head, sep, rest = str(tag).partition("_")
    try:
        index = int(head)
    except ValueError:
        raise ParseError(f"cannot parse utterance reference {tag!r}") from None
    return index, (rest if sep else None)


def _conversation_from_ecf(obj: dict) -> Conversation:
    if not isinstance(obj, dict):
        raise ParseError(f"ECF conversation entry must be an object, got {type(obj).__name__}")
    conv_id = str(obj.get("conversation_ID", ""))
    utterances = []
    for entry in obj.get("conversation", []):
        media: dict[str, str] = {}
        if entry.get("video_name"):
            media["video"] = str(entry["video_name"])
        emotion = entry.get("emotion")
        utterances.append(
            Utterance(
                index=int(entry["utterance_ID"]),
                speaker=str(entry.get("speaker", "")),
                text=str(entry.get("text", "")),
                gold_emotion=EmotionLabel.parse(emotion) if emotion else None,
                media=media,
            )
        )
    pairs = []
    for raw in obj.get("emotion-cause_pairs", []):
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            raise ParseError(f"conversation {conv_id!r}: bad ECF pair {raw!r}")
        eu, emotion_name = _split_ecf_tag(raw[0])
        if emotion_name is None:
            raise ParseError(f"conversation {conv_id!r}: ECF pair {raw!r} lacks an emotion tag")
        cu, _span = _split_ecf_tag(raw[1])
        pairs.append(EmotionCausePair(eu, EmotionLabel.parse(emotion_name), cu))
    return Conversation(id=conv_id, utterances=tuple(utterances), gold_pairs=tuple(pairs))


def parse_corpus(
    data: bytes | str,
    format: str = "canonical-json",
    validate_corpus: bool = True,
) -> Corpus | CorpusSplit:
    """Parse a corpus (or split file) and enforce all invariants.

    Raises ParseError on malformed syntax and ValidationError when the
    parsed data breaks an invariant; pass validate_corpus=False to get the
    raw objects back for inspection.
    """
    if format not in ("canonical-json", "ecf-json"):
        raise ParseError(f"unknown corpus format {format!r}")
    obj = _decode_json(data)
    build = _conversation_from_canonical if format == "canonical-json" else _conversation_from_ecf

    result: Corpus | CorpusSplit
    if isinstance(obj, dict) and {"train", "dev", "test"} <= set(obj):
        parts = {name: Corpus(tuple(build(c) for c in obj[name])) for name in ("train", "dev", "test")}
        result = CorpusSplit(**parts)
        manifest = obj.get("manifest")
        if manifest:
            for name in ("train", "dev", "test"):
                expected = manifest.get(name)
                actual = len(getattr(result, name))
                if expected is not None and int(expected) != actual:
                    raise ValidationError(
                        [
                            Violation(
                                "",
                                "manifest-count",
                                f"split {name!r} has {actual} conversations, manifest says {expected}",
                            )
                        ]
                    )
    elif isinstance(obj, list):
        result = Corpus(tuple(build(c) for c in obj))
    else:
        raise ParseError("corpus file must be a JSON list of conversations or a train/dev/test object")

    if validate_corpus:
        violations = validate(result)
        if violations:
            raise ValidationError(violations)
    return result


# ---------------------------------------------------------------------------
# Serialization

def conversation_to_dict(conv: Conversation) -> dict:
    utterances = []
    for utt in conv.utterances:
        entry: dict[str, Any] = {"index": utt.index, "speaker": utt.speaker, "text": utt.text}
        if utt.gold_emotion is not None:
            entry["emotion"] = utt.gold_emotion.render()
        if utt.media:
            entry["media"] = dict(sorted(utt.media.items()))
        utterances.append(entry)
    return {
        "id": conv.id,
        "utterances": utterances,
        "pairs": [p.as_list() for p in conv.gold_pairs],
    }


def serialize_corpus(corpus: Corpus | CorpusSplit) -> str:
    if isinstance(corpus, CorpusSplit):
        obj: Any = {
            name: [conversation_to_dict(c) for c in getattr(corpus, name)]
            for name in ("train", "dev", "test")
        }
    else:
        obj = [conversation_to_dict(c) for c in corpus]
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


# ---------------------------------------------------------------------------
# Window slicing

def history_window(conv: Conversation, target: int, w: int) -> list[Utterance]:
    """The up-to-w utterances preceding `target`, then the target itself."""
    if w < 0:
        raise ValueError(f"window must be non-negative, got {w}")
    pos = conv.utterance(target).index - 1
    return list(conv.utterances[max(0, pos - w): pos + 1])


def gold_pairs_by_conversation(corpus: Corpus | Iterable[Conversation]) -> dict[str, list[EmotionCausePair]]:
    return {conv.id: list(conv.gold_pairs) for conv in corpus}
