"""Generative cause extraction: prompts, client calls, similarity matching,
and pair assembly, plus heuristic baselines.

The generative model sits behind a client interface.  The HTTP client
speaks `POST /generate` with body {"prompt": ..., "image_ref": ...?} and
reply {"text": ...}; the scripted stub serves canned responses from a
fixture keyed "conversation_id:utterance_index" and keeps the whole
pipeline runnable without any LLM.
"""

from __future__ import annotations

import json
import re
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus import Conversation, EmotionCausePair, EmotionLabel, LABEL_INDEX, history_window
from .fusion import EmotionPrediction


class CauseError(Exception):
    pass


class ContractError(CauseError):
    """A precondition was violated (e.g. neutral target)."""


class GenerationError(CauseError):
    """Timeout, transport failure, or malformed client reply."""


class ConsistencyError(CauseError):
    """Decisions and predictions disagree on the target set."""


@dataclass(frozen=True)
class PromptConfig:
    window: int = 5
    template_id: str = "default"
    include_image: bool = False

    def __post_init__(self) -> None:
        if self.window < 0:
            raise ContractError(f"window must be non-negative, got {self.window}")

    def as_dict(self) -> dict:
        return {"window": self.window, "template_id": self.template_id, "include_image": self.include_image}


@dataclass(frozen=True)
class Prompt:
    text: str
    image_ref: str | None
    target: tuple[str, int]
    candidates: tuple[int, ...]  # history indices plus the target itself


@dataclass(frozen=True)
class GeneratedResponse:
    text: str
    latency: float = 0.0
    client_id: str = ""


@dataclass(frozen=True)
class CauseDecision:
    conversation_id: str
    target: int
    cause: int | None
    score: float
    matched_text: str | None = None

    def as_dict(self) -> dict:
        return {
            "conversation_id": self.conversation_id,
            "target": self.target,
            "cause": self.cause,
            "score": self.score,
            "matched_text": self.matched_text,
        }


def decision_from_dict(obj: dict) -> CauseDecision:
    return CauseDecision(
        conversation_id=obj["conversation_id"],
        target=int(obj["target"]),
        cause=None if obj.get("cause") is None else int(obj["cause"]),
        score=float(obj.get("score", 0.0)),
        matched_text=obj.get("matched_text"),
    )


# ---------------------------------------------------------------------------
# Prompt building

_TASK_LINE = (
    "You are given part of a conversation. Identify which utterance caused "
    "the speaker's emotion."
)
_QUESTION = (
    'The speaker {speaker} expressed {emotion} in utterance U{index}: "{text}". '
    "Which earlier utterance caused this emotion? Reply with that utterance's "
    "text, or 'none'."
)

_IMAGE_KEYS = ("image", "video", "visual")


def _render_default(history, target_utt, emotion: EmotionLabel) -> str:
    lines = [_TASK_LINE]
    if history:
        lines.append("Conversation so far:")
        lines.extend(f"U{u.index} ({u.speaker}): {u.text}" for u in history)
    lines.append(
        _QUESTION.format(
            speaker=target_utt.speaker,
            emotion=emotion.render(),
            index=target_utt.index,
            text=target_utt.text,
        )
    )
    return "\n".join(lines)


_TEMPLATES = {"default": _render_default}


def build_prompt(
    conv: Conversation,
    target: int,
    predicted_emotion: EmotionLabel,
    config: PromptConfig,
) -> Prompt:
    """Deterministic prompt for one non-neutral target utterance.

    The rendered text carries the history window, the target speaker and
    text, and the predicted emotion; candidates are the window indices plus
    the target itself.
    """
    if predicted_emotion is EmotionLabel.NEUTRAL:
        raise ContractError(f"target ({conv.id}, {target}) is neutral; neutral targets emit no pairs")
    if config.template_id not in _TEMPLATES:
        raise ContractError(f"unknown template {config.template_id!r}")
    window = history_window(conv, target, config.window)
    target_utt = window[-1]
    text = _TEMPLATES[config.template_id](window[:-1], target_utt, predicted_emotion)
    image_ref = None
    if config.include_image:
        for key in _IMAGE_KEYS:
            if key in target_utt.media:
                image_ref = target_utt.media[key]
                break
    return Prompt(
        text=text,
        image_ref=image_ref,
        target=(conv.id, target),
        candidates=tuple(u.index for u in window),
    )


# ---------------------------------------------------------------------------
# Generation clients

class GenerationClient(Protocol):
    client_id: str

    def generate(self, prompt: Prompt) -> GeneratedResponse: ...


class HttpGenerationClient:
    """POST /generate with a JSON body; any transport or schema problem is
    surfaced as a GenerationError so the pipeline can record a no-cause."""

    def __init__(self, endpoint: str, timeout: float = 30.0, client_id: str = "http"):
        self.endpoint = endpoint.rstrip("/") + "/generate"
        self.timeout = timeout
        self.client_id = client_id

    def generate(self, prompt: Prompt) -> GeneratedResponse:
        body: dict = {"prompt": prompt.text}
        if prompt.image_ref is not None:
            body["image_ref"] = prompt.image_ref
        request = urllib.request.Request(
            self.endpoint,
            data=json.dumps(body).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        started = time.monotonic()
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as reply:
                payload = json.loads(reply.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, OSError, json.JSONDecodeError) as exc:
            raise GenerationError(f"generate call for {prompt.target} failed: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            raise GenerationError(f"malformed reply for {prompt.target}: {payload!r}")
        return GeneratedResponse(
            text=payload["text"], latency=time.monotonic() - started, client_id=self.client_id
        )


class ScriptedStubClient:
    """Deterministic stand-in for the generative model.

    The fixture maps "conversation_id:utterance_index" to a canned response;
    targets without an entry yield an empty response, which downstream
    matching treats as no-cause.
    """

    client_id = "stub"

    def __init__(self, responses: dict[str, str]):
        self.responses = dict(responses)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedStubClient":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(obj, dict):
            raise CauseError(f"stub fixture {path} must be a JSON object")
        return cls({str(k): str(v) for k, v in obj.items()})

    @staticmethod
    def key(conversation_id: str, index: int) -> str:
        return f"{conversation_id}:{index}"

    def generate(self, prompt: Prompt) -> GeneratedResponse:
        text = self.responses.get(self.key(*prompt.target), "")
        return GeneratedResponse(text=text, latency=0.0, client_id=self.client_id)


def generate(client: GenerationClient, prompt: Prompt) -> GeneratedResponse:
    return client.generate(prompt)


# ---------------------------------------------------------------------------
# Similarity matching

_NON_WORD = re.compile(r"[^\w\s]+")

NO_CAUSE_SENTINEL = "none"
DEFAULT_TAU = 0.3


def normalize_text(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return " ".join(_NON_WORD.sub(" ", text.lower()).split())


def token_overlap_f1(a: str, b: str) -> float:
    """Harmonic mean of token precision/recall over normalized token sets."""
    ta = set(normalize_text(a).split())
    tb = set(normalize_text(b).split())
    if not ta or not tb:
        return 0.0
    common = len(ta & tb)
    if common == 0:
        return 0.0
    precision = common / len(ta)
    recall = common / len(tb)
    return 2.0 * precision * recall / (precision + recall)


def match_cause(
    response: GeneratedResponse,
    candidates: Sequence[tuple[int, str]],
    tau: float = DEFAULT_TAU,
    conversation_id: str = "",
    target: int = 0,
) -> CauseDecision:
    """Map a generated response onto the best-overlapping candidate.

    A response normalizing to the no-cause sentinel (or to nothing) abstains
    outright; otherwise the candidate with the highest token-overlap F1 wins,
    ties going to the candidate nearest the target, and scores below tau
    abstain as well.
    """
    if not candidates:
        raise CauseError("match_cause needs at least one candidate")
    normalized = normalize_text(response.text)
    if normalized == NO_CAUSE_SENTINEL or not normalized:
        return CauseDecision(conversation_id, target, cause=None, score=0.0)
    best_index: int | None = None
    best_text: str | None = None
    best_score = -1.0
    for index, text in candidates:  # ascending order; >= keeps the most recent tie
        score = token_overlap_f1(response.text, text)
        if score >= best_score:
            best_index, best_text, best_score = index, text, score
    if best_score < tau:
        return CauseDecision(conversation_id, target, cause=None, score=max(best_score, 0.0))
    return CauseDecision(conversation_id, target, cause=best_index, score=best_score, matched_text=best_text)


# ---------------------------------------------------------------------------
# Pair assembly

def assemble_pairs(
    predictions: Sequence[EmotionPrediction],
    decisions: Sequence[CauseDecision],
) -> dict[str, list[EmotionCausePair]]:
    """Emit (target, predicted emotion, cause) for every non-neutral
    prediction whose decision carries a cause; everything else abstains."""
    by_key = {p.key: p for p in predictions}
    decided: dict[tuple[str, int], CauseDecision] = {}
    for decision in decisions:
        key = (decision.conversation_id, decision.target)
        if key not in by_key:
            raise ConsistencyError(f"decision for unknown target {key}")
        decided[key] = decision

    pairs: dict[str, list[EmotionCausePair]] = {}
    for pred in predictions:
        if pred.predicted is EmotionLabel.NEUTRAL:
            continue
        decision = decided.get(pred.key)
        if decision is None or decision.cause is None:
            continue
        pairs.setdefault(pred.key[0], []).append(
            EmotionCausePair(pred.key[1], pred.predicted, decision.cause)
        )
    return pairs


def heuristic_causes(
    conv: Conversation,
    predictions: Sequence[EmotionPrediction],
    strategy: str = "self",
) -> list[EmotionCausePair]:
    """Baselines: the cause is the emotion utterance itself, or the one
    before it (falling back to itself at the conversation start)."""
    if strategy not in ("self", "previous"):
        raise CauseError(f"unknown heuristic strategy {strategy!r}")
    pairs = []
    for pred in predictions:
        if pred.key[0] != conv.id or pred.predicted is EmotionLabel.NEUTRAL:
            continue
        index = pred.key[1]
        cause = index
        if strategy == "previous" and conv.has_index(index - 1):
            cause = index - 1
        pairs.append(EmotionCausePair(index, pred.predicted, cause))
    return pairs


# ---------------------------------------------------------------------------
# Pipeline orchestration

@dataclass
class ExtractionResult:
    decisions: list[CauseDecision]
    pairs: dict[str, list[EmotionCausePair]]
    failures: int = 0
    targets: int = 0


def gold_emotion_predictions(conversations: Iterable[Conversation]) -> list[EmotionPrediction]:
    """Prediction records built from gold labels, for measuring the cause
    stage in isolation from the recognizer."""
    predictions = []
    for conv in conversations:
        for utt in conv.utterances:
            if utt.gold_emotion is None:
                continue
            probs = np.zeros(7)
            probs[LABEL_INDEX[utt.gold_emotion]] = 1.0
            predictions.append(
                EmotionPrediction(
                    key=(conv.id, utt.index),
                    probabilities=probs,
                    predicted=utt.gold_emotion,
                    attention={},
                )
            )
    return predictions


def extract_causes(
    conversations: Sequence[Conversation],
    predictions: Sequence[EmotionPrediction],
    client: GenerationClient,
    prompt_config: PromptConfig,
    tau: float = DEFAULT_TAU,
    max_in_flight: int = 1,
) -> ExtractionResult:
    """Prompt, generate, match, and assemble over all non-neutral targets.

    Client failures are recorded as no-cause decisions and counted; the run
    always completes.  Responses are joined by target key, so in-flight
    concurrency never affects the output.
    """
    by_id = {conv.id: conv for conv in conversations}
    targets: list[tuple[EmotionPrediction, Prompt]] = []
    for pred in predictions:
        if pred.predicted is EmotionLabel.NEUTRAL:
            continue
        conv = by_id.get(pred.key[0])
        if conv is None:
            raise ConsistencyError(f"prediction for unknown conversation {pred.key[0]!r}")
        targets.append((pred, build_prompt(conv, pred.key[1], pred.predicted, prompt_config)))

    responses: dict[tuple[str, int], GeneratedResponse | GenerationError] = {}

    def call(prompt: Prompt) -> GeneratedResponse | GenerationError:
        try:
            return client.generate(prompt)
        except GenerationError as exc:
            return exc

    if max_in_flight > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            for (pred, prompt), outcome in zip(targets, pool.map(lambda t: call(t[1]), targets)):
                responses[prompt.target] = outcome
    else:
        for pred, prompt in targets:
            responses[prompt.target] = call(prompt)

    decisions: list[CauseDecision] = []
    failures = 0
    for pred, prompt in targets:
        conv = by_id[pred.key[0]]
        outcome = responses[prompt.target]
        if isinstance(outcome, GenerationError):
            failures += 1
            decisions.append(CauseDecision(conv.id, pred.key[1], cause=None, score=0.0))
            continue
        candidates = [(i, conv.utterance(i).text) for i in prompt.candidates]
        decisions.append(
            match_cause(outcome, candidates, tau, conversation_id=conv.id, target=pred.key[1])
        )
    pairs = assemble_pairs(predictions, decisions)
    return ExtractionResult(decisions=decisions, pairs=pairs, failures=failures, targets=len(targets))
