"""Shared fixture builders for the test suite."""

from __future__ import annotations

import json

import pytest

from mecpe.corpus import (
    Conversation,
    Corpus,
    CorpusSplit,
    EmotionCausePair,
    EmotionLabel,
    SCORED_LABELS,
    Utterance,
)

JOY = EmotionLabel.JOY
ANGER = EmotionLabel.ANGER
NEUTRAL = EmotionLabel.NEUTRAL


def make_conversation(
    conv_id: str,
    texts: list[str],
    speakers: list[str] | None = None,
    emotions: dict[int, EmotionLabel] | None = None,
    pairs: list[tuple[int, EmotionLabel, int]] = (),
    default_emotion: EmotionLabel | None = NEUTRAL,
) -> Conversation:
    emotions = emotions or {}
    speakers = speakers or [f"Speaker{(i % 3) + 1}" for i in range(len(texts))]
    utterances = tuple(
        Utterance(
            index=i + 1,
            speaker=speakers[i],
            text=text,
            gold_emotion=emotions.get(i + 1, default_emotion),
        )
        for i, text in enumerate(texts)
    )
    gold = tuple(EmotionCausePair(eu, emo, cu) for eu, emo, cu in pairs)
    return Conversation(id=conv_id, utterances=utterances, gold_pairs=gold)


def balanced_corpus(conv_id: str, per_class: int, offset: int = 0) -> Corpus:
    """One long conversation with per_class utterances of every label."""
    texts, emotions = [], {}
    index = 1
    for round_no in range(per_class):
        for label in EmotionLabel:
            texts.append(f"utterance {offset + index} about {label.render()}")
            emotions[index] = label
            index += 1
    return Corpus((make_conversation(conv_id, texts, emotions=emotions, default_emotion=None),))


@pytest.fixture
def small_corpus() -> Corpus:
    return Corpus(
        (
            make_conversation(
                "c1",
                ["hello there", "wonderful news arrived", "that is wonderful news"],
                emotions={2: JOY, 3: JOY},
                pairs=[(3, JOY, 2)],
            ),
        )
    )


@pytest.fixture
def table3_corpus() -> Corpus:
    """Four conversations mirroring the qualitative analysis samples:
    a correct pair, a missed cause, a wrong cause whose gold sits in a
    future utterance, and a spurious pair on a neutral target."""
    s1 = make_conversation(
        "s1",
        [
            "So what do you call this animal?",
            "Come on, you know this one.",
            "Look at the whiskers.",
            "Cat.",
            "Yes! You are so smart! I love you.",
            "I love you too.",
        ],
        speakers=["Rachel", "Rachel", "Rachel", "Emma", "Rachel", "Ross"],
        emotions={5: JOY, 6: JOY},
        pairs=[(6, JOY, 5)],
    )
    s2 = make_conversation(
        "s2",
        ["I have no idea what you just said.", "Put Joey on the phone."],
        speakers=["Phoebe", "Mike"],
        emotions={2: ANGER},
        pairs=[(2, ANGER, 1)],
    )
    s3 = make_conversation(
        "s3",
        [
            "Hey, what is going on here?",
            "You know what? It really creeps me out.",
            "Sorry.",
            "I am so exited!",
            "We won the lottery tickets for tonight.",
        ],
        speakers=["Joey", "Monica", "Chandler", "Phoebe", "Phoebe"],
        emotions={4: JOY},
        pairs=[(4, JOY, 5)],
    )
    s4 = make_conversation(
        "s4",
        [
            "Morning everyone.",
            "Did you sleep well?",
            "Not really, the noise outside.",
            "We should talk about the plan.",
            "What plan exactly?",
            "The move to the new apartment.",
            "That again?",
            "Yes, that again.",
            "Sure. Okay.",
            "Uh, are you crazy? Are you insane?",
            "Yeah, I just know it would make me happy.",
        ],
        speakers=["A", "B", "A", "B", "A", "B", "A", "B", "Ross", "Rachel", "Ross"],
        emotions={11: NEUTRAL},
    )
    return Corpus((s1, s2, s3, s4))


@pytest.fixture
def table3_pred_pairs() -> dict[str, list[EmotionCausePair]]:
    return {
        "s1": [EmotionCausePair(6, JOY, 5)],
        "s3": [EmotionCausePair(4, JOY, 4)],
        "s4": [EmotionCausePair(11, JOY, 11)],
    }


def write_corpus(path, corpus) -> str:
    from mecpe.corpus import serialize_corpus

    path.write_text(serialize_corpus(corpus), encoding="utf-8")
    return str(path)


def make_split(train: Corpus, dev: Corpus, test: Corpus) -> CorpusSplit:
    return CorpusSplit(train=train, dev=dev, test=test)


def canonical_json(corpus: Corpus) -> str:
    from mecpe.corpus import conversation_to_dict

    return json.dumps([conversation_to_dict(c) for c in corpus])


PLANTED_EMOTIONS = list(SCORED_LABELS)


def planted_window_fixture() -> tuple[Corpus, dict[str, str]]:
    """Conversations whose gold cause sits 4 or 5 utterances before the
    target, with a decoy 7 or 8 back that reproduces the canned response
    verbatim.  Small windows miss the cause, window 5 nails it, larger
    windows let the decoy win, so the F1 curve peaks at 5 by construction.
    """
    conversations = []
    responses: dict[str, str] = {}
    n = 12
    target = 12
    filler_words = ["calendar", "umbrella", "staircase", "window", "garden", "pencil", "bottle"]
    for i in range(8):
        cause_distance = 4 if i % 2 == 0 else 5
        decoy_distance = 7 if i % 4 < 2 else 8
        cause_index = target - cause_distance
        decoy_index = target - decoy_distance
        cause_text = f"the cake burned badly tonight round{i}"
        response = f"honestly {cause_text}"
        texts = []
        for j in range(1, n + 1):
            word = filler_words[(i + j) % len(filler_words)]
            texts.append(f"{word} chatter number {i}{j}")
        texts[cause_index - 1] = cause_text
        texts[decoy_index - 1] = response
        texts[target - 1] = f"something upset me just now {i}"
        emotion = PLANTED_EMOTIONS[i % len(PLANTED_EMOTIONS)]
        conv = make_conversation(
            f"p{i}",
            texts,
            emotions={target: emotion},
            pairs=[(target, emotion, cause_index)],
        )
        conversations.append(conv)
        responses[f"p{i}:{target}"] = response
    return Corpus(tuple(conversations)), responses


def oracle_fixture(future_cause: bool = False) -> tuple[Corpus, dict[str, str]]:
    """Gold causes within the default window; canned responses quote the
    gold cause text verbatim.  With future_cause=True one conversation's
    gold cause follows the target, which no causal window can reach."""
    conversations = []
    responses: dict[str, str] = {}
    specs = [
        ("o1", 6, 5, JOY),
        ("o2", 5, 2, ANGER),
        ("o3", 4, 4, EmotionLabel.SURPRISE),
    ]
    for conv_id, target, cause, emotion in specs:
        n = max(target, cause) + 1
        texts = [f"{conv_id} plain filler line {j}" for j in range(1, n + 1)]
        texts[cause - 1] = f"{conv_id} the decisive trigger happened here"
        if cause != target:
            texts[target - 1] = f"{conv_id} reaction to what was said"
        conversations.append(
            make_conversation(
                conv_id,
                texts,
                emotions={target: emotion},
                pairs=[(target, emotion, cause)],
            )
        )
        responses[f"{conv_id}:{target}"] = texts[cause - 1]
    if future_cause:
        target, cause = 3, 5
        texts = [f"o4 quiet filler words {j}" for j in range(1, 6)]
        texts[cause - 1] = "o4 the real reason arrives later"
        texts[target - 1] = "o4 sudden burst of feeling"
        conversations.append(
            make_conversation(
                "o4",
                texts,
                emotions={target: JOY},
                pairs=[(target, JOY, cause)],
            )
        )
        responses[f"o4:{target}"] = texts[cause - 1]
    return Corpus(tuple(conversations)), responses
