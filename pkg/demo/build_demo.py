"""Regenerate the demo inputs: a small train/dev/test split and a stub
fixture whose responses quote the gold cause texts of the test split.

    python demo/build_demo.py
"""

import json
from pathlib import Path

from mecpe.corpus import (
    Conversation,
    Corpus,
    CorpusSplit,
    EmotionCausePair,
    EmotionLabel,
    Utterance,
    serialize_corpus,
)

HERE = Path(__file__).parent

TOPICS = ["the weather", "the match", "dinner plans", "the deadline", "the trip", "the bill", "the news"]


def labelled_conversation(conv_id: str, rounds: int) -> Conversation:
    utterances = []
    index = 1
    for round_no in range(rounds):
        for label in EmotionLabel:
            utterances.append(
                Utterance(
                    index=index,
                    speaker=f"Speaker{(index % 3) + 1}",
                    text=f"{conv_id} take {round_no + 1} on {TOPICS[index % len(TOPICS)]}, feeling {label.render()}",
                    gold_emotion=label,
                )
            )
            index += 1
    return Conversation(id=conv_id, utterances=tuple(utterances))


def paired_conversation(conv_id: str, target: int, cause: int, emotion: EmotionLabel) -> Conversation:
    n = max(target, cause) + 1
    utterances = []
    for i in range(1, n + 1):
        text = f"{conv_id} small talk line {i} about {TOPICS[i % len(TOPICS)]}"
        if i == cause:
            text = f"{conv_id} the {emotion.render()} trigger: they cancelled {TOPICS[i % len(TOPICS)]}"
        elif i == target:
            text = f"{conv_id} what a way to find out about that"
        utterances.append(
            Utterance(
                index=i,
                speaker=f"Speaker{(i % 2) + 1}",
                text=text,
                gold_emotion=emotion if i == target else EmotionLabel.NEUTRAL,
            )
        )
    return Conversation(
        id=conv_id,
        utterances=tuple(utterances),
        gold_pairs=(EmotionCausePair(target, emotion, cause),),
    )


def main() -> None:
    test_specs = [
        ("demo-t1", 6, 5, EmotionLabel.JOY),
        ("demo-t2", 5, 2, EmotionLabel.ANGER),
        ("demo-t3", 4, 4, EmotionLabel.SURPRISE),
        ("demo-t4", 7, 3, EmotionLabel.SADNESS),
    ]
    test_convs = [paired_conversation(*spec) for spec in test_specs]
    split = CorpusSplit(
        train=Corpus(tuple(labelled_conversation(f"demo-tr{i}", 4) for i in range(3))),
        dev=Corpus(tuple(labelled_conversation(f"demo-dv{i}", 2) for i in range(2))),
        test=Corpus(tuple(test_convs)),
    )
    (HERE / "split.json").write_text(serialize_corpus(split), encoding="utf-8")

    stub = {
        f"{conv.id}:{pair.emotion_utterance}": conv.utterance(pair.cause_utterance).text
        for conv in test_convs
        for pair in conv.gold_pairs
    }
    (HERE / "stub.json").write_text(json.dumps(stub, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {HERE / 'split.json'} and {HERE / 'stub.json'}")


if __name__ == "__main__":
    main()
