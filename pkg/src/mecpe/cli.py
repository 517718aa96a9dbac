"""Command-line entry point for reproducible pipeline runs.

Subcommands: ingest, synth-features, train-mer, eval-mer, extract-causes,
eval-pairs, ablate-window, report.  Every command accepts --config pointing
at a JSON document whose keys mirror the long flag names (dashes as
underscores); explicit flags win over the file.  The effective settings are
written as run_config.json next to the outputs, and identical settings plus
an identical seed reproduce outputs byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import cause as cause_mod
from . import corpus as corpus_mod
from . import features as features_mod
from . import fusion as fusion_mod
from . import metrics as metrics_mod
from .corpus import Conversation, Corpus, CorpusSplit, EmotionCausePair, EmotionLabel
from .fusion import EmotionPrediction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_TRAINING = 5
EXIT_CLIENT = 6


class ConfigError(Exception):
    pass


class ClientFailureThreshold(Exception):
    pass


# ---------------------------------------------------------------------------
# Config plumbing

def _effective_config(args: argparse.Namespace, keys: list[str]) -> dict:
    """Merge config-file values under CLI flags (flags win)."""
    file_values: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            file_values = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    effective = {}
    for key in keys:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            effective[key] = flag_value
        elif key in file_values:
            effective[key] = file_values[key]
        else:
            effective[key] = None
    return effective


def _require(config: dict, *keys: str) -> None:
    missing = [k for k in keys if config.get(k) is None]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")


def _out_dir(config: dict) -> Path:
    _require(config, "out")
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _write_run_config(out: Path, command: str, config: dict) -> None:
    _write_json(out / "run_config.json", {"command": command, **config})


# ---------------------------------------------------------------------------
# Shared input loading

def _read_text(path_str: str) -> str:
    path = Path(path_str)
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    return path.read_text(encoding="utf-8")


def _load_corpus_file(path: str, fmt: str = "canonical-json") -> Corpus | CorpusSplit:
    return corpus_mod.parse_corpus(_read_text(path), format=fmt)


def _select_conversations(parsed: Corpus | CorpusSplit, split: str | None) -> list[Conversation]:
    if isinstance(parsed, CorpusSplit):
        name = split or "test"
        if name == "all":
            return list(parsed.all_conversations())
        if name not in ("train", "dev", "test"):
            raise ConfigError(f"unknown split {name!r}")
        return list(getattr(parsed, name))
    if split not in (None, "all"):
        raise ConfigError(f"--split {split!r} given, but the corpus file has no splits")
    return list(parsed)


def _load_tables(config: dict) -> list[features_mod.FeatureTable]:
    tables = []
    for modality in features_mod.MODALITIES:
        path = config.get(f"features_{modality}")
        if path:
            if not Path(path).exists():
                raise FileNotFoundError(f"feature file not found: {path}")
            tables.append(features_mod.load_features(path, modality))
    if not tables:
        raise ConfigError("at least one --features-<modality> file is required")
    return tables


def _predictions_to_jsonl(predictions: list[EmotionPrediction]) -> str:
    return "".join(json.dumps(p.as_dict(), ensure_ascii=False, sort_keys=True) + "\n" for p in predictions)


def _predictions_from_jsonl(text: str) -> list[EmotionPrediction]:
    return [fusion_mod.prediction_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def _pairs_to_jsonable(pairs: dict[str, list[EmotionCausePair]]) -> dict:
    return {conv_id: [p.as_list() for p in sorted(plist, key=lambda x: (x.emotion_utterance, x.cause_utterance, x.emotion.render()))]
            for conv_id, plist in sorted(pairs.items())}


def _pairs_from_jsonable(obj: dict) -> dict[str, list[EmotionCausePair]]:
    out: dict[str, list[EmotionCausePair]] = {}
    for conv_id, plist in obj.items():
        out[conv_id] = [
            EmotionCausePair(int(eu), EmotionLabel.parse(emo), int(cu)) for eu, emo, cu in plist
        ]
    return out


def _emotion_report(
    conversations: list[Conversation], predictions: list[EmotionPrediction]
) -> tuple[dict, metrics_mod.ConfusionMatrix]:
    gold = {
        (conv.id, utt.index): utt.gold_emotion
        for conv in conversations
        for utt in conv.utterances
        if utt.gold_emotion is not None
    }
    matrix = metrics_mod.emotion_confusion(gold, predictions)
    labelled = [(gold[p.key], p.predicted) for p in predictions if p.key in gold]
    weighted = metrics_mod.weighted_label_f1([g for g, _ in labelled], [p for _, p in labelled])
    report = {
        "weighted_label_f1": weighted,
        "neutral_leakage": metrics_mod.neutral_leakage(matrix),
        "labelled_utterances": len(labelled),
        "skipped_utterances": matrix.skipped,
    }
    return report, matrix


# ---------------------------------------------------------------------------
# Commands

def cmd_ingest(args: argparse.Namespace) -> int:
    config = _effective_config(args, ["input", "format", "out", "expect_counts"])
    _require(config, "input")
    out = _out_dir(config)
    parsed = corpus_mod.parse_corpus(
        _read_text(config["input"]), format=config.get("format") or "canonical-json", validate_corpus=False
    )
    violations = corpus_mod.validate(parsed)
    _write_json(out / "validation.json", [v.as_dict() for v in violations])
    _write_run_config(out, "ingest", config)
    if violations:
        print(f"{len(violations)} validation violation(s); see {out / 'validation.json'}")
        return EXIT_VALIDATION
    expect = config.get("expect_counts")
    if expect:
        if not isinstance(parsed, CorpusSplit):
            raise ConfigError("--expect-counts requires a split corpus")
        want = [int(x) for x in str(expect).split(",")]
        got = [len(parsed.train), len(parsed.dev), len(parsed.test)]
        if want != got:
            print(f"split sizes {got} do not match expected {want}")
            return EXIT_VALIDATION
    (out / "corpus.json").write_text(corpus_mod.serialize_corpus(parsed), encoding="utf-8")
    n = (
        f"{len(parsed.train)}/{len(parsed.dev)}/{len(parsed.test)} conversations"
        if isinstance(parsed, CorpusSplit)
        else f"{len(parsed)} conversations"
    )
    print(f"ingested {n} -> {out / 'corpus.json'}")
    return EXIT_OK


def cmd_synth_features(args: argparse.Namespace) -> int:
    config = _effective_config(args, ["corpus", "modality", "dim", "signal", "seed", "out"])
    _require(config, "corpus")
    out = _out_dir(config)
    parsed = _load_corpus_file(config["corpus"])
    conversations = (
        list(parsed.all_conversations()) if isinstance(parsed, CorpusSplit) else list(parsed)
    )
    whole = Corpus(tuple(conversations))
    signal = 0.8 if config.get("signal") is None else float(config["signal"])
    seed = int(config.get("seed") or 0)
    modality = config.get("modality") or "all"
    names = list(features_mod.MODALITIES) if modality == "all" else [modality]
    for name in names:
        dim = int(config["dim"]) if config.get("dim") else features_mod.DEFAULT_DIMS[name]
        table = features_mod.synth_features(whole, name, dim, signal, seed)
        features_mod.save_features(table, out / f"features_{name}.csv")
        print(f"wrote {len(table)} rows (dim {dim}) -> {out / f'features_{name}.csv'}")
    _write_run_config(out, "synth-features", {**config, "signal": signal, "seed": seed, "modality": modality})
    return EXIT_OK


_FUSION_KEYS = ["common_dim", "dropout_rate", "learning_rate", "epochs", "batch_size", "seed"]


def _fusion_config(config: dict) -> fusion_mod.FusionConfig:
    kwargs = {}
    for key in _FUSION_KEYS:
        if config.get(key) is not None:
            kwargs[key] = config[key]
    try:
        return fusion_mod.FusionConfig(**kwargs)
    except fusion_mod.FusionError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_train_mer(args: argparse.Namespace) -> int:
    keys = ["corpus", "features_text", "features_audio", "features_visual", "align_policy", "out"] + _FUSION_KEYS
    config = _effective_config(args, keys)
    _require(config, "corpus")
    parsed = _load_corpus_file(config["corpus"])
    if not isinstance(parsed, CorpusSplit):
        raise ConfigError("train-mer needs a split corpus file with train/dev/test")
    tables = _load_tables(config)
    policy = config.get("align_policy") or "strict"
    train_set = features_mod.align(Corpus(tuple(parsed.train)), tables, policy)
    dev_set = features_mod.align(Corpus(tuple(parsed.dev)), tables, policy)

    fusion_config = _fusion_config(config)
    model = fusion_mod.init_model(fusion_config, train_set.input_dims())
    model, history = fusion_mod.train(model, train_set, dev_set, fusion_config)

    out = _out_dir(config)
    fusion_mod.save_model(model, out / "checkpoint.json")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "train_loss", "dev_weighted_f1"])
    for row in history:
        writer.writerow([row.epoch, repr(row.train_loss), repr(row.dev_weighted_f1)])
    (out / "history.csv").write_text(buf.getvalue(), encoding="utf-8")

    dev_predictions = fusion_mod.predict(model, dev_set)
    report, matrix = _emotion_report(list(parsed.dev), dev_predictions)
    _write_json(out / "dev_report.json", report)
    (out / "dev_confusion.csv").write_text(matrix.to_csv(), encoding="utf-8")
    _write_run_config(out, "train-mer", config)
    print(
        f"trained {fusion_config.epochs} epochs; best dev weighted F1 "
        f"{max(h.dev_weighted_f1 for h in history):.4f} -> {out / 'checkpoint.json'}"
    )
    return EXIT_OK


def cmd_eval_mer(args: argparse.Namespace) -> int:
    keys = ["corpus", "split", "checkpoint", "features_text", "features_audio", "features_visual", "align_policy", "out"]
    config = _effective_config(args, keys)
    _require(config, "corpus", "checkpoint")
    if not Path(config["checkpoint"]).exists():
        raise FileNotFoundError(f"checkpoint not found: {config['checkpoint']}")
    model = fusion_mod.load_model(config["checkpoint"])
    conversations = _select_conversations(_load_corpus_file(config["corpus"]), config.get("split"))
    tables = _load_tables(config)
    dataset = features_mod.align(Corpus(tuple(conversations)), tables, config.get("align_policy") or "strict")
    predictions = fusion_mod.predict(model, dataset)

    out = _out_dir(config)
    (out / "predictions.jsonl").write_text(_predictions_to_jsonl(predictions), encoding="utf-8")
    report, matrix = _emotion_report(conversations, predictions)
    _write_json(out / "emotion_report.json", report)
    (out / "confusion.csv").write_text(matrix.to_csv(), encoding="utf-8")
    _write_run_config(out, "eval-mer", config)
    print(f"{len(predictions)} predictions; weighted label F1 {report['weighted_label_f1']:.4f}")
    return EXIT_OK


_EXTRACT_KEYS = [
    "corpus", "split", "predictions", "use_gold_emotions", "checkpoint",
    "features_text", "features_audio", "features_visual", "align_policy",
    "stub_fixture", "endpoint", "timeout", "max_in_flight", "max_failures",
    "window", "tau", "include_image", "heuristic", "out",
]


def _extraction_predictions(config: dict, conversations: list[Conversation]) -> list[EmotionPrediction]:
    if config.get("use_gold_emotions"):
        return cause_mod.gold_emotion_predictions(conversations)
    if config.get("predictions"):
        return _predictions_from_jsonl(_read_text(config["predictions"]))
    if config.get("checkpoint"):
        model = fusion_mod.load_model(config["checkpoint"])
        tables = _load_tables(config)
        dataset = features_mod.align(
            Corpus(tuple(conversations)), tables, config.get("align_policy") or "strict"
        )
        return fusion_mod.predict(model, dataset)
    raise ConfigError("need one of --use-gold-emotions, --predictions, or --checkpoint")


def _extraction_client(config: dict) -> cause_mod.GenerationClient:
    if config.get("stub_fixture"):
        return cause_mod.ScriptedStubClient.from_file(config["stub_fixture"])
    if config.get("endpoint"):
        return cause_mod.HttpGenerationClient(
            config["endpoint"], timeout=float(config.get("timeout") or 30.0)
        )
    raise ConfigError("need --stub-fixture or --endpoint for the generation client")


def _run_extraction(config: dict) -> tuple[cause_mod.ExtractionResult, list[Conversation]]:
    _require(config, "corpus")
    conversations = _select_conversations(_load_corpus_file(config["corpus"]), config.get("split"))
    predictions = _extraction_predictions(config, conversations)

    if config.get("heuristic"):
        pairs: dict[str, list[EmotionCausePair]] = {}
        targets = 0
        for conv in conversations:
            conv_pairs = cause_mod.heuristic_causes(
                conv,
                [p for p in predictions if p.key[0] == conv.id],
                config["heuristic"],
            )
            targets += len(conv_pairs)
            if conv_pairs:
                pairs[conv.id] = conv_pairs
        result = cause_mod.ExtractionResult(decisions=[], pairs=pairs, failures=0, targets=targets)
        return result, conversations

    client = _extraction_client(config)
    prompt_config = cause_mod.PromptConfig(
        window=5 if config.get("window") is None else int(config["window"]),
        include_image=bool(config.get("include_image")),
    )
    result = cause_mod.extract_causes(
        conversations,
        predictions,
        client,
        prompt_config,
        tau=cause_mod.DEFAULT_TAU if config.get("tau") is None else float(config["tau"]),
        max_in_flight=int(config.get("max_in_flight") or 1),
    )
    return result, conversations


def _write_extraction(out: Path, result: cause_mod.ExtractionResult) -> None:
    (out / "decisions.jsonl").write_text(
        "".join(json.dumps(d.as_dict(), ensure_ascii=False, sort_keys=True) + "\n" for d in result.decisions),
        encoding="utf-8",
    )
    _write_json(out / "pairs.json", _pairs_to_jsonable(result.pairs))
    _write_json(
        out / "extraction_summary.json",
        {
            "targets": result.targets,
            "failures": result.failures,
            "pairs": sum(len(v) for v in result.pairs.values()),
        },
    )


def cmd_extract_causes(args: argparse.Namespace) -> int:
    config = _effective_config(args, _EXTRACT_KEYS)
    result, _ = _run_extraction(config)
    out = _out_dir(config)
    _write_extraction(out, result)
    _write_run_config(out, "extract-causes", config)
    print(
        f"{result.targets} targets, {sum(len(v) for v in result.pairs.values())} pairs, "
        f"{result.failures} client failure(s)"
    )
    if config.get("max_failures") is not None and result.failures > int(config["max_failures"]):
        raise ClientFailureThreshold(
            f"{result.failures} failures exceed --max-failures {config['max_failures']}"
        )
    return EXIT_OK


def cmd_eval_pairs(args: argparse.Namespace) -> int:
    config = _effective_config(args, ["corpus", "split", "pairs", "out"])
    _require(config, "corpus", "pairs")
    conversations = _select_conversations(_load_corpus_file(config["corpus"]), config.get("split"))
    gold = corpus_mod.gold_pairs_by_conversation(conversations)
    pred = _pairs_from_jsonable(json.loads(_read_text(config["pairs"])))
    report = metrics_mod.score_pairs(gold, pred)
    out = _out_dir(config)
    _write_json(out / "metrics_report.json", report.as_dict())
    _write_run_config(out, "eval-pairs", config)
    print(f"weighted F1 {report.weighted_f1:.4f} (macro {report.macro_f1:.4f}) over {report.total_gold} gold pairs")
    return EXIT_OK


def cmd_ablate_window(args: argparse.Namespace) -> int:
    config = _effective_config(args, _EXTRACT_KEYS + ["windows"])
    _require(config, "windows")
    windows = [int(w) for w in str(config["windows"]).split(",")]
    if len(set(windows)) != len(windows):
        raise ConfigError(f"duplicate window values: {windows}")
    out = _out_dir(config)
    results = []
    for w in windows:
        sub_config = {**config, "window": w}
        result, conversations = _run_extraction(sub_config)
        sub_out = out / f"w{w}"
        sub_out.mkdir(parents=True, exist_ok=True)
        _write_extraction(sub_out, result)
        gold = corpus_mod.gold_pairs_by_conversation(conversations)
        results.append((w, metrics_mod.score_pairs(gold, result.pairs)))
    curve = metrics_mod.ablation_curve(results)
    (out / "ablation.csv").write_text(metrics_mod.ablation_curve_csv(curve), encoding="utf-8")
    _write_run_config(out, "ablate-window", config)
    best_w, best_f1 = max(curve, key=lambda row: row[1])
    print(f"best window {best_w} (weighted F1 {best_f1:.4f}); curve -> {out / 'ablation.csv'}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    config = _effective_config(args, ["corpus", "split", "pairs", "predictions", "worst", "out"])
    _require(config, "corpus", "pairs")
    conversations = _select_conversations(_load_corpus_file(config["corpus"]), config.get("split"))
    if not conversations:
        raise corpus_mod.ValidationError(
            [corpus_mod.Violation("", "empty-corpus", "no conversations to report on")]
        )
    gold = corpus_mod.gold_pairs_by_conversation(conversations)
    pred = _pairs_from_jsonable(json.loads(_read_text(config["pairs"])))
    report = metrics_mod.score_pairs(gold, pred)
    breakdown = metrics_mod.conversation_breakdown(gold, pred)
    worst = int(config.get("worst") or 5)

    lines = ["Emotion-cause pair evaluation", "=" * 29, ""]
    lines.append(f"gold pairs:      {report.total_gold}")
    lines.append(f"predicted pairs: {report.total_pred}")
    lines.append(f"weighted F1:     {report.weighted_f1:.4f}")
    lines.append(f"macro F1:        {report.macro_f1:.4f}")
    lines.append("")
    lines.append(f"{'category':<10} {'n':>4} {'tp':>4} {'fp':>4} {'fn':>4} {'prec':>7} {'recall':>7} {'f1':>7}")
    for label in corpus_mod.SCORED_LABELS:
        s = report.per_category[label]
        lines.append(
            f"{label.render():<10} {s.n:>4} {s.tp:>4} {s.fp:>4} {s.fn:>4} "
            f"{s.precision:>7.4f} {s.recall:>7.4f} {s.f1:>7.4f}"
        )

    if config.get("predictions"):
        predictions = _predictions_from_jsonl(_read_text(config["predictions"]))
        emo_report, matrix = _emotion_report(conversations, predictions)
        lines.append("")
        lines.append("Emotion recognition")
        lines.append("-" * 19)
        lines.append(f"weighted label F1: {emo_report['weighted_label_f1']:.4f}")
        lines.append(f"neutral leakage:   {emo_report['neutral_leakage']:.4f}")
        lines.append("confusion matrix (rows gold, columns predicted):")
        lines.extend(matrix.to_csv().rstrip("\n").split("\n"))

    mismatched = [row for row in breakdown if row.error_count > 0][:worst]
    lines.append("")
    lines.append(f"Mismatched conversations (worst {worst})")
    lines.append("-" * 33)
    if not mismatched:
        lines.append("none: every predicted pair matches a gold pair")
    for row in mismatched:
        lines.append(f"{row.conversation_id}: {row.error_count} error(s)")
        for pair in row.missed:
            lines.append(f"  missed-cause:  {pair.as_list()}")
        for pair in row.spurious:
            lines.append(f"  spurious-pair: {pair.as_list()}")
    text = "\n".join(lines) + "\n"

    out = _out_dir(config)
    (out / "report.txt").write_text(text, encoding="utf-8")
    _write_json(out / "metrics_report.json", report.as_dict())
    _write_run_config(out, "report", config)
    print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("--out", help="output directory")


def _add_feature_flags(sub: argparse.ArgumentParser) -> None:
    for modality in features_mod.MODALITIES:
        sub.add_argument(f"--features-{modality}", dest=f"features_{modality}", help=f"{modality} interchange file")
    sub.add_argument("--align-policy", dest="align_policy", choices=["strict", "mask-missing"])


def _add_extract_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--corpus")
    sub.add_argument("--split", choices=["train", "dev", "test", "all"])
    sub.add_argument("--predictions", help="predictions JSONL from eval-mer")
    sub.add_argument("--use-gold-emotions", dest="use_gold_emotions", action="store_const", const=True, default=None,
                     help="target gold non-neutral utterances instead of model predictions")
    sub.add_argument("--checkpoint")
    _add_feature_flags(sub)
    sub.add_argument("--stub-fixture", dest="stub_fixture", help="JSON map conversation_id:index -> response")
    sub.add_argument("--endpoint", help="base URL of a /generate server")
    sub.add_argument("--timeout", type=float)
    sub.add_argument("--max-in-flight", dest="max_in_flight", type=int)
    sub.add_argument("--max-failures", dest="max_failures", type=int,
                     help="exit nonzero when client failures exceed this count")
    sub.add_argument("--window", type=int)
    sub.add_argument("--tau", type=float)
    sub.add_argument("--include-image", dest="include_image", action="store_const", const=True, default=None)
    sub.add_argument("--heuristic", choices=["self", "previous"],
                     help="baseline mode: pick the cause by rule instead of calling a client")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mecpe", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("ingest", help="parse, validate, and canonicalize a corpus")
    sub.add_argument("--input")
    sub.add_argument("--format", choices=["canonical-json", "ecf-json"])
    sub.add_argument("--expect-counts", dest="expect_counts", help="expected train,dev,test sizes")
    _add_common(sub)
    sub.set_defaults(handler=cmd_ingest)

    sub = commands.add_parser("synth-features", help="generate synthetic per-modality features")
    sub.add_argument("--corpus")
    sub.add_argument("--modality", choices=list(features_mod.MODALITIES) + ["all"])
    sub.add_argument("--dim", type=int)
    sub.add_argument("--signal", type=float)
    sub.add_argument("--seed", type=int)
    _add_common(sub)
    sub.set_defaults(handler=cmd_synth_features)

    sub = commands.add_parser("train-mer", help="train the attention-fusion emotion recognizer")
    sub.add_argument("--corpus")
    _add_feature_flags(sub)
    sub.add_argument("--common-dim", dest="common_dim", type=int)
    sub.add_argument("--dropout-rate", dest="dropout_rate", type=float)
    sub.add_argument("--learning-rate", dest="learning_rate", type=float)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--seed", type=int)
    _add_common(sub)
    sub.set_defaults(handler=cmd_train_mer)

    sub = commands.add_parser("eval-mer", help="predict emotions and report recognition quality")
    sub.add_argument("--corpus")
    sub.add_argument("--split", choices=["train", "dev", "test", "all"])
    sub.add_argument("--checkpoint")
    _add_feature_flags(sub)
    _add_common(sub)
    sub.set_defaults(handler=cmd_eval_mer)

    sub = commands.add_parser("extract-causes", help="prompt, generate, match, and assemble pairs")
    _add_extract_flags(sub)
    _add_common(sub)
    sub.set_defaults(handler=cmd_extract_causes)

    sub = commands.add_parser("eval-pairs", help="score predicted pairs against gold pairs")
    sub.add_argument("--corpus")
    sub.add_argument("--split", choices=["train", "dev", "test", "all"])
    sub.add_argument("--pairs", help="pairs JSON written by extract-causes")
    _add_common(sub)
    sub.set_defaults(handler=cmd_eval_pairs)

    sub = commands.add_parser("ablate-window", help="sweep the history window and emit the F1 curve")
    _add_extract_flags(sub)
    sub.add_argument("--windows", help="comma-separated window sizes, e.g. 1,3,5,7,9")
    _add_common(sub)
    sub.set_defaults(handler=cmd_ablate_window)

    sub = commands.add_parser("report", help="human-readable evaluation and error analysis")
    sub.add_argument("--corpus")
    sub.add_argument("--split", choices=["train", "dev", "test", "all"])
    sub.add_argument("--pairs")
    sub.add_argument("--predictions")
    sub.add_argument("--worst", type=int, help="how many mismatched conversations to list")
    _add_common(sub)
    sub.set_defaults(handler=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except fusion_mod.TrainingDivergenceError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except (corpus_mod.CorpusError, features_mod.FeatureError, metrics_mod.MetricsError,
            cause_mod.CauseError, fusion_mod.FusionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ClientFailureThreshold as exc:
        print(f"client failures: {exc}", file=sys.stderr)
        return EXIT_CLIENT


if __name__ == "__main__":
    raise SystemExit(main())
