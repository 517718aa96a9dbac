import json
from pathlib import Path

import pytest

from mecpe import cli
from mecpe.corpus import Corpus, CorpusSplit, EmotionLabel, parse_corpus, serialize_corpus
from mecpe.features import load_features

from conftest import balanced_corpus, oracle_fixture

JOY = EmotionLabel.JOY


def run(*argv) -> int:
    return cli.main([str(a) for a in argv])


@pytest.fixture
def split_file(tmp_path) -> Path:
    split = CorpusSplit(
        train=balanced_corpus("tr", 6),
        dev=balanced_corpus("dv", 2),
        test=balanced_corpus("te", 2),
    )
    path = tmp_path / "split.json"
    path.write_text(serialize_corpus(split), encoding="utf-8")
    return path


@pytest.fixture
def features_dir(tmp_path, split_file) -> Path:
    out = tmp_path / "features"
    code = run(
        "synth-features", "--corpus", split_file, "--signal", "1.0", "--seed", "3",
        "--dim", "16", "--out", out,
    )
    assert code == 0
    return out


def feature_flags(features_dir: Path) -> list[str]:
    flags = []
    for modality in ("text", "audio", "visual"):
        flags += [f"--features-{modality}", str(features_dir / f"features_{modality}.csv")]
    return flags


@pytest.fixture
def checkpoint_dir(tmp_path, split_file, features_dir) -> Path:
    out = tmp_path / "train"
    code = run(
        "train-mer", "--corpus", split_file, *feature_flags(features_dir),
        "--common-dim", "12", "--epochs", "8", "--learning-rate", "0.2",
        "--batch-size", "16", "--seed", "1", "--out", out,
    )
    assert code == 0
    return out


class TestIngest:
    def test_canonical_round_trip(self, tmp_path, small_corpus):
        src = tmp_path / "in.json"
        src.write_text(serialize_corpus(small_corpus), encoding="utf-8")
        out = tmp_path / "out"
        assert run("ingest", "--input", src, "--out", out) == 0
        assert json.loads((out / "validation.json").read_text()) == []
        reparsed = parse_corpus((out / "corpus.json").read_text())
        assert reparsed == small_corpus
        assert (out / "run_config.json").exists()

    def test_missing_input_is_io_error(self, tmp_path):
        assert run("ingest", "--input", tmp_path / "nope.json", "--out", tmp_path / "o") == cli.EXIT_IO

    def test_invalid_corpus_writes_report_and_fails(self, tmp_path):
        bad = [{
            "id": "c1",
            "utterances": [{"index": 1, "speaker": "A", "text": "hi"}],
            "pairs": [[9, "joy", 1]],
        }]
        src = tmp_path / "bad.json"
        src.write_text(json.dumps(bad))
        out = tmp_path / "out"
        assert run("ingest", "--input", src, "--out", out) == cli.EXIT_VALIDATION
        report = json.loads((out / "validation.json").read_text())
        assert report[0]["rule"] == "pair-ref"
        assert not (out / "corpus.json").exists()

    def test_ecf_format_flag(self, tmp_path):
        ecf = [{
            "conversation_ID": 3,
            "conversation": [
                {"utterance_ID": 1, "text": "Cat.", "speaker": "Emma", "emotion": "neutral"},
                {"utterance_ID": 2, "text": "I love you too.", "speaker": "Ross", "emotion": "joy"},
            ],
            "emotion-cause_pairs": [["2_joy", "1"]],
        }]
        src = tmp_path / "ecf.json"
        src.write_text(json.dumps(ecf))
        out = tmp_path / "out"
        assert run("ingest", "--input", src, "--format", "ecf-json", "--out", out) == 0


class TestSynthFeatures:
    def test_writes_three_loadable_tables(self, features_dir):
        for modality in ("text", "audio", "visual"):
            table = load_features(features_dir / f"features_{modality}.csv", modality)
            assert table.dim == 16
            assert len(table) == 70  # train 42 + dev 14 + test 14
        assert (features_dir / "run_config.json").exists()

    def test_missing_corpus_is_io_error(self, tmp_path):
        assert (
            run("synth-features", "--corpus", tmp_path / "nope.json", "--out", tmp_path / "o")
            == cli.EXIT_IO
        )


class TestTrainMer:
    def test_writes_checkpoint_history_and_dev_report(self, checkpoint_dir):
        assert (checkpoint_dir / "checkpoint.json").exists()
        history = (checkpoint_dir / "history.csv").read_text().splitlines()
        assert history[0] == "epoch,train_loss,dev_weighted_f1"
        assert len(history) == 1 + 8
        report = json.loads((checkpoint_dir / "dev_report.json").read_text())
        assert 0.0 <= report["weighted_label_f1"] <= 1.0
        assert (checkpoint_dir / "dev_confusion.csv").exists()

    def test_missing_feature_file_is_io_error_without_partial_outputs(self, tmp_path, split_file):
        out = tmp_path / "train2"
        code = run(
            "train-mer", "--corpus", split_file,
            "--features-text", tmp_path / "missing.csv",
            "--epochs", "2", "--out", out,
        )
        assert code == cli.EXIT_IO
        assert not (out / "checkpoint.json").exists()

    def test_rerun_same_seed_bit_identical_history(self, tmp_path, split_file, features_dir):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / f"train_{name}"
            code = run(
                "train-mer", "--corpus", split_file, *feature_flags(features_dir),
                "--common-dim", "10", "--epochs", "3", "--seed", "7", "--out", out,
            )
            assert code == 0
            outs.append(out)
        assert (outs[0] / "history.csv").read_bytes() == (outs[1] / "history.csv").read_bytes()
        assert (outs[0] / "checkpoint.json").read_bytes() == (outs[1] / "checkpoint.json").read_bytes()

    def test_single_corpus_rejected(self, tmp_path, features_dir):
        single = tmp_path / "single.json"
        single.write_text(serialize_corpus(balanced_corpus("x", 2)), encoding="utf-8")
        code = run("train-mer", "--corpus", single, *feature_flags(features_dir), "--out", tmp_path / "t")
        assert code == cli.EXIT_CONFIG


class TestEvalMer:
    def test_writes_predictions_and_confusion(self, tmp_path, split_file, features_dir, checkpoint_dir):
        out = tmp_path / "eval"
        code = run(
            "eval-mer", "--corpus", split_file, "--split", "test",
            "--checkpoint", checkpoint_dir / "checkpoint.json",
            *feature_flags(features_dir), "--out", out,
        )
        assert code == 0
        lines = (out / "predictions.jsonl").read_text().splitlines()
        assert len(lines) == 14
        record = json.loads(lines[0])
        assert {"conversation_id", "utterance_index", "predicted", "probabilities", "attention"} <= set(record)
        assert (out / "confusion.csv").exists()
        report = json.loads((out / "emotion_report.json").read_text())
        assert report["labelled_utterances"] == 14


def write_oracle_inputs(tmp_path, future_cause=False):
    corpus, responses = oracle_fixture(future_cause)
    corpus_path = tmp_path / "corpus.json"
    corpus_path.write_text(serialize_corpus(corpus), encoding="utf-8")
    stub_path = tmp_path / "stub.json"
    stub_path.write_text(json.dumps(responses), encoding="utf-8")
    return corpus_path, stub_path


class TestExtractCauses:
    def test_gold_mode_with_oracle_stub_reaches_perfect_f1(self, tmp_path):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        out = tmp_path / "extract"
        code = run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--stub-fixture", stub_path, "--window", "5", "--out", out,
        )
        assert code == 0
        summary = json.loads((out / "extraction_summary.json").read_text())
        assert summary["failures"] == 0
        assert summary["pairs"] == summary["targets"] == 3

        eval_out = tmp_path / "pairs_eval"
        code = run(
            "eval-pairs", "--corpus", corpus_path, "--pairs", out / "pairs.json",
            "--out", eval_out,
        )
        assert code == 0
        report = json.loads((eval_out / "metrics_report.json").read_text())
        assert report["weighted_f1"] == 1.0

    def test_empty_predictions_file_yields_empty_pairs(self, tmp_path):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "extract_empty"
        code = run(
            "extract-causes", "--corpus", corpus_path, "--predictions", empty,
            "--stub-fixture", stub_path, "--out", out,
        )
        assert code == 0
        assert json.loads((out / "pairs.json").read_text()) == {}

    def test_stub_missing_half_targets_still_completes(self, tmp_path):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        responses = json.loads(stub_path.read_text())
        partial = dict(list(responses.items())[:1])
        stub_path.write_text(json.dumps(partial))
        out = tmp_path / "extract_partial"
        code = run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--stub-fixture", stub_path, "--out", out,
        )
        assert code == 0
        summary = json.loads((out / "extraction_summary.json").read_text())
        assert summary["pairs"] <= summary["targets"]
        assert summary["pairs"] == 1

    def test_requires_a_client_source(self, tmp_path):
        corpus_path, _ = write_oracle_inputs(tmp_path)
        code = run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--out", tmp_path / "x",
        )
        assert code == cli.EXIT_CONFIG

    def test_heuristic_baseline_needs_no_client(self, tmp_path):
        corpus_path, _ = write_oracle_inputs(tmp_path)
        out = tmp_path / "heuristic"
        code = run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--heuristic", "previous", "--out", out,
        )
        assert code == 0
        pairs = json.loads((out / "pairs.json").read_text())
        # oracle fixture targets: (o1, 6), (o2, 5), (o3, 4) -> previous index
        assert pairs == {
            "o1": [[6, "joy", 5]],
            "o2": [[5, "anger", 4]],
            "o3": [[4, "surprise", 3]],
        }

    def test_max_failures_threshold_exit_code(self, tmp_path):
        corpus_path, _ = write_oracle_inputs(tmp_path)
        out = tmp_path / "extract_fail"
        code = run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--endpoint", "http://127.0.0.1:1", "--timeout", "0.2",
            "--max-failures", "0", "--out", out,
        )
        assert code == cli.EXIT_CLIENT
        summary = json.loads((out / "extraction_summary.json").read_text())
        assert summary["failures"] == summary["targets"] == 3


class TestAblateWindow:
    def test_singleton_window_list(self, tmp_path):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        out = tmp_path / "ablate"
        code = run(
            "ablate-window", "--corpus", corpus_path, "--use-gold-emotions",
            "--stub-fixture", stub_path, "--windows", "5", "--out", out,
        )
        assert code == 0
        lines = (out / "ablation.csv").read_text().splitlines()
        assert lines[0] == "w,weighted_f1"
        assert len(lines) == 2
        assert (out / "w5" / "pairs.json").exists()

    def test_duplicate_windows_rejected(self, tmp_path):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        code = run(
            "ablate-window", "--corpus", corpus_path, "--use-gold-emotions",
            "--stub-fixture", stub_path, "--windows", "3,3", "--out", tmp_path / "x",
        )
        assert code == cli.EXIT_CONFIG


class TestReport:
    def test_perfect_fixture_reports_full_marks(self, tmp_path, capsys):
        corpus_path, stub_path = write_oracle_inputs(tmp_path)
        extract_out = tmp_path / "extract"
        assert run(
            "extract-causes", "--corpus", corpus_path, "--use-gold-emotions",
            "--stub-fixture", stub_path, "--out", extract_out,
        ) == 0
        out = tmp_path / "report"
        code = run(
            "report", "--corpus", corpus_path, "--pairs", extract_out / "pairs.json",
            "--out", out,
        )
        assert code == 0
        text = (out / "report.txt").read_text()
        assert "weighted F1:     1.0000" in text
        assert "none: every predicted pair matches a gold pair" in text

    def test_table3_style_fixture_lists_misses_and_spurious(self, tmp_path, table3_corpus, table3_pred_pairs):
        corpus_path = tmp_path / "corpus.json"
        corpus_path.write_text(serialize_corpus(table3_corpus), encoding="utf-8")
        pairs_path = tmp_path / "pairs.json"
        pairs_path.write_text(json.dumps(
            {cid: [p.as_list() for p in plist] for cid, plist in table3_pred_pairs.items()}
        ))
        out = tmp_path / "report"
        assert run("report", "--corpus", corpus_path, "--pairs", pairs_path, "--out", out) == 0
        text = (out / "report.txt").read_text()
        s2_block = text[text.index("s2:"):]
        assert s2_block.splitlines()[1].strip().startswith("missed-cause")
        s4_block = text[text.index("s4:"):]
        assert s4_block.splitlines()[1].strip().startswith("spurious-pair")

    def test_empty_corpus_is_validation_error(self, tmp_path):
        corpus_path = tmp_path / "empty.json"
        corpus_path.write_text("[]")
        pairs_path = tmp_path / "pairs.json"
        pairs_path.write_text("{}")
        assert run("report", "--corpus", corpus_path, "--pairs", pairs_path, "--out", tmp_path / "o") == cli.EXIT_VALIDATION


class TestConfigFile:
    def test_flags_override_config_file(self, tmp_path, small_corpus):
        src = tmp_path / "in.json"
        src.write_text(serialize_corpus(small_corpus), encoding="utf-8")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"input": str(src), "out": str(tmp_path / "from_config")}))
        override_out = tmp_path / "from_flag"
        assert run("ingest", "--config", config, "--out", override_out) == 0
        assert (override_out / "corpus.json").exists()
        assert not (tmp_path / "from_config").exists()

    def test_run_config_written_beside_outputs(self, tmp_path, small_corpus):
        src = tmp_path / "in.json"
        src.write_text(serialize_corpus(small_corpus), encoding="utf-8")
        out = tmp_path / "out"
        assert run("ingest", "--input", src, "--out", out) == 0
        effective = json.loads((out / "run_config.json").read_text())
        assert effective["command"] == "ingest"
        assert effective["input"] == str(src)

    def test_missing_required_setting_is_config_error(self, tmp_path):
        assert run("ingest", "--out", tmp_path / "o") == cli.EXIT_CONFIG
