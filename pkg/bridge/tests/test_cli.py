"""Command-line behaviour: happy paths and exit codes."""

from __future__ import annotations

import json

import pytest

from absabridge import cli
from conftest import CORPUS_SIZE


class TestEndToEnd:
    def test_train_then_generate(
        self, tiny_model_dir, pairs_file, tmp_path, capsys
    ):
        out_dir = tmp_path / "runs"
        code = cli.main(
            [
                "train",
                "--pairs",
                str(pairs_file),
                "--out",
                str(out_dir),
                "--model",
                str(tiny_model_dir),
                "--epochs",
                "1",
                "--seeds",
                "1",
                "--batch-size",
                "16",
                "--max-input-length",
                "64",
                "--max-target-length",
                "48",
                "--learning-rate",
                "1e-3",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "seed 1: kept epoch 1" in out
        assert (out_dir / "seed-1" / "best").is_dir()

        preds = tmp_path / "preds.jsonl"
        code = cli.main(
            [
                "generate",
                "--model",
                str(out_dir / "seed-1" / "best"),
                "--inputs",
                str(pairs_file),
                "--out",
                str(preds),
                "--max-input-length",
                "64",
                "--max-target-length",
                "48",
            ]
        )
        assert code == 0
        assert f"wrote {CORPUS_SIZE} predictions" in capsys.readouterr().out
        lines = preds.read_text("utf-8").splitlines()
        assert len(lines) == CORPUS_SIZE
        assert set(json.loads(lines[0])) == {"id", "output"}


class TestUsageErrors:
    def test_no_subcommand_exits_1(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main([])
        assert excinfo.value.code == 1

    def test_unknown_flag_exits_1(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["train", "--pairs", "p", "--out", "o", "--frobnicate"])
        assert excinfo.value.code == 1

    def test_missing_required_flag_exits_1(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["train", "--pairs", "p.jsonl"])
        assert excinfo.value.code == 1

    def test_unparsable_seeds_exit_1(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["train", "--pairs", "p", "--out", "o", "--seeds", "1,x"])
        assert excinfo.value.code == 1

    def test_partial_dev_flags_exit_1(self, pairs_file, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(
                [
                    "train",
                    "--pairs",
                    str(pairs_file),
                    "--out",
                    str(tmp_path),
                    "--dev-pairs",
                    str(pairs_file),
                ]
            )
        assert excinfo.value.code == 1


class TestConfigErrors:
    def test_zero_epochs_exit_1(self, pairs_file, tmp_path, capsys):
        code = cli.main(
            ["train", "--pairs", str(pairs_file), "--out", str(tmp_path), "--epochs", "0"]
        )
        assert code == 1
        assert "max_epochs" in capsys.readouterr().err

    def test_duplicate_seeds_exit_1(self, pairs_file, tmp_path, capsys):
        code = cli.main(
            ["train", "--pairs", str(pairs_file), "--out", str(tmp_path), "--seeds", "2,2"]
        )
        assert code == 1
        assert "seeds" in capsys.readouterr().err

    def test_unloadable_model_exits_1(self, pairs_file, tmp_path, capsys):
        code = cli.main(
            [
                "generate",
                "--model",
                str(tmp_path / "missing-model"),
                "--inputs",
                str(pairs_file),
                "--out",
                str(tmp_path / "preds.jsonl"),
            ]
        )
        assert code == 1
        assert "cannot load model" in capsys.readouterr().err


class TestDataErrors:
    def test_missing_pairs_file_exits_2(self, tiny_model_dir, tmp_path, capsys):
        code = cli.main(
            [
                "train",
                "--pairs",
                str(tmp_path / "absent.jsonl"),
                "--out",
                str(tmp_path / "runs"),
                "--model",
                str(tiny_model_dir),
            ]
        )
        assert code == 2
        assert "cannot read" in capsys.readouterr().err

    def test_malformed_pairs_line_exits_2_with_line_number(
        self, tiny_model_dir, tmp_path, capsys
    ):
        pairs = tmp_path / "pairs.jsonl"
        pairs.write_text(
            '{"id": "a", "input": "x", "target": "y"}\nnot json\n', encoding="utf-8"
        )
        code = cli.main(
            [
                "train",
                "--pairs",
                str(pairs),
                "--out",
                str(tmp_path / "runs"),
                "--model",
                str(tiny_model_dir),
            ]
        )
        assert code == 2
        assert ":2:" in capsys.readouterr().err

    def test_failing_dev_scorer_exits_2(
        self, tiny_model_dir, pairs_file, tmp_path, capsys
    ):
        code = cli.main(
            [
                "train",
                "--pairs",
                str(pairs_file),
                "--out",
                str(tmp_path / "runs"),
                "--model",
                str(tiny_model_dir),
                "--epochs",
                "1",
                "--seeds",
                "1",
                "--max-input-length",
                "64",
                "--max-target-length",
                "48",
                "--dev-pairs",
                str(pairs_file),
                "--dev-gold",
                str(tmp_path / "no-gold.xml"),
                "--dataset",
                "se16",
                "--task",
                "tasd",
            ]
        )
        assert code == 2
        assert "scorer exited" in capsys.readouterr().err
