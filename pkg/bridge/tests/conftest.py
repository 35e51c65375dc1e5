"""Shared fixtures: a tiny random seq2seq checkpoint, a generated corpus,
training pairs produced by the toolkit CLI, and one finished training run."""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
from contextlib import contextmanager
from pathlib import Path

import pytest
import torch

from absabridge import BridgeConfig, train

POLARITIES = ("positive", "negative", "neutral")
CORPUS_SIZE = 50


def write_corpus(path: Path, count: int = CORPUS_SIZE) -> Path:
    """Write a review corpus with one opinion per sentence."""
    reviews = []
    for i in range(count):
        polarity = POLARITIES[i % len(POLARITIES)]
        reviews.append(
            f'<Review rid="{i}"><sentences><sentence id="{i}:0">'
            f"<text>The food was sample {i}.</text><Opinions>"
            f'<Opinion target="food" category="FOOD#QUALITY" polarity="{polarity}" '
            f'from="4" to="8"/></Opinions></sentence></sentences></Review>'
        )
    path.write_text("<Reviews>" + "".join(reviews) + "</Reviews>", encoding="utf-8")
    return path


def run_scorer_cli(*args: str) -> subprocess.CompletedProcess:
    executable = shutil.which("absagen")
    assert executable, "the absagen CLI must be installed to run the bridge tests"
    return subprocess.run([executable, *args], capture_output=True, text=True)


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> Path:
    """A byte-level tokenizer plus a small randomly initialized seq2seq model."""
    from transformers import ByT5Tokenizer, T5Config, T5ForConditionalGeneration

    directory = tmp_path_factory.mktemp("tiny-model")
    tokenizer = ByT5Tokenizer()
    config = T5Config(
        vocab_size=len(tokenizer),
        d_model=32,
        d_kv=8,
        d_ff=64,
        num_layers=2,
        num_decoder_layers=2,
        num_heads=2,
        pad_token_id=tokenizer.pad_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.pad_token_id,
    )
    torch.manual_seed(20260816)
    T5ForConditionalGeneration(config).save_pretrained(directory)
    tokenizer.save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory) -> Path:
    return write_corpus(tmp_path_factory.mktemp("corpus") / "gold.xml")


@pytest.fixture(scope="session")
def pairs_file(tmp_path_factory, corpus_file) -> Path:
    """Training pairs produced by the toolkit's prepare command."""
    out = tmp_path_factory.mktemp("pairs") / "tasd.jsonl"
    completed = run_scorer_cli(
        "prepare",
        "--dataset",
        "se16",
        "--gold",
        str(corpus_file),
        "--task",
        "tasd",
        "--format",
        "phrase",
        "--out",
        str(out),
    )
    assert completed.returncode == 0, completed.stderr
    assert len(out.read_text(encoding="utf-8").splitlines()) == CORPUS_SIZE
    return out


@pytest.fixture(scope="session")
def tiny_config(tiny_model_dir) -> BridgeConfig:
    return BridgeConfig(
        model=str(tiny_model_dir),
        max_input_length=64,
        train_batch_size=16,
        eval_batch_size=32,
        learning_rate=1e-3,
        max_epochs=2,
        seeds=(1,),
        max_target_length=48,
        num_beams=1,
    )


@pytest.fixture(scope="session")
def trained_run(tiny_config, pairs_file, tmp_path_factory):
    """One finished two-epoch run without dev selection; reused across tests."""
    out_dir = tmp_path_factory.mktemp("runs")
    results = train(tiny_config, pairs_file, out_dir)
    return results, out_dir


_AUDIT = {"installed": False, "active": False, "paths": []}


def _audit_hook(event: str, args: tuple) -> None:
    if not _AUDIT["active"] or event != "open":
        return
    path = args[0]
    try:
        path = os.fspath(path)
    except TypeError:
        return
    if isinstance(path, bytes):
        path = path.decode("utf-8", "replace")
    _AUDIT["paths"].append(path)


@contextmanager
def record_file_opens():
    """Collect every path this process opens inside the with-block."""
    if not _AUDIT["installed"]:
        sys.addaudithook(_audit_hook)
        _AUDIT["installed"] = True
    _AUDIT["paths"] = []
    _AUDIT["active"] = True
    try:
        yield _AUDIT["paths"]
    finally:
        _AUDIT["active"] = False
