"""Fine-tuning and generation loops around a seq2seq checkpoint."""

from __future__ import annotations

import json
import random
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import torch

from .config import BridgeConfig, DevSelection
from .data import Pair, read_inputs, read_pairs, write_predictions
from .errors import BridgeConfigError, ScoringError

Logger = Callable[[str], None]

BEST_CHECKPOINT = "best"
HISTORY_FILE = "history.jsonl"


@dataclass(frozen=True)
class SeedResult:
    """Outcome of one seeded training run."""

    seed: int
    run_dir: str
    best_epoch: int
    best_dev_micro_f1: float | None


def _device() -> torch.device:
    return torch.device("cuda" if torch.cuda.is_available() else "cpu")


def _load_model(name_or_path: str, device: torch.device):
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(name_or_path)
        model = AutoModelForSeq2SeqLM.from_pretrained(name_or_path)
    except (OSError, ValueError) as exc:
        raise BridgeConfigError(f"cannot load model {name_or_path!r}: {exc}") from exc
    return tokenizer, model.to(device)


def _batches(count: int, size: int) -> list[range]:
    return [range(start, min(start + size, count)) for start in range(0, count, size)]


def _encode_inputs(tokenizer, texts: Sequence[str], max_length: int, device: torch.device):
    return tokenizer(
        list(texts),
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    ).to(device)


def _generate_rows(
    model,
    tokenizer,
    config: BridgeConfig,
    rows: Sequence[tuple[str, str]],
    device: torch.device,
) -> list[tuple[str, str]]:
    was_training = model.training
    model.eval()
    predictions: list[tuple[str, str]] = []
    with torch.no_grad():
        for batch in _batches(len(rows), config.eval_batch_size):
            chunk = [rows[i] for i in batch]
            encoded = _encode_inputs(
                tokenizer, [text for _, text in chunk], config.max_input_length, device
            )
            output_ids = model.generate(
                input_ids=encoded.input_ids,
                attention_mask=encoded.attention_mask,
                max_new_tokens=config.max_target_length,
                num_beams=config.num_beams,
                do_sample=False,
            )
            texts = tokenizer.batch_decode(output_ids, skip_special_tokens=True)
            predictions.extend((rid, text) for (rid, _), text in zip(chunk, texts))
    if was_training:
        model.train()
    return predictions


def _dev_micro_f1(dev: DevSelection, pred_path: Path, report_path: Path) -> float:
    command = [
        *dev.scorer,
        "score",
        "--dataset",
        dev.dataset,
        "--gold",
        str(dev.gold),
        "--task",
        dev.task,
        "--format",
        dev.format,
        "--mode",
        dev.mode,
        "--pred",
        str(pred_path),
        "--report",
        str(report_path),
        "--no-figure",
    ]
    try:
        completed = subprocess.run(command, capture_output=True, text=True)
    except OSError as exc:
        raise ScoringError(f"cannot run scorer {dev.scorer[0]!r}: {exc}") from exc
    if completed.returncode != 0:
        detail = completed.stderr.strip() or completed.stdout.strip()
        raise ScoringError(
            f"scorer exited with {completed.returncode}: {detail or 'no output'}"
        )
    try:
        report = json.loads(report_path.read_text(encoding="utf-8"))
        f1 = report["micro"]["f1"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ScoringError(f"cannot read micro F1 from {report_path}: {exc}") from exc
    if not isinstance(f1, (int, float)):
        raise ScoringError(f"micro F1 in {report_path} is not a number: {f1!r}")
    return float(f1)


def _save_checkpoint(model, tokenizer, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(directory)
    tokenizer.save_pretrained(directory)


def _train_one_seed(
    config: BridgeConfig,
    pairs: Sequence[Pair],
    run_dir: Path,
    seed: int,
    dev: DevSelection | None,
    dev_inputs: Sequence[tuple[str, str]] | None,
    log: Logger,
) -> SeedResult:
    device = _device()
    torch.manual_seed(seed)
    rng = random.Random(seed)
    tokenizer, model = _load_model(config.model, device)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    run_dir.mkdir(parents=True, exist_ok=True)
    best_dir = run_dir / BEST_CHECKPOINT
    best_f1 = float("-inf")
    best_epoch = 0
    history: list[dict] = []

    for epoch in range(1, config.max_epochs + 1):
        order = list(range(len(pairs)))
        rng.shuffle(order)
        total_loss = 0.0
        steps = 0
        for batch in _batches(len(order), config.train_batch_size):
            chunk = [pairs[order[i]] for i in batch]
            encoded = _encode_inputs(
                tokenizer, [p.input for p in chunk], config.max_input_length, device
            )
            target_ids = tokenizer(
                [p.target for p in chunk],
                padding=True,
                truncation=True,
                max_length=config.max_target_length,
                return_tensors="pt",
            ).input_ids.to(device)
            labels = target_ids.clone()
            labels[labels == tokenizer.pad_token_id] = -100
            loss = model(
                input_ids=encoded.input_ids,
                attention_mask=encoded.attention_mask,
                labels=labels,
            ).loss
            loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            total_loss += loss.detach().item()
            steps += 1
        record: dict = {"epoch": epoch, "train_loss": total_loss / steps}
        if dev is not None and dev_inputs is not None:
            pred_path = run_dir / f"dev-epoch-{epoch:03d}.jsonl"
            report_path = run_dir / f"dev-epoch-{epoch:03d}-report.json"
            write_predictions(
                pred_path, _generate_rows(model, tokenizer, config, dev_inputs, device)
            )
            f1 = _dev_micro_f1(dev, pred_path, report_path)
            record["dev_micro_f1"] = f1
            if f1 > best_f1:
                best_f1 = f1
                best_epoch = epoch
                _save_checkpoint(model, tokenizer, best_dir)
        history.append(record)
        log(
            f"seed {seed} epoch {epoch}/{config.max_epochs}: "
            + " ".join(f"{k}={v:.4f}" for k, v in record.items() if k != "epoch")
        )

    if dev is None:
        best_epoch = config.max_epochs
        _save_checkpoint(model, tokenizer, best_dir)

    history_path = run_dir / HISTORY_FILE
    history_path.write_text(
        "".join(json.dumps(record) + "\n" for record in history), encoding="utf-8"
    )
    return SeedResult(
        seed=seed,
        run_dir=str(run_dir),
        best_epoch=best_epoch,
        best_dev_micro_f1=None if dev is None else best_f1,
    )


def train(
    config: BridgeConfig,
    pairs_path: str | Path,
    out_dir: str | Path,
    dev: DevSelection | None = None,
    log: Logger | None = None,
) -> list[SeedResult]:
    """Fine-tune one model per seed on the training pairs in ``pairs_path``.

    Each seed gets its own directory ``<out_dir>/seed-<n>`` containing a
    ``best`` checkpoint and a ``history.jsonl`` log of per-epoch training
    loss (plus dev micro F1 when ``dev`` is given). Without a dev set the
    final epoch is kept; with one, the epoch with the highest dev micro F1.
    """
    emit: Logger = log if log is not None else (lambda message: None)
    pairs = read_pairs(pairs_path)
    dev_inputs = read_inputs(dev.pairs) if dev is not None else None
    results = []
    for seed in config.seeds:
        run_dir = Path(out_dir) / f"seed-{seed}"
        results.append(
            _train_one_seed(config, pairs, run_dir, seed, dev, dev_inputs, emit)
        )
    return results


def generate(
    config: BridgeConfig,
    model_path: str | Path,
    inputs_path: str | Path,
    out_path: str | Path,
    log: Logger | None = None,
) -> int:
    """Generate one prediction per input record, preserving file order.

    ``model_path`` is the checkpoint to load (for a finished run,
    ``<run_dir>/best``). Returns the number of predictions written to
    ``out_path`` as ``{"id", "output"}`` JSONL.
    """
    emit: Logger = log if log is not None else (lambda message: None)
    device = _device()
    rows = read_inputs(inputs_path)
    tokenizer, model = _load_model(str(model_path), device)
    predictions = _generate_rows(model, tokenizer, config, rows, device)
    count = write_predictions(out_path, predictions)
    emit(f"wrote {count} predictions to {out_path}")
    return count
