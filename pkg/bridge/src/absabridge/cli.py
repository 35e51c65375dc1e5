"""Command-line interface: ``absabridge train`` and ``absabridge generate``.

Exit codes: 0 on success, 1 for usage or configuration problems, 2 for
data problems (unreadable or malformed files) and scorer failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace

from .config import DEFAULT_SCORER, BridgeConfig, DevSelection
from .errors import BridgeConfigError, BridgeError
from .runner import generate, train


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"seeds must be a comma-separated list of integers, got {text!r}"
        ) from None


_CONFIG_FLAGS = {
    "model": "model",
    "max_input_length": "max_input_length",
    "train_batch_size": "batch_size",
    "eval_batch_size": "eval_batch_size",
    "learning_rate": "learning_rate",
    "max_epochs": "epochs",
    "seeds": "seeds",
    "max_target_length": "max_target_length",
    "num_beams": "beams",
}


def _build_config(args: argparse.Namespace) -> BridgeConfig:
    overrides = {}
    for field_name in (f.name for f in fields(BridgeConfig)):
        value = getattr(args, _CONFIG_FLAGS[field_name], None)
        if value is not None:
            overrides[field_name] = value
    return replace(BridgeConfig(), **overrides)


def _add_generation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--eval-batch-size", type=int, help="generation batch size (default 64)"
    )
    parser.add_argument("--beams", type=int, help="beam count (default 1, greedy)")
    parser.add_argument(
        "--max-input-length", type=int, help="input truncation length (default 128)"
    )
    parser.add_argument(
        "--max-target-length", type=int, help="generation length cap (default 128)"
    )


def _make_parser() -> _Parser:
    parser = _Parser(
        prog="absabridge",
        description=(
            "Fine-tune a seq2seq model on {'id', 'input', 'target'} JSONL pairs "
            "and generate {'id', 'output'} JSONL predictions."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    train_parser = subparsers.add_parser(
        "train", help="fine-tune one model per seed on training pairs"
    )
    train_parser.add_argument(
        "--pairs", required=True, help="training pairs JSONL ({'id', 'input', 'target'})"
    )
    train_parser.add_argument(
        "--out", required=True, help="directory that receives one seed-<n> run per seed"
    )
    train_parser.add_argument("--model", help="base model name or path (default t5-base)")
    train_parser.add_argument("--epochs", type=int, help="training epochs (default 50)")
    train_parser.add_argument(
        "--batch-size", type=int, help="training batch size (default 16)"
    )
    train_parser.add_argument(
        "--learning-rate", type=float, help="AdamW learning rate (default 4e-5)"
    )
    train_parser.add_argument(
        "--seeds",
        type=_seed_list,
        help="comma-separated seeds, one training run each (default 1,2,3)",
    )
    _add_generation_flags(train_parser)
    dev_group = train_parser.add_argument_group(
        "dev selection",
        "generate on a dev set after every epoch, score it with the external "
        "scorer, and keep the epoch with the best micro F1; all four of "
        "--dev-pairs/--dev-gold/--dataset/--task are required together",
    )
    dev_group.add_argument("--dev-pairs", help="dev inputs JSONL ({'id', 'input', ...})")
    dev_group.add_argument("--dev-gold", help="gold corpus file for the scorer")
    dev_group.add_argument("--dataset", help="scorer dataset name")
    dev_group.add_argument("--task", help="scorer task name")
    dev_group.add_argument(
        "--format", default="phrase", help="scorer output format (default phrase)"
    )
    dev_group.add_argument(
        "--mode", default="separate", help="scorer mode (default separate)"
    )
    dev_group.add_argument(
        "--scorer",
        default=DEFAULT_SCORER[0],
        help="scorer executable to run (default absagen)",
    )

    generate_parser = subparsers.add_parser(
        "generate", help="write one prediction per input with a trained checkpoint"
    )
    generate_parser.add_argument(
        "--model", required=True, help="checkpoint directory (for a run, <run_dir>/best)"
    )
    generate_parser.add_argument(
        "--inputs", required=True, help="inputs JSONL ({'id', 'input', ...})"
    )
    generate_parser.add_argument(
        "--out", required=True, help="predictions JSONL to write ({'id', 'output'})"
    )
    _add_generation_flags(generate_parser)
    return parser


def _dev_selection(parser: _Parser, args: argparse.Namespace) -> DevSelection | None:
    provided = {
        name: getattr(args, name.replace("-", "_"))
        for name in ("dev-pairs", "dev-gold", "dataset", "task")
    }
    if not any(provided.values()):
        return None
    missing = [f"--{name}" for name, value in provided.items() if not value]
    if missing:
        parser.error(f"dev selection also needs {', '.join(missing)}")
    return DevSelection(
        pairs=args.dev_pairs,
        gold=args.dev_gold,
        dataset=args.dataset,
        task=args.task,
        format=args.format,
        mode=args.mode,
        scorer=(args.scorer,),
    )


def _quiet_model_loading() -> None:
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        config = _build_config(args)
        _quiet_model_loading()
        if args.command == "train":
            dev = _dev_selection(parser, args)
            results = train(config, args.pairs, args.out, dev=dev, log=print)
            for result in results:
                chosen = f"epoch {result.best_epoch}"
                if result.best_dev_micro_f1 is not None:
                    chosen += f" (dev micro F1 {result.best_dev_micro_f1:.4f})"
                print(f"seed {result.seed}: kept {chosen} in {result.run_dir}")
        else:
            generate(config, args.model, args.inputs, args.out, log=print)
    except BridgeConfigError as exc:
        print(f"absabridge: error: {exc}", file=sys.stderr)
        return 1
    except BridgeError as exc:
        print(f"absabridge: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
