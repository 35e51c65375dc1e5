"""Run configuration for fine-tuning and generation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BridgeConfigError

DEFAULT_SCORER = ("absagen",)


@dataclass(frozen=True)
class BridgeConfig:
    """Hyperparameters for training and generation.

    The defaults reproduce the reference fine-tuning setup: a t5-base
    model trained with AdamW at learning rate 4e-5, batch size 16, for up
    to 50 epochs, with inputs truncated to 128 tokens, repeated over the
    seeds 1, 2, and 3. Generation is greedy (a single beam) with batch
    size 64.
    """

    model: str = "t5-base"
    max_input_length: int = 128
    train_batch_size: int = 16
    eval_batch_size: int = 64
    learning_rate: float = 4e-5
    max_epochs: int = 50
    seeds: tuple[int, ...] = (1, 2, 3)
    max_target_length: int = 128
    num_beams: int = 1

    def __post_init__(self) -> None:
        if not self.model:
            raise BridgeConfigError("model must be a non-empty model name or path")
        for name in (
            "max_input_length",
            "train_batch_size",
            "eval_batch_size",
            "max_epochs",
            "max_target_length",
            "num_beams",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise BridgeConfigError(f"{name} must be a positive integer, got {value!r}")
        if (
            not isinstance(self.learning_rate, (int, float))
            or isinstance(self.learning_rate, bool)
            or not self.learning_rate > 0
        ):
            raise BridgeConfigError(
                f"learning_rate must be a positive number, got {self.learning_rate!r}"
            )
        if not self.seeds:
            raise BridgeConfigError("seeds must contain at least one seed")
        if any(not isinstance(s, int) or isinstance(s, bool) for s in self.seeds):
            raise BridgeConfigError(f"seeds must be integers, got {self.seeds!r}")
        if len(set(self.seeds)) != len(self.seeds):
            raise BridgeConfigError(f"seeds must be distinct, got {self.seeds!r}")


@dataclass(frozen=True)
class DevSelection:
    """How to pick the best training epoch on a development set.

    After every epoch the model generates output for every record in
    ``pairs`` (a JSONL file of ``{"id", "input", ...}`` objects) and the
    predictions are scored against ``gold`` by running the external
    scorer command. The epoch with the highest micro F1 in the scorer's
    report wins; on ties the earlier epoch is kept.

    ``dataset``, ``task``, ``format``, and ``mode`` are passed through to
    the scorer untouched and must describe how ``pairs`` was prepared.
    """

    pairs: str
    gold: str
    dataset: str
    task: str
    format: str = "phrase"
    mode: str = "separate"
    scorer: tuple[str, ...] = field(default=DEFAULT_SCORER)

    def __post_init__(self) -> None:
        for name in ("pairs", "gold", "dataset", "task", "format", "mode"):
            if not getattr(self, name):
                raise BridgeConfigError(f"dev selection needs a non-empty {name}")
        if not self.scorer:
            raise BridgeConfigError("scorer command must not be empty")
