"""Seq2seq fine-tuning bridge for absagen-formatted ABSA data.

The bridge consumes the toolkit's training-pair JSONL, fine-tunes a
text-to-text model per seed, and emits prediction JSONL the toolkit's
``score`` command accepts. It never touches corpus files itself; the only
interchange formats are the two JSONL shapes and the scorer's report JSON.
"""

__version__ = "0.1.0"

from .config import DEFAULT_SCORER, BridgeConfig, DevSelection
from .data import Pair, read_inputs, read_pairs, write_predictions
from .errors import BridgeConfigError, BridgeError, DataFormatError, ScoringError
from .runner import SeedResult, generate, train

__all__ = [
    "__version__",
    "BridgeConfig",
    "DevSelection",
    "DEFAULT_SCORER",
    "Pair",
    "read_pairs",
    "read_inputs",
    "write_predictions",
    "BridgeError",
    "BridgeConfigError",
    "DataFormatError",
    "ScoringError",
    "SeedResult",
    "train",
    "generate",
]
