"""Exception types raised by the bridge."""

from __future__ import annotations


class BridgeError(Exception):
    """Base class for every error this package raises deliberately."""


class BridgeConfigError(BridgeError):
    """A configuration value is unusable (bad hyperparameter, bad model path)."""


class DataFormatError(BridgeError):
    """An input file is missing, malformed, or violates the JSONL contract."""


class ScoringError(BridgeError):
    """The external scorer failed or produced an unreadable report."""
