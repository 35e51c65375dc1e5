"""Reading and writing the JSONL files the bridge exchanges with the toolkit.

Training pairs arrive as one JSON object per line with ``id``, ``input``,
and ``target`` string fields (the toolkit's ``prepare`` output).
Predictions leave as one object per line with ``id`` and ``output`` string
fields (what the toolkit's ``score`` command reads). Extra keys on input
records are ignored so a pairs file doubles as a generation input file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataFormatError


@dataclass(frozen=True)
class Pair:
    """One training example: a model input and the text it should emit."""

    id: str
    input: str
    target: str


def _read_records(path: str | Path, required: Sequence[str]) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    records: list[dict] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise DataFormatError(f"{path}:{lineno}: expected a JSON object")
        for key in required:
            if key not in record:
                raise DataFormatError(f"{path}:{lineno}: missing {key!r} field")
            if not isinstance(record[key], str):
                raise DataFormatError(f"{path}:{lineno}: {key!r} must be a string")
        records.append(record)
    if not records:
        raise DataFormatError(f"{path}: no records found")
    return records


def read_pairs(path: str | Path) -> list[Pair]:
    """Load training pairs, aborting with the offending line number on bad input."""
    return [
        Pair(id=r["id"], input=r["input"], target=r["target"])
        for r in _read_records(path, ("id", "input", "target"))
    ]


def read_inputs(path: str | Path) -> list[tuple[str, str]]:
    """Load generation inputs as ``(id, input)`` rows, preserving file order."""
    return [(r["id"], r["input"]) for r in _read_records(path, ("id", "input"))]


def write_predictions(path: str | Path, rows: Iterable[tuple[str, str]]) -> int:
    """Write ``(id, output)`` rows as prediction JSONL; returns the row count."""
    lines = [
        json.dumps({"id": rid, "output": output}, ensure_ascii=False)
        for rid, output in rows
    ]
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)
