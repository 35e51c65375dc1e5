"""Rendering of gold opinions into seq2seq target strings.

Two formats exist. The phrase format joins tuple fields with " ~ " and
opinions with " ~~ ", writing NULL for implicit targets:

    service ~ SERVICE#GENERAL ~ positive ~~ NULL ~ SERVICE#GENERAL ~ positive

The sentence format renders one natural-language clause per opinion with
every filled slot in literal square brackets:

    The review expressed [positive] opinion on [SERVICE#GENERAL] for [service],
    [positive] opinion on [SERVICE#GENERAL] for [NULL]

Sentences without opinions serialize to the sentinel "NONE" in both formats.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .corpus import LabelSchema, Sentence, Split
from .errors import SerializationError, UnsupportedTaskError
from .tasks import (
    OpinionTuple,
    TaskKind,
    canonical_order,
    maximal_task,
    project_opinion,
    supported_tasks,
)


class SerializationFormat(Enum):
    PHRASE = "phrase"
    SENTENCE = "sentence"


class Mode(Enum):
    JOINT = "joint"
    SEPARATE = "separate"


EMPTY_SENTINEL = "NONE"
FIELD_SEPARATOR = " ~ "
OPINION_SEPARATOR = " ~~ "
SENTENCE_PREFIX = "The review expressed "
CLAUSE_SEPARATOR = ", "


@dataclass(frozen=True)
class TaskInstance:
    """A (task, format, mode) binding validated against a schema."""

    task: TaskKind
    format: SerializationFormat
    mode: Mode
    schema: LabelSchema

    def __post_init__(self):
        if self.task not in supported_tasks(self.schema):
            raise UnsupportedTaskError(
                f"task {self.task.value} is not defined for {self.schema.name}"
            )
        if self.mode is Mode.JOINT and self.task is not maximal_task(self.schema):
            raise UnsupportedTaskError(
                f"joint mode on {self.schema.name} serializes "
                f"{maximal_task(self.schema).value}, not {self.task.value}"
            )


def ordered_tuples(sentence: Sentence, task: TaskKind) -> list[OpinionTuple]:
    """Project the sentence's opinions in canonical order, deduplicated."""
    seen = set()
    result = []
    for opinion in canonical_order(sentence.opinions, sentence):
        projected = project_opinion(opinion, task)
        if projected not in seen:
            seen.add(projected)
            result.append(projected)
    return result


def _field_values(projected: OpinionTuple, task: TaskKind) -> list[str]:
    return [getattr(projected, field) for field in task.fields]


def _render_phrase(projected: OpinionTuple, task: TaskKind, sentence_id: str) -> str:
    values = _field_values(projected, task)
    for value in values:
        if "~" in value:
            raise SerializationError(
                f"sentence {sentence_id}: field {value!r} contains the "
                f"phrase delimiter"
            )
    return FIELD_SEPARATOR.join(values)


def _render_clause(projected: OpinionTuple, task: TaskKind, sentence_id: str) -> str:
    for value in _field_values(projected, task):
        if "[" in value or "]" in value:
            raise SerializationError(
                f"sentence {sentence_id}: field {value!r} contains a "
                f"square bracket"
            )
    parts = []
    if projected.polarity is not None:
        parts.append(f"[{projected.polarity}]")
    parts.append("opinion")
    if projected.aspect is not None:
        parts.append(f"on [{projected.aspect}]")
    if projected.target is not None:
        parts.append(f"for [{projected.target}]")
    return " ".join(parts)


def serialize(sentence: Sentence, instance: TaskInstance) -> str:
    """Render the sentence's gold opinions as the training target string."""
    tuples = ordered_tuples(sentence, instance.task)
    if not tuples:
        return EMPTY_SENTINEL
    if instance.format is SerializationFormat.PHRASE:
        return OPINION_SEPARATOR.join(
            _render_phrase(t, instance.task, sentence.id) for t in tuples
        )
    clauses = CLAUSE_SEPARATOR.join(
        _render_clause(t, instance.task, sentence.id) for t in tuples
    )
    return SENTENCE_PREFIX + clauses


class TrainingPair(NamedTuple):
    id: str
    input: str
    target: str


def default_prefix(task: TaskKind) -> str:
    return f"{task.value}: "


def build_training_pairs(
    split: Split, instance: TaskInstance, prefix: str = ""
) -> list[TrainingPair]:
    """One (id, prefix + text, serialized target) record per sentence."""
    return [
        TrainingPair(s.id, prefix + s.text, serialize(s, instance))
        for s in split.sentences
    ]
