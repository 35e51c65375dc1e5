"""Task definitions and projection of gold opinions onto per-task tuples.

The six tasks differ only in which tuple fields they keep: aspect detection
(AD), target detection (TD), aspect sentiment (ASD), target sentiment (TSD),
target+aspect (TAD), and the full triple (TASD).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .corpus import LabelSchema, Opinion, Sentence
from .errors import UnsupportedTaskError

# Distinguished implicit-target value. Real targets are lowercased during
# normalization, so no explicit target can ever equal this string.
IMPLICIT_TARGET = "NULL"


class TaskKind(Enum):
    AD = "ad"
    TD = "td"
    ASD = "asd"
    TSD = "tsd"
    TAD = "tad"
    TASD = "tasd"

    @property
    def fields(self) -> tuple[str, ...]:
        return _TASK_FIELDS[self]

    @property
    def needs_targets(self) -> bool:
        return "target" in _TASK_FIELDS[self]


# Field order doubles as the delimiter-joined rendering order.
_TASK_FIELDS = {
    TaskKind.AD: ("aspect",),
    TaskKind.TD: ("target",),
    TaskKind.ASD: ("aspect", "polarity"),
    TaskKind.TSD: ("target", "polarity"),
    TaskKind.TAD: ("target", "aspect"),
    TaskKind.TASD: ("target", "aspect", "polarity"),
}


def normalize_target(raw: str) -> str:
    """Lowercase and collapse internal whitespace."""
    return " ".join(raw.split()).lower()


@dataclass(frozen=True)
class OpinionTuple:
    """A projected opinion; fields outside the task stay None."""

    target: str | None = None
    aspect: str | None = None
    polarity: str | None = None

    @property
    def implicit(self) -> bool:
        return self.target == IMPLICIT_TARGET


@dataclass(frozen=True)
class TupleSet:
    task: TaskKind
    tuples: frozenset[OpinionTuple]


def supported_tasks(schema: LabelSchema) -> frozenset[TaskKind]:
    if schema.supports_targets:
        return frozenset(TaskKind)
    return frozenset({TaskKind.AD, TaskKind.ASD})


def maximal_task(schema: LabelSchema) -> TaskKind:
    """The most informative task a schema supports (joint-mode target)."""
    return TaskKind.TASD if schema.supports_targets else TaskKind.ASD


def project_opinion(opinion: Opinion, task: TaskKind) -> OpinionTuple:
    fields = task.fields
    target = aspect = polarity = None
    if "target" in fields:
        if opinion.target is None:
            target = IMPLICIT_TARGET
        else:
            target = normalize_target(opinion.target)
            if target == "null":
                # A stored literal NULL-ish target is treated as implicit;
                # validate_split reports it.
                target = IMPLICIT_TARGET
    if "aspect" in fields:
        aspect = opinion.aspect
    if "polarity" in fields:
        polarity = opinion.polarity
    return OpinionTuple(target, aspect, polarity)


def project(opinions, task: TaskKind, schema: LabelSchema | None = None) -> TupleSet:
    """Project opinions to the task's fields, deduplicating the result."""
    if schema is not None and task.needs_targets and not schema.supports_targets:
        raise UnsupportedTaskError(
            f"task {task.value} needs targets, which {schema.name} does not annotate"
        )
    return TupleSet(task, frozenset(project_opinion(o, task) for o in opinions))


def project_tuples(tuple_set: TupleSet, task: TaskKind) -> TupleSet:
    """Project an already-projected tuple set down to a coarser task."""
    if not set(task.fields) <= set(tuple_set.task.fields):
        raise UnsupportedTaskError(
            f"cannot project {tuple_set.task.value} tuples to {task.value}: "
            f"missing fields"
        )
    fields = task.fields
    projected = frozenset(
        OpinionTuple(
            t.target if "target" in fields else None,
            t.aspect if "aspect" in fields else None,
            t.polarity if "polarity" in fields else None,
        )
        for t in tuple_set.tuples
    )
    return TupleSet(task, projected)


def canonical_order(opinions, sentence: Sentence) -> list[Opinion]:
    """Deterministic rendering order for a sentence's opinions.

    Explicit targets come first, ordered by the first case-insensitive
    occurrence of the target in the sentence text; explicit targets that do
    not occur in the text follow, ordered by target string; implicit targets
    come last. Ties break on aspect, then polarity, then target.
    """
    text = sentence.text.lower()

    def key(opinion: Opinion):
        if opinion.target is None:
            return (2, 0, "", opinion.aspect, opinion.polarity, "")
        norm = normalize_target(opinion.target)
        if norm == "null":
            return (2, 0, "", opinion.aspect, opinion.polarity, "")
        index = text.find(opinion.target.strip().lower())
        if index < 0:
            return (1, 0, norm, opinion.aspect, opinion.polarity, norm)
        return (0, index, "", opinion.aspect, opinion.polarity, norm)

    return sorted(opinions, key=key)
