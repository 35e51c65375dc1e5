"""Parsing of model-generated target strings back into opinion tuples.

decode() is total: any input string yields a DecodeOutcome. Fragments that
cannot be parsed or whose labels fall outside the schema are dropped and
counted, never raised. The empty-opinion sentinel "NONE" is matched
case-sensitively after whitespace stripping, because a lowercase "none" is
a legal normalized target and must survive the round trip.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

from .errors import PredictionInputError
from .serializer import EMPTY_SENTINEL, SerializationFormat, TaskInstance
from .tasks import IMPLICIT_TARGET, OpinionTuple, TaskKind, TupleSet, normalize_target


class Strictness(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class LabelRepair(Enum):
    OFF = "off"
    NEAREST = "nearest"


@dataclass(frozen=True)
class DecodePolicy:
    strictness: Strictness = Strictness.STRICT
    label_repair: LabelRepair = LabelRepair.OFF
    max_repair_distance: int = 0

    def __post_init__(self):
        if self.label_repair is LabelRepair.NEAREST and self.max_repair_distance <= 0:
            raise ValueError("nearest-match repair needs a positive distance budget")


STRICT = DecodePolicy()


def lenient(max_repair_distance: int = 2) -> DecodePolicy:
    return DecodePolicy(Strictness.LENIENT, LabelRepair.NEAREST, max_repair_distance)


@dataclass(frozen=True)
class DecodeOutcome:
    tuples: TupleSet
    dropped: int
    repairs: int
    notes: tuple[str, ...]


@dataclass(frozen=True)
class BatchOutcome:
    outcomes: dict
    dropped: int
    repairs: int


# Slot order of each sentence-format clause, outermost first.
_SENTENCE_SLOTS = {
    TaskKind.AD: ("aspect",),
    TaskKind.ASD: ("polarity", "aspect"),
    TaskKind.TD: ("target",),
    TaskKind.TSD: ("polarity", "target"),
    TaskKind.TAD: ("aspect", "target"),
    TaskKind.TASD: ("polarity", "aspect", "target"),
}

_SLOT = r"\[([^\[\]]*)\]"
_CLAUSE_PATTERNS = {
    TaskKind.AD: re.compile(rf"opinion\s+on\s+{_SLOT}"),
    TaskKind.ASD: re.compile(rf"{_SLOT}\s+opinion\s+on\s+{_SLOT}"),
    TaskKind.TD: re.compile(rf"opinion\s+for\s+{_SLOT}"),
    TaskKind.TSD: re.compile(rf"{_SLOT}\s+opinion\s+for\s+{_SLOT}"),
    TaskKind.TAD: re.compile(rf"opinion\s+on\s+{_SLOT}\s+for\s+{_SLOT}"),
    TaskKind.TASD: re.compile(rf"{_SLOT}\s+opinion\s+on\s+{_SLOT}\s+for\s+{_SLOT}"),
}

_PREFIX_PATTERN = re.compile(r"the\s+review\s+expressed\s+", re.IGNORECASE)


def _edit_distance(a: str, b: str, limit: int) -> int:
    """Levenshtein distance, capped at limit + 1 for early exit."""
    if abs(len(a) - len(b)) > limit:
        return limit + 1
    previous = list(range(len(b) + 1))
    for i, char_a in enumerate(a, start=1):
        current = [i]
        best = i
        for j, char_b in enumerate(b, start=1):
            cost = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (char_a != char_b),
            )
            current.append(cost)
            best = min(best, cost)
        if best > limit:
            return limit + 1
        previous = current
    return previous[-1]


def _match_label(raw: str, labels, policy: DecodePolicy):
    """Resolve a slot against the schema; returns (label, repaired) or (None, False)."""
    cleaned = raw.strip()
    low = cleaned.lower()
    for label in labels:
        if label.lower() == low:
            return label, False
    if (
        policy.strictness is Strictness.LENIENT
        and policy.label_repair is LabelRepair.NEAREST
        and cleaned
    ):
        budget = policy.max_repair_distance
        candidates = [
            label
            for label in labels
            if _edit_distance(low, label.lower(), budget) <= budget
        ]
        # Ambiguity (two labels within budget) is not repaired.
        if len(candidates) == 1:
            return candidates[0], True
    return None, False


def _phrase_fragments(text: str) -> list[str]:
    # Opinion separator: any run of two or more tildes. Stuttered separators
    # produce whitespace-only fragments, which are skipped as noise.
    return [f for f in re.split(r"~{2,}", text) if f.strip()]


def _sentence_clauses(text: str) -> list[str]:
    body = text
    match = _PREFIX_PATTERN.match(body)
    if match:
        body = body[match.end():]
    # Split on ", " outside square brackets so bracketed slots keep commas.
    clauses = []
    depth = 0
    start = 0
    i = 0
    while i < len(body):
        char = body[i]
        if char == "[":
            depth += 1
        elif char == "]":
            depth = max(0, depth - 1)
        elif char == "," and depth == 0 and body[i : i + 2] == ", ":
            clauses.append(body[start:i])
            i += 2
            start = i
            continue
        i += 1
    clauses.append(body[start:])
    return [c for c in (clause.strip() for clause in clauses) if c]


def _bind_slots(fragment: str, task: TaskKind, fmt: SerializationFormat):
    """Map a fragment to {field: raw slot text}, or None if malformed."""
    if fmt is SerializationFormat.PHRASE:
        parts = [p.strip() for p in fragment.split("~")]
        if len(parts) != len(task.fields):
            return None
        return dict(zip(task.fields, parts))
    match = _CLAUSE_PATTERNS[task].fullmatch(fragment)
    if match is None:
        return None
    return dict(zip(_SENTENCE_SLOTS[task], match.groups()))


def _resolve(slots: dict, schema, policy: DecodePolicy):
    """Validate bound slots and build the tuple; returns (tuple, repairs, note)."""
    values = {}
    repairs = 0
    if "aspect" in slots:
        label, repaired = _match_label(slots["aspect"], schema.aspects, policy)
        if label is None:
            return None, 0, f"unknown aspect label {slots['aspect']!r}"
        values["aspect"] = label
        repairs += repaired
    if "polarity" in slots:
        label, repaired = _match_label(slots["polarity"], schema.polarities, policy)
        if label is None:
            return None, 0, f"unknown polarity label {slots['polarity']!r}"
        values["polarity"] = label
        repairs += repaired
    if "target" in slots:
        raw = slots["target"].strip()
        if not raw:
            return None, 0, "empty target slot"
        normalized = normalize_target(raw)
        values["target"] = IMPLICIT_TARGET if normalized == "null" else normalized
    return OpinionTuple(**values), repairs, None


def decode(
    text: str, instance: TaskInstance, policy: DecodePolicy = STRICT
) -> DecodeOutcome:
    """Parse generated text into the instance task's tuple set.

    Empty and whitespace-only text and the sentinel "NONE" decode to an
    empty set. Malformed fragments are dropped and counted; under a lenient
    policy with nearest-match repair, an off-schema label is replaced by
    the unique schema label within the edit-distance budget (ambiguous or
    over-budget stays malformed). Duplicate tuples collapse.
    """
    tuples = []
    notes = []
    dropped = repairs = 0
    stripped = text.strip()
    if stripped and stripped != EMPTY_SENTINEL:
        if instance.format is SerializationFormat.PHRASE:
            fragments = _phrase_fragments(stripped)
        else:
            fragments = _sentence_clauses(stripped)
        for fragment in fragments:
            slots = _bind_slots(fragment, instance.task, instance.format)
            if slots is None:
                dropped += 1
                notes.append(f"unparseable fragment: {fragment!r}")
                continue
            resolved, fragment_repairs, note = _resolve(slots, instance.schema, policy)
            if resolved is None:
                dropped += 1
                notes.append(f"{note} in fragment {fragment!r}")
                continue
            repairs += fragment_repairs
            tuples.append(resolved)
    return DecodeOutcome(
        TupleSet(instance.task, frozenset(tuples)), dropped, repairs, tuple(notes)
    )


def decode_batch(records, instances, policy: DecodePolicy = STRICT) -> BatchOutcome:
    """Decode (id, text) pairs; instances is one TaskInstance or an id map."""
    outcomes = {}
    dropped = repairs = 0
    for sentence_id, text in records:
        if sentence_id in outcomes:
            raise PredictionInputError(f"duplicate prediction id {sentence_id!r}")
        if isinstance(instances, Mapping):
            if sentence_id not in instances:
                raise PredictionInputError(
                    f"no task instance for prediction id {sentence_id!r}"
                )
            instance = instances[sentence_id]
        else:
            instance = instances
        outcome = decode(text, instance, policy)
        outcomes[sentence_id] = outcome
        dropped += outcome.dropped
        repairs += outcome.repairs
    return BatchOutcome(outcomes, dropped, repairs)
