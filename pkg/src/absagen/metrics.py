"""Scoring of predicted tuple sets against gold annotations.

Micro precision/recall/F1 treat each sentence's tuples as sets; missing
predictions count as empty sets and empty denominators score 0. F1 is
computed as 2*TP / (|pred| + |gold|), which is algebraically the harmonic
mean of precision and recall and keeps the division exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__
from .corpus import Split
from .errors import PredictionInputError, UnsupportedTaskError
from .serializer import Mode, SerializationFormat
from .tasks import TaskKind, TupleSet, project


@dataclass(frozen=True)
class Prediction:
    sentence_id: str
    tuples: TupleSet


@dataclass(frozen=True)
class MicroStats:
    precision: float
    recall: float
    f1: float
    gold: int
    predicted: int
    matched: int


@dataclass(frozen=True)
class MacroStats:
    value: float
    # (category, F1) pairs; None marks a category absent from both sides
    # across the whole split and skipped from the mean.
    per_category: tuple[tuple[str, float | None], ...]


@dataclass(frozen=True)
class AccuracyStats:
    value: float
    correct: int
    units: int


@dataclass(frozen=True)
class TargetedScores:
    overall: MicroStats
    implicit_variant: MicroStats


def _pair_sets(predictions, gold: Split, task: TaskKind):
    """Align predictions with gold by sentence id; validate ids and tasks."""
    gold_sets = {s.id: project(s.opinions, task).tuples for s in gold.sentences}
    pred_sets = {sentence_id: frozenset() for sentence_id in gold_sets}
    seen = set()
    for prediction in predictions:
        sentence_id = prediction.sentence_id
        if sentence_id in seen:
            raise PredictionInputError(f"duplicate prediction id {sentence_id!r}")
        if sentence_id not in gold_sets:
            raise PredictionInputError(
                f"prediction id {sentence_id!r} is not in the gold split"
            )
        if prediction.tuples.task is not task:
            raise PredictionInputError(
                f"prediction for {sentence_id!r} carries task "
                f"{prediction.tuples.task.value}, expected {task.value}"
            )
        seen.add(sentence_id)
        pred_sets[sentence_id] = prediction.tuples.tuples
    return pred_sets, gold_sets


def _micro(pred_sets, gold_sets) -> MicroStats:
    matched = sum(len(pred_sets[sid] & gold_sets[sid]) for sid in gold_sets)
    n_pred = sum(len(tuples) for tuples in pred_sets.values())
    n_gold = sum(len(tuples) for tuples in gold_sets.values())
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    f1 = (2 * matched) / (n_pred + n_gold) if (n_pred + n_gold) else 0.0
    return MicroStats(precision, recall, f1, n_gold, n_pred, matched)


def micro_f1(predictions, gold: Split, task: TaskKind) -> MicroStats:
    """Micro-averaged tuple-matching precision, recall, and F1."""
    pred_sets, gold_sets = _pair_sets(predictions, gold, task)
    return _micro(pred_sets, gold_sets)


def macro_f1_sentihood(predictions, gold: Split, skip_absent: bool = True) -> MacroStats:
    """Unweighted mean of per-category binary detection F1 over sentences.

    Each of the eight combined categories is scored as a detector: a
    sentence counts as positive when the category appears in its tuple
    set. Categories absent from both gold and predictions across the whole
    split are skipped from the mean by default; with skip_absent=False
    they contribute an F1 of 0.
    """
    if gold.schema.name != "sentihood":
        raise UnsupportedTaskError(
            "macro-F1 detection scoring is defined for the sentihood schema"
        )
    pred_sets, gold_sets = _pair_sets(predictions, gold, TaskKind.AD)
    per_category = []
    for category in gold.schema.aspects:
        tp = fp = fn = 0
        for sentence_id in gold_sets:
            in_gold = any(t.aspect == category for t in gold_sets[sentence_id])
            in_pred = any(t.aspect == category for t in pred_sets[sentence_id])
            tp += in_gold and in_pred
            fp += in_pred and not in_gold
            fn += in_gold and not in_pred
        if tp + fp + fn == 0:
            if skip_absent:
                per_category.append((category, None))
                continue
            per_category.append((category, 0.0))
        else:
            per_category.append((category, (2 * tp) / (2 * tp + fp + fn)))
    kept = [f1 for _, f1 in per_category if f1 is not None]
    value = sum(kept) / len(kept) if kept else 0.0
    return MacroStats(value, tuple(per_category))


_WAY_SUBSETS = {
    4: ("positive", "negative", "neutral", "conflict"),
    3: ("positive", "negative", "neutral"),
    2: ("positive", "negative"),
}


def _sentihood_labels(tuples, category) -> frozenset:
    labels = frozenset(
        t.polarity for t in tuples if t.aspect == category and t.polarity != "none"
    )
    return labels if labels else frozenset({"none"})


def accuracy_asd(predictions, gold: Split, way: int) -> AccuracyStats:
    """Polarity accuracy over way-filtered aspect-sentiment units.

    Restaurant schemas: the units are gold (sentence, aspect) pairs whose
    polarity is in the way subset (4: with conflict, 3: with neutral,
    2: positive/negative); a unit is correct when the prediction contains
    that aspect with exactly the gold polarity. Sentihood: way 4 and 3 score
    every (sentence, category) pair over the eight categories with "none"
    implied for unmentioned ones; way 2 keeps only gold-mentioned
    categories. Zero units yield 0.0.
    """
    if way not in _WAY_SUBSETS:
        raise ValueError(f"way must be 2, 3, or 4, got {way!r}")
    schema = gold.schema
    pred_sets, gold_sets = _pair_sets(predictions, gold, TaskKind.ASD)
    correct = units = 0
    if schema.name == "sentihood":
        for sentence_id in gold_sets:
            gold_tuples = gold_sets[sentence_id]
            pred_tuples = pred_sets[sentence_id]
            for category in schema.aspects:
                gold_labels = _sentihood_labels(gold_tuples, category)
                if way == 2 and gold_labels == frozenset({"none"}):
                    continue
                units += 1
                correct += gold_labels == _sentihood_labels(pred_tuples, category)
    else:
        if way == 4 and len(schema.polarities) < 4:
            raise UnsupportedTaskError(
                f"4-way accuracy needs at least four polarity labels; "
                f"{schema.name} has {len(schema.polarities)}"
            )
        subset = frozenset(_WAY_SUBSETS[way])
        for sentence_id in gold_sets:
            pred_tuples = pred_sets[sentence_id]
            for gold_tuple in gold_sets[sentence_id]:
                if gold_tuple.polarity not in subset:
                    continue
                units += 1
                correct += gold_tuple in pred_tuples
    value = correct / units if units else 0.0
    return AccuracyStats(value, correct, units)


def tsd_tasd_scores(
    predictions,
    gold: Split,
    task: TaskKind,
    exclude_implicit_from_overall: bool = True,
) -> TargetedScores:
    """Micro scores with and without implicit-target tuples.

    By default the overall number excludes implicit-target tuples from both
    sides and the variant includes everything; passing
    exclude_implicit_from_overall=False swaps the pairing. Both are always
    computed.
    """
    if task not in (TaskKind.TSD, TaskKind.TASD):
        raise UnsupportedTaskError(
            f"implicit-target reporting applies to tsd and tasd, not {task.value}"
        )
    if not gold.schema.supports_targets:
        raise UnsupportedTaskError(
            f"{gold.schema.name} does not annotate targets"
        )
    pred_sets, gold_sets = _pair_sets(predictions, gold, task)

    def drop_implicit(sets):
        return {
            sentence_id: frozenset(t for t in tuples if not t.implicit)
            for sentence_id, tuples in sets.items()
        }

    full = _micro(pred_sets, gold_sets)
    explicit_only = _micro(drop_implicit(pred_sets), drop_implicit(gold_sets))
    if exclude_implicit_from_overall:
        return TargetedScores(explicit_only, full)
    return TargetedScores(full, explicit_only)


@dataclass(frozen=True)
class Counts:
    gold_tuples: int
    predicted_tuples: int
    matched_tuples: int
    scored_sentences: int


@dataclass(frozen=True)
class DecodeStats:
    dropped: int
    repairs: int


@dataclass(frozen=True)
class MetricsReport:
    dataset: str
    task: TaskKind
    format: SerializationFormat
    mode: Mode
    micro: MicroStats
    macro_f1: float | None
    accuracy: dict | None
    implicit_variant: MicroStats | None
    counts: Counts
    decode_stats: DecodeStats
    toolkit_version: str = __version__

    def to_dict(self) -> dict:
        def fractions(stats: MicroStats) -> dict:
            return {
                "precision": stats.precision,
                "recall": stats.recall,
                "f1": stats.f1,
            }

        return {
            "dataset": self.dataset,
            "task": self.task.value,
            "format": self.format.value,
            "mode": self.mode.value,
            "micro": fractions(self.micro),
            "macro_f1": self.macro_f1,
            "accuracy": dict(self.accuracy) if self.accuracy is not None else None,
            "implicit_variant": (
                fractions(self.implicit_variant)
                if self.implicit_variant is not None
                else None
            ),
            "counts": {
                "gold_tuples": self.counts.gold_tuples,
                "predicted_tuples": self.counts.predicted_tuples,
                "matched_tuples": self.counts.matched_tuples,
                "scored_sentences": self.counts.scored_sentences,
            },
            "decode_stats": {
                "dropped": self.decode_stats.dropped,
                "repairs": self.decode_stats.repairs,
            },
            "toolkit_version": self.toolkit_version,
        }

    def to_json(self) -> str:
        # json keeps full float precision (well past six significant digits).
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        """Rebuild a report from its JSON form.

        The JSON stores only the fraction triple for micro blocks, so the
        rebuilt MicroStats carry the shared counts block for micro and
        zeros for the variant; to_dict() output is preserved exactly.
        """
        counts = Counts(**data["counts"])

        def stats(block: dict, gold: int, predicted: int, matched: int) -> MicroStats:
            return MicroStats(
                block["precision"], block["recall"], block["f1"],
                gold, predicted, matched,
            )

        variant = data.get("implicit_variant")
        return cls(
            dataset=data["dataset"],
            task=TaskKind(data["task"]),
            format=SerializationFormat(data["format"]),
            mode=Mode(data["mode"]),
            micro=stats(
                data["micro"],
                counts.gold_tuples,
                counts.predicted_tuples,
                counts.matched_tuples,
            ),
            macro_f1=data.get("macro_f1"),
            accuracy=data.get("accuracy"),
            implicit_variant=stats(variant, 0, 0, 0) if variant else None,
            counts=counts,
            decode_stats=DecodeStats(**data["decode_stats"]),
            toolkit_version=data["toolkit_version"],
        )


def build_report(
    *,
    dataset: str,
    task: TaskKind,
    format: SerializationFormat,
    mode: Mode,
    micro: MicroStats,
    counts: Counts,
    decode_stats: DecodeStats,
    macro_f1: float | None = None,
    accuracy: dict | None = None,
    implicit_variant: MicroStats | None = None,
) -> MetricsReport:
    """Assemble the full report structure for one scoring run."""
    return MetricsReport(
        dataset=dataset,
        task=task,
        format=format,
        mode=mode,
        micro=micro,
        macro_f1=macro_f1,
        accuracy=accuracy,
        implicit_variant=implicit_variant,
        counts=counts,
        decode_stats=decode_stats,
    )
