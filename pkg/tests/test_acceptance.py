"""End-to-end acceptance checks for the toolkit's core guarantees.

Every test prints exactly one line of the form

    ACCEPTANCE PASS: <guarantee>   or   ACCEPTANCE FAIL: <guarantee>

so the suite's output doubles as an acceptance report. The checks run on
the bundled fixture corpora and, when the ABSA_DATA_DIR environment
variable points at a directory of official distribution files, on those
files as well.
"""

import json
import random
import string
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from absagen import (
    Mode,
    Opinion,
    OpinionTuple,
    Prediction,
    STRICT,
    SCHEMAS,
    Sentence,
    SerializationFormat,
    Split,
    TaskInstance,
    TaskKind,
    TupleSet,
    accuracy_asd,
    decode,
    macro_f1_sentihood,
    micro_f1,
    project,
    serialize,
    supported_tasks,
)
from absagen.cli import main
from absagen.serializer import OPINION_SEPARATOR, SENTENCE_PREFIX, ordered_tuples

from conftest import DATA, load_official, official_files
from oracles import (
    oracle_accuracy_restaurant,
    oracle_accuracy_sentihood,
    oracle_macro_sentihood,
    oracle_micro,
)

FIXTURE_PATHS = {
    "restaurants-14": DATA / "se14_restaurants.xml",
    "restaurants-15": DATA / "se15_restaurants.xml",
    "restaurants-16": DATA / "se16_restaurants.xml",
    "sentihood": DATA / "sentihood_train.json",
}

R14 = SCHEMAS["restaurants-14"]
R16 = SCHEMAS["restaurants-16"]
SENTIHOOD = SCHEMAS["sentihood"]


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def every_split(all_splits):
    splits = dict(all_splits)
    for name, path in official_files():
        splits[f"{name}:{path.name}"] = load_official(name, path)
    return splits


def instances_for(schema):
    return [
        TaskInstance(task, fmt, Mode.SEPARATE, schema)
        for task in sorted(supported_tasks(schema), key=lambda t: t.value)
        for fmt in SerializationFormat
    ]


def test_round_trip_exactness(all_splits):
    with criterion("serialize/decode round trip is exact on every split, "
                   "task, and format"):
        started = time.monotonic()
        checked = 0
        for name, split in every_split(all_splits).items():
            for instance in instances_for(split.schema):
                for sentence in split.sentences:
                    rendered = serialize(sentence, instance)
                    outcome = decode(rendered, instance, STRICT)
                    expected = project(sentence.opinions, instance.task)
                    context = (name, instance.task.value, instance.format.value,
                               sentence.id)
                    assert outcome.tuples == expected, context
                    assert outcome.dropped == 0, context
                    assert outcome.repairs == 0, context
                    checked += 1
        elapsed = time.monotonic() - started
        assert checked >= 8 * len(all_splits)
        assert elapsed < 60.0, f"round-trip sweep took {elapsed:.1f}s"


def test_worked_example_fidelity():
    with criterion("the two-opinion worked example renders byte-for-byte "
                   "in both formats"):
        sentence = Sentence(
            "example:0",
            "Always crowded, but they are good at seating you promptly and "
            "have quick service.",
            (
                Opinion("service", "SERVICE#GENERAL", "positive"),
                Opinion(None, "SERVICE#GENERAL", "positive"),
            ),
        )
        phrase = TaskInstance(
            TaskKind.TASD, SerializationFormat.PHRASE, Mode.SEPARATE, R16
        )
        assert serialize(sentence, phrase) == (
            "service ~ SERVICE#GENERAL ~ positive ~~ "
            "NULL ~ SERVICE#GENERAL ~ positive"
        )
        clause = TaskInstance(
            TaskKind.TASD, SerializationFormat.SENTENCE, Mode.SEPARATE, R16
        )
        assert serialize(sentence, clause) == (
            "The review expressed [positive] opinion on [SERVICE#GENERAL] "
            "for [service], [positive] opinion on [SERVICE#GENERAL] for [NULL]"
        )


def _random_targeted_case(rng):
    """A random restaurant split plus raw predictions, ≤10 sentences, ≤4 tuples."""
    targets = ["fish", "bread", "wine list", "decor", "mole poblano", None]
    sentences = []
    raw_predictions = []
    for i in range(rng.randrange(0, 11)):
        opinions = [
            Opinion(rng.choice(targets), rng.choice(R16.aspects),
                    rng.choice(R16.polarities))
            for _ in range(rng.randrange(0, 5))
        ]
        sentences.append(Sentence(str(i), f"text {i}", tuple(opinions)))
        if rng.random() < 0.9:
            raw_predictions.append(
                (
                    str(i),
                    [
                        OpinionTuple(
                            rng.choice(["fish", "bread", "wine list", "NULL"]),
                            rng.choice(R16.aspects),
                            rng.choice(R16.polarities),
                        )
                        for _ in range(rng.randrange(0, 5))
                    ],
                )
            )
    return Split(R16, "test", tuple(sentences)), raw_predictions


def _random_aspect_case(rng, schema, polarities):
    sentences = []
    raw_predictions = []
    for i in range(rng.randrange(0, 11)):
        opinions = [
            Opinion(None, rng.choice(schema.aspects), rng.choice(polarities))
            for _ in range(rng.randrange(0, 5))
        ]
        sentences.append(Sentence(str(i), f"text {i}", tuple(opinions)))
        raw_predictions.append(
            (
                str(i),
                [
                    OpinionTuple(None, rng.choice(schema.aspects),
                                 rng.choice(polarities))
                    for _ in range(rng.randrange(0, 5))
                ],
            )
        )
    return Split(schema, "test", tuple(sentences)), raw_predictions


def test_metric_oracle_equivalence():
    with criterion("all scoring protocols agree with brute-force rational "
                   "oracles on 1,200 randomized instances"):
        rng = random.Random(987654321)
        instances = 0

        # micro precision/recall/F1 on full triples: exact equality
        for _ in range(400):
            gold, raw_predictions = _random_targeted_case(rng)
            predictions = [
                Prediction(sid, TupleSet(TaskKind.TASD, frozenset(tuples)))
                for sid, tuples in raw_predictions
            ]
            stats = micro_f1(predictions, gold, TaskKind.TASD)
            pred_by_id = {sid: tuples for sid, tuples in raw_predictions}
            pairs = []
            for sentence in gold.sentences:
                gold_items = {
                    (
                        " ".join(o.target.split()).lower() if o.target else "NULL",
                        o.aspect,
                        o.polarity,
                    )
                    for o in sentence.opinions
                }
                pred_items = {
                    (t.target, t.aspect, t.polarity)
                    for t in pred_by_id.get(sentence.id, ())
                }
                pairs.append((pred_items, gold_items))
            precision, recall, f1 = oracle_micro(pairs)
            assert stats.precision == float(precision)
            assert stats.recall == float(recall)
            assert stats.f1 == float(f1)
            instances += 1

        # restaurant aspect-polarity accuracy at every way: exact equality
        for _ in range(300):
            gold, raw_predictions = _random_aspect_case(rng, R14, R14.polarities)
            predictions = [
                Prediction(sid, TupleSet(TaskKind.ASD, frozenset(tuples)))
                for sid, tuples in raw_predictions
            ]
            pred_by_id = {sid: tuples for sid, tuples in raw_predictions}
            pairs = []
            for sentence in gold.sentences:
                gold_items = {(o.aspect, o.polarity) for o in sentence.opinions}
                pred_items = {
                    (t.aspect, t.polarity) for t in pred_by_id[sentence.id]
                }
                pairs.append((pred_items, gold_items))
            for way, allowed in (
                (4, ("positive", "negative", "neutral", "conflict")),
                (3, ("positive", "negative", "neutral")),
                (2, ("positive", "negative")),
            ):
                stats = accuracy_asd(predictions, gold, way)
                assert stats.value == float(oracle_accuracy_restaurant(pairs, allowed))
            instances += 1

        # sentihood label-set accuracy at ways 3 and 2: exact equality
        for _ in range(250):
            gold, raw_predictions = _random_aspect_case(
                rng, SENTIHOOD, ("positive", "negative")
            )
            predictions = [
                Prediction(sid, TupleSet(TaskKind.ASD, frozenset(tuples)))
                for sid, tuples in raw_predictions
            ]
            pred_by_id = {sid: tuples for sid, tuples in raw_predictions}
            pairs = []
            for sentence in gold.sentences:
                gold_items = {(o.aspect, o.polarity) for o in sentence.opinions}
                pred_items = {
                    (t.aspect, t.polarity) for t in pred_by_id[sentence.id]
                }
                pairs.append((pred_items, gold_items))
            for way in (3, 2):
                stats = accuracy_asd(predictions, gold, way)
                expected = oracle_accuracy_sentihood(pairs, SENTIHOOD.aspects, way)
                assert stats.value == float(expected)
            instances += 1

        # sentihood detection macro-F1: within 1e-12 of the rational mean
        for _ in range(250):
            gold, raw_predictions = _random_aspect_case(
                rng, SENTIHOOD, ("positive", "negative")
            )
            predictions = [
                Prediction(
                    sid,
                    TupleSet(
                        TaskKind.AD,
                        frozenset(OpinionTuple(aspect=t.aspect) for t in tuples),
                    ),
                )
                for sid, tuples in raw_predictions
            ]
            pred_by_id = {sid: tuples for sid, tuples in raw_predictions}
            pairs = []
            for sentence in gold.sentences:
                gold_items = {o.aspect for o in sentence.opinions}
                pred_items = {t.aspect for t in pred_by_id[sentence.id]}
                pairs.append((pred_items, gold_items))
            stats = macro_f1_sentihood(predictions, gold)
            expected = oracle_macro_sentihood(pairs, SENTIHOOD.aspects)
            assert abs(stats.value - float(expected)) <= 1e-12
            instances += 1

        assert instances == 1200

        # fixed rational cases stay exact
        gold = Split(
            R16,
            "test",
            (
                Sentence("0", "a", (Opinion(None, "SERVICE#GENERAL", "positive"),
                                    Opinion(None, "FOOD#QUALITY", "negative"))),
                Sentence("1", "b", ()),
            ),
        )
        predictions = [
            Prediction("0", TupleSet(TaskKind.ASD, frozenset(
                {OpinionTuple(None, "SERVICE#GENERAL", "positive")}))),
            Prediction("1", TupleSet(TaskKind.ASD, frozenset(
                {OpinionTuple(None, "AMBIENCE#GENERAL", "neutral")}))),
        ]
        stats = micro_f1(predictions, gold, TaskKind.ASD)
        assert stats.precision == float(Fraction(1, 2))
        assert stats.recall == float(Fraction(1, 2))
        assert stats.f1 == float(Fraction(1, 2))

        # the single-division F1 is the harmonic mean wherever both exist
        for tp, n_pred, n_gold in [(1, 2, 2), (3, 7, 5), (13, 17, 19), (2, 9, 3)]:
            precision = Fraction(tp, n_pred)
            recall = Fraction(tp, n_gold)
            assert Fraction(2 * tp, n_pred + n_gold) == (
                2 * precision * recall / (precision + recall)
            )


def _write_identity_predictions(pairs_path, pred_path):
    rows = [json.loads(line) for line in Path(pairs_path).read_text().splitlines()]
    with open(pred_path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(
                json.dumps({"id": row["id"], "output": row["target"]},
                           ensure_ascii=False) + "\n"
            )
    return len(rows)


def _assert_perfect(report_path, context):
    report = json.loads(Path(report_path).read_text())
    assert report["micro"] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}, context
    if report["implicit_variant"] is not None:
        assert report["implicit_variant"] == {
            "precision": 1.0, "recall": 1.0, "f1": 1.0,
        }, context
    if report["accuracy"] is not None:
        assert set(report["accuracy"].values()) == {1.0}, context
    if report["macro_f1"] is not None:
        assert report["macro_f1"] == 1.0, context
    assert report["decode_stats"] == {"dropped": 0, "repairs": 0}, context


def test_identity_pipeline_scores_perfectly(tmp_path, capsys):
    with criterion("feeding gold serializations back as predictions scores "
                   "1.0 everywhere with zero drops"):
        corpora = [(name, str(path)) for name, path in FIXTURE_PATHS.items()]
        corpora += [(name, str(path)) for name, path in official_files()]
        runs = 0
        for dataset, gold_path in corpora:
            schema = SCHEMAS[dataset]
            ordered = sorted(supported_tasks(schema), key=lambda t: t.value)
            for fmt in ("phrase", "sentence"):
                # one file per task in separate mode
                for task in ordered:
                    pairs = tmp_path / f"{runs}-pairs.jsonl"
                    preds = tmp_path / f"{runs}-preds.jsonl"
                    report = tmp_path / f"{runs}-report.json"
                    assert main([
                        "prepare", "--dataset", dataset, "--gold", gold_path,
                        "--task", task.value, "--format", fmt,
                        "--out", str(pairs),
                    ]) == 0
                    _write_identity_predictions(pairs, preds)
                    assert main([
                        "score", "--dataset", dataset, "--gold", gold_path,
                        "--task", task.value, "--format", fmt,
                        "--pred", str(preds), "--report", str(report),
                        "--no-figure",
                    ]) == 0
                    _assert_perfect(report, (dataset, task.value, fmt, "separate"))
                    runs += 1
                # one maximal-task file scored at every subtask in joint mode
                joint_pairs = tmp_path / f"{runs}-joint.jsonl"
                joint_preds = tmp_path / f"{runs}-joint-preds.jsonl"
                assert main([
                    "prepare", "--dataset", dataset, "--gold", gold_path,
                    "--mode", "joint", "--format", fmt, "--out", str(joint_pairs),
                ]) == 0
                _write_identity_predictions(joint_pairs, joint_preds)
                for task in ordered:
                    report = tmp_path / f"{runs}-joint-report.json"
                    assert main([
                        "score", "--dataset", dataset, "--gold", gold_path,
                        "--mode", "joint", "--task", task.value, "--format", fmt,
                        "--pred", str(joint_preds), "--report", str(report),
                        "--no-figure",
                    ]) == 0
                    _assert_perfect(report, (dataset, task.value, fmt, "joint"))
                    runs += 1
        capsys.readouterr()  # swallow the CLI chatter; keep the PASS line clean
        assert runs >= 40


def _fuzz_inputs(rng, seeds, count):
    pool = string.printable + "éàü±§µ～〜" + "".join(chr(c) for c in range(0x20))
    for _ in range(count):
        roll = rng.random()
        if roll < 0.25:
            yield "".join(rng.choice(pool) for _ in range(rng.randrange(0, 60)))
        elif roll < 0.35:
            yield bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40))).decode(
                "latin-1"
            )
        else:
            text = rng.choice(seeds)
            for _ in range(rng.randrange(1, 4)):
                mutation = rng.randrange(6)
                if not text:
                    break
                position = rng.randrange(len(text))
                if mutation == 0:
                    text = text[:position] + text[position + 1:]
                elif mutation == 1:
                    text = text[:position] + rng.choice(pool) + text[position:]
                elif mutation == 2:
                    text = text[:position]
                elif mutation == 3:
                    text = text[position:] + text[:position]
                elif mutation == 4:
                    text = text[:position] + text[position:].swapcase()
                else:
                    text = text.replace(" ~ ", " ~~ ", 1)
            yield text


def test_decoder_totality_under_fuzzing(all_splits):
    with criterion("the decoder survives 100,000 fuzzed inputs and a "
                   "deleted fragment removes exactly one opinion"):
        rng = random.Random(24681357)

        # seed pool: every gold serialization of every fixture split
        seeds = []
        decode_instances = []
        for split in all_splits.values():
            for instance in instances_for(split.schema):
                decode_instances.append(instance)
                for sentence in split.sentences:
                    seeds.append(serialize(sentence, instance))
        seeds = sorted(set(seeds))

        for text in _fuzz_inputs(rng, seeds, 100_000):
            instance = rng.choice(decode_instances)
            outcome = decode(text, instance)
            assert outcome.tuples.task is instance.task
            assert outcome.dropped == len(outcome.notes)
            for found in outcome.tuples.tuples:
                if found.aspect is not None:
                    assert found.aspect in instance.schema.aspects
                if found.polarity is not None:
                    assert found.polarity in instance.schema.polarities

        # deleting one fragment from a gold serialization drops exactly
        # that one opinion and parses the rest cleanly
        cases = []
        for split in all_splits.values():
            for instance in instances_for(split.schema):
                for sentence in split.sentences:
                    tuples = ordered_tuples(sentence, instance.task)
                    if len(tuples) >= 2:
                        for index in range(len(tuples)):
                            cases.append((sentence, instance, tuples, index))
        extra_rng = random.Random(1122)
        while len(cases) < 300:
            opinions = tuple(
                Opinion(
                    extra_rng.choice(["fish", "bread", "wine list", "decor", None]),
                    extra_rng.choice(R16.aspects),
                    extra_rng.choice(R16.polarities),
                )
                for _ in range(extra_rng.randrange(2, 5))
            )
            sentence = Sentence("f:0", "fish bread wine list decor", opinions)
            instance = TaskInstance(
                extra_rng.choice((TaskKind.TASD, TaskKind.TAD, TaskKind.TSD)),
                extra_rng.choice(tuple(SerializationFormat)),
                Mode.SEPARATE,
                R16,
            )
            tuples = ordered_tuples(sentence, instance.task)
            if len(tuples) < 2:
                continue
            cases.append((sentence, instance, tuples, extra_rng.randrange(len(tuples))))

        assert len(cases) >= 300
        for sentence, instance, tuples, index in cases:
            rendered = serialize(sentence, instance)
            if instance.format is SerializationFormat.PHRASE:
                fragments = rendered.split(OPINION_SEPARATOR)
                assert len(fragments) == len(tuples)
                mutated = OPINION_SEPARATOR.join(
                    fragments[:index] + fragments[index + 1:]
                )
            else:
                assert rendered.startswith(SENTENCE_PREFIX)
                fragments = _split_top_level(rendered[len(SENTENCE_PREFIX):])
                assert len(fragments) == len(tuples)
                mutated = SENTENCE_PREFIX + ", ".join(
                    fragments[:index] + fragments[index + 1:]
                )
            outcome = decode(mutated, instance, STRICT)
            assert outcome.dropped == 0
            assert outcome.tuples.tuples == frozenset(tuples) - {tuples[index]}
            assert len(outcome.tuples.tuples) == len(tuples) - 1


def _split_top_level(body):
    """Split on ', ' outside square brackets (test-local reimplementation)."""
    parts = []
    depth = 0
    current = []
    i = 0
    while i < len(body):
        char = body[i]
        if char == "[":
            depth += 1
        elif char == "]":
            depth -= 1
        if depth == 0 and body.startswith(", ", i):
            parts.append("".join(current))
            current = []
            i += 2
            continue
        current.append(char)
        i += 1
    parts.append("".join(current))
    return parts


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    with criterion("repeated prepare and score runs produce byte-identical "
                   "JSONL, report, and figure files"):
        gold_path = str(FIXTURE_PATHS["restaurants-16"])
        snapshots = []
        for round_name in ("one", "two"):
            work = tmp_path / round_name
            work.mkdir()
            assert main([
                "prepare", "--dataset", "restaurants-16", "--gold", gold_path,
                "--out", str(work / "pairs"),
            ]) == 0
            pairs = work / "pairs" / "tasd.jsonl"
            preds = work / "preds.jsonl"
            _write_identity_predictions(pairs, preds)
            assert main([
                "score", "--dataset", "restaurants-16", "--gold", gold_path,
                "--task", "tasd", "--pred", str(preds),
                "--report", str(work / "report.json"),
            ]) == 0
            snapshot = {}
            for path in sorted((work / "pairs").iterdir()):
                snapshot[f"pairs/{path.name}"] = path.read_bytes()
            snapshot["report.json"] = (work / "report.json").read_bytes()
            snapshot["report.png"] = (work / "report.png").read_bytes()
            snapshots.append(snapshot)
        capsys.readouterr()
        first, second = snapshots
        assert set(first) == set(second)
        assert "report.png" in first
        for name in first:
            assert first[name] == second[name], name
