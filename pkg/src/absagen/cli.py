"""Command-line interface: prepare, score, validate, and inspect.

Exit codes: 0 on success, 1 for usage or configuration problems, 2 for
data problems (unreadable or inconsistent corpus/prediction files,
round-trip failures under validate).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .corpus import (
    SCHEMAS,
    Split,
    load_semeval14,
    load_semeval1516,
    load_sentihood,
    validate_split,
)
from .decoder import STRICT, DecodePolicy, Strictness, decode, decode_batch, lenient
from .errors import (
    ConfigError,
    CorpusParseError,
    PredictionInputError,
    SchemaViolationError,
    SerializationError,
    ToolkitError,
    UnsupportedTaskError,
)
from .figures import render_report_figure
from .metrics import (
    Counts,
    DecodeStats,
    Prediction,
    accuracy_asd,
    build_report,
    macro_f1_sentihood,
    micro_f1,
    tsd_tasd_scores,
)
from .serializer import (
    Mode,
    SerializationFormat,
    TaskInstance,
    build_training_pairs,
    default_prefix,
    serialize,
)
from .tasks import (
    TaskKind,
    maximal_task,
    project,
    project_tuples,
    supported_tasks,
)

DATASET_ALIASES = {
    "restaurants-14": "restaurants-14",
    "restaurants-15": "restaurants-15",
    "restaurants-16": "restaurants-16",
    "sentihood": "sentihood",
    "se14": "restaurants-14",
    "se15": "restaurants-15",
    "se16": "restaurants-16",
}

_CONFIG_KEYS = {
    "dataset",
    "task",
    "format",
    "mode",
    "prefix",
    "policy",
    "gold",
    "pred",
    "out",
    "report",
    "repair_distance",
    "implicit_overall",
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2 for
    # data errors, so usage problems exit 1 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    dataset: str
    task_value: str | None
    format: SerializationFormat
    mode: Mode
    prefix: str | None
    policy: DecodePolicy
    gold: str
    pred: str | None
    out: str | None
    report: str | None
    implicit_overall: str
    no_figure: bool
    sentence_id: str | None


def _read_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = body.partition("=")
        key = key.strip().lower().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _parse_enum(raw: str, enum_cls, what: str):
    try:
        return enum_cls(raw.strip().lower())
    except ValueError:
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"unknown {what} {raw!r} (choose from: {choices})") from None


def _build_config(args) -> RunConfig:
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name: str, default=None):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name, default)

    dataset_raw = pick("dataset")
    if not dataset_raw:
        raise ConfigError("a dataset is required (--dataset or a config file entry)")
    dataset = DATASET_ALIASES.get(str(dataset_raw).strip().lower())
    if dataset is None:
        raise ConfigError(
            f"unknown dataset {dataset_raw!r} "
            f"(choose from: {', '.join(sorted(SCHEMAS))})"
        )

    fmt = _parse_enum(str(pick("format", "phrase")), SerializationFormat, "format")
    mode = _parse_enum(str(pick("mode", "separate")), Mode, "mode")

    policy_raw = str(pick("policy", "strict")).strip().lower()
    try:
        repair_distance = int(str(pick("repair_distance", "2")))
    except ValueError:
        raise ConfigError("repair_distance must be an integer") from None
    if policy_raw == "strict":
        policy = STRICT
    elif policy_raw == "lenient":
        if repair_distance > 0:
            policy = lenient(repair_distance)
        else:
            policy = DecodePolicy(strictness=Strictness.LENIENT)
    else:
        raise ConfigError(f"unknown policy {policy_raw!r} (choose strict or lenient)")

    implicit_overall = str(pick("implicit_overall", "exclude")).strip().lower()
    if implicit_overall not in ("exclude", "include"):
        raise ConfigError("implicit_overall must be 'exclude' or 'include'")

    gold = pick("gold")
    if not gold:
        raise ConfigError("a gold corpus path is required (--gold)")
    if not Path(str(gold)).exists():
        raise ConfigError(f"gold path does not exist: {gold}")

    pred = pick("pred")
    if args.command == "score":
        if not pred:
            raise ConfigError("score needs a predictions path (--pred)")
        if not Path(str(pred)).exists():
            raise ConfigError(f"predictions path does not exist: {pred}")

    out = pick("out")
    if args.command == "prepare" and not out:
        raise ConfigError("prepare needs an output path (--out)")

    return RunConfig(
        command=args.command,
        dataset=dataset,
        task_value=pick("task"),
        format=fmt,
        mode=mode,
        prefix=pick("prefix"),
        policy=policy,
        gold=str(gold),
        pred=str(pred) if pred else None,
        out=str(out) if out else None,
        report=pick("report"),
        implicit_overall=implicit_overall,
        no_figure=bool(getattr(args, "no_figure", False)),
        sentence_id=getattr(args, "id", None),
    )


def _load_split(cfg: RunConfig) -> Split:
    if cfg.dataset == "restaurants-14":
        return load_semeval14(cfg.gold)
    if cfg.dataset == "restaurants-15":
        return load_semeval1516(cfg.gold, 15)
    if cfg.dataset == "restaurants-16":
        return load_semeval1516(cfg.gold, 16)
    return load_sentihood(cfg.gold)


def _ordered_supported(schema) -> list[TaskKind]:
    supported = supported_tasks(schema)
    return [task for task in TaskKind if task in supported]


def _resolve_task_list(cfg: RunConfig, schema) -> list[TaskKind]:
    """Tasks to prepare. Joint mode always serializes the maximal task."""
    if cfg.mode is Mode.JOINT:
        top = maximal_task(schema)
        if cfg.task_value and cfg.task_value.strip().lower() not in ("all", top.value):
            raise ConfigError(
                f"joint mode serializes {top.value}; drop --task or pass {top.value}"
            )
        return [top]
    if not cfg.task_value or cfg.task_value.strip().lower() == "all":
        return _ordered_supported(schema)
    tasks = []
    for piece in cfg.task_value.split(","):
        task = _parse_enum(piece, TaskKind, "task")
        if task not in supported_tasks(schema):
            raise UnsupportedTaskError(
                f"task {task.value} is not defined for {schema.name}"
            )
        if task not in tasks:
            tasks.append(task)
    return tasks


def _resolve_single_task(cfg: RunConfig, schema) -> TaskKind:
    if not cfg.task_value or cfg.task_value.strip().lower() == "all":
        return maximal_task(schema)
    task = _parse_enum(cfg.task_value, TaskKind, "task")
    if task not in supported_tasks(schema):
        raise UnsupportedTaskError(f"task {task.value} is not defined for {schema.name}")
    return task


def _write_jsonl(path: Path, rows) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count


def cmd_prepare(cfg: RunConfig) -> int:
    split = _load_split(cfg)
    tasks = _resolve_task_list(cfg, split.schema)
    multiple = len(tasks) > 1
    out = Path(cfg.out)
    for task in tasks:
        instance = TaskInstance(task, cfg.format, cfg.mode, split.schema)
        prefix = cfg.prefix if cfg.prefix is not None else default_prefix(task)
        pairs = build_training_pairs(split, instance, prefix)
        path = out / f"{task.value}.jsonl" if multiple else out
        count = _write_jsonl(
            path, ({"id": p.id, "input": p.input, "target": p.target} for p in pairs)
        )
        print(f"wrote {count} {task.value}/{cfg.format.value} pairs to {path}")
    return 0


def _read_predictions(path: str) -> list[tuple[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PredictionInputError(f"{path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PredictionInputError(
                f"{path}:{lineno}: malformed JSON: {exc}"
            ) from exc
        if not isinstance(row, dict) or "id" not in row or "output" not in row:
            raise PredictionInputError(
                f"{path}:{lineno}: expected an object with id and output fields"
            )
        if not isinstance(row["output"], str):
            raise PredictionInputError(f"{path}:{lineno}: output must be a string")
        rows.append((str(row["id"]), row["output"]))
    return rows


def _format_percent(value: float) -> str:
    return f"{100 * value:.2f}"


def _print_summary(report, variant_label: str | None) -> None:
    rows = [
        ("dataset", report.dataset),
        (
            "task / format / mode",
            f"{report.task.value} / {report.format.value} / {report.mode.value}",
        ),
        ("scored sentences", str(report.counts.scored_sentences)),
        (
            "gold / pred / matched",
            f"{report.counts.gold_tuples} / {report.counts.predicted_tuples} "
            f"/ {report.counts.matched_tuples}",
        ),
        (
            "micro P / R / F1",
            f"{_format_percent(report.micro.precision)} / "
            f"{_format_percent(report.micro.recall)} / "
            f"{_format_percent(report.micro.f1)}",
        ),
    ]
    if report.implicit_variant is not None:
        variant = report.implicit_variant
        rows.append(
            (
                variant_label or "variant P / R / F1",
                f"{_format_percent(variant.precision)} / "
                f"{_format_percent(variant.recall)} / "
                f"{_format_percent(variant.f1)}",
            )
        )
    if report.macro_f1 is not None:
        rows.append(("macro F1 (detection)", _format_percent(report.macro_f1)))
    if report.accuracy:
        rows.append(
            (
                "accuracy",
                "   ".join(
                    f"{way} {_format_percent(value)}"
                    for way, value in report.accuracy.items()
                ),
            )
        )
    rows.append(
        (
            "decode dropped / repaired",
            f"{report.decode_stats.dropped} / {report.decode_stats.repairs}",
        )
    )
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"{label.ljust(width)}  {value}")


def cmd_score(cfg: RunConfig) -> int:
    split = _load_split(cfg)
    schema = split.schema
    scored_task = _resolve_single_task(cfg, schema)
    decode_task = maximal_task(schema) if cfg.mode is Mode.JOINT else scored_task
    instance = TaskInstance(decode_task, cfg.format, cfg.mode, schema)
    records = _read_predictions(cfg.pred)
    batch = decode_batch(records, instance, cfg.policy)

    predictions = []
    for sentence_id, outcome in batch.outcomes.items():
        tuple_set = outcome.tuples
        if decode_task is not scored_task:
            tuple_set = project_tuples(tuple_set, scored_task)
        predictions.append(Prediction(sentence_id, tuple_set))

    exclude = cfg.implicit_overall == "exclude"
    variant = None
    variant_label = None
    if scored_task in (TaskKind.TSD, TaskKind.TASD):
        targeted = tsd_tasd_scores(predictions, split, scored_task, exclude)
        micro = targeted.overall
        variant = targeted.implicit_variant
        variant_label = (
            "with NULL targets P / R / F1" if exclude else "explicit only P / R / F1"
        )
        full = variant if exclude else micro
        counts = Counts(full.gold, full.predicted, full.matched, len(split.sentences))
    else:
        micro = micro_f1(predictions, split, scored_task)
        counts = Counts(micro.gold, micro.predicted, micro.matched, len(split.sentences))

    accuracy = None
    if scored_task is TaskKind.ASD:
        ways = (4, 3, 2) if len(schema.polarities) >= 4 else (3, 2)
        accuracy = {
            f"{way}-way": accuracy_asd(predictions, split, way).value for way in ways
        }

    macro = None
    if schema.name == "sentihood" and scored_task is TaskKind.AD:
        macro = macro_f1_sentihood(predictions, split).value

    report = build_report(
        dataset=cfg.dataset,
        task=scored_task,
        format=cfg.format,
        mode=cfg.mode,
        micro=micro,
        counts=counts,
        decode_stats=DecodeStats(batch.dropped, batch.repairs),
        macro_f1=macro,
        accuracy=accuracy,
        implicit_variant=variant,
    )

    if cfg.report:
        report_path = Path(cfg.report)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(report.to_json(), encoding="utf-8")
        print(f"report written to {report_path}")
        if not cfg.no_figure:
            figure_path = report_path.with_suffix(".png")
            render_report_figure(report, figure_path)
            print(f"figure written to {figure_path}")
    _print_summary(report, variant_label)
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    split = _load_split(cfg)
    for diagnostic in validate_split(split):
        print(f"note {diagnostic.sentence_id}: [{diagnostic.kind}] {diagnostic.message}")
    failing_sentences = 0
    checks = 0
    for sentence in split.sentences:
        problems = []
        for task in _ordered_supported(split.schema):
            for fmt in SerializationFormat:
                instance = TaskInstance(task, fmt, Mode.SEPARATE, split.schema)
                checks += 1
                try:
                    text = serialize(sentence, instance)
                except SerializationError as exc:
                    problems.append(str(exc))
                    continue
                outcome = decode(text, instance)
                expected = project(sentence.opinions, task)
                if outcome.tuples != expected or outcome.dropped:
                    problems.append(
                        f"round trip mismatch for {task.value}/{fmt.value}"
                    )
        if problems:
            failing_sentences += 1
            print(
                f"fail {sentence.id}: {problems[0]}"
                + (f" (+{len(problems) - 1} more)" if len(problems) > 1 else "")
            )
    print(
        f"validated {len(split.sentences)} sentences, {checks} round-trip checks, "
        f"{failing_sentences} failing sentences"
    )
    return 0 if failing_sentences == 0 else 2


def cmd_inspect(cfg: RunConfig) -> int:
    split = _load_split(cfg)
    if not cfg.sentence_id:
        raise ConfigError("inspect needs a sentence id (--id)")
    sentence = split.find(cfg.sentence_id)
    if sentence is None:
        print(f"error: sentence id {cfg.sentence_id!r} not found", file=sys.stderr)
        return 2
    print(f"id      {sentence.id}")
    print(f"text    {sentence.text}")
    if sentence.opinions:
        for opinion in sentence.opinions:
            target = opinion.target if opinion.target is not None else "NULL"
            print(f"gold    {target} | {opinion.aspect} | {opinion.polarity}")
    else:
        print("gold    (no opinions)")
    for task in _ordered_supported(split.schema):
        for fmt in SerializationFormat:
            instance = TaskInstance(task, fmt, Mode.SEPARATE, split.schema)
            print(f"{task.value:<5} {fmt.value:<9} {serialize(sentence, instance)}")
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--dataset", help="restaurants-14/15/16 or sentihood")
    sub.add_argument("--gold", help="gold corpus file (official distribution format)")


def _make_parser() -> _Parser:
    parser = _Parser(
        prog="absagen",
        description=(
            "Linearize gold ABSA opinions into seq2seq targets, decode generated "
            "text, and score predictions."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prepare = sub.add_parser("prepare", help="write training pairs as JSONL")
    _add_common(prepare)
    prepare.add_argument("--task", help="task name, comma list, or 'all'")
    prepare.add_argument("--format", help="phrase or sentence")
    prepare.add_argument("--mode", help="separate or joint")
    prepare.add_argument("--prefix", help="input prefix (default '<task>: ')")
    prepare.add_argument("--out", help="output JSONL file (directory for several tasks)")

    score = sub.add_parser("score", help="score a predictions JSONL file")
    _add_common(score)
    score.add_argument("--task", help="task to score (default: the maximal task)")
    score.add_argument("--format", help="phrase or sentence")
    score.add_argument("--mode", help="separate or joint")
    score.add_argument("--policy", help="strict or lenient decoding")
    score.add_argument(
        "--repair-distance",
        dest="repair_distance",
        help="edit-distance budget for lenient label repair (default 2)",
    )
    score.add_argument("--pred", help="predictions JSONL ({'id', 'output'} per line)")
    score.add_argument("--report", help="write the report JSON here")
    score.add_argument(
        "--implicit-overall",
        dest="implicit_overall",
        help="whether the headline tsd/tasd number excludes or includes "
        "implicit targets (default exclude)",
    )
    score.add_argument(
        "--no-figure",
        dest="no_figure",
        action="store_true",
        help="skip the PNG figure next to the report",
    )

    validate = sub.add_parser(
        "validate", help="substring diagnostics and round-trip checks"
    )
    _add_common(validate)

    inspect = sub.add_parser("inspect", help="show one sentence in every format")
    _add_common(inspect)
    inspect.add_argument("--id", help="sentence id to show")

    return parser


_HANDLERS = {
    "prepare": cmd_prepare,
    "score": cmd_score,
    "validate": cmd_validate,
    "inspect": cmd_inspect,
}


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        return _HANDLERS[args.command](cfg)
    except (ConfigError, UnsupportedTaskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
