"""Aspect-based sentiment analysis as conditional text generation.

The package linearizes gold opinion annotations into seq2seq target
strings, decodes model-generated text back into opinion tuples, and scores
predictions under the standard benchmark protocols.
"""

__version__ = "0.1.0"

from .corpus import (
    SCHEMAS,
    Diagnostic,
    LabelSchema,
    Opinion,
    Sentence,
    Split,
    load_semeval14,
    load_semeval1516,
    load_sentihood,
    validate_split,
)
from .decoder import (
    STRICT,
    BatchOutcome,
    DecodeOutcome,
    DecodePolicy,
    LabelRepair,
    Strictness,
    decode,
    decode_batch,
    lenient,
)
from .errors import (
    ConfigError,
    CorpusParseError,
    PredictionInputError,
    SchemaViolationError,
    SerializationError,
    ToolkitError,
    UnsupportedTaskError,
)
from .metrics import (
    AccuracyStats,
    Counts,
    DecodeStats,
    MacroStats,
    MetricsReport,
    MicroStats,
    Prediction,
    TargetedScores,
    accuracy_asd,
    build_report,
    macro_f1_sentihood,
    micro_f1,
    tsd_tasd_scores,
)
from .serializer import (
    CLAUSE_SEPARATOR,
    EMPTY_SENTINEL,
    FIELD_SEPARATOR,
    OPINION_SEPARATOR,
    SENTENCE_PREFIX,
    Mode,
    SerializationFormat,
    TaskInstance,
    TrainingPair,
    build_training_pairs,
    default_prefix,
    ordered_tuples,
    serialize,
)
from .tasks import (
    IMPLICIT_TARGET,
    OpinionTuple,
    TaskKind,
    TupleSet,
    canonical_order,
    maximal_task,
    normalize_target,
    project,
    project_opinion,
    project_tuples,
    supported_tasks,
)
