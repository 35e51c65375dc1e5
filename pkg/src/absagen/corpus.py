"""Loaders for the SemEval restaurant corpora and the Sentihood corpus.

All loaders read the files exactly as distributed (no pre-conversion) and
return immutable Split objects. Aspect and polarity values are checked
against the dataset's closed label schema at load time.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusParseError, SchemaViolationError


@dataclass(frozen=True)
class Opinion:
    """One annotated opinion; target is None for the implicit (NULL) case."""

    target: str | None
    aspect: str
    polarity: str


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    opinions: tuple[Opinion, ...]


@dataclass(frozen=True)
class LabelSchema:
    """Closed aspect and polarity inventories for one dataset."""

    name: str
    aspects: tuple[str, ...]
    polarities: tuple[str, ...]
    supports_targets: bool

    def __post_init__(self):
        for kind, values in (("aspect", self.aspects), ("polarity", self.polarities)):
            if not values:
                raise ValueError(f"{self.name}: empty {kind} set")
            lowered = [v.lower() for v in values]
            if len(set(lowered)) != len(lowered):
                raise ValueError(f"{self.name}: duplicate {kind} labels")

    def canonical_aspect(self, raw: str) -> str | None:
        """Return the schema's casing for raw, or None if it is not a label."""
        low = raw.strip().lower()
        for label in self.aspects:
            if label.lower() == low:
                return label
        return None

    def canonical_polarity(self, raw: str) -> str | None:
        low = raw.strip().lower()
        for label in self.polarities:
            if label.lower() == low:
                return label
        return None


@dataclass(frozen=True)
class Split:
    schema: LabelSchema
    kind: str
    sentences: tuple[Sentence, ...]

    def find(self, sentence_id: str) -> Sentence | None:
        for sentence in self.sentences:
            if sentence.id == sentence_id:
                return sentence
        return None


@dataclass(frozen=True)
class Diagnostic:
    sentence_id: str
    kind: str
    message: str


_RESTAURANT_CATEGORIES_1516 = (
    "AMBIENCE#GENERAL",
    "DRINKS#PRICES",
    "DRINKS#QUALITY",
    "DRINKS#STYLE_OPTIONS",
    "FOOD#PRICES",
    "FOOD#QUALITY",
    "FOOD#STYLE_OPTIONS",
    "LOCATION#GENERAL",
    "RESTAURANT#GENERAL",
    "RESTAURANT#MISCELLANEOUS",
    "RESTAURANT#PRICES",
    "SERVICE#GENERAL",
)

SENTIHOOD_ENTITIES = ("LOCATION1", "LOCATION2")
SENTIHOOD_ASPECTS = ("general", "price", "safety", "transit-location")

SCHEMAS: dict[str, LabelSchema] = {
    "restaurants-14": LabelSchema(
        name="restaurants-14",
        aspects=("ambience", "anecdotes/miscellaneous", "food", "price", "service"),
        polarities=("positive", "negative", "neutral", "conflict"),
        supports_targets=False,
    ),
    "restaurants-15": LabelSchema(
        name="restaurants-15",
        aspects=_RESTAURANT_CATEGORIES_1516,
        polarities=("positive", "negative", "neutral"),
        supports_targets=True,
    ),
    "restaurants-16": LabelSchema(
        name="restaurants-16",
        aspects=_RESTAURANT_CATEGORIES_1516,
        polarities=("positive", "negative", "neutral"),
        supports_targets=True,
    ),
    "sentihood": LabelSchema(
        name="sentihood",
        aspects=tuple(
            f"{entity}#{aspect}"
            for entity in SENTIHOOD_ENTITIES
            for aspect in SENTIHOOD_ASPECTS
        ),
        polarities=("positive", "negative", "none"),
        supports_targets=False,
    ),
}


def _parse_xml(path) -> ET.Element:
    try:
        return ET.parse(str(path)).getroot()
    except ET.ParseError as exc:
        line, column = exc.position
        raise CorpusParseError(
            f"{path}: malformed XML at line {line}, column {column}: {exc}"
        ) from exc
    except OSError as exc:
        raise CorpusParseError(f"{path}: {exc}") from exc


def _sentence_text(element: ET.Element, sentence_id: str, path) -> str:
    node = element.find("text")
    text = node.text if node is not None and node.text else ""
    if not text.strip():
        raise CorpusParseError(f"{path}: sentence {sentence_id} has empty text")
    return text


def _register_id(sentence_id: str | None, seen: set[str], path) -> str:
    if not sentence_id:
        raise CorpusParseError(f"{path}: sentence element without an id attribute")
    if sentence_id in seen:
        raise CorpusParseError(f"{path}: duplicate sentence id {sentence_id!r}")
    seen.add(sentence_id)
    return sentence_id


def load_semeval14(path, kind: str = "train") -> Split:
    """Load a SemEval-2014 restaurants file (aspectCategory annotations).

    aspectTerm elements are present in the official files but carry no
    category, so they are ignored; only (category, polarity) pairs become
    opinions. Duplicate pairs within one sentence collapse to one Opinion.
    """
    schema = SCHEMAS["restaurants-14"]
    root = _parse_xml(path)
    if root.tag != "sentences":
        raise CorpusParseError(
            f"{path}: expected a <sentences> root element, found <{root.tag}>"
        )
    sentences = []
    seen_ids: set[str] = set()
    for element in root.iter("sentence"):
        sentence_id = _register_id(element.get("id"), seen_ids, path)
        text = _sentence_text(element, sentence_id, path)
        opinions = []
        seen_pairs = set()
        for node in element.iter("aspectCategory"):
            aspect = schema.canonical_aspect(node.get("category") or "")
            if aspect is None:
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown aspect category "
                    f"{node.get('category')!r}"
                )
            polarity = schema.canonical_polarity(node.get("polarity") or "")
            if polarity is None:
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown polarity "
                    f"{node.get('polarity')!r}"
                )
            if (aspect, polarity) in seen_pairs:
                continue
            seen_pairs.add((aspect, polarity))
            opinions.append(Opinion(None, aspect, polarity))
        sentences.append(Sentence(sentence_id, text, tuple(opinions)))
    return Split(schema, kind, tuple(sentences))


def _check_offsets(node: ET.Element, sentence_id: str, path) -> None:
    # Offsets are validated for basic sanity but never stored.
    raw_from, raw_to = node.get("from"), node.get("to")
    if raw_from is None and raw_to is None:
        return
    try:
        start, end = int(raw_from or ""), int(raw_to or "")
    except ValueError as exc:
        raise CorpusParseError(
            f"{path}: sentence {sentence_id}: non-integer from/to offsets"
        ) from exc
    if start < 0 or end < start:
        raise CorpusParseError(
            f"{path}: sentence {sentence_id}: invalid offsets {start}..{end}"
        )


def load_semeval1516(path, year: int, kind: str = "train") -> Split:
    """Load a SemEval-2015/2016 restaurants file (Opinion annotations).

    A target attribute equal to "NULL" marks an implicit target and is
    stored as None; an Opinion element without a target attribute is a
    parse error. Identical (target, category, polarity) triples within one
    sentence collapse to one Opinion.
    """
    if year not in (15, 16):
        raise ValueError(f"year must be 15 or 16, got {year!r}")
    schema = SCHEMAS[f"restaurants-{year}"]
    root = _parse_xml(path)
    if root.tag != "Reviews":
        raise CorpusParseError(
            f"{path}: expected a <Reviews> root element, found <{root.tag}>"
        )
    sentences = []
    seen_ids: set[str] = set()
    for element in root.iter("sentence"):
        sentence_id = _register_id(element.get("id"), seen_ids, path)
        text = _sentence_text(element, sentence_id, path)
        opinions = []
        seen_triples = set()
        for node in element.iter("Opinion"):
            if "target" not in node.attrib:
                raise CorpusParseError(
                    f"{path}: sentence {sentence_id}: Opinion element missing "
                    f"the target attribute"
                )
            aspect = schema.canonical_aspect(node.get("category") or "")
            if aspect is None:
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown aspect category "
                    f"{node.get('category')!r}"
                )
            polarity = schema.canonical_polarity(node.get("polarity") or "")
            if polarity is None:
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown polarity "
                    f"{node.get('polarity')!r}"
                )
            _check_offsets(node, sentence_id, path)
            raw_target = node.attrib["target"]
            target = None if raw_target == "NULL" else raw_target.strip()
            if target == "":
                raise CorpusParseError(
                    f"{path}: sentence {sentence_id}: empty target attribute"
                )
            triple = (target, aspect, polarity)
            if triple in seen_triples:
                continue
            seen_triples.add(triple)
            opinions.append(Opinion(target, aspect, polarity))
        sentences.append(Sentence(sentence_id, text, tuple(opinions)))
    return Split(schema, kind, tuple(sentences))


def load_sentihood(path, kind: str = "train", other_aspects: str = "drop") -> Split:
    """Load a Sentihood JSON file into combined LOCATIONn#aspect opinions.

    Official files annotate aspects beyond the eight benchmark categories;
    by default those opinions are dropped, which matches the benchmark
    protocol and keeps the distributed files loadable. Pass
    other_aspects="error" to reject them instead. Targets do not exist in
    this corpus, and the "none" polarity is never stored: it only appears
    as the implied label for unmentioned categories at scoring time.
    """
    if other_aspects not in ("drop", "error"):
        raise ValueError(f"other_aspects must be 'drop' or 'error', got {other_aspects!r}")
    schema = SCHEMAS["sentihood"]
    try:
        records = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusParseError(f"{path}: malformed JSON: {exc}") from exc
    except OSError as exc:
        raise CorpusParseError(f"{path}: {exc}") from exc
    if not isinstance(records, list):
        raise CorpusParseError(f"{path}: expected a top-level JSON array")
    sentences = []
    seen_ids: set[str] = set()
    for position, record in enumerate(records):
        if not isinstance(record, dict) or "id" not in record:
            raise CorpusParseError(f"{path}: record {position} has no id field")
        sentence_id = _register_id(str(record["id"]), seen_ids, path)
        text = record.get("text") or ""
        if not isinstance(text, str) or not text.strip():
            raise CorpusParseError(f"{path}: sentence {sentence_id} has empty text")
        opinions = []
        seen_pairs = set()
        raw_opinions = record.get("opinions", [])
        if not isinstance(raw_opinions, list):
            raise CorpusParseError(
                f"{path}: sentence {sentence_id}: opinions is not a list"
            )
        for raw in raw_opinions:
            entity = str(raw.get("target_entity", "")).strip().upper()
            if entity not in SENTIHOOD_ENTITIES:
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown target_entity "
                    f"{raw.get('target_entity')!r}"
                )
            aspect_value = str(raw.get("aspect", "")).strip().lower()
            if aspect_value not in SENTIHOOD_ASPECTS:
                if other_aspects == "drop":
                    continue
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown aspect {raw.get('aspect')!r}"
                )
            sentiment = str(raw.get("sentiment", "")).strip().lower()
            if sentiment not in ("positive", "negative"):
                raise SchemaViolationError(
                    f"sentence {sentence_id}: unknown sentiment "
                    f"{raw.get('sentiment')!r}"
                )
            combined = f"{entity}#{aspect_value}"
            if (combined, sentiment) in seen_pairs:
                continue
            seen_pairs.add((combined, sentiment))
            opinions.append(Opinion(None, combined, sentiment))
        sentences.append(Sentence(sentence_id, text, tuple(opinions)))
    return Split(schema, kind, tuple(sentences))


def validate_split(split: Split) -> list[Diagnostic]:
    """Flag stored targets that will not survive the round trip cleanly.

    Emits one diagnostic per explicit target that is not a case-insensitive
    substring of its sentence text, and one per target whose normalized form
    collides with the implicit marker.
    """
    diagnostics = []
    for sentence in split.sentences:
        lowered = sentence.text.lower()
        for opinion in sentence.opinions:
            if opinion.target is None:
                continue
            if " ".join(opinion.target.split()).lower() == "null":
                diagnostics.append(
                    Diagnostic(
                        sentence.id,
                        "implicit-marker-target",
                        f"target {opinion.target!r} normalizes to the implicit marker",
                    )
                )
            if opinion.target.lower() not in lowered:
                diagnostics.append(
                    Diagnostic(
                        sentence.id,
                        "target-not-substring",
                        f"target {opinion.target!r} not found in the sentence text",
                    )
                )
    return diagnostics
