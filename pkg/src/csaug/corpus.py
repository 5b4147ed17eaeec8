"""Corpus data model and JSONL ingestion.

Three instance shapes cover the supported task families: single-sentence
classification, sentence-pair classification, and token-tagged sequence
labeling with an utterance-level label. Input is pre-tokenized; this module
never word-tokenizes raw text.

JSONL schema (UTF-8, one object per line):
    required: "id" str, "task" one of classify|pair_classify|tag_and_classify,
              "tokens" non-empty array of strings
    pair_classify adds   "tokens2": array of strings
    tag_and_classify adds "tags": array of strings aligned with "tokens"
    optional: "label" str
Augmented output reuses this schema plus a "trace" object, which loaders
here accept and ignore.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import DataError, SchemaError

TASK_KINDS = ("classify", "pair_classify", "tag_and_classify")

# Added by the subword encoder, never legal as corpus tokens.
RESERVED_SURFACES = ("[CLS]", "[SEP]")

JSON_SEPARATORS = (",", ":")


@dataclass(frozen=True, slots=True)
class Replaced:
    """Provenance of a token that came out of a dictionary replacement."""

    target_lang: str
    source_surface: str
    translation_index: int


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    tag: str | None = None
    replaced: Replaced | None = None


@dataclass(frozen=True, slots=True)
class Instance:
    id: str
    task_kind: str
    segments: tuple[tuple[Token, ...], ...]
    label: str | None = None

    def token_count(self) -> int:
        return sum(len(segment) for segment in self.segments)


@dataclass(slots=True)
class Corpus:
    instances: tuple[Instance, ...]
    source_lang: str
    by_id: dict[str, Instance] = field(init=False, repr=False)
    ordinal_by_id: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.by_id = {inst.id: inst for inst in self.instances}
        self.ordinal_by_id = {inst.id: i for i, inst in enumerate(self.instances)}

    def __len__(self) -> int:
        return len(self.instances)


def _check_token_surface(surface, path: str) -> None:
    if not isinstance(surface, str) or not surface:
        raise SchemaError(f"{path}: token surfaces must be non-empty strings")
    if "\n" in surface:
        raise SchemaError(f"{path}: token surface contains a newline")
    if surface in RESERVED_SURFACES:
        raise SchemaError(f"{path}: reserved surface {surface!r} may not appear as a token")


def _segment_from(tokens, tags, path: str) -> tuple[Token, ...]:
    if not isinstance(tokens, list) or not tokens:
        raise SchemaError(f"{path}: must be a non-empty array of strings")
    if tags is not None:
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise SchemaError("tags: must be an array of strings")
        if len(tags) != len(tokens):
            raise SchemaError(
                f"tags: length {len(tags)} does not match {path} length {len(tokens)}"
            )
    out = []
    for i, surface in enumerate(tokens):
        _check_token_surface(surface, f"{path}[{i}]")
        out.append(Token(surface, tags[i] if tags is not None else None))
    return tuple(out)


def instance_from_obj(obj: dict) -> Instance:
    """Validate a decoded JSON object and build an Instance."""
    if not isinstance(obj, dict):
        raise SchemaError("record: must be a JSON object")
    unknown = set(obj) - {"id", "task", "tokens", "tokens2", "tags", "label", "trace"}
    if unknown:
        raise SchemaError(f"record: unknown fields {sorted(unknown)}")

    instance_id = obj.get("id")
    if not isinstance(instance_id, str) or not instance_id:
        raise SchemaError("id: required non-empty string")
    task = obj.get("task")
    if task not in TASK_KINDS:
        raise SchemaError(f"task: must be one of {'|'.join(TASK_KINDS)}, got {task!r}")
    if "tokens" not in obj:
        raise SchemaError("tokens: required field missing")
    if ("tokens2" in obj) != (task == "pair_classify"):
        raise SchemaError("tokens2: present if and only if task is pair_classify")
    if ("tags" in obj) != (task == "tag_and_classify"):
        raise SchemaError("tags: present if and only if task is tag_and_classify")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise SchemaError("label: must be a string when present")

    segments = [_segment_from(obj["tokens"], obj.get("tags"), "tokens")]
    if task == "pair_classify":
        segments.append(_segment_from(obj["tokens2"], None, "tokens2"))
    return Instance(instance_id, task, tuple(segments), label)


def parse_instance(json_line: str) -> Instance:
    try:
        obj = json.loads(json_line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return instance_from_obj(obj)


def instance_to_obj(instance: Instance, trace_obj: dict | None = None) -> dict:
    """Serialize to the JSONL schema; key order is fixed for byte-stable output."""
    obj: dict = {
        "id": instance.id,
        "task": instance.task_kind,
        "tokens": [t.surface for t in instance.segments[0]],
    }
    if instance.task_kind == "pair_classify":
        obj["tokens2"] = [t.surface for t in instance.segments[1]]
    if instance.task_kind == "tag_and_classify":
        obj["tags"] = [t.tag for t in instance.segments[0]]
    if instance.label is not None:
        obj["label"] = instance.label
    if trace_obj is not None:
        obj["trace"] = trace_obj
    return obj


def instance_to_json_line(instance: Instance, trace_obj: dict | None = None) -> str:
    return json.dumps(
        instance_to_obj(instance, trace_obj), ensure_ascii=False, separators=JSON_SEPARATORS
    )


def load_corpus(lines: Iterable[str], source_lang: str) -> Corpus:
    """Load a JSONL corpus, preserving file order; duplicate ids are an error."""
    instances: list[Instance] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            instance = parse_instance(line)
        except SchemaError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
        if instance.id in seen:
            raise DataError(f"line {lineno}: duplicate instance id {instance.id!r}")
        seen.add(instance.id)
        instances.append(instance)
    if not instances:
        raise DataError("corpus is empty")
    return Corpus(tuple(instances), source_lang)


def load_corpus_file(path, source_lang: str) -> Corpus:
    from pathlib import Path

    from .errors import ConfigError

    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            return load_corpus(handle, source_lang)
    except OSError as exc:
        raise ConfigError(f"cannot read corpus file {path}: {exc}") from exc
