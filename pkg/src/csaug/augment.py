"""Core code-switching augmentation.

Each instance passes through three chained random decisions: whether the
sentence is rewritten at all (ratio ``alpha``), which of its tokens are
rewritten (ratio ``beta``), and, per rewritten token, a uniformly drawn
target language followed by a uniformly drawn translation from that
language's dictionary entry. Unselected sentences and tokens pass through
unchanged. Every decision is captured in a ReplacementTrace, so any output
can be replayed or audited without touching the RNG again.

Draw-consumption contract (fixed, part of the external interface):
  1. one float draw for sentence selection;
  2. if selected, per segment in index order, per token in index order:
     one float draw for token selection; if selected, one index draw for
     the language; on a dictionary hit, one index draw for the translation
     (also for single-candidate lists); on a miss with the
     resample_language policy, one index draw per additional attempt over
     the not-yet-tried languages.
Draws that are not needed are not consumed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .corpus import Instance, Replaced, Token, instance_from_obj, instance_to_json_line
from .dictionary import CASE_POLICIES, DictionaryPack, lookup
from .errors import ConfigError, SchemaError, TraceMismatchError
from .rng import SplitMix64

MODES = ("dynamic", "static")
OOV_POLICIES = ("keep", "resample_language")
MULTIWORD_POLICIES = ("single_token", "split")


@dataclass(frozen=True, slots=True)
class AugmentationConfig:
    """Knobs of one augmentation run.

    alpha/beta are the sentence and token replacement ratios on [0, 1];
    languages is the ordered target pool each replacement draws from;
    oov_max_attempts caps additional language redraws per missed token
    under the resample_language policy.
    """

    alpha: float
    beta: float
    languages: tuple[str, ...]
    seed: int = 0
    mode: str = "dynamic"
    oov_policy: str = "keep"
    oov_max_attempts: int = 1
    multiword_policy: str = "single_token"
    case_policy: str = "lowercase_fallback"
    shuffle: bool = True


@dataclass(frozen=True, slots=True)
class ReplacementRecord:
    """One applied replacement; token_index refers to the original segment."""

    segment_index: int
    token_index: int
    source_surface: str
    target_lang: str
    translation: str
    translation_index: int


@dataclass(frozen=True, slots=True)
class Miss:
    """A selected token that no attempted language could translate."""

    segment_index: int
    token_index: int
    attempted_langs: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class ReplacementTrace:
    instance_id: str
    sentence_selected: bool
    records: tuple[ReplacementRecord, ...] = ()
    misses: tuple[Miss, ...] = ()


@dataclass(frozen=True, slots=True)
class AugmentedInstance:
    instance: Instance
    trace: ReplacementTrace


def validate_config(config: AugmentationConfig, pack: DictionaryPack | None = None) -> None:
    """Raise ConfigError on any invalid field or config/pack mismatch."""
    if not 0.0 <= config.alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0, 1], got {config.alpha}")
    if not 0.0 <= config.beta <= 1.0:
        raise ConfigError(f"beta must be in [0, 1], got {config.beta}")
    if not config.languages:
        raise ConfigError("languages must not be empty")
    if len(set(config.languages)) != len(config.languages):
        raise ConfigError(f"duplicate languages in {config.languages}")
    if not 0 <= config.seed < 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    if config.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {config.mode!r}")
    if config.oov_policy not in OOV_POLICIES:
        raise ConfigError(f"oov_policy must be one of {OOV_POLICIES}, got {config.oov_policy!r}")
    if config.oov_policy == "resample_language" and config.oov_max_attempts < 1:
        raise ConfigError("oov_max_attempts must be >= 1")
    if config.multiword_policy not in MULTIWORD_POLICIES:
        raise ConfigError(
            f"multiword_policy must be one of {MULTIWORD_POLICIES}, got {config.multiword_policy!r}"
        )
    if config.case_policy not in CASE_POLICIES:
        raise ConfigError(f"case_policy must be one of {CASE_POLICIES}, got {config.case_policy!r}")
    if pack is not None:
        if pack.source_lang in config.languages:
            raise ConfigError(
                f"source language {pack.source_lang!r} may not be a replacement target"
            )
        targets = set(pack.dictionaries)
        missing = [lang for lang in config.languages if lang not in targets]
        if missing:
            raise ConfigError(f"languages {missing} not covered by the dictionary pack")


def select_sentence(rng: SplitMix64, alpha: float) -> bool:
    """True with probability alpha; strict compare makes 0 and 1 exact."""
    return rng.next_float() < alpha


def select_token(rng: SplitMix64, beta: float) -> bool:
    return rng.next_float() < beta


def choose_language(rng: SplitMix64, languages) -> str:
    if not languages:
        raise ConfigError("cannot choose from an empty language list")
    return languages[rng.next_below(len(languages))]


def choose_translation(rng: SplitMix64, translations) -> tuple[str, int]:
    if not translations:
        raise ConfigError("cannot choose from an empty translation list")
    index = rng.next_below(len(translations))
    return translations[index], index


def bio_continuation(tag: str | None) -> str | None:
    """Tag carried by the 2nd..kth token of a split replacement (B-X -> I-X)."""
    if tag is not None and tag.startswith("B-"):
        return "I-" + tag[2:]
    return tag


def _replacement_tokens(
    original: Token, translation: str, lang: str, translation_index: int, multiword_policy: str
) -> list[Token]:
    origin = Replaced(lang, original.surface, translation_index)
    if multiword_policy == "split":
        parts = translation.split()
        if len(parts) > 1:
            cont_tag = bio_continuation(original.tag)
            return [Token(parts[0], original.tag, origin)] + [
                Token(part, cont_tag, origin) for part in parts[1:]
            ]
    return [Token(translation, original.tag, origin)]


def augment_instance(
    instance: Instance,
    pack: DictionaryPack,
    config: AugmentationConfig,
    rng: SplitMix64,
) -> AugmentedInstance:
    """Apply the three-step replacement procedure to one instance.

    The caller positions ``rng``; given identical inputs the result is
    identical across runs and platforms. All segments of a pair instance
    are treated as independent token sequences.
    """
    if not select_sentence(rng, config.alpha):
        return AugmentedInstance(instance, ReplacementTrace(instance.id, False))

    beta = config.beta
    languages = config.languages
    case_policy = config.case_policy
    resample = config.oov_policy == "resample_language"
    records: list[ReplacementRecord] = []
    misses: list[Miss] = []
    new_segments: list[tuple[Token, ...]] = []

    for seg_i, segment in enumerate(instance.segments):
        out_tokens: list[Token] = []
        for tok_i, token in enumerate(segment):
            if rng.next_float() >= beta:
                out_tokens.append(token)
                continue
            lang = choose_language(rng, languages)
            attempted = [lang]
            translations = lookup(pack, token.surface, lang, case_policy)
            if translations is None and resample:
                remaining = [l for l in languages if l != lang]
                redraws = 0
                while translations is None and remaining and redraws < config.oov_max_attempts:
                    lang = choose_language(rng, remaining)
                    remaining.remove(lang)
                    attempted.append(lang)
                    translations = lookup(pack, token.surface, lang, case_policy)
                    redraws += 1
            if translations is None:
                misses.append(Miss(seg_i, tok_i, tuple(attempted)))
                out_tokens.append(token)
                continue
            translation, t_index = choose_translation(rng, translations)
            records.append(
                ReplacementRecord(seg_i, tok_i, token.surface, lang, translation, t_index)
            )
            out_tokens.extend(
                _replacement_tokens(token, translation, lang, t_index, config.multiword_policy)
            )
        new_segments.append(tuple(out_tokens))

    augmented = replace(instance, segments=tuple(new_segments))
    trace = ReplacementTrace(instance.id, True, tuple(records), tuple(misses))
    return AugmentedInstance(augmented, trace)


def apply_trace(
    original: Instance,
    trace: ReplacementTrace,
    pack: DictionaryPack,
    multiword_policy: str = "single_token",
) -> Instance:
    """Replay a trace against its original instance, without any RNG.

    Verifies that the trace matches the instance (ids, positions, source
    surfaces) and that every recorded translation really is the dictionary
    entry at the recorded index, then reproduces the augmented instance
    exactly. ``multiword_policy`` must match the producing run.
    """
    if trace.instance_id != original.id:
        raise TraceMismatchError(
            f"trace is for instance {trace.instance_id!r}, not {original.id!r}"
        )
    if not trace.sentence_selected:
        if trace.records or trace.misses:
            raise TraceMismatchError("unselected trace carries records or misses")
        return original

    by_position: dict[tuple[int, int], ReplacementRecord] = {}
    for record in trace.records:
        key = (record.segment_index, record.token_index)
        if key in by_position:
            raise TraceMismatchError(f"duplicate record for position {key}")
        by_position[key] = record

    new_segments: list[tuple[Token, ...]] = []
    for seg_i, segment in enumerate(original.segments):
        out_tokens: list[Token] = []
        for tok_i, token in enumerate(segment):
            record = by_position.pop((seg_i, tok_i), None)
            if record is None:
                out_tokens.append(token)
                continue
            if record.source_surface != token.surface:
                raise TraceMismatchError(
                    f"segment {seg_i} token {tok_i}: trace says {record.source_surface!r}, "
                    f"instance has {token.surface!r}"
                )
            translations = lookup(pack, record.source_surface, record.target_lang)
            if translations is None or not 0 <= record.translation_index < len(translations):
                raise TraceMismatchError(
                    f"no dictionary entry at index {record.translation_index} for "
                    f"{record.source_surface!r} in {record.target_lang!r}"
                )
            if translations[record.translation_index] != record.translation:
                raise TraceMismatchError(
                    f"dictionary stores {translations[record.translation_index]!r} at "
                    f"index {record.translation_index}, trace says {record.translation!r}"
                )
            out_tokens.extend(
                _replacement_tokens(
                    token,
                    record.translation,
                    record.target_lang,
                    record.translation_index,
                    multiword_policy,
                )
            )
        new_segments.append(tuple(out_tokens))
    if by_position:
        stray = sorted(by_position)
        raise TraceMismatchError(f"trace records at positions {stray} outside the instance")
    return replace(original, segments=tuple(new_segments))


def trace_to_obj(trace: ReplacementTrace) -> dict:
    """Wire form used in augmented JSONL and service payloads."""
    return {
        "selected": trace.sentence_selected,
        "records": [
            {
                "seg": r.segment_index,
                "idx": r.token_index,
                "src": r.source_surface,
                "lang": r.target_lang,
                "tr": r.translation,
                "ti": r.translation_index,
            }
            for r in trace.records
        ],
        "misses": [
            {"seg": m.segment_index, "idx": m.token_index, "langs": list(m.attempted_langs)}
            for m in trace.misses
        ],
    }


def trace_from_obj(instance_id: str, obj: dict) -> ReplacementTrace:
    """Parse the wire form back into a ReplacementTrace."""
    try:
        records = tuple(
            ReplacementRecord(r["seg"], r["idx"], r["src"], r["lang"], r["tr"], r["ti"])
            for r in obj["records"]
        )
        misses = tuple(
            Miss(m["seg"], m["idx"], tuple(m["langs"])) for m in obj["misses"]
        )
        return ReplacementTrace(instance_id, bool(obj["selected"]), records, misses)
    except (KeyError, TypeError) as exc:
        raise TraceMismatchError(f"malformed trace object: {exc}") from exc


def augmented_to_json_line(aug: AugmentedInstance) -> str:
    return instance_to_json_line(aug.instance, trace_to_obj(aug.trace))


def parse_augmented_line(line: str) -> tuple[Instance, ReplacementTrace]:
    """Read one augmented JSONL line back into (instance, trace)."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    instance = instance_from_obj(obj)
    trace_obj = obj.get("trace")
    if not isinstance(trace_obj, dict):
        raise TraceMismatchError(f"record {instance.id!r} carries no trace object")
    return instance, trace_from_obj(instance.id, trace_obj)
