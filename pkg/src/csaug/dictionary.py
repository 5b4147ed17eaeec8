"""MUSE-format bilingual dictionaries: parsing, validation, lookup.

A MUSE dictionary file is UTF-8 text with one translation pair per line,
source word first, separated from the translation by the first whitespace
run. The translation keeps any internal spaces, so multi-word translations
("nueva york") arrive as a single surface. A source word appearing on
several lines accumulates several translations, in file order.

Dictionaries for multiple target languages sharing one source language are
grouped into a DictionaryPack, the unit the augmenter consumes. Loaded
dictionaries and packs are immutable by convention and safe for concurrent
reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ConfigError, DataError, MalformedLineError

CASE_POLICIES = ("exact", "lowercase_fallback")


def check_language_code(code: str) -> str:
    """Validate a language identifier: lowercase, 2-8 chars, no whitespace."""
    if not isinstance(code, str) or not 2 <= len(code) <= 8:
        raise ConfigError(f"language code must be 2-8 characters, got {code!r}")
    if code != code.lower() or any(c.isspace() for c in code):
        raise ConfigError(f"language code must be lowercase without whitespace, got {code!r}")
    return code


@dataclass(frozen=True, slots=True)
class TranslationEntry:
    """All translations recorded for one source word, in file order."""

    source_word: str
    translations: tuple[str, ...]


@dataclass(slots=True)
class BilingualDictionary:
    """One source->target dictionary keyed by the source word as written."""

    source_lang: str
    target_lang: str
    entries: dict[str, TranslationEntry] = field(default_factory=dict)
    line_count: int = 0
    skipped_line_count: int = 0


@dataclass(slots=True)
class DictionaryPack:
    """Per-target-language dictionaries sharing a single source language."""

    source_lang: str
    dictionaries: dict[str, BilingualDictionary]

    @property
    def target_languages(self) -> tuple[str, ...]:
        return tuple(self.dictionaries)


def parse_muse_line(line: str) -> tuple[str, str] | None:
    """Split one dictionary line into (source_word, translation).

    Returns None for blank and comment-only (leading ``#``) lines. Raises
    MalformedLineError when no translation field follows the source word;
    the caller decides whether that skips the line or aborts the load.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    parts = stripped.split(None, 1)
    if len(parts) != 2:
        raise MalformedLineError(f"expected two whitespace-separated fields, got {line!r}")
    return parts[0], parts[1]


def load_dictionary(
    lines: Iterable[str],
    source_lang: str,
    target_lang: str,
    on_malformed: str = "skip",
) -> BilingualDictionary:
    """Build a BilingualDictionary from an iterable of text lines.

    Repeated source words accumulate translations in file order; exact
    duplicate (source, translation) pairs are dropped. Under the default
    ``skip`` policy malformed lines are counted in skipped_line_count;
    under ``abort`` the first malformed line raises with its line number.
    """
    check_language_code(source_lang)
    check_language_code(target_lang)
    if source_lang == target_lang:
        raise ConfigError(f"source and target language are both {source_lang!r}")
    if on_malformed not in ("skip", "abort"):
        raise ConfigError(f"on_malformed must be 'skip' or 'abort', got {on_malformed!r}")

    accumulated: dict[str, list[str]] = {}
    seen_pairs: set[tuple[str, str]] = set()
    line_count = 0
    skipped = 0
    for lineno, line in enumerate(lines, start=1):
        line_count += 1
        try:
            pair = parse_muse_line(line)
        except MalformedLineError as exc:
            if on_malformed == "abort":
                raise DataError(f"line {lineno}: {exc}") from exc
            skipped += 1
            continue
        if pair is None:
            continue
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        word, translation = pair
        accumulated.setdefault(word, []).append(translation)

    if not accumulated:
        raise DataError(
            f"dictionary {source_lang}->{target_lang} has no entries "
            f"({line_count} lines read, {skipped} skipped)"
        )
    entries = {
        word: TranslationEntry(word, tuple(translations))
        for word, translations in accumulated.items()
    }
    return BilingualDictionary(source_lang, target_lang, entries, line_count, skipped)


def load_dictionary_file(
    path: str | Path, source_lang: str, target_lang: str, on_malformed: str = "skip"
) -> BilingualDictionary:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            return load_dictionary(handle, source_lang, target_lang, on_malformed)
    except OSError as exc:
        raise ConfigError(f"cannot read dictionary file {path}: {exc}") from exc


def build_pack(dictionaries: Sequence[BilingualDictionary]) -> DictionaryPack:
    """Group dictionaries into a pack, enforcing pack invariants."""
    if not dictionaries:
        raise ConfigError("a dictionary pack needs at least one dictionary")
    source = dictionaries[0].source_lang
    by_target: dict[str, BilingualDictionary] = {}
    for d in dictionaries:
        if d.source_lang != source:
            raise ConfigError(
                f"mixed source languages in pack: {source!r} and {d.source_lang!r}"
            )
        if d.target_lang in by_target:
            raise ConfigError(f"duplicate target language {d.target_lang!r} in pack")
        by_target[d.target_lang] = d
    return DictionaryPack(source, by_target)


def lookup(
    pack: DictionaryPack,
    word: str,
    lang: str,
    case_policy: str = "lowercase_fallback",
) -> tuple[str, ...] | None:
    """Translations of ``word`` into ``lang``, or None when the word misses.

    Exact key match is tried first; under ``lowercase_fallback`` a miss is
    retried with the lowercased word. Translation surfaces are returned as
    stored, never re-cased. An unknown target language is an error, distinct
    from a word miss.
    """
    try:
        dictionary = pack.dictionaries[lang]
    except KeyError:
        raise ConfigError(
            f"language {lang!r} not in pack (targets: {', '.join(pack.dictionaries)})"
        ) from None
    if case_policy not in CASE_POLICIES:
        raise ConfigError(f"unknown case policy {case_policy!r}")
    entry = dictionary.entries.get(word)
    if entry is None and case_policy == "lowercase_fallback":
        lowered = word.lower()
        if lowered != word:
            entry = dictionary.entries.get(lowered)
    if entry is None:
        return None
    return entry.translations


def iter_muse_lines(dictionary: BilingualDictionary) -> Iterator[str]:
    """Serialize back to MUSE lines (one pair per line, entry order preserved)."""
    for entry in dictionary.entries.values():
        for translation in entry.translations:
            yield f"{entry.source_word} {translation}"


def dictionary_summary(dictionary: BilingualDictionary, sample: int = 3) -> dict:
    """Counters used by the inspection command."""
    multi = sum(1 for e in dictionary.entries.values() if len(e.translations) > 1)
    sample_entries = [
        [e.source_word, list(e.translations)]
        for e in list(dictionary.entries.values())[:sample]
    ]
    return {
        "source_lang": dictionary.source_lang,
        "target_lang": dictionary.target_lang,
        "entries": len(dictionary.entries),
        "multi_translation_entries": multi,
        "line_count": dictionary.line_count,
        "skipped_line_count": dictionary.skipped_line_count,
        "sample": sample_entries,
    }
