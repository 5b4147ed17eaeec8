"""Shared builders for the test suite.

Everything here is deterministic given the caller's random.Random so tests
can freeze expected values against stable inputs.
"""

from __future__ import annotations

import random

from csaug import (
    BilingualDictionary,
    Corpus,
    DictionaryPack,
    Instance,
    Token,
    build_pack,
    load_dictionary,
)

SOURCE_WORDS = [
    "cold", "warm", "rain", "snow", "wind", "sun", "cloud", "storm",
    "street", "house", "river", "train", "music", "light", "night", "morning",
]

OOV_WORDS = ["zzxqv", "qwpft", "vbnxk"]

TAG_POOL = ["O", "O", "O", "B-loc", "I-loc", "B-org", "B-time"]

LABEL_POOL = ["weather", "travel", "music", None]


def full_coverage_pack(
    langs=("de", "fr"),
    words=SOURCE_WORDS,
    source="en",
    multi_words=(),
) -> DictionaryPack:
    """Pack where every word translates into every language.

    Translations are synthesized as <word>_<lang>; words listed in
    multi_words additionally get a second translation <word>_<lang>2.
    """
    dictionaries = []
    for lang in langs:
        lines = []
        for word in words:
            lines.append(f"{word} {word}_{lang}")
            if word in multi_words:
                lines.append(f"{word} {word}_{lang}2")
        dictionaries.append(load_dictionary(lines, source, lang))
    return build_pack(dictionaries)


def make_instance(instance_id, tokens, task="classify", tokens2=None, tags=None, label=None):
    segments = [tuple(Token(t, tags[i] if tags else None) for i, t in enumerate(tokens))]
    if task == "pair_classify":
        segments.append(tuple(Token(t) for t in (tokens2 or ["pair", "side"])))
    return Instance(instance_id, task, tuple(segments), label)


def random_instance(rand: random.Random, instance_id: str, words=None) -> Instance:
    """One random valid instance across all three task shapes."""
    words = words or (SOURCE_WORDS + OOV_WORDS)
    task = rand.choice(("classify", "pair_classify", "tag_and_classify"))
    tokens = [rand.choice(words) for _ in range(rand.randint(1, 8))]
    label = rand.choice(LABEL_POOL)
    if task == "pair_classify":
        tokens2 = [rand.choice(words) for _ in range(rand.randint(1, 6))]
        return make_instance(instance_id, tokens, task, tokens2=tokens2, label=label)
    if task == "tag_and_classify":
        tags = [rand.choice(TAG_POOL) for _ in tokens]
        return make_instance(instance_id, tokens, task, tags=tags, label=label)
    return make_instance(instance_id, tokens, task, label=label)


def random_corpus(rand: random.Random, n: int, words=None, source="en") -> Corpus:
    return Corpus(
        tuple(random_instance(rand, f"i{k}", words) for k in range(n)), source
    )


def uniform_corpus(n: int, tokens_per_sentence: int, words=SOURCE_WORDS, source="en") -> Corpus:
    """Fixed-shape classify corpus cycling through the word pool."""
    instances = []
    for k in range(n):
        tokens = [words[(k + j) % len(words)] for j in range(tokens_per_sentence)]
        instances.append(make_instance(f"u{k}", tokens, label="x"))
    return Corpus(tuple(instances), source)


def dict_lines_fixture(n_lines: int, seed: int = 42):
    """Synthesized MUSE-style file content of exactly n_lines lines.

    Mixes plain pairs, repeated source words, exact duplicate pairs, tabs,
    multi-word translations, comments, blanks, and malformed singles, the
    way scraped dictionary dumps look in practice.
    """
    rand = random.Random(seed)
    lines = []
    for i in range(n_lines):
        roll = rand.random()
        word = f"w{rand.randrange(2500)}"
        if roll < 0.02:
            lines.append("")
        elif roll < 0.04:
            lines.append(f"# block {i}")
        elif roll < 0.06:
            lines.append(word)  # malformed: no translation field
        elif roll < 0.12:
            lines.append(f"{word}\t{word}_t{rand.randrange(4)}")
        elif roll < 0.18:
            lines.append(f"{word} {word}_a {word}_b")  # multi-word translation
        else:
            lines.append(f"{word} {word}_t{rand.randrange(4)}")
    return lines


def tally_dict_lines(lines):
    """Independent one-pass tally of (entries, multi-translation entries).

    Mirrors the documented file semantics with plain string operations and
    no csaug imports, as an oracle for load_dictionary.
    """
    translations: dict[str, list[str]] = {}
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split(None, 1)
        if len(fields) < 2:
            continue
        word, translation = fields
        bucket = translations.setdefault(word, [])
        if translation not in bucket:
            bucket.append(translation)
    entries = len(translations)
    multi = sum(1 for bucket in translations.values() if len(bucket) > 1)
    return entries, multi
