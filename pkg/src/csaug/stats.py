"""Replacement-trace statistics and statistical verification.

Accumulation is a plain counter reduction, so per-worker partial stats can
be merged associatively. Verification checks the empirical rates against
the configured ratios inside z-sigma binomial bands.

The language-uniformity check counts attempts (replacements plus recorded
per-language misses) rather than realized replacements: with unequal
dictionary coverage and the keep policy the language draw is uniform but
the realized replacement mix is not, so attempts are where uniformity
actually holds. Under resample_language, language draws that failed before
an eventual hit are not individually recorded in traces, so attempt counts
are exact only for the keep policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .augment import AugmentationConfig, ReplacementTrace
from .corpus import Instance
from .dictionary import DictionaryPack, lookup
from .errors import InsufficientSamplesError, TraceMismatchError


@dataclass(slots=True)
class AugmentationStats:
    sentences_seen: int = 0
    sentences_selected: int = 0
    tokens_seen: int = 0
    tokens_considered: int = 0
    tokens_selected: int = 0
    tokens_replaced: int = 0
    tokens_missed: int = 0
    tokens_with_dict_hit: int = 0
    per_language_replacements: dict[str, int] = field(default_factory=dict)
    per_language_misses: dict[str, int] = field(default_factory=dict)

    @property
    def coverage(self) -> float:
        """Fraction of seen tokens with at least one dictionary hit."""
        return self.tokens_with_dict_hit / self.tokens_seen if self.tokens_seen else 0.0

    def to_obj(self) -> dict:
        return {
            "sentences_seen": self.sentences_seen,
            "sentences_selected": self.sentences_selected,
            "tokens_seen": self.tokens_seen,
            "tokens_considered": self.tokens_considered,
            "tokens_selected": self.tokens_selected,
            "tokens_replaced": self.tokens_replaced,
            "tokens_missed": self.tokens_missed,
            "per_language_replacements": dict(sorted(self.per_language_replacements.items())),
            "per_language_misses": dict(sorted(self.per_language_misses.items())),
            "coverage": self.coverage,
        }


def accumulate(
    stats: AugmentationStats,
    trace: ReplacementTrace,
    instance: Instance,
    pack: DictionaryPack | None = None,
    config: AugmentationConfig | None = None,
) -> AugmentationStats:
    """Fold one (trace, original instance) pair into the counters.

    ``instance`` must be the pre-augmentation instance the trace was made
    from. When pack and config are given, per-token dictionary coverage is
    tallied as well.
    """
    if trace.instance_id != instance.id:
        raise TraceMismatchError(
            f"trace is for instance {trace.instance_id!r}, not {instance.id!r}"
        )
    n_tokens = instance.token_count()
    for record in trace.records:
        segment = instance.segments[record.segment_index]
        if record.token_index >= len(segment):
            raise TraceMismatchError(
                f"record position ({record.segment_index}, {record.token_index}) "
                f"outside instance {instance.id!r}"
            )
        if segment[record.token_index].surface != record.source_surface:
            raise TraceMismatchError(
                f"instance {instance.id!r}: trace source {record.source_surface!r} does not "
                f"match token {segment[record.token_index].surface!r}"
            )

    stats.sentences_seen += 1
    stats.tokens_seen += n_tokens
    if trace.sentence_selected:
        stats.sentences_selected += 1
        stats.tokens_considered += n_tokens
        stats.tokens_selected += len(trace.records) + len(trace.misses)
        stats.tokens_replaced += len(trace.records)
        stats.tokens_missed += len(trace.misses)
        for record in trace.records:
            lang = record.target_lang
            stats.per_language_replacements[lang] = (
                stats.per_language_replacements.get(lang, 0) + 1
            )
        for miss in trace.misses:
            for lang in miss.attempted_langs:
                stats.per_language_misses[lang] = stats.per_language_misses.get(lang, 0) + 1
    if pack is not None and config is not None:
        for segment in instance.segments:
            for token in segment:
                if any(
                    lookup(pack, token.surface, lang, config.case_policy) is not None
                    for lang in config.languages
                ):
                    stats.tokens_with_dict_hit += 1
    return stats


def merge(a: AugmentationStats, b: AugmentationStats) -> AugmentationStats:
    """Associative combination of two partial tallies."""
    out = AugmentationStats(
        sentences_seen=a.sentences_seen + b.sentences_seen,
        sentences_selected=a.sentences_selected + b.sentences_selected,
        tokens_seen=a.tokens_seen + b.tokens_seen,
        tokens_considered=a.tokens_considered + b.tokens_considered,
        tokens_selected=a.tokens_selected + b.tokens_selected,
        tokens_replaced=a.tokens_replaced + b.tokens_replaced,
        tokens_missed=a.tokens_missed + b.tokens_missed,
        tokens_with_dict_hit=a.tokens_with_dict_hit + b.tokens_with_dict_hit,
    )
    for source in (a, b):
        for lang, count in source.per_language_replacements.items():
            out.per_language_replacements[lang] = (
                out.per_language_replacements.get(lang, 0) + count
            )
        for lang, count in source.per_language_misses.items():
            out.per_language_misses[lang] = out.per_language_misses.get(lang, 0) + count
    return out


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    observed: float
    expected: float
    tolerance: float
    samples: int
    passed: bool

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "passed": self.passed,
        }


@dataclass(slots=True)
class VerifyReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_obj(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_obj() for c in self.checks]}


def _binomial_check(name: str, successes: int, n: int, p: float, z: float) -> CheckResult:
    observed = successes / n
    tolerance = z * math.sqrt(p * (1.0 - p) / n)
    passed = abs(observed - p) <= tolerance
    return CheckResult(name, observed, p, tolerance, n, passed)


def verify(
    stats: AugmentationStats,
    config: AugmentationConfig,
    n_min: int,
    z: float = 3.0,
) -> VerifyReport:
    """Check empirical rates against the configured ratios.

    Raises InsufficientSamplesError when an applicable proportion has fewer
    than n_min samples. Checks whose input is impossible by configuration
    (token rate under alpha=0, language draws under beta=0) are skipped.
    """
    checks: list[CheckResult] = []

    if stats.sentences_seen < n_min:
        raise InsufficientSamplesError(
            f"sentence rate needs >= {n_min} sentences, saw {stats.sentences_seen}"
        )
    checks.append(
        _binomial_check(
            "sentence_selection_rate",
            stats.sentences_selected,
            stats.sentences_seen,
            config.alpha,
            z,
        )
    )

    if config.alpha > 0.0:
        if stats.tokens_considered < n_min:
            raise InsufficientSamplesError(
                f"token rate needs >= {n_min} considered tokens, saw {stats.tokens_considered}"
            )
        checks.append(
            _binomial_check(
                "token_selection_rate",
                stats.tokens_selected,
                stats.tokens_considered,
                config.beta,
                z,
            )
        )

    if config.alpha > 0.0 and config.beta > 0.0:
        attempts = {
            lang: stats.per_language_replacements.get(lang, 0)
            + stats.per_language_misses.get(lang, 0)
            for lang in config.languages
        }
        total_attempts = sum(attempts.values())
        if total_attempts < n_min:
            raise InsufficientSamplesError(
                f"language uniformity needs >= {n_min} draws, saw {total_attempts}"
            )
        share = 1.0 / len(config.languages)
        for lang in config.languages:
            checks.append(
                _binomial_check(
                    f"language_share[{lang}]", attempts[lang], total_attempts, share, z
                )
            )
    return VerifyReport(checks)
