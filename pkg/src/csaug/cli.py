"""Command-line surface.

Subcommands:
    augment       rewrite a corpus into code-switched JSONL plus a stats sidecar
    dict-inspect  entry counts, multi-translation counts, optional corpus coverage
    encode        subword-encode (augmented) JSONL against a vocabulary
    verify        statistical audit of an augmentation run's traces
    serve         HTTP batch server over the same engine

Exit codes: 0 success, 1 failed verification check, 2 configuration error
(argparse uses the same code), 3 data error, 4 insufficient samples for a
requested check. The seed falls back to the CSF_SEED environment variable
when --seed is not given; the flag wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .augment import (
    AugmentationConfig,
    augmented_to_json_line,
    parse_augmented_line,
    validate_config,
)
from .corpus import Corpus, load_corpus_file
from .dictionary import (
    DictionaryPack,
    build_pack,
    dictionary_summary,
    load_dictionary_file,
    lookup,
)
from .errors import ConfigError, DataError, InsufficientSamplesError
from .stats import AugmentationStats, accumulate, verify
from .stream import epoch_stream
from .subword import encode_instance, encoding_to_obj, load_vocab_file

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INSUFFICIENT = 4

DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 0.9

_JSON_KWARGS = {"ensure_ascii": False, "separators": (",", ":")}


def _parse_dict_spec(spec: str) -> tuple[str, str]:
    lang, sep, path = spec.partition("=")
    if not sep or not lang or not path:
        raise ConfigError(f"--dict expects <lang>=<path>, got {spec!r}")
    return lang, path


def _parse_oov(value: str) -> tuple[str, int]:
    if value == "keep":
        return "keep", 1
    if value.startswith("resample:"):
        try:
            attempts = int(value.split(":", 1)[1])
        except ValueError:
            attempts = -1
        if attempts < 1:
            raise ConfigError(f"--oov resample:<k> needs an integer k >= 1, got {value!r}")
        return "resample_language", attempts
    raise ConfigError(f"--oov must be 'keep' or 'resample:<k>', got {value!r}")


def _parse_seed(args: argparse.Namespace) -> int:
    raw = args.seed if args.seed is not None else os.environ.get("CSF_SEED")
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"seed must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def load_pack_from_args(args: argparse.Namespace) -> DictionaryPack:
    if not args.dict:
        raise ConfigError("at least one --dict <lang>=<path> is required")
    dictionaries = []
    for spec in args.dict:
        lang, path = _parse_dict_spec(spec)
        dictionaries.append(load_dictionary_file(path, args.source_lang, lang))
    return build_pack(dictionaries)


def config_from_args(
    args: argparse.Namespace, pack: DictionaryPack | None
) -> AugmentationConfig:
    if args.languages:
        languages = tuple(lang for lang in args.languages.split(",") if lang)
    elif pack is not None:
        languages = pack.target_languages
    else:
        raise ConfigError("--languages is required when no --dict is given")
    oov_policy, oov_attempts = _parse_oov(args.oov)
    config = AugmentationConfig(
        alpha=args.alpha,
        beta=args.beta,
        languages=languages,
        seed=_parse_seed(args),
        mode=args.mode,
        oov_policy=oov_policy,
        oov_max_attempts=oov_attempts,
        multiword_policy={"single": "single_token", "split": "split"}[args.multiword],
        case_policy=args.case_policy,
        shuffle=not args.no_shuffle,
    )
    validate_config(config, pack)
    return config


def _epoch_out_path(out: Path, epoch: int, epochs: int) -> Path:
    if epochs == 1:
        return out
    return out.with_name(f"{out.stem}.epoch{epoch}{out.suffix}")


def cmd_augment(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus, args.source_lang)
    pack = load_pack_from_args(args)
    config = config_from_args(args, pack)
    out = Path(args.out)
    stats = AugmentationStats()
    for epoch in range(args.epochs):
        epoch_path = _epoch_out_path(out, epoch, args.epochs)
        with epoch_path.open("w", encoding="utf-8") as handle:
            for batch in epoch_stream(
                corpus, pack, config, args.batch_size, epoch, workers=args.workers
            ):
                for aug in batch:
                    handle.write(augmented_to_json_line(aug) + "\n")
                    accumulate(
                        stats, aug.trace, corpus.by_id[aug.instance.id], pack, config
                    )
    stats_path = Path(args.stats_out) if args.stats_out else Path(str(out) + ".stats.json")
    stats_path.write_text(
        json.dumps(stats.to_obj(), **_JSON_KWARGS) + "\n", encoding="utf-8"
    )
    return EXIT_OK


def cmd_dict_inspect(args: argparse.Namespace) -> int:
    pack = load_pack_from_args(args)
    report: dict = {
        "source_lang": pack.source_lang,
        "languages": list(pack.target_languages),
        "dictionaries": {
            lang: dictionary_summary(d) for lang, d in pack.dictionaries.items()
        },
    }
    if args.corpus:
        corpus = load_corpus_file(args.corpus, args.source_lang)
        distinct = {
            token.surface
            for instance in corpus.instances
            for segment in instance.segments
            for token in segment
        }
        coverage = {}
        for lang in pack.target_languages:
            hits = sum(
                1 for word in distinct if lookup(pack, word, lang, args.case_policy) is not None
            )
            coverage[lang] = hits / len(distinct)
        report["corpus"] = {
            "instances": len(corpus),
            "distinct_tokens": len(distinct),
            "distinct_token_coverage": coverage,
        }
    print(json.dumps(report, **_JSON_KWARGS))
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus, args.source_lang)
    vocab = load_vocab_file(args.vocab)
    out = Path(args.out)
    with out.open("w", encoding="utf-8") as handle:
        for instance in corpus.instances:
            encoding = encode_instance(instance, vocab, args.max_len)
            obj = encoding_to_obj(encoding, instance.id, vocab if args.ids else None)
            handle.write(json.dumps(obj, **_JSON_KWARGS) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    corpus = load_corpus_file(args.corpus, args.source_lang)
    pack = load_pack_from_args(args) if args.dict else None
    config = config_from_args(args, pack)
    stats = AugmentationStats()
    for path in args.augmented:
        lineno = 0
        try:
            with Path(path).open(encoding="utf-8") as handle:
                for lineno, line in enumerate(handle, start=1):
                    if not line.strip():
                        continue
                    _, trace = parse_augmented_line(line)
                    original = corpus.by_id.get(trace.instance_id)
                    if original is None:
                        raise DataError(
                            f"augmented instance {trace.instance_id!r} not in corpus"
                        )
                    accumulate(stats, trace, original, pack, config if pack else None)
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        except OSError as exc:
            raise ConfigError(f"cannot read augmented file {path}: {exc}") from exc
    report = verify(stats, config, n_min=args.n_min, z=args.z)
    print(json.dumps(report.to_obj(), **_JSON_KWARGS))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceState, StateHolder, create_app

    corpus = load_corpus_file(args.corpus, args.source_lang)
    pack = load_pack_from_args(args)
    config = config_from_args(args, pack)
    vocab = load_vocab_file(args.vocab) if args.vocab else None
    holder = StateHolder()
    holder.set_ready(
        ServiceState(corpus, pack, config, args.batch_size, vocab, args.max_len)
    )
    app = create_app(holder)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _add_dict_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dict",
        action="append",
        default=[],
        metavar="LANG=PATH",
        help="bilingual dictionary file for one target language (repeatable)",
    )
    parser.add_argument("--source-lang", default="en", help="source language code")
    parser.add_argument(
        "--case-policy",
        choices=("exact", "lowercase_fallback"),
        default="lowercase_fallback",
        help="dictionary lookup casing",
    )


def _add_augment_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--languages", help="comma-separated target languages (default: all dicts)")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                        help="sentence replacement ratio")
    parser.add_argument("--beta", type=float, default=DEFAULT_BETA,
                        help="token replacement ratio")
    parser.add_argument("--seed", help="64-bit seed (default: $CSF_SEED, then 0)")
    parser.add_argument("--mode", choices=("dynamic", "static"), default="dynamic")
    parser.add_argument("--oov", default="keep", metavar="keep|resample:<k>",
                        help="policy for dictionary misses")
    parser.add_argument("--multiword", choices=("single", "split"), default="single",
                        help="handling of multi-word translations")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--no-shuffle", action="store_true",
                        help="keep corpus order instead of per-epoch shuffling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csaug",
        description="Deterministic multilingual code-switching data augmentation.",
    )
    parser.add_argument("--version", action="version", version=f"csaug {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="write code-switched JSONL plus stats")
    p_aug.add_argument("--corpus", required=True)
    _add_dict_options(p_aug)
    _add_augment_options(p_aug)
    p_aug.add_argument("--epochs", type=int, default=1)
    p_aug.add_argument("--out", required=True, help="output JSONL path")
    p_aug.add_argument("--stats-out", help="stats JSON path (default: <out>.stats.json)")
    p_aug.add_argument("--workers", type=int, default=1)
    p_aug.set_defaults(func=cmd_augment)

    p_dict = sub.add_parser("dict-inspect", help="summarize dictionaries")
    _add_dict_options(p_dict)
    p_dict.add_argument("--corpus", help="optional corpus for coverage figures")
    p_dict.set_defaults(func=cmd_dict_inspect)

    p_enc = sub.add_parser("encode", help="subword-encode a (possibly augmented) corpus")
    p_enc.add_argument("--corpus", required=True)
    p_enc.add_argument("--source-lang", default="en")
    p_enc.add_argument("--vocab", required=True)
    p_enc.add_argument("--max-len", type=int, default=512)
    p_enc.add_argument("--ids", action="store_true", help="include integer piece ids")
    p_enc.add_argument("--out", required=True)
    p_enc.set_defaults(func=cmd_encode)

    p_ver = sub.add_parser("verify", help="audit an augmentation run's traces")
    p_ver.add_argument("--corpus", required=True)
    p_ver.add_argument("--augmented", action="append", required=True,
                       help="augmented JSONL file (repeatable)")
    _add_dict_options(p_ver)
    _add_augment_options(p_ver)
    p_ver.add_argument("--n-min", type=int, default=1000,
                       help="minimum samples per checked proportion")
    p_ver.add_argument("--z", type=float, default=3.0, help="band width in sigmas")
    p_ver.set_defaults(func=cmd_verify)

    p_srv = sub.add_parser("serve", help="HTTP batch server")
    p_srv.add_argument("--corpus", required=True)
    _add_dict_options(p_srv)
    _add_augment_options(p_srv)
    p_srv.add_argument("--vocab", help="optional vocabulary; adds encodings to payloads")
    p_srv.add_argument("--max-len", type=int, default=512)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"csaug: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"csaug: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InsufficientSamplesError as exc:
        print(f"csaug: insufficient samples: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT


if __name__ == "__main__":
    sys.exit(main())
