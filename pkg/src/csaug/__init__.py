"""Code-switching data augmentation for multilingual training pipelines.

The package turns a monolingual task corpus plus a pack of bilingual
dictionaries into dynamically code-switched training data: per batch,
selected sentences have a random subset of their tokens swapped for
dictionary translations drawn from randomly chosen target languages.
Every augmentation carries a replay trace, streams are reproducible from
a single seed, and a WordPiece encoder prepares model-ready inputs.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("csaug")
except PackageNotFoundError:  # running from a source tree without install
    __version__ = "0.1.0"

from .augment import (
    AugmentationConfig,
    AugmentedInstance,
    Miss,
    ReplacementRecord,
    ReplacementTrace,
    apply_trace,
    augment_instance,
    augmented_to_json_line,
    parse_augmented_line,
    trace_from_obj,
    trace_to_obj,
    validate_config,
)
from .corpus import (
    Corpus,
    Instance,
    Replaced,
    Token,
    instance_from_obj,
    instance_to_json_line,
    instance_to_obj,
    load_corpus,
    load_corpus_file,
)
from .dictionary import (
    BilingualDictionary,
    DictionaryPack,
    TranslationEntry,
    build_pack,
    load_dictionary,
    load_dictionary_file,
    lookup,
    parse_muse_line,
)
from .errors import (
    ConfigError,
    CsaugError,
    DataError,
    InsufficientSamplesError,
    MalformedLineError,
    SchemaError,
    TraceMismatchError,
)
from .rng import SHUFFLE_STREAM, SplitMix64, derive_rng, derive_state, mix64
from .stats import AugmentationStats, CheckResult, VerifyReport, accumulate, merge, verify
from .stream import BatchSpec, epoch_stream, generate_batch, plan_epoch, shuffled_order
from .subword import (
    SubwordEncoding,
    WordPieceVocab,
    encode_instance,
    encoding_to_obj,
    load_vocab,
    load_vocab_file,
    wordpiece_tokenize,
)

__all__ = [
    "__version__",
    "AugmentationConfig",
    "AugmentationStats",
    "AugmentedInstance",
    "BatchSpec",
    "BilingualDictionary",
    "CheckResult",
    "ConfigError",
    "Corpus",
    "CsaugError",
    "DataError",
    "DictionaryPack",
    "InsufficientSamplesError",
    "Instance",
    "MalformedLineError",
    "Miss",
    "Replaced",
    "ReplacementRecord",
    "ReplacementTrace",
    "SchemaError",
    "SHUFFLE_STREAM",
    "SplitMix64",
    "SubwordEncoding",
    "Token",
    "TraceMismatchError",
    "TranslationEntry",
    "VerifyReport",
    "WordPieceVocab",
    "accumulate",
    "apply_trace",
    "augment_instance",
    "augmented_to_json_line",
    "build_pack",
    "derive_rng",
    "derive_state",
    "encode_instance",
    "encoding_to_obj",
    "epoch_stream",
    "generate_batch",
    "instance_from_obj",
    "instance_to_json_line",
    "instance_to_obj",
    "load_corpus",
    "load_corpus_file",
    "load_dictionary",
    "load_dictionary_file",
    "load_vocab",
    "load_vocab_file",
    "lookup",
    "merge",
    "mix64",
    "parse_augmented_line",
    "parse_muse_line",
    "plan_epoch",
    "shuffled_order",
    "trace_from_obj",
    "trace_to_obj",
    "validate_config",
    "verify",
    "wordpiece_tokenize",
]
