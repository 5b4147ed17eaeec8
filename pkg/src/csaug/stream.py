"""Seeded epoch and batch scheduling.

Dynamic mode re-augments every instance on every (epoch, batch) appearance,
so the consumer sees fresh code-switched variants per batch; static mode
derives every instance's generator from a fixed address, so each instance
gets one augmentation that repeats across all epochs.

Stream addressing (see csaug.rng for the derivation function):
  dynamic:  (seed, epoch, batch_index, position-within-batch)
  static:   (seed, 0, 0, position-within-original-corpus)
  shuffle:  (seed, epoch, SHUFFLE_STREAM, 0), Fisher-Yates from the top

Because every generator state is derived rather than shared, outputs are a
pure function of (corpus, pack, config, batch_size, epoch); worker count
and scheduling order cannot change them.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .augment import AugmentationConfig, AugmentedInstance, augment_instance, validate_config
from .corpus import Corpus
from .dictionary import DictionaryPack
from .errors import ConfigError, DataError
from .rng import SHUFFLE_STREAM, SplitMix64, derive_rng


@dataclass(frozen=True, slots=True)
class BatchSpec:
    """One planned batch: which instances, and where in the run they sit."""

    epoch: int
    batch_index: int
    instance_ids: tuple[str, ...]


def shuffled_order(n: int, rng: SplitMix64) -> list[int]:
    """Fisher-Yates permutation of range(n); iterates i = n-1 .. 1."""
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.next_below(i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def plan_epoch(
    corpus: Corpus, batch_size: int, epoch: int, config: AugmentationConfig
) -> list[BatchSpec]:
    """Partition the (optionally shuffled) corpus into consecutive batches."""
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
    if epoch < 0:
        raise ConfigError(f"epoch must be >= 0, got {epoch}")
    n = len(corpus)
    if config.shuffle:
        order = shuffled_order(n, derive_rng(config.seed, epoch, SHUFFLE_STREAM, 0))
    else:
        order = list(range(n))
    ids = [corpus.instances[i].id for i in order]
    return [
        BatchSpec(epoch, batch_index, tuple(ids[start : start + batch_size]))
        for batch_index, start in enumerate(range(0, n, batch_size))
    ]


def generate_batch(
    spec: BatchSpec,
    corpus: Corpus,
    pack: DictionaryPack,
    config: AugmentationConfig,
) -> list[AugmentedInstance]:
    """Augment one planned batch with per-instance derived generators."""
    validate_config(config, pack)
    out: list[AugmentedInstance] = []
    static = config.mode == "static"
    for position, instance_id in enumerate(spec.instance_ids):
        instance = corpus.by_id.get(instance_id)
        if instance is None:
            raise DataError(f"batch references unknown instance id {instance_id!r}")
        if static:
            rng = derive_rng(config.seed, 0, 0, corpus.ordinal_by_id[instance_id])
        else:
            rng = derive_rng(config.seed, spec.epoch, spec.batch_index, position)
        out.append(augment_instance(instance, pack, config, rng))
    return out


def epoch_stream(
    corpus: Corpus,
    pack: DictionaryPack,
    config: AugmentationConfig,
    batch_size: int,
    epoch: int,
    workers: int = 1,
) -> Iterator[list[AugmentedInstance]]:
    """Yield an epoch's batches in plan order.

    With workers > 1 batches are produced on a thread pool; delivery stays
    in plan order and the results are identical to the single-worker run.
    """
    specs = plan_epoch(corpus, batch_size, epoch, config)
    if workers <= 1:
        for spec in specs:
            yield generate_batch(spec, corpus, pack, config)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(lambda spec: generate_batch(spec, corpus, pack, config), specs)
