"""Deterministic 64-bit random number generation and stream derivation.

Reproducibility across runs, worker counts, and independent implementations
is part of this package's external contract, so both the generator and the
seed derivation are fixed, named algorithms rather than whatever the host
standard library happens to provide.

Generator: SplitMix64 (Vigna's 64-bit split-mix generator, also used to seed
the xoshiro family). One step adds the 64-bit golden-ratio constant
0x9E3779B97F4A7C15 to the state and avalanches the result:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)

all modulo 2**64. Reference sequence (checked in tests): from state 0 the
first outputs are 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.

Stream derivation: the initial state for the stream addressed by
(global_seed, epoch, batch_index, ordinal) is the avalanche chain

    mix(mix(mix(mix(global_seed) ^ epoch) ^ batch_index) ^ ordinal)

where mix(x) is the output of one SplitMix64 step started at state x.
Distinct tuples give independent-looking streams up to 64-bit collisions.

Derived draws:
  * next_float():   (next_u64() >> 11) * 2**-53, uniform on [0, 1)
  * next_below(n):  (next_u64() * n) >> 64, uniform on [0, n)
Each consumes exactly one 64-bit output.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FLOAT_SCALE = 2.0 ** -53

# Reserved batch_index used to derive per-epoch shuffle permutations; real
# batch indices can never reach it.
SHUFFLE_STREAM = _MASK64


def mix64(state: int) -> int:
    """One SplitMix64 step started at ``state``; returns the output word."""
    z = (state + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_state(global_seed: int, epoch: int, batch_index: int, ordinal: int) -> int:
    """Initial SplitMix64 state for the stream addressed by the tuple."""
    s = mix64(global_seed & _MASK64)
    s = mix64(s ^ (epoch & _MASK64))
    s = mix64(s ^ (batch_index & _MASK64))
    return mix64(s ^ (ordinal & _MASK64))


class SplitMix64:
    """SplitMix64 generator state plus the fixed draw conversions."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK64

    def next_u64(self) -> int:
        self.state = s = (self.state + _GAMMA) & _MASK64
        z = ((s ^ (s >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform draw on [0, 1) with 53-bit resolution; one output word."""
        return (self.next_u64() >> 11) * _FLOAT_SCALE

    def next_below(self, n: int) -> int:
        """Uniform index in [0, n) by multiply-high reduction; one output word."""
        if n <= 0:
            raise ValueError("next_below requires n >= 1")
        return (self.next_u64() * n) >> 64


def derive_rng(global_seed: int, epoch: int, batch_index: int, ordinal: int) -> SplitMix64:
    """Generator positioned at the start of the addressed stream."""
    return SplitMix64(derive_state(global_seed, epoch, batch_index, ordinal))
