"""
Keyed random substreams built on SplitMix64.

Every draw is addressed by (seed, key...) instead of a position in a shared
generator, so results do not depend on iteration order, chunking or worker
count. Any implementation of the same constants reproduces the same numbers:

    splitmix64(x): z = x + 0x9E3779B97F4A7C15
                   z = (z ^ z >> 30) * 0xBF58476D1CE4E5B9
                   z = (z ^ z >> 27) * 0x94D049BB133111EB
                   return z ^ z >> 31                      (all mod 2**64)
    stable_mix(a, b) = splitmix64(splitmix64(a) ^ b)
    string keys      = first 8 bytes (big-endian) of their SHA-256
    k-th uniform     = ((splitmix64(state + (k - 1) * gamma) >> 11) + 0.5) / 2**53
"""

import hashlib

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def stable_mix(a: int, b: int) -> int:
    return splitmix64(splitmix64(a & MASK64) ^ (b & MASK64))


def key_hash(key: str) -> int:
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def stream_state(seed: int, *keys: int | str) -> int:
    state = seed & MASK64
    for k in keys:
        state = stable_mix(state, k if isinstance(k, int) else key_hash(str(k)))
    return state


def uniforms(state: int, n: int) -> np.ndarray:
    """n uniforms in (0, 1): the SplitMix64 sequence starting at `state`."""
    z = np.uint64(state) + np.arange(n, dtype=np.uint64) * np.uint64(GOLDEN_GAMMA) + np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_2)
    z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) / 2.0**53


def substream_uniforms(seed: int, key: str, n: int) -> np.ndarray:
    return uniforms(stream_state(seed, key), n)


def substream_uniform(seed: int, *keys: int | str) -> float:
    return float(uniforms(stream_state(seed, *keys), 1)[0])


def realization_seed(master_seed: int, index: int) -> int:
    return stable_mix(master_seed, index)
