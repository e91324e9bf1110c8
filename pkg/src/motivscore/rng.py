"""Seed derivation shared by every randomized routine."""

import numpy as np

_MASK = (1 << 64) - 1


def split_mix(seed, stream):
    """Derive an independent 64-bit seed for ``stream`` from a master ``seed``.

    One splitmix64 step applied to ``seed`` advanced by ``stream + 1``
    golden-ratio increments.  Pure function, so per-tree and per-fold seeds
    do not depend on the order in which work is executed.
    """
    z = (int(seed) + (int(stream) + 1) * 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def generator(seed, stream=None):
    if stream is not None:
        seed = split_mix(seed, stream)
    return np.random.default_rng(int(seed))
