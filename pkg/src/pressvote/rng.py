"""Deterministic, splittable random streams.

Every random draw in the package comes from a stream keyed by
(seed, purpose label, *indices), so draws for one purpose are
independent of iteration order elsewhere.
"""

import zlib

import numpy as np

__all__ = ["stream"]


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def stream(seed: int, label: str, *indices: int) -> np.random.Generator:
    """Return a fresh Generator for (seed, label, indices).

    The same key always yields the same stream, on any platform.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, _label_key(label), *[int(i) for i in indices]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
