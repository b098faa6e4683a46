"""Seed stream derivation.

Every random draw in the package comes from ``stream(seed, label, *index)``,
so a run is fully determined by one master seed.
"""
import zlib

import numpy as np


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def stream(seed, label: str = "", *index: int) -> np.random.Generator:
    """Independent generator keyed by (master seed, purpose label, indices).

    A ``Generator`` passed as ``seed`` is returned unchanged so callers can
    thread their own stream through.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required for reproducible runs")
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    entropy = [seed, _label_key(label)] + [int(i) for i in index]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
