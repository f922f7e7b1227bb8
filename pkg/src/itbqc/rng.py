"""Labeled derivation of independent random streams from one seed."""
from __future__ import annotations

import zlib

import numpy as np


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Child generator for (seed, labels); stable across runs and platforms."""
    keys = tuple(zlib.crc32(str(lab).encode()) for lab in labels)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=keys))
