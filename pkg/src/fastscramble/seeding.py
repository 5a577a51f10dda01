"""Deterministic RNG streams derived from a master seed.

Every sampled quantity gets its own stream keyed by (master seed,
experiment label, sample index), so results do not depend on evaluation
order and reruns are bit-identical.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _label_key(label: str) -> tuple[int, int]:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    return value & 0xFFFFFFFF, value >> 32


def substream(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Independent generator for one sample of one experiment."""
    if master_seed < 0:
        raise ValueError("seed must be non-negative")
    lo, hi = _label_key(label)
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(lo, hi, index))
    return np.random.default_rng(ss)
