"""Seed derivation for replicates, chains and dropout passes."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(base_seed: int, tag: str, index: int = 0) -> int:
    """Stable 63-bit seed from (base seed, stream tag, index).

    Adding replicates never changes the seeds of earlier ones.
    """
    digest = hashlib.blake2b(f"{int(base_seed)}:{tag}:{int(index)}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def derive_rng(base_seed: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(base_seed, tag, index))
