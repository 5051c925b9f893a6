"""Seed derivation for reproducible randomness.

Every random draw in the toolkit flows from a single 64-bit recipe seed
through named substreams, so corpora are reproducible run-to-run and
independent of input ordering or scheduling.
"""
from __future__ import annotations

import random

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash. Stable, non-cryptographic, documented on purpose:
    alternate implementations must be able to re-derive per-input seeds."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def derive_seed(*parts: int | str) -> int:
    """Derive a 64-bit seed from a seed plus labels, e.g.
    derive_seed(7, "feature", "C1"). Encoding: parts joined with ':',
    integers rendered in decimal."""
    text = ":".join(str(p) for p in parts)
    return fnv1a64(text.encode("utf-8"))


def substream(*parts: int | str) -> random.Random:
    """A fresh Random seeded from the derived 64-bit value."""
    return random.Random(derive_seed(*parts))
