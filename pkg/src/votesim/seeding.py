"""Deterministic seed derivation.

Every component that needs randomness gets its own child generator derived
from (seed, labels...), so streams never interleave and adding draws in one
place cannot shift results anywhere else.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    material = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def spawn(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))
