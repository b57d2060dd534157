"""Stable per-item seed derivation.

Seeds are hashed from (master seed, string parts) so that adding or
removing one image never perturbs the randomness assigned to the others,
and runs reproduce bit-for-bit across processes and platforms.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *parts) -> int:
    text = f"{master}|" + "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")
