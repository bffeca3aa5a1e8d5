"""Stable 64-bit hashing used for text dedup keys and per-task RNG seeds.

Python's builtin ``hash`` is salted per process, so both the dedup state
and the per-(document, duplicate) seed derivation use FNV-1a, which is
cheap and produces identical values on every platform and run.
"""

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over raw bytes."""
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK
    return h


def fnv1a64_text(text: str) -> int:
    return fnv1a64(text.encode("utf-8"))


def mix64(seed: int, *parts: int) -> int:
    """Mix a base seed with integer parts into one 64-bit seed.

    Each part is folded in through the FNV-1a step function over its
    little-endian byte representation, then finalized with an
    xor-shift so that nearby (seed, part) tuples land far apart.
    """
    h = fnv1a64((seed & _MASK).to_bytes(8, "little"))
    for p in parts:
        for b in (p & _MASK).to_bytes(8, "little"):
            h = ((h ^ b) * FNV_PRIME) & _MASK
    h ^= h >> 33
    h = (h * 0xFF51AFD7ED558CCD) & _MASK
    h ^= h >> 33
    return h
