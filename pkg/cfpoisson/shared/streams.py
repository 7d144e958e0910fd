"""
Counter-based uniform streams keyed by (seed, purpose, level, name)

A uniform is a pure function of its key, so a cylinder's draw does not
depend on which other cylinders are sampled or in what order.
"""

from hashlib import blake2b
from typing import Optional

import numpy as np

from cfpoisson.types.group import GroupDescriptor

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _digest64(data: bytes) -> int:
    return int.from_bytes(blake2b(data, digest_size=8).digest(), "little")


def stream_key(seed: int, purpose: str, level: int) -> np.uint64:
    """Key of one stream, e.g. ("sample", M) or ("refine", m)"""
    return np.uint64(_digest64(f"{seed}:{purpose}:{level}".encode()))


def name_keys(group: GroupDescriptor, points: np.ndarray) -> np.ndarray:
    """
    64-bit digest of each row's canonical encoding.

    Direct-sum rows are stripped of trailing zeros first so the key does not
    depend on the padding width.
    """
    keys = np.empty(points.shape[0], dtype=np.uint64)
    strip = group.kind == "direct-sum-finite-cyclic"
    for i, row in enumerate(points.tolist()):
        if strip:
            while row and row[-1] == 0:
                row.pop()
        keys[i] = _digest64(f"{group.kind}:{row}".encode())
    return keys


def splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms(
    stream: np.uint64, keys: np.ndarray, counters: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Uniforms in [0, 1), one per key (and per counter when given).

    Args:
        stream: Stream key from stream_key
        keys: Per-name keys from name_keys
        counters: Optional per-draw counters, e.g. the index of a point
            within its cylinder
    """
    x = np.asarray(keys, dtype=np.uint64) ^ stream
    if counters is not None:
        with np.errstate(over="ignore"):
            x = x + np.asarray(counters, dtype=np.uint64) * _GOLDEN
    z = splitmix64(splitmix64(x))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
