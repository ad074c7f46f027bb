"""Packed-bitmask helpers shared by the kernel backends.

Tests are stored as rows of 64-bit words; bit ``j`` of word ``w`` in a row
says whether node ``64*w + j`` (0-based) is included in that test.  The
layout is independent of host byte order.
"""

from __future__ import annotations

import numpy as np

_BYTE_SHIFTS = (np.arange(8, dtype=np.uint64) * np.uint64(8)).reshape(1, 1, 8)


def words_for(n: int) -> int:
    """Number of 64-bit words needed for n bit positions."""
    return (n + 63) // 64


def pack_rows(membership: np.ndarray) -> np.ndarray:
    """Pack a boolean (t, n) membership matrix into (t, words_for(n)) uint64."""
    memb = np.ascontiguousarray(membership, dtype=bool)
    t, n = memb.shape
    w = words_for(n)
    if n < w * 64:
        padded = np.zeros((t, w * 64), dtype=bool)
        padded[:, :n] = memb
        memb = padded
    as_bytes = np.packbits(memb, axis=1, bitorder="little")
    words = as_bytes.reshape(t, w, 8).astype(np.uint64)
    return (words << _BYTE_SHIFTS).sum(axis=2, dtype=np.uint64)


def unpack_rows(masks: np.ndarray, n: int) -> np.ndarray:
    """Inverse of pack_rows; returns a boolean (t, n) matrix."""
    t, w = masks.shape
    as_bytes = ((masks[:, :, None] >> _BYTE_SHIFTS) & np.uint64(0xFF)).astype(np.uint8)
    bits = np.unpackbits(as_bytes.reshape(t, w * 8), axis=1, bitorder="little")
    return bits[:, :n].astype(bool)


def pack_indices(nodes: np.ndarray, n: int) -> np.ndarray:
    """Pack a single set of 0-based node indices into one uint64 row."""
    row = np.zeros(words_for(n), dtype=np.uint64)
    nodes = np.asarray(nodes, dtype=np.int64)
    np.bitwise_or.at(row, nodes >> 6, np.uint64(1) << (nodes & 63).astype(np.uint64))
    return row
