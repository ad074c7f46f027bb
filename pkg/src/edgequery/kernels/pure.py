"""NumPy implementations of the decode/evaluation kernels.

These are the reference semantics; the compiled backend must return
bit-identical results.  All node indices here are 0-based; masks are the
packed rows produced by :mod:`edgequery.bitpack`.
"""

from __future__ import annotations

import numpy as np

from ..bitpack import unpack_rows

_ONE = np.uint64(1)


def _endpoint_bits(masks: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Per-test inclusion bits for each node in `nodes`: (t, len(nodes)) uint64 of 0/1."""
    nodes = np.asarray(nodes, dtype=np.int64)
    words = (nodes >> 6).astype(np.int64)
    shifts = (nodes & 63).astype(np.uint64)
    return (masks[:, words] >> shifts[None, :]) & _ONE


def eval_tests(masks: np.ndarray, ei: np.ndarray, ej: np.ndarray) -> np.ndarray:
    """Outcome bit per test: 1 iff some edge (ei[k], ej[k]) has both endpoints included."""
    t = masks.shape[0]
    out = np.zeros(t, dtype=np.uint8)
    if t == 0 or len(ei) == 0:
        return out
    bits_i = _endpoint_bits(masks, ei)
    bits_j = _endpoint_bits(masks, ej)
    return (bits_i & bits_j).any(axis=1).astype(np.uint8)


def cooccur_free_pairs(masks: np.ndarray, n: int) -> np.ndarray:
    """All pairs (i<j), lexicographic, whose endpoints never co-occur in the given tests.

    Fed with the negative tests of a design, this is exactly the set of
    possible edges: any other pair sits inside some negative test.
    """
    iu, ju = np.triu_indices(n, 1)
    if masks.shape[0] == 0:
        return np.column_stack((iu, ju)).astype(np.int64)
    memb = unpack_rows(masks, n)
    # float32 matmul is exact for co-occurrence counts (< 2**24 tests)
    co = memb.T.astype(np.float32) @ memb.astype(np.float32)
    free = co[iu, ju] == 0
    return np.column_stack((iu[free], ju[free])).astype(np.int64)


def unique_cover(
    masks: np.ndarray, pi: np.ndarray, pj: np.ndarray, chunk: int = 4096
) -> tuple[np.ndarray, np.ndarray]:
    """Per test: how many candidate pairs it covers, and which one when exactly one.

    Returns (counts, uniq) of shape (t,); uniq[i] is the index into (pi, pj)
    of the single covered pair, or -1 when the count differs from 1.
    """
    t = masks.shape[0]
    counts = np.zeros(t, dtype=np.int64)
    idx_sum = np.zeros(t, dtype=np.int64)
    m = len(pi)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        cov = (_endpoint_bits(masks, pi[lo:hi]) & _endpoint_bits(masks, pj[lo:hi])).astype(bool)
        counts += cov.sum(axis=1)
        idx_sum += cov @ np.arange(lo, hi, dtype=np.int64)
    uniq = np.where(counts == 1, idx_sum, -1)
    return counts, uniq


def pair_covers(
    masks: np.ndarray, pi: np.ndarray, pj: np.ndarray, chunk: int = 4096
) -> np.ndarray:
    """Boolean (m, t) matrix: pair k is fully inside test i."""
    t = masks.shape[0]
    m = len(pi)
    out = np.empty((m, t), dtype=bool)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        cov = _endpoint_bits(masks, pi[lo:hi]) & _endpoint_bits(masks, pj[lo:hi])
        out[lo:hi] = cov.T.astype(bool)
    return out
