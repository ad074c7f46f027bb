"""Decoders for (design, outcomes) pairs: COMP, DD, exact SSS, and an LP relaxation.

All decoders first restrict attention to the pairs that never co-occur in a
negative test (the "possible edges"); any other pair is provably absent.
COMP returns that set outright.  DD keeps only pairs certified by a positive
test covering no other possible edge.  SSS finds a minimum-cardinality edge
set reproducing every outcome exactly, and lp_relax solves its covering-LP
relaxation with an internal simplex and rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels, setcover, simplex
from .designs import Design, OutcomeVector
from .graphs import Edge

DEFAULT_NODE_BUDGET = 10_000_000
DEFAULT_LP_THRESHOLD = 0.5
DEFAULT_LP_PIVOTS = 50_000


class InconsistentOutcomesError(ValueError):
    """The outcomes cannot be produced by any graph (some positive test is uncoverable)."""


@dataclass(frozen=True)
class PeSet:
    """Pairs surviving every negative test; a superset of any consistent edge set."""

    pairs: tuple[Edge, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in set(self.pairs)

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.pairs:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        arr = np.asarray(self.pairs, dtype=np.int64) - 1
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


@dataclass(frozen=True)
class DecodeResult:
    edges: tuple[Edge, ...]
    status: str  # "ok" | "ambiguous" | "budget-exceeded"
    diagnostics: dict = field(default_factory=dict, compare=False)


def _check_lengths(design: Design, outcomes: OutcomeVector) -> None:
    if len(outcomes) != design.t:
        raise ValueError(f"{len(outcomes)} outcomes for a {design.t}-test design")


def possible_edges(design: Design, outcomes: OutcomeVector) -> PeSet:
    """Pairs whose endpoints never appear together in a negative test."""
    _check_lengths(design, outcomes)
    neg_masks = design.masks[outcomes.bits == 0]
    pairs = kernels.cooccur_free_pairs(neg_masks, design.n) + 1
    return PeSet(tuple(map(tuple, pairs.tolist())))


def comp(design: Design, outcomes: OutcomeVector, pe: PeSet | None = None) -> DecodeResult:
    """Declare every pair an edge unless some negative test rules it out."""
    if pe is None:
        pe = possible_edges(design, outcomes)
    return DecodeResult(edges=pe.pairs, status="ok", diagnostics={"pe_size": len(pe)})


def dd(design: Design, outcomes: OutcomeVector, pe: PeSet | None = None) -> DecodeResult:
    """Declare a pair an edge only when some positive test covers it and nothing else."""
    if pe is None:
        pe = possible_edges(design, outcomes)
    pos_masks = design.masks[outcomes.bits == 1]
    pi, pj = pe.index_arrays()
    _, uniq = kernels.unique_cover(pos_masks, pi, pj)
    found = np.unique(uniq[uniq >= 0])
    edges = tuple(sorted((int(pi[u]) + 1, int(pj[u]) + 1) for u in found))
    return DecodeResult(edges=edges, status="ok", diagnostics={"pe_size": len(pe)})


def satisfies(edge_set, design: Design, outcomes: OutcomeVector) -> bool:
    """True iff the edge set reproduces every outcome exactly."""
    _check_lengths(design, outcomes)
    pairs = sorted({(min(i, j), max(i, j)) for i, j in edge_set})
    for i, j in pairs:
        if not (1 <= i <= design.n and 1 <= j <= design.n) or i == j:
            raise ValueError(f"invalid pair ({i},{j})")
    if pairs:
        arr = np.asarray(pairs, dtype=np.int64) - 1
        bits = kernels.eval_tests(design.masks, arr[:, 0], arr[:, 1])
    else:
        bits = np.zeros(design.t, dtype=np.uint8)
    return bool(np.array_equal(bits, outcomes.bits))


def _positive_cover_masks(design: Design, outcomes: OutcomeVector, pe: PeSet) -> list[int]:
    """Per possible edge, the bitmask of positive tests it covers."""
    pos_masks = design.masks[outcomes.bits == 1]
    pi, pj = pe.index_arrays()
    cov = kernels.pair_covers(pos_masks, pi, pj)  # (m, t1) bool
    packed = np.packbits(cov, axis=1, bitorder="little") if cov.shape[1] else np.zeros((len(pe), 0), np.uint8)
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def sss(
    design: Design,
    outcomes: OutcomeVector,
    node_budget: int = DEFAULT_NODE_BUDGET,
    detect_ties: bool = False,
    pe: PeSet | None = None,
) -> DecodeResult:
    """Minimum-cardinality edge set consistent with all outcomes.

    Equivalent to minimum set cover: the universe is the positive tests, and
    a surviving pair covers the tests containing both its endpoints.  Solved
    exactly by branch and bound; ties broken toward the lexicographically
    smallest edge set.  status is "ambiguous" when tie detection is requested
    and a second minimum exists, "budget-exceeded" when the search ran out of
    node expansions (the returned set is then feasible but uncertified).
    """
    _check_lengths(design, outcomes)
    if pe is None:
        pe = possible_edges(design, outcomes)
    n_pos = int((outcomes.bits == 1).sum())
    universe = (1 << n_pos) - 1
    cover = _positive_cover_masks(design, outcomes, pe)
    try:
        result = setcover.min_set_cover(
            cover, universe, budget=node_budget, detect_ties=detect_ties
        )
    except setcover.InfeasibleCoverError as exc:
        raise InconsistentOutcomesError(
            "a positive test covers no surviving pair; outcomes match no graph"
        ) from exc
    edges = tuple(sorted(pe.pairs[i] for i in result.chosen))
    diagnostics = {
        "pe_size": len(pe),
        "expansions": result.expansions,
        "forced": len(result.forced),
        "optimum": result.size,
        "ties": result.ties,
    }
    return DecodeResult(edges=edges, status=result.status, diagnostics=diagnostics)


def lp_relax(
    design: Design,
    outcomes: OutcomeVector,
    threshold: float = DEFAULT_LP_THRESHOLD,
    max_pivots: int = DEFAULT_LP_PIVOTS,
    pe: PeSet | None = None,
) -> DecodeResult:
    """Fractional relaxation of sss, rounded at `threshold`.

    Minimizes sum(z) over surviving pairs subject to every positive test
    having total covering weight >= 1 and 0 <= z <= 1.  Rows forced to a
    single pair pin z = 1 exactly; duplicate and dominated rows are dropped
    (a superset row is implied by any subset row); the residual program goes
    to the dense simplex core.
    """
    _check_lengths(design, outcomes)
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must be in (0, 1]")
    if pe is None:
        pe = possible_edges(design, outcomes)
    pos_masks = design.masks[outcomes.bits == 1]
    pi, pj = pe.index_arrays()
    cov = kernels.pair_covers(pos_masks, pi, pj).T  # (t1, m): rows are positive tests
    t1, m = cov.shape
    if t1 and (m == 0 or not cov.any(axis=1).all()):
        raise InconsistentOutcomesError(
            "a positive test covers no surviving pair; outcomes match no graph"
        )

    z = np.zeros(m)
    forced: set[int] = set()
    rows = cov
    while True:
        row_sums = rows.sum(axis=1)
        singles = np.flatnonzero(row_sums == 1)
        if len(singles) == 0:
            break
        new = {int(np.flatnonzero(rows[r])[0]) for r in singles}
        forced |= new
        hit = rows[:, sorted(new)].any(axis=1)
        rows = rows[~hit]
        if not len(rows):
            break
    for j in forced:
        z[j] = 1.0

    pivots = 0
    status = "ok"
    objective = float(len(forced))
    if len(rows):
        rows = np.unique(rows, axis=0)
        keep = []
        for a in range(len(rows)):
            # drop row a when another row's support is strictly inside it
            implied = any(
                b != a and not (rows[b] & ~rows[a]).any() for b in range(len(rows))
            )
            if not implied:
                keep.append(a)
        rows = rows[keep]
        cols = np.flatnonzero(rows.any(axis=0))
        A = rows[:, cols].astype(float)
        res = simplex.solve_covering_lp(A, max_pivots=max_pivots)
        pivots = res.pivots
        if res.status == "infeasible":
            raise InconsistentOutcomesError("covering LP infeasible")
        if res.status == "unbounded":
            raise RuntimeError("covering LP reported unbounded; this is a solver bug")
        if res.status != "optimal":
            status = "budget-exceeded"
        else:
            z[cols] = res.x
            objective += res.objective

    chosen = np.flatnonzero(z >= threshold - simplex.TOL)
    edges = tuple(sorted((int(pi[c]) + 1, int(pj[c]) + 1) for c in chosen))
    diagnostics = {
        "pe_size": len(pe),
        "lp_pivots": pivots,
        "objective": objective,
        "forced": len(forced),
        "residual_rows": int(len(rows)),
    }
    return DecodeResult(edges=edges, status=status, diagnostics=diagnostics)
