"""Exact minimum set cover by branch and bound.

Sets and the universe are arbitrary-precision int bitmasks.  The search runs
iterative deepening on cover cardinality with the bound
ceil(uncovered / best-possible-coverage), then a second lexicographic pass
extracts the smallest optimal index set (and optionally detects ties).
Instances here are small: candidate sets are surviving node pairs, elements
are positive tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class InfeasibleCoverError(ValueError):
    """Some element is covered by no set."""


class _BudgetExhausted(Exception):
    pass


@dataclass
class SetCoverResult:
    chosen: tuple[int, ...]  # set indices, sorted; lexicographically smallest optimum
    size: int
    status: str  # "ok" | "ambiguous" | "budget-exceeded"
    expansions: int
    forced: tuple[int, ...]  # indices that appear in every cover
    ties: bool | None  # None when tie detection was not requested or aborted


def _greedy_cover(sets: Sequence[int], universe: int) -> list[int]:
    chosen = []
    uncovered = universe
    while uncovered:
        best, best_gain = -1, 0
        for idx, s in enumerate(sets):
            gain = (s & uncovered).bit_count()
            if gain > best_gain:
                best, best_gain = idx, gain
        chosen.append(best)
        uncovered &= ~sets[best]
    return chosen


def min_set_cover(
    sets: Sequence[int],
    universe: int,
    budget: int | None = None,
    detect_ties: bool = False,
) -> SetCoverResult:
    """Minimum-cardinality cover of `universe` using the given bitmask sets.

    Raises InfeasibleCoverError when no cover exists.  When the expansion
    budget runs out the greedy cover is returned with status
    "budget-exceeded" (it is feasible but not certified minimal).
    """
    sets = list(sets)
    covered_any = 0
    for s in sets:
        covered_any |= s
    if universe & ~covered_any:
        raise InfeasibleCoverError("an element is covered by no candidate set")
    if universe == 0:
        return SetCoverResult((), 0, "ok", 0, (), False if detect_ties else None)

    # Elements with a unique coverer force that set into every cover.
    coverers: dict[int, list[int]] = {}
    for idx, s in enumerate(sets):
        rem = s & universe
        while rem:
            bit = rem & -rem
            coverers.setdefault(bit, []).append(idx)
            rem ^= bit
    forced = sorted({lst[0] for lst in coverers.values() if len(lst) == 1})
    base = 0
    for idx in forced:
        base |= sets[idx]
    u0 = universe & ~base

    expansions = 0
    limit = budget if budget is not None else float("inf")

    greedy = sorted(set(forced) | set(_greedy_cover(sets, universe)))

    # Candidates for the residual search: non-forced sets with residual coverage.
    forced_set = set(forced)
    cand = [
        (idx, sets[idx] & u0)
        for idx in range(len(sets))
        if sets[idx] & u0 and idx not in forced_set
    ]

    def lower_bound(u: int) -> int:
        if not u:
            return 0
        best = max(((s & u).bit_count() for _, s in cand), default=0)
        if best == 0:
            return 1 << 30
        return -(-u.bit_count() // best)

    def exists_cover(u: int, depth_left: int) -> bool:
        nonlocal expansions
        if u == 0:
            return True
        if lower_bound(u) > depth_left:
            return False
        # branch on the uncovered element with fewest coverers
        pick, best_len = None, None
        rem = u
        while rem:
            bit = rem & -rem
            lst = [ci for ci, (_, s) in enumerate(cand) if s & bit]
            if best_len is None or len(lst) < best_len:
                pick, best_len = lst, len(lst)
                if best_len <= 1:
                    break
            rem ^= bit
        order = sorted(pick, key=lambda ci: -(cand[ci][1] & u).bit_count())
        for ci in order:
            expansions += 1
            if expansions > limit:
                raise _BudgetExhausted
            if exists_cover(u & ~cand[ci][1], depth_left - 1):
                return True
        return False

    try:
        extra = 0 if u0 == 0 else max(1, lower_bound(u0))
        while True:
            if extra > len(greedy) - len(forced):
                extra = len(greedy) - len(forced)  # greedy is an upper bound
                break
            if exists_cover(u0, extra):
                break
            extra += 1
    except _BudgetExhausted:
        return SetCoverResult(tuple(greedy), len(greedy), "budget-exceeded", expansions, tuple(forced), None)

    size = len(forced) + extra

    # Lexicographic extraction at the certified optimum.  Enumerating index
    # combinations in increasing order yields the smallest cover first.
    n_cand = len(cand)
    suffix_or = [0] * (n_cand + 1)
    for ci in range(n_cand - 1, -1, -1):
        suffix_or[ci] = suffix_or[ci + 1] | cand[ci][1]

    solutions: list[tuple[int, ...]] = []

    def lex_search(u: int, start: int, depth_left: int, partial: list[int], want: int) -> bool:
        nonlocal expansions
        if u == 0:
            solutions.append(tuple(partial))
            return len(solutions) >= want
        if depth_left == 0 or (suffix_or[start] & u) != u:
            return False
        if lower_bound(u) > depth_left:
            return False
        for ci in range(start, n_cand):
            s = cand[ci][1]
            if s & u == 0:
                continue  # redundant here, hence absent from any minimum cover
            expansions += 1
            if expansions > limit:
                raise _BudgetExhausted
            partial.append(ci)
            if lex_search(u & ~s, ci + 1, depth_left - 1, partial, want):
                return True
            partial.pop()
        return False

    ties: bool | None = False if detect_ties else None
    try:
        lex_search(u0, 0, extra, [], 2 if detect_ties else 1)
        if detect_ties and len(solutions) >= 2:
            ties = True
    except _BudgetExhausted:
        if not solutions:
            return SetCoverResult(tuple(greedy), len(greedy), "budget-exceeded", expansions, tuple(forced), None)
        ties = None  # optimum certified, tie scan aborted

    first = solutions[0]
    chosen = tuple(sorted(set(forced) | {cand[ci][0] for ci in first}))
    status = "ambiguous" if ties else "ok"
    return SetCoverResult(chosen, size, status, expansions, tuple(forced), ties)
