"""Sublinear-time decoding over a bundle design.

Each bundle is classified from its multiplicity tests (zero / one / many
covered edges); only single-edge bundles proceed to location decoding, which
reconstructs the two endpoint bit strings by reading at most three test
outcomes per bit position.  Outcomes are pulled through a fetch accessor so
unused location blocks are never read, and all reads are counted.

The bundle count trades tests for recovery: the asymptotic leading constant
under-provisions at small scales, so either accept the default (twice the
leading term) or pass overrides when building the design.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

from .decoders import DecodeResult
from .designs import Design, GrotesqueLayout, OutcomeVector

# A single covered edge makes each multiplicity test positive with
# probability 1/2; two or more edges push it above 0.646.  The classifier
# splits at 0.573, the midpoint margin used to bound both error directions.
MANY_FRACTION_THRESHOLD = 0.573

FetchFn = Callable[[int], int]


class Multiplicity(enum.Enum):
    ZERO = "zero"
    ONE = "one"
    MANY = "many"


@dataclass(frozen=True)
class MultiplicityClass:
    value: Multiplicity
    positive_fraction: float


@dataclass
class FetchStats:
    """Operation accounting for a decode.

    outcomes_fetched counts accessor reads; bundles_located counts location
    decodes started; elapsed_ops is an abstract cost: one unit per fetch,
    one per bundle classification, and one per bit position examined during
    location decoding.
    """

    outcomes_fetched: int = 0
    bundles_located: int = 0
    elapsed_ops: int = 0


class CorruptBundleError(RuntimeError):
    """Location decode produced an impossible answer (single-edge precondition violated)."""


def classify_multiplicity(bundle_outcomes: Sequence[int]) -> MultiplicityClass:
    """Classify a bundle from its multiplicity-test outcomes."""
    n = len(bundle_outcomes)
    if n < 1:
        raise ValueError("need at least one multiplicity outcome")
    frac = sum(1 for b in bundle_outcomes if b) / n
    if frac == 0.0:
        value = Multiplicity.ZERO
    elif frac < MANY_FRACTION_THRESHOLD:
        value = Multiplicity.ONE
    else:
        value = Multiplicity.MANY
    return MultiplicityClass(value=value, positive_fraction=frac)


def _as_fetch(source) -> FetchFn:
    if isinstance(source, OutcomeVector):
        bits = source.bits
        return lambda i: int(bits[i])
    return source


def decode_location(bundle_id: int, layout: GrotesqueLayout, fetch) -> tuple[int, int]:
    """Recover the unique edge of a single-edge bundle from its location tests.

    Builds the two endpoint bit strings position by position.  A positive
    type-(i) test fixes both bits to its value.  When both type-(i) tests are
    negative the bits differ: the first such position is assigned (0, 1) by
    convention, and each later one consults the equal-bits type-(ii) test
    against that anchor (positive means the bits repeat the anchor
    assignment, negative means they flip).

    Only guaranteed correct when the bundle covers exactly one edge; clearly
    impossible outputs raise CorruptBundleError.
    """
    fetch = _as_fetch(fetch)
    L = layout.L
    a_bits = [0] * L
    b_bits = [0] * L
    anchor = -1
    for l in range(L):
        if fetch(layout.type1_index(bundle_id, l, 0)):
            if fetch(layout.type1_index(bundle_id, l, 1)):
                raise CorruptBundleError(f"both bit-{l} tests positive in bundle {bundle_id}")
            a_bits[l] = b_bits[l] = 0
        elif fetch(layout.type1_index(bundle_id, l, 1)):
            a_bits[l] = b_bits[l] = 1
        elif anchor < 0:
            anchor = l
            a_bits[l], b_bits[l] = 0, 1
        elif fetch(layout.type2_index(bundle_id, anchor, l)):
            a_bits[l], b_bits[l] = a_bits[anchor], b_bits[anchor]
        else:
            a_bits[l], b_bits[l] = b_bits[anchor], a_bits[anchor]
    if anchor < 0:
        raise CorruptBundleError(f"bundle {bundle_id} decoded two identical codes")
    a = layout.node_from_bits(a_bits)
    b = layout.node_from_bits(b_bits)
    if a > layout.n or b > layout.n:
        raise CorruptBundleError(f"bundle {bundle_id} decoded a nonexistent node")
    return (a, b) if a < b else (b, a)


class _CountingFetch:
    __slots__ = ("inner", "stats", "indices")

    def __init__(self, inner: FetchFn, stats: FetchStats, record: bool = False):
        self.inner = inner
        self.stats = stats
        self.indices: list[int] | None = [] if record else None

    def __call__(self, i: int) -> int:
        self.stats.outcomes_fetched += 1
        self.stats.elapsed_ops += 1
        if self.indices is not None:
            self.indices.append(i)
        return self.inner(i)


def grotesque_decode(
    layout: GrotesqueLayout,
    design: Design | None,
    fetch,
    record_fetches: bool = False,
) -> tuple[DecodeResult, FetchStats]:
    """Decode every bundle: classify multiplicity, locate single-edge bundles.

    Location outcomes of bundles classified zero or many are never fetched.
    Corrupt bundles are skipped and counted in the diagnostics.  When
    record_fetches is set, the diagnostics include the exact fetched indices
    (used by verification tests).
    """
    if design is not None:
        if design.t != layout.total_tests:
            raise ValueError(
                f"design has {design.t} tests but layout describes {layout.total_tests}"
            )
        if design.n != layout.n:
            raise ValueError("design and layout disagree on n")
    stats = FetchStats()
    counting = _CountingFetch(_as_fetch(fetch), stats, record=record_fetches)
    edges = set()
    class_counts = {m: 0 for m in Multiplicity}
    corrupt = 0
    location_fetches: list[int] = []
    for b in range(layout.B):
        bits = [counting(layout.mult_index(b, j)) for j in range(layout.t_mul)]
        stats.elapsed_ops += 1
        cls = classify_multiplicity(bits)
        class_counts[cls.value] += 1
        if cls.value is not Multiplicity.ONE:
            continue
        stats.bundles_located += 1
        before = len(counting.indices) if counting.indices is not None else 0
        try:
            edge = decode_location(b, layout, counting)
        except CorruptBundleError:
            corrupt += 1
        else:
            edges.add(edge)
        finally:
            stats.elapsed_ops += layout.L
            if counting.indices is not None:
                location_fetches.extend(counting.indices[before:])
    diagnostics = {
        "bundles_zero": class_counts[Multiplicity.ZERO],
        "bundles_one": class_counts[Multiplicity.ONE],
        "bundles_many": class_counts[Multiplicity.MANY],
        "corrupt_skipped": corrupt,
    }
    if record_fetches:
        diagnostics["fetched_indices"] = tuple(counting.indices or ())
        diagnostics["location_fetches"] = tuple(location_fetches)
    result = DecodeResult(edges=tuple(sorted(edges)), status="ok", diagnostics=diagnostics)
    return result, stats
