"""Non-adaptive test designs and their evaluation against a hidden graph.

A design is an ordered list of node subsets, stored internally as packed
bitmask rows for O(1) membership and fast batch evaluation.  Two kinds are
provided: i.i.d. Bernoulli designs, and the structured bundle layout used by
the sublinear decoder (random bundles, per-bundle multiplicity tests, and
bit-indexed location tests).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .bitpack import pack_rows, unpack_rows, words_for
from .graphs import Graph, bernoulli_p

INV_SQRT2 = 1.0 / math.sqrt(2.0)


class Design:
    """Ordered list of tests over nodes 1..n, represented as packed bit rows."""

    __slots__ = ("n", "kind", "masks")

    def __init__(self, n: int, masks: np.ndarray, kind: str):
        if n < 1:
            raise ValueError("need n >= 1")
        masks = np.ascontiguousarray(masks, dtype=np.uint64)
        if masks.ndim != 2 or masks.shape[1] != words_for(n):
            raise ValueError(f"masks must be (t, {words_for(n)}) for n={n}")
        self.n = n
        self.kind = kind
        self.masks = masks

    @classmethod
    def from_membership(cls, n: int, membership: np.ndarray, kind: str) -> "Design":
        membership = np.asarray(membership, dtype=bool)
        if membership.ndim != 2 or membership.shape[1] != n:
            raise ValueError("membership must be (t, n)")
        return cls(n, pack_rows(membership), kind)

    @classmethod
    def from_tests(cls, n: int, tests: Iterable[Iterable[int]], kind: str) -> "Design":
        tests = [sorted(set(int(v) for v in tst)) for tst in tests]
        memb = np.zeros((len(tests), n), dtype=bool)
        for row, nodes in enumerate(tests):
            for v in nodes:
                if not 1 <= v <= n:
                    raise ValueError(f"test node {v} outside 1..{n}")
                memb[row, v - 1] = True
        return cls.from_membership(n, memb, kind)

    @property
    def t(self) -> int:
        return self.masks.shape[0]

    def membership(self) -> np.ndarray:
        return unpack_rows(self.masks, self.n)

    def test_nodes(self, i: int) -> tuple[int, ...]:
        """Sorted 1-based node labels of test i (0-based index)."""
        row = unpack_rows(self.masks[i : i + 1], self.n)[0]
        return tuple((np.flatnonzero(row) + 1).tolist())

    def __len__(self) -> int:
        return self.t

    def __iter__(self):
        memb = self.membership()
        for row in memb:
            yield tuple((np.flatnonzero(row) + 1).tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Design)
            and self.n == other.n
            and self.kind == other.kind
            and self.masks.shape == other.masks.shape
            and bool(np.array_equal(self.masks, other.masks))
        )


class OutcomeVector:
    """Binary outcomes of a design's tests, in test order."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or not np.isin(arr, (0, 1)).all():
            raise ValueError("outcomes must be a flat 0/1 vector")
        self.bits = arr

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> int:
        return int(self.bits[i])

    def __iter__(self):
        return iter(self.bits.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, OutcomeVector) and bool(np.array_equal(self.bits, other.bits))

    def positive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits == 1)

    def negative_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits == 0)


@dataclass(frozen=True)
class BernoulliParams:
    """Design constant nu and the derived per-test inclusion probability."""

    nu: float
    p: float
    clamped: bool

    @classmethod
    def for_graph(cls, n: int, q: float, nu: float) -> "BernoulliParams":
        p, clamped = bernoulli_p(n, q, nu)
        return cls(nu=nu, p=p, clamped=clamped)


def bernoulli_design(n: int, t: int, p: float, seed) -> Design:
    """t tests, each node included independently with probability p."""
    if t < 0:
        raise ValueError("need t >= 0")
    if not (0.0 <= p <= 1.0):
        raise ValueError("need 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    memb = rng.random((t, n)) < p
    return Design.from_membership(n, memb, "bernoulli")


def run_tests(design: Design, g: Graph) -> OutcomeVector:
    """Evaluate every test of the design against the graph."""
    if design.n != g.n:
        raise ValueError(f"design is over {design.n} nodes but graph has {g.n}")
    ei, ej = g.edge_arrays()
    return OutcomeVector(kernels.eval_tests(design.masks, ei, ej))


# ---------------------------------------------------------------------------
# Bundle layout for the sublinear decoder
# ---------------------------------------------------------------------------


def asymptotic_bundle_count(kbar: float) -> int:
    """Leading-order bundle count 4*kbar*ln(kbar) from the coupon-collector analysis."""
    if kbar < 2:
        raise ValueError("need kbar >= 2")
    return math.ceil(4.0 * kbar * math.log(kbar))


def default_bundle_count(kbar: float) -> int:
    """Default bundle count: twice the asymptotic leading term.

    The asymptotic count makes the expected number of never-isolated edges
    O(1) rather than o(1), which at practical sizes leaves a sizable chance
    that some edge is never the unique one in any bundle.  Doubling the
    constant (well within the leading-order form) restores high recovery
    rates at the scales this library targets.
    """
    if kbar < 2:
        raise ValueError("need kbar >= 2")
    return math.ceil(8.0 * kbar * math.log(kbar))


@dataclass(frozen=True)
class GrotesqueLayout:
    """Index map and parameters of a bundle design.

    Per bundle the test block is laid out as: t_mul multiplicity tests, then
    2L type-(i) location tests (for each bit position, the bundle members
    whose code bit is 0, then those with 1), then C(L,2) type-(ii) tests (for
    each position pair l' < l, the members whose code bits at l' and l are
    equal).  Node v's code is the L-bit binary form of v-1, most significant
    bit first.  Test indices are 0-based positions into the design.
    """

    n: int
    B: int
    r: float
    t_mul: int
    L: int
    bundles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.B < 1 or not (0.0 < self.r < 1.0) or self.t_mul < 1:
            raise ValueError("invalid layout parameters")
        if self.L < 1 or 2**self.L < self.n:
            raise ValueError("bit-string length too small for n")
        if len(self.bundles) != self.B:
            raise ValueError("bundle count mismatch")

    @property
    def type1_offset(self) -> int:
        return self.t_mul

    @property
    def type2_offset(self) -> int:
        return self.t_mul + 2 * self.L

    @property
    def tests_per_bundle(self) -> int:
        return self.t_mul + 2 * self.L + (self.L * (self.L - 1)) // 2

    @property
    def total_tests(self) -> int:
        return self.B * self.tests_per_bundle

    def code_bits(self, v: int) -> tuple[int, ...]:
        """L-bit code of node v: binary form of v-1, MSB first."""
        if not 1 <= v <= self.n:
            raise ValueError(f"node {v} outside 1..{self.n}")
        x = v - 1
        return tuple((x >> (self.L - 1 - l)) & 1 for l in range(self.L))

    def node_from_bits(self, bits: Sequence[int]) -> int:
        """Inverse of code_bits; may return a label > n for garbage bits."""
        x = 0
        for b in bits:
            x = (x << 1) | int(b)
        return x + 1

    def mult_index(self, bundle: int, j: int) -> int:
        if not 0 <= j < self.t_mul:
            raise IndexError("multiplicity offset out of range")
        return bundle * self.tests_per_bundle + j

    def type1_index(self, bundle: int, l: int, bit: int) -> int:
        """Type-(i) test: members whose code bit at position l (0-based) equals bit."""
        if not 0 <= l < self.L or bit not in (0, 1):
            raise IndexError("type-(i) position out of range")
        return bundle * self.tests_per_bundle + self.type1_offset + 2 * l + bit

    def type2_index(self, bundle: int, lp: int, l: int) -> int:
        """Type-(ii) test: members whose code bits at positions lp < l are equal."""
        if not 0 <= lp < l < self.L:
            raise IndexError("type-(ii) positions must satisfy 0 <= l' < l < L")
        pos = lp * self.L - (lp * (lp + 1)) // 2 + (l - lp - 1)
        return bundle * self.tests_per_bundle + self.type2_offset + pos

    def locate(self, index: int) -> tuple[int, str, tuple[int, ...]]:
        """Inverse index map: (bundle, block, block-specific coordinates)."""
        if not 0 <= index < self.total_tests:
            raise IndexError("test index out of range")
        bundle, off = divmod(index, self.tests_per_bundle)
        if off < self.type1_offset:
            return bundle, "multiplicity", (off,)
        if off < self.type2_offset:
            l, bit = divmod(off - self.type1_offset, 2)
            return bundle, "location-type1", (l, bit)
        pos = off - self.type2_offset
        lp = 0
        while pos >= self.L - lp - 1:
            pos -= self.L - lp - 1
            lp += 1
        return bundle, "location-type2", (lp, lp + 1 + pos)

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "B": self.B,
            "r": self.r,
            "t_mul": self.t_mul,
            "L": self.L,
            "tests_per_bundle": self.tests_per_bundle,
            "block_offsets": {
                "multiplicity": 0,
                "location_type1": self.type1_offset,
                "location_type2": self.type2_offset,
            },
            "bundles": [list(b) for b in self.bundles],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "GrotesqueLayout":
        doc = json.loads(text)
        return cls(
            n=doc["n"],
            B=doc["B"],
            r=doc["r"],
            t_mul=doc["t_mul"],
            L=doc["L"],
            bundles=tuple(tuple(b) for b in doc["bundles"]),
        )


def grotesque_design(
    n: int,
    kbar: float,
    seed,
    b_override: int | None = None,
    tmul_override: int | None = None,
) -> tuple[Design, GrotesqueLayout]:
    """Sample a bundle design: bundles, multiplicity tests, and location tests.

    Defaults: B = default_bundle_count(kbar), r = 1/sqrt(2*kbar),
    t_mul = ceil(100*ln B).  Multiplicity tests include each bundle member
    independently with probability 1/sqrt(2); location tests are the
    deterministic code-bit filters described on GrotesqueLayout.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if kbar < 2:
        raise ValueError("need kbar >= 2")
    B = default_bundle_count(kbar) if b_override is None else int(b_override)
    if B < 1:
        raise ValueError("need B >= 1")
    r = 1.0 / math.sqrt(2.0 * kbar)
    t_mul = math.ceil(100.0 * math.log(B)) if tmul_override is None else int(tmul_override)
    if t_mul < 1:
        raise ValueError("need t_mul >= 1")
    L = max(1, math.ceil(math.log2(n)))

    rng = np.random.default_rng(seed)
    bundle_memb = rng.random((B, n)) < r

    # code bit matrix: codebits[l, v-1] = bit l (MSB first) of v-1
    labels = np.arange(n, dtype=np.int64)
    codebits = np.array([(labels >> (L - 1 - l)) & 1 for l in range(L)], dtype=bool)

    per_bundle = t_mul + 2 * L + (L * (L - 1)) // 2
    memb = np.zeros((B * per_bundle, n), dtype=bool)
    for b in range(B):
        members = np.flatnonzero(bundle_memb[b])
        base = b * per_bundle
        if len(members):
            incl = rng.random((t_mul, len(members))) < INV_SQRT2
            memb[base : base + t_mul, members] = incl
            mc = codebits[:, members]  # (L, |bundle|)
            row = base + t_mul
            for l in range(L):
                memb[row, members[~mc[l]]] = True
                memb[row + 1, members[mc[l]]] = True
                row += 2
            for lp in range(L):
                for l in range(lp + 1, L):
                    memb[row, members[mc[lp] == mc[l]]] = True
                    row += 1

    bundles = tuple(
        tuple((np.flatnonzero(bundle_memb[b]) + 1).tolist()) for b in range(B)
    )
    layout = GrotesqueLayout(n=n, B=B, r=r, t_mul=t_mul, L=L, bundles=bundles)
    design = Design.from_membership(n, memb, "grotesque")
    return design, layout


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def design_to_text(design: Design) -> str:
    """Header "n t kind", then one line per test: "m v1 ... vm"."""
    lines = [f"{design.n} {design.t} {design.kind}"]
    for nodes in design:
        lines.append(" ".join([str(len(nodes))] + [str(v) for v in nodes]))
    return "\n".join(lines) + "\n"


def design_from_text(text: str) -> Design:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise ValueError("expected header line 'n t kind'")
    n, t, kind = int(rows[0][0]), int(rows[0][1]), rows[0][2]
    if len(rows) - 1 != t:
        raise ValueError(f"header says {t} tests but found {len(rows) - 1}")
    tests = []
    for row in rows[1:]:
        m = int(row[0])
        nodes = [int(v) for v in row[1:]]
        if len(nodes) != m:
            raise ValueError(f"test line announces {m} nodes but lists {len(nodes)}")
        tests.append(nodes)
    return Design.from_tests(n, tests, kind)


def write_design(design: Design, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(design_to_text(design))


def read_design(path) -> Design:
    with open(path, "r", encoding="utf-8") as fh:
        return design_from_text(fh.read())
