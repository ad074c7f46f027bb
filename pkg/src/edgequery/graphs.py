"""Hidden-graph model: representation, random sampling, and test evaluation.

Nodes are labeled 1..n.  Edges are stored as canonical (min, max) pairs in
lexicographic order, so every downstream tie-break is deterministic.  A group
test on a node subset returns 1 iff the subset contains both endpoints of at
least one edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]

# Independence enumeration is exponential in component size; beyond this many
# nodes callers must fall back to mc_positive_prob.
EXACT_ENUMERATION_CAP = 25


class ExactCapExceededError(ValueError):
    """Raised when exact positive-probability enumeration is asked for a graph too large."""


class RetryBudgetError(RuntimeError):
    """Raised when rejection sampling of a degree-bounded graph stalls."""


def _canonical_edges(n: int, edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    out = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if i == j:
            raise ValueError(f"self-loop ({i},{j}) not allowed")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"edge ({i},{j}) outside 1..{n}")
        out.add((i, j) if i < j else (j, i))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Graph:
    """Undirected graph on nodes 1..n with a canonical edge tuple."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")
        if self.edges != _canonical_edges(self.n, self.edges):
            raise ValueError("edges must be canonical (i<j, sorted, unique); use Graph.make")

    @classmethod
    def make(cls, n: int, edges: Iterable[Sequence[int]] = ()) -> "Graph":
        """Build a graph, canonicalizing the edge list."""
        return cls(n, _canonical_edges(n, edges))

    @property
    def k(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in set(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based endpoint arrays for the kernels."""
        if not self.edges:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        arr = np.asarray(self.edges, dtype=np.int64) - 1
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])

    def adjacency_sets(self) -> list[set[int]]:
        """1-based neighbor sets, index 0 unused."""
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True)
class ErParams:
    """Erdos-Renyi sampling parameters: each pair is an edge with probability q.

    The closed interval [0, 1] is accepted for q so degenerate sampling cases
    work; the sparsity exponent is only defined for 0 < q < 1 with kbar > 1.
    """

    n: int
    q: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not (0.0 <= self.q <= 1.0):
            raise ValueError("need 0 <= q <= 1")

    @property
    def kbar(self) -> float:
        """Expected edge count q * C(n, 2)."""
        return self.q * self.n * (self.n - 1) / 2

    @property
    def theta(self) -> float:
        """Sparsity exponent: kbar = n**(2*theta)."""
        if self.kbar <= 0:
            raise ValueError("theta undefined for kbar = 0")
        return math.log(self.kbar) / (2 * math.log(self.n))


def all_pairs(n: int) -> tuple[Edge, ...]:
    """All C(n,2) canonical pairs in lexicographic order."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


def sample_er(params: ErParams, seed) -> Graph:
    """Sample a graph with each pair included independently with probability q."""
    rng = np.random.default_rng(seed)
    n = params.n
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < params.q
    edges = tuple(zip((iu[keep] + 1).tolist(), (ju[keep] + 1).tolist()))
    return Graph(n, edges)


def evaluate_test(g: Graph, test: Iterable[int]) -> int:
    """Eq.-style query: 1 iff the test set contains both endpoints of some edge."""
    included = set(test)
    for v in included:
        if not 1 <= v <= g.n:
            raise ValueError(f"test node {v} outside 1..{g.n}")
    for i, j in g.edges:
        if i in included and j in included:
            return 1
    return 0


def _components(g: Graph) -> list[list[int]]:
    """Connected components with at least one edge (isolated nodes never flip a test)."""
    adj = g.adjacency_sets()
    seen = set()
    comps = []
    for i, _ in g.edges:
        if i in seen:
            continue
        stack, comp = [i], []
        seen.add(i)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _component_negative_prob(nodes: list[int], adj: list[set[int]], p: float) -> float:
    """P[the included subset of this component is an independent set].

    Memoized recursion on the node bitmask: branch on the lowest remaining
    node v, either excluded (weight 1-p) or included (weight p), in which
    case all remaining neighbors of v must be excluded.
    """
    index = {v: b for b, v in enumerate(nodes)}
    nbr_mask = [0] * len(nodes)
    for b, v in enumerate(nodes):
        for w in adj[v]:
            if w in index:
                nbr_mask[b] |= 1 << index[w]
    memo: dict[int, float] = {0: 1.0}

    def rec(mask: int) -> float:
        val = memo.get(mask)
        if val is not None:
            return val
        b = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        nbrs = nbr_mask[b] & rest
        val = (1.0 - p) * rec(rest) + p * (1.0 - p) ** nbrs.bit_count() * rec(rest & ~nbrs)
        memo[mask] = val
        return val

    return rec((1 << len(nodes)) - 1)


def exact_positive_prob(g: Graph, p: float) -> float:
    """Exact P[Bernoulli(p) test is positive] by independence-set enumeration.

    A test is negative iff the included node set is independent in g, so the
    negative probability factorizes over connected components.
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError("need 0 <= p <= 1")
    if g.n > EXACT_ENUMERATION_CAP:
        raise ExactCapExceededError(
            f"exact enumeration capped at n <= {EXACT_ENUMERATION_CAP}; use mc_positive_prob"
        )
    if not g.edges:
        return 0.0
    adj = g.adjacency_sets()
    neg = 1.0
    for comp in _components(g):
        neg *= _component_negative_prob(comp, adj, p)
    return 1.0 - neg


def mc_positive_prob(
    g: Graph, p: float, samples: int, seed, chunk: int = 65536
) -> tuple[float, float]:
    """Monte-Carlo estimate of P[positive test] with a 95% normal CI half-width."""
    if samples < 1:
        raise ValueError("need samples >= 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError("need 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    ei, ej = g.edge_arrays()
    hits = 0
    done = 0
    while done < samples:
        batch = min(chunk, samples - done)
        memb = rng.random((batch, g.n)) < p
        if len(ei):
            hits += int((memb[:, ei] & memb[:, ej]).any(axis=1).sum())
        done += batch
    est = hits / samples
    half_width = 1.96 * math.sqrt(est * (1.0 - est) / samples)
    return est, half_width


@dataclass(frozen=True)
class TypicalityReport:
    """Diagnostics for whether a sampled graph behaves like a typical one."""

    k: int
    k_band: tuple[float, float]
    k_ok: bool
    max_degree: int
    degree_bound: float
    d_ok: bool
    py1: float
    py1_method: str  # "exact" | "monte-carlo"
    py1_halfwidth: float
    py1_band: tuple[float, float]
    py1_ok: bool
    p: float
    p_clamped: bool


def bernoulli_p(n: int, q: float, nu: float) -> tuple[float, bool]:
    """Per-test inclusion probability sqrt(2*nu/(q*n^2)), clamped into (0, 1]."""
    if nu <= 0:
        raise ValueError("need nu > 0")
    if q <= 0:
        raise ValueError("need q > 0")
    p = math.sqrt(2.0 * nu / (q * n * n))
    if p > 1.0:
        return 1.0, True
    return p, False


def typicality_check(
    g: Graph,
    params: ErParams,
    nu: float,
    epsilon: float,
    mc_samples: int = 20000,
    seed=0,
) -> TypicalityReport:
    """Check edge count, max degree, and positive-test probability bands.

    The degree bound is 2nq in the dense regime (theta > 1/2) and log n
    otherwise; the positive-probability band is (1 +- eps)(1 - e^-nu).
    """
    if epsilon <= 0:
        raise ValueError("need epsilon > 0")
    kbar = params.kbar
    theta = params.theta
    p, clamped = bernoulli_p(params.n, params.q, nu)

    k = g.k
    k_band = ((1 - epsilon) * kbar, (1 + epsilon) * kbar)
    k_ok = k_band[0] <= k <= k_band[1]

    d = g.max_degree()
    d_bound = 2 * params.n * params.q if theta > 0.5 else math.log(params.n)
    d_ok = d <= d_bound

    if g.n <= EXACT_ENUMERATION_CAP:
        py1, hw, method = exact_positive_prob(g, p), 0.0, "exact"
    else:
        py1, hw = mc_positive_prob(g, p, mc_samples, seed)
        method = "monte-carlo"
    center = 1.0 - math.exp(-nu)
    py1_band = ((1 - epsilon) * center, (1 + epsilon) * center)
    py1_ok = py1_band[0] <= py1 <= py1_band[1]

    return TypicalityReport(
        k=k,
        k_band=k_band,
        k_ok=k_ok,
        max_degree=d,
        degree_bound=d_bound,
        d_ok=d_ok,
        py1=py1,
        py1_method=method,
        py1_halfwidth=hw,
        py1_band=py1_band,
        py1_ok=py1_ok,
        p=p,
        p_clamped=clamped,
    )


def sample_bounded_graph(
    n: int, k: int, d_cap: int, seed, max_draws: int | None = None
) -> Graph:
    """Graph with exactly k edges and max degree <= d_cap by sequential rejection.

    Draws uniform random pairs and keeps those that respect the degree cap.
    Exact uniformity over the class is not claimed.  The draw budget defaults
    to 100*k*n; a stall raises RetryBudgetError.
    """
    if k < 0 or d_cap < 0 or n < 1:
        raise ValueError("need n >= 1, k >= 0, d_cap >= 0")
    if 2 * k > n * d_cap:
        raise ValueError(f"no graph with {k} edges and max degree {d_cap} on {n} nodes")
    if k == 0:
        return Graph(n, ())
    rng = np.random.default_rng(seed)
    budget = 100 * k * n if max_draws is None else max_draws
    edges: set[Edge] = set()
    deg = np.zeros(n + 1, dtype=np.int64)
    draws = 0
    while len(edges) < k:
        if draws >= budget:
            raise RetryBudgetError(
                f"gave up after {draws} draws with {len(edges)}/{k} edges placed"
            )
        draws += 1
        i, j = rng.integers(1, n + 1, size=2)
        if i == j:
            continue
        e = (int(min(i, j)), int(max(i, j)))
        if e in edges or deg[e[0]] >= d_cap or deg[e[1]] >= d_cap:
            continue
        edges.add(e)
        deg[e[0]] += 1
        deg[e[1]] += 1
    return Graph(n, tuple(sorted(edges)))


def graph_to_text(g: Graph) -> str:
    """Plain-text form: first line "n k", then one "i j" line per edge, i < j."""
    lines = [f"{g.n} {g.k}"]
    lines += [f"{i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("expected header line 'n k'")
    n, k = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != k:
        raise ValueError(f"header says {k} edges but found {len(rows) - 1}")
    return Graph.make(n, [(int(a), int(b)) for a, b in rows[1:]])


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(graph_to_text(g))


def read_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_text(fh.read())
