"""Monte-Carlo experiment driver: seeded trials, sweeps over t, CSV output.

Every trial is a pure function of (config, t, trial_index): per-purpose
seeds are derived with a stable hash, so results do not depend on execution
order, on the worker count, or on which decoders are requested alongside.
Aggregation is plain counting and therefore schedule-independent.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ._version import __version__
from .decoders import (
    DEFAULT_LP_THRESHOLD,
    DEFAULT_NODE_BUDGET,
    comp,
    dd,
    lp_relax,
    possible_edges,
    sss,
)
from .designs import bernoulli_design, grotesque_design, run_tests
from .graphs import ErParams, bernoulli_p, sample_bounded_graph, sample_er
from .sublinear import grotesque_decode

KNOWN_DECODERS = ("comp", "dd", "sss", "lp", "grotesque")


def split_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed derived from the base seed and purpose parts."""
    h = hashlib.blake2b(digest_size=8)
    for part in (base_seed, *parts):
        h.update(repr(part).encode())
        h.update(b"|")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class SimConfig:
    """Experiment description; everything that affects results lives here."""

    n: int
    kbar: float
    nu: float = 1.0
    decoders: tuple[str, ...] = ("comp", "dd")
    t_values: tuple[int, ...] = ()
    trials: int = 1
    base_seed: int = 0
    sss_node_budget: int = DEFAULT_NODE_BUDGET
    lp_threshold: float = DEFAULT_LP_THRESHOLD
    graph_class: str = "er"  # "er" or "bounded:<k>:<d_cap>"
    grotesque_b: int | None = None
    grotesque_tmul: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need trials >= 1")
        if list(self.t_values) != sorted(self.t_values):
            raise ValueError("t_values must be sorted ascending")
        for d in self.decoders:
            if d not in KNOWN_DECODERS:
                raise ValueError(f"unknown decoder {d!r}; choose from {KNOWN_DECODERS}")
        if not (0.0 < self.q < 1.0):
            raise ValueError("kbar must give 0 < q < 1")
        self.bounded_params  # validates the graph_class string

    @property
    def q(self) -> float:
        return self.kbar / (self.n * (self.n - 1) / 2)

    @property
    def bounded_params(self) -> tuple[int, int] | None:
        if self.graph_class == "er":
            return None
        parts = self.graph_class.split(":")
        if len(parts) != 3 or parts[0] != "bounded":
            raise ValueError("graph_class must be 'er' or 'bounded:<k>:<d_cap>'")
        return int(parts[1]), int(parts[2])


@dataclass
class CellStats:
    """Aggregated results for one (decoder, t) cell."""

    successes: int = 0
    trials: int = 0
    budget_exceeded: int = 0
    diag_sums: dict[str, float] = field(default_factory=dict)

    def add(self, success: bool, status: str, diagnostics: dict) -> None:
        self.trials += 1
        self.successes += int(success)
        self.budget_exceeded += int(status == "budget-exceeded")
        for key, val in diagnostics.items():
            if isinstance(val, (int, float)) and not isinstance(val, bool):
                self.diag_sums[key] = self.diag_sums.get(key, 0.0) + float(val)

    def merge(self, other: "CellStats") -> None:
        self.successes += other.successes
        self.trials += other.trials
        self.budget_exceeded += other.budget_exceeded
        for key, val in other.diag_sums.items():
            self.diag_sums[key] = self.diag_sums.get(key, 0.0) + val

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


@dataclass
class SweepResult:
    config: SimConfig
    cells: dict[tuple[str, int], CellStats]
    metadata: dict

    def success_rate(self, decoder: str, t: int) -> float:
        return self.cells[(decoder, t)].success_rate

    def rows(self):
        """Deterministic row order: decoder name, then t."""
        for key in sorted(self.cells):
            yield key[0], key[1], self.cells[key]


def _sample_trial_graph(config: SimConfig, trial_index: int):
    seed = split_seed(config.base_seed, trial_index, "graph")
    bounded = config.bounded_params
    if bounded is None:
        return sample_er(ErParams(config.n, config.q), seed)
    k, d_cap = bounded
    return sample_bounded_graph(config.n, k, d_cap, seed)


def run_trial(config: SimConfig, t: int, trial_index: int) -> dict[str, dict]:
    """One trial of the classical decoders at a given number of tests.

    Returns per-decoder dicts with success flag, status, and diagnostics.
    Success means the estimate equals the true edge set exactly; a trial
    whose search ran out of budget is a failure regardless of its output.
    """
    g = _sample_trial_graph(config, trial_index)
    p, _ = bernoulli_p(config.n, config.q, config.nu)
    design = bernoulli_design(
        config.n, t, p, split_seed(config.base_seed, trial_index, "design")
    )
    outcomes = run_tests(design, g)
    truth = g.edges
    pe = possible_edges(design, outcomes)
    results: dict[str, dict] = {}
    for name in config.decoders:
        if name == "grotesque":
            continue
        if name == "comp":
            res = comp(design, outcomes, pe=pe)
        elif name == "dd":
            res = dd(design, outcomes, pe=pe)
        elif name == "sss":
            res = sss(design, outcomes, node_budget=config.sss_node_budget, pe=pe)
        elif name == "lp":
            res = lp_relax(design, outcomes, threshold=config.lp_threshold, pe=pe)
        success = res.edges == truth and res.status != "budget-exceeded"
        results[name] = {
            "success": success,
            "status": res.status,
            "diagnostics": res.diagnostics,
        }
    return results


def run_grotesque_trial(config: SimConfig, trial_index: int) -> tuple[int, dict]:
    """One sublinear-decoder trial; returns (total tests, result dict)."""
    g = _sample_trial_graph(config, trial_index)
    design, layout = grotesque_design(
        config.n,
        config.kbar,
        split_seed(config.base_seed, trial_index, "gdesign"),
        b_override=config.grotesque_b,
        tmul_override=config.grotesque_tmul,
    )
    outcomes = run_tests(design, g)
    res, stats = grotesque_decode(layout, design, outcomes)
    success = res.edges == g.edges
    diag = dict(res.diagnostics)
    diag["outcomes_fetched"] = stats.outcomes_fetched
    diag["bundles_located"] = stats.bundles_located
    diag["elapsed_ops"] = stats.elapsed_ops
    return layout.total_tests, {
        "success": success,
        "status": res.status,
        "diagnostics": diag,
    }


def _classical_task(args) -> tuple[int, dict]:
    config, t, idx = args
    return t, run_trial(config, t, idx)


def _grotesque_task(args) -> tuple[int, dict]:
    config, idx = args
    return run_grotesque_trial(config, idx)


def sweep(config: SimConfig, workers: int = 1) -> SweepResult:
    """Run trials x t_values (plus grotesque trials if requested) and aggregate.

    The worker count affects only wall time; results are bit-identical for
    any value because every trial derives its own seeds.
    """
    classical = [d for d in config.decoders if d != "grotesque"]
    tasks = [(config, t, i) for t in config.t_values for i in range(config.trials)] if classical else []
    gtasks = [(config, i) for i in range(config.trials)] if "grotesque" in config.decoders else []

    cells: dict[tuple[str, int], CellStats] = {}

    def absorb_classical(t: int, per_decoder: dict) -> None:
        for name, res in per_decoder.items():
            cells.setdefault((name, t), CellStats()).add(
                res["success"], res["status"], res["diagnostics"]
            )

    def absorb_grotesque(t: int, res: dict) -> None:
        cells.setdefault(("grotesque", t), CellStats()).add(
            res["success"], res["status"], res["diagnostics"]
        )

    if workers <= 1:
        for args in tasks:
            absorb_classical(*_classical_task(args))
        for gargs in gtasks:
            absorb_grotesque(*_grotesque_task(gargs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            if tasks:
                chunk = max(1, len(tasks) // (workers * 8))
                for t, per in pool.map(_classical_task, tasks, chunksize=chunk):
                    absorb_classical(t, per)
            if gtasks:
                chunk = max(1, len(gtasks) // (workers * 8))
                for t, res in pool.map(_grotesque_task, gtasks, chunksize=chunk):
                    absorb_grotesque(t, res)

    metadata = {
        "version": __version__,
        "base_seed": config.base_seed,
        "config": config,
    }
    return SweepResult(config=config, cells=cells, metadata=metadata)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


CSV_HEADER = "decoder,t,t_normalized,successes,trials,success_rate"


def sweep_csv(result: SweepResult) -> str:
    """CSV text for a sweep; t_normalized divides t by kbar*ln(1/q)."""
    config = result.config
    scale = config.kbar * math.log(1.0 / config.q)
    lines = [CSV_HEADER]
    for decoder, t, cell in result.rows():
        lines.append(
            ",".join(
                [
                    decoder,
                    str(t),
                    _fmt(t / scale),
                    str(cell.successes),
                    str(cell.trials),
                    _fmt(cell.success_rate),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, path, overwrite: bool = False) -> None:
    """Write the sweep CSV; never appends, refuses to overwrite without the flag."""
    if os.path.exists(path) and not overwrite:
        raise FileExistsError(f"{path} exists; pass overwrite=True to replace it")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sweep_csv(result))


def emit_normalized_csv(result: SweepResult, path, overwrite: bool = False) -> None:
    """Alias of emit_csv: the normalized-test column is always included."""
    emit_csv(result, path, overwrite=overwrite)
