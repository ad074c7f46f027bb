"""Closed-form test-count thresholds and the rate curves derived from them.

Conventions: "log n" in the algorithmic thresholds is the natural log (the
underlying tail bounds are exponential-base); base-2 logs appear only in the
information bound and in bit-string lengths.  All values are the limiting
thresholds with the vanishing slack terms dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

E = math.e
LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundInputs:
    """Problem size for the threshold formulas."""

    n: int
    q: float
    nu: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        if not (0.0 < self.q < 1.0):
            raise ValueError("need 0 < q < 1")
        if self.nu <= 0:
            raise ValueError("need nu > 0")

    @property
    def kbar(self) -> float:
        return self.q * self.n * (self.n - 1) / 2

    @property
    def theta(self) -> float:
        return math.log(self.kbar) / (2 * math.log(self.n))

    @property
    def theta_in_range(self) -> bool:
        return 0.0 < self.theta < 1.0


def _require_theta(inputs: BoundInputs) -> float:
    theta = inputs.theta
    if not 0.0 < theta < 1.0:
        raise ValueError(
            f"theta = {theta:.4f} outside (0,1); the asymptotic threshold does not apply"
        )
    return theta


def converse_tests(inputs: BoundInputs) -> float:
    """Information bound: kbar * log2(1/q) tests are necessary for any design."""
    return inputs.kbar * math.log2(1.0 / inputs.q)


def comp_tests(inputs: BoundInputs) -> float:
    """Tests sufficient for COMP under Bernoulli designs: 2e * kbar * ln n."""
    _require_theta(inputs)
    return 2.0 * E * inputs.kbar * math.log(inputs.n)


def dd_tests(inputs: BoundInputs) -> float:
    """Tests sufficient for DD: 2*max(theta, 1-theta)*e * kbar * ln n."""
    theta = _require_theta(inputs)
    return 2.0 * max(theta, 1.0 - theta) * E * inputs.kbar * math.log(inputs.n)


def sss_tests(inputs: BoundInputs) -> float:
    """Tests below which SSS (hence any decoder) fails under Bernoulli designs."""
    theta = _require_theta(inputs)
    return 2.0 * theta * E * inputs.kbar * math.log(inputs.n)


def grotesque_counts(inputs: BoundInputs) -> tuple[float, float]:
    """Leading-order (tests, decode operations) for the sublinear design.

    tests = 4*kbar*ln(kbar)*(log2 n)^2 (location tests dominate);
    decode_ops = B*ln(B) + kbar*ceil(log2 n) with B = 4*kbar*ln(kbar).
    """
    kbar = inputs.kbar
    if kbar < 2:
        raise ValueError("need kbar >= 2")
    b_lead = 4.0 * kbar * math.log(kbar)
    tests = b_lead * math.log2(inputs.n) ** 2
    decode_ops = b_lead * math.log(b_lead) + kbar * math.ceil(math.log2(inputs.n))
    return tests, decode_ops


def rate_curve(theta_grid) -> list[dict[str, float]]:
    """Per-theta ratios (information bound) / (algorithm threshold).

    With q = n^(-2(1-theta)), the information bound is 2(1-theta)/ln2 *
    kbar ln n, so the ratios depend only on theta:

      comp: (1-theta) / (e ln2)
      dd:   (1-theta) / (e ln2 max(theta, 1-theta))
      sss:  min(1, (1-theta) / (theta e ln2))

    The sss column is capped at 1 because the information bound applies to
    every decoder, so the binding converse is the larger of the two
    thresholds.  The converse column is identically 1 (the bound against
    itself).
    """
    rows = []
    for theta in theta_grid:
        theta = float(theta)
        if not 0.0 < theta < 1.0:
            raise ValueError(f"theta grid must lie in (0,1), got {theta}")
        comp_ratio = (1.0 - theta) / (E * LN2)
        dd_ratio = (1.0 - theta) / (E * LN2 * max(theta, 1.0 - theta))
        sss_ratio = min(1.0, (1.0 - theta) / (theta * E * LN2))
        rows.append(
            {
                "theta": theta,
                "converse": 1.0,
                "comp": comp_ratio,
                "dd": dd_ratio,
                "sss": sss_ratio,
            }
        )
    return rows


def rate_curve_csv(theta_grid) -> str:
    """CSV text: header theta,converse,comp,dd,sss; 6 significant digits."""
    lines = ["theta,converse,comp,dd,sss"]
    for row in rate_curve(theta_grid):
        lines.append(
            ",".join(
                f"{row[col]:.6g}" for col in ("theta", "converse", "comp", "dd", "sss")
            )
        )
    return "\n".join(lines) + "\n"


def write_rate_curve(theta_grid, path, overwrite: bool = False) -> None:
    import os

    if os.path.exists(path) and not overwrite:
        raise FileExistsError(f"{path} exists; pass overwrite to replace it")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rate_curve_csv(theta_grid))
