"""Integer scaling of probability weights for flow solvers.

Flow backends work on int64 capacities.  Weights are scaled by 10^12 and
rounded; the two sides are then reconciled so their totals match exactly.
Rounding each weight independently keeps equal weights equal (a uniform
instance stays uniform), which matters for bottleneck feasibility.
"""

from __future__ import annotations

import numpy as np

WEIGHT_SCALE = 10**12
# the 32-bit max-flow backend caps the bottleneck scale: residual capacities
# must stay below 2^31, so totals are kept at 1e9 there
FLOW32_SCALE = 10**9


def scale_pair(
    wa: np.ndarray, wb: np.ndarray, scale: int = WEIGHT_SCALE
) -> tuple[np.ndarray, np.ndarray, int]:
    """Scale two weight vectors to int64 with equal totals.

    Returns (a, b, total).  The per-weight perturbation is at most a few
    units of 1/scale, absorbed by the documented solver tolerance.  Each
    weight is rounded independently, so equal weights stay equal and the two
    totals already agree on uniform instances.
    """
    a = np.rint(np.asarray(wa, dtype=float) * scale).astype(np.int64)
    b = np.rint(np.asarray(wb, dtype=float) * scale).astype(np.int64)
    a = np.maximum(a, 1)
    b = np.maximum(b, 1)
    diff = int(a.sum() - b.sum())
    if diff > 0:
        _spread(b, diff)
    elif diff < 0:
        _spread(a, -diff)
    total = int(a.sum())
    return a, b, total


def _spread(v: np.ndarray, units: int) -> None:
    """Add `units` single units to the largest entries (deterministic)."""
    order = np.argsort(-v, kind="stable")
    k = len(v)
    for i in range(units):
        v[order[i % k]] += 1
