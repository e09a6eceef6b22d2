"""Transferred informativeness between task pairs, estimated from probe logs."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable

from .core import DomainError, IncompleteLogError, ProbeRecord, TransferMatrix

DENOMINATOR_EPS = 1e-8


def step_transfer(r: ProbeRecord) -> float | None:
    """Relative transfer for one probe step, or ``None`` when the probe is degenerate.

    The ratio compares how much the target score moved when trained jointly
    with the source task against how much it moved when trained with a second
    batch of its own data, both relative to training the target alone. A
    self-pair move smaller than ``DENOMINATOR_EPS`` carries no signal and the
    step is skipped.
    """
    if r.source == r.target:
        raise DomainError(f"probe source and target must differ (step {r.step})")
    for name in ("score_joint", "score_self_pair", "score_base"):
        v = getattr(r, name)
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite at step {r.step}, got {v!r}")
    denom = r.score_self_pair - r.score_base
    if abs(denom) < DENOMINATOR_EPS:
        return None
    return (r.score_joint - r.score_base) / denom


def estimate_transfer(log: Iterable[ProbeRecord], k: int) -> TransferMatrix:
    """Average the per-step transfer of every ordered pair into a ``k x k`` matrix.

    Skipped steps are treated as missing. The mean uses exactly rounded
    summation, so the result does not depend on record order.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    samples: dict[tuple[int, int], list[float]] = defaultdict(list)
    for r in log:
        if not (0 <= r.source < k and 0 <= r.target < k):
            raise DomainError(f"probe pair {r.source}->{r.target} out of range for k={k}")
        v = step_transfer(r)
        if v is not None:
            samples[r.source, r.target].append(v)

    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(1.0)
                continue
            vals = samples.get((i, j))
            if not vals:
                raise IncompleteLogError(i, j)
            row.append(math.fsum(vals) / len(vals))
        rows.append(row)
    return TransferMatrix(rows)
