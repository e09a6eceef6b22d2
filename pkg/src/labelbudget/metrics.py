"""Relative performance gains used to score allocations."""

from __future__ import annotations

import math
from typing import Sequence

from .core import DomainError, ScorePair


def relative_change(p: ScorePair, lower_is_better: bool) -> float:
    """Signed fractional improvement of ``after`` over ``before`` (not scaled to percent)."""
    if p.before == 0:
        raise DomainError("relative gain is undefined for a zero baseline score")
    sign = -1.0 if lower_is_better else 1.0
    return sign * (p.after - p.before) / p.before


def relative_gain(p: ScorePair, lower_is_better: bool) -> float:
    """Per-task relative gain in percent; positive means the task improved."""
    return relative_change(p, lower_is_better) * 100.0


def overall_gain(gains: Sequence[float]) -> float:
    """Unweighted mean of per-task gains."""
    if len(gains) == 0:
        raise DomainError("overall gain needs at least one task")
    return math.fsum(gains) / len(gains)
