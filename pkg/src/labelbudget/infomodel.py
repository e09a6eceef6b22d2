"""Diminishing-returns information model.

The k-th new label of a task carries ``beta**(k-1) * I`` units of new
information, so ``N`` labels gather the geometric sum
``(1 - beta**N) / (1 - beta) * I``.
"""

from __future__ import annotations

import math

from .core import DomainError, TransferMatrix

# Below this distance from 1 the geometric sum is replaced by its linear limit.
LINEAR_LIMIT_TOL = 1e-12


def _check(informativeness: float, beta: float, count: int) -> None:
    if not math.isfinite(informativeness):
        raise DomainError(f"informativeness must be finite, got {informativeness!r}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    if count < 0:
        raise DomainError(f"count must be non-negative, got {count!r}")


def gather(informativeness: float, beta: float, count: int) -> float:
    """Total information of ``count`` labels with per-label value ``informativeness``.

    ``beta == 1`` returns the limit ``count * informativeness``.
    """
    _check(informativeness, beta, count)
    if count == 0:
        return 0.0
    if beta == 0.0:
        return float(informativeness)
    gap = 1.0 - beta
    if gap < LINEAR_LIMIT_TOL:
        return count * informativeness
    # -expm1 keeps 1 - beta**N accurate when beta**N is close to 1
    return -math.expm1(count * math.log(beta)) / gap * informativeness


def marginal(informativeness: float, beta: float, count: int) -> float:
    """Value of label number ``count + 1``: ``beta**count * informativeness``."""
    _check(informativeness, beta, count)
    if count == 0:
        return float(informativeness)
    if beta == 0.0:
        return 0.0
    if 1.0 - beta < LINEAR_LIMIT_TOL:
        return float(informativeness)
    return math.exp(count * math.log(beta)) * informativeness


def aggregate_informativeness(m: TransferMatrix) -> tuple[float, ...]:
    """Per-source informativeness: self value (the unit diagonal) plus all transferred values."""
    return tuple(math.fsum(row) for row in m.values)
