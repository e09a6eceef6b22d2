"""Fit a reduction rate and initial gain to an observed learning curve.

The model curve is ``gain(N) = (1 - beta**N) / (1 - beta) * ds``. The fit
minimises the L1 error over ``beta in [0, 1]`` and ``ds``. For fixed ``beta``
the model is linear in ``ds``, so the optimal ``ds`` is a weighted median and
only ``beta`` needs a numerical search: a dense grid followed by
golden-section refinement around the best cell.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import BetaFit, DomainError, InsufficientDataError, LearningCurve
from .infomodel import LINEAR_LIMIT_TOL, gather

GRID_POINTS = 2000
GOLDEN_ITERATIONS = 200
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def predict_curve(beta: float, ds: float, counts: Sequence[int]) -> list[float]:
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta!r}")
    return [gather(ds, beta, int(n)) for n in counts]


def _features(betas: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Geometric-sum features, shape ``(len(betas), len(counts))``."""
    b = betas[:, None]
    n = counts[None, :]
    gap = 1.0 - b
    linear = gap < LINEAR_LIMIT_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        log_b = np.log(np.where(b > 0.0, b, 1.0))
        geo = -np.expm1(n * log_b) / np.where(linear, 1.0, gap)
    out = np.where(linear, n, geo)
    # beta = 0: only the first label counts
    return np.where(b == 0.0, 1.0, out)


def _solve_ds(features: np.ndarray, gains: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise L1-optimal ``ds`` and the resulting residuals.

    ``|gain - ds*f| = f * |gain/f - ds|``, so the optimum is the lower
    weighted median of the ratios ``gain/f`` with weights ``f``.
    """
    ratios = gains[None, :] / features
    order = np.argsort(ratios, axis=1, kind="stable")
    sorted_r = np.take_along_axis(ratios, order, axis=1)
    cw = np.cumsum(np.take_along_axis(features, order, axis=1), axis=1)
    idx = np.argmax(2.0 * cw >= cw[:, -1:], axis=1)
    ds = sorted_r[np.arange(sorted_r.shape[0]), idx]
    residual = np.abs(gains[None, :] - ds[:, None] * features).sum(axis=1)
    return ds, residual


def fit_reduction_rate(curve: LearningCurve, trace: list | None = None) -> BetaFit:
    """Least-absolute-deviation fit of ``(beta, ds)`` to ``curve``.

    The returned fit has the lowest residual of every candidate evaluated;
    ties keep the earliest evaluation. When ``trace`` is a list, every
    evaluated ``(beta, ds, residual)`` is appended to it.
    """
    if len(curve.points) < 2:
        raise InsufficientDataError(f"curve for {curve.task!r} needs at least 2 points, got {len(curve.points)}")
    counts = np.array(curve.counts, dtype=float)
    gains = np.array(curve.gains, dtype=float)
    if not np.all(np.isfinite(gains)):
        raise DomainError("curve gains must be finite")

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    ds_grid, res_grid = _solve_ds(_features(grid, counts), gains)
    k = int(np.argmin(res_grid))
    best = (float(grid[k]), float(ds_grid[k]), float(res_grid[k]))
    if trace is not None:
        trace.extend(zip(grid.tolist(), ds_grid.tolist(), res_grid.tolist()))

    def evaluate(beta: float) -> tuple[float, float]:
        ds, res = _solve_ds(_features(np.array([beta]), counts), gains)
        if trace is not None:
            trace.append((beta, float(ds[0]), float(res[0])))
        return float(ds[0]), float(res[0])

    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, GRID_POINTS - 1)])
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = evaluate(x1), evaluate(x2)
    candidates = [(x1, *f1), (x2, *f2)]
    for _ in range(GOLDEN_ITERATIONS):
        if hi - lo <= 1e-15:
            break
        if f1[1] <= f2[1]:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = evaluate(x1)
            candidates.append((x1, *f1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = evaluate(x2)
            candidates.append((x2, *f2))

    for beta, ds, res in candidates:
        if res < best[2]:
            best = (beta, ds, res)
    return BetaFit(beta=best[0], ds=best[1], residual=best[2])
