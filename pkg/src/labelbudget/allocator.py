"""Budget-constrained allocation of new labels across tasks.

Each label is an item: label ``k`` of task ``i`` costs ``c_i`` and is worth
``beta_i**(k-1) * I_i``. Values fall with ``k``, so an optimal purchase is a
prefix of every task's item list and the problem is a bounded knapsack over
per-task counts.

``solve_dp`` is exact. ``solve_greedy`` buys the best value-per-cost label
until the budget runs out, then tries pairwise swaps; it is exact for equal
costs and within one label's value of optimal otherwise.
"""

from __future__ import annotations

import heapq
import logging
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Allocation, DomainError, InformationProfile, ProblemTooLargeError, TaskSet
from .infomodel import gather, marginal

log = logging.getLogger(__name__)

DEFAULT_DP_CELL_LIMIT = 10_000_000


def _check_profile(ts: TaskSet, prof: InformationProfile) -> None:
    ts.require_valid()
    if prof.k != ts.k:
        raise DomainError(f"profile has {prof.k} tasks, task set has {ts.k}")


def objective(ts: TaskSet, prof: InformationProfile, counts: Sequence[int]) -> float:
    """Total modeled information of ``counts``; no feasibility check.

    Terms are accumulated from the last task to the first. ``solve_dp``
    accumulates in the same order, which makes its optimum bit-identical to
    this function evaluated at the returned counts.
    """
    if len(counts) != ts.k or prof.k != ts.k:
        raise DomainError(f"expected {ts.k} counts and profile entries")
    total = 0.0
    for i in reversed(range(ts.k)):
        n = int(counts[i])
        if n < 0:
            raise DomainError(f"counts must be non-negative, got {n} for task {i}")
        total = gather(prof.informativeness[i], prof.beta[i], n) + total
    return total


def _tri(cost: int, budget: int) -> int:
    # sum over b in [0, budget] of (b // cost + 1)
    q, r = divmod(budget, cost)
    return cost * q * (q + 1) // 2 + (r + 1) * (q + 1)


def dp_cell_count(ts: TaskSet) -> int:
    """Number of (budget, count) updates ``solve_dp`` performs on ``ts``.

    Every task but the first fills a full table over budgets ``0..B``; the
    first task is only evaluated at ``B``.
    """
    b = ts.budget
    costs = ts.costs
    return (b // costs[0] + 1) + sum(_tri(c, b) for c in costs[1:])


def make_allocation(ts: TaskSet, prof: InformationProfile | None, counts, solver: str, same_images=False):
    counts = tuple(int(n) for n in counts)
    obj = objective(ts, prof, counts) if prof is not None else None
    return Allocation(
        task_ids=ts.ids,
        counts=counts,
        spent=ts.spend(counts),
        objective=obj,
        solver=solver,
        same_images=same_images,
    )


def solve_dp(ts: TaskSet, prof: InformationProfile, cell_limit: int = DEFAULT_DP_CELL_LIMIT) -> Allocation:
    """Exact maximiser of the modeled information within the budget.

    Among optimal count vectors the lexicographically smallest is returned.
    Raises :class:`ProblemTooLargeError` when the table would need more than
    ``cell_limit`` updates.
    """
    _check_profile(ts, prof)
    cells = dp_cell_count(ts)
    if cells > cell_limit:
        raise ProblemTooLargeError(
            f"exact solve needs {cells} cell updates (limit {cell_limit}); use solve_greedy instead"
        )
    k, budget, costs = ts.k, ts.budget, ts.costs
    values = [
        np.array([gather(prof.informativeness[i], prof.beta[i], n) for n in range(budget // costs[i] + 1)])
        for i in range(k)
    ]

    # best[i][b]: best value of tasks i..k-1 spending at most b, summed last-to-first
    best: list[np.ndarray | None] = [None] * (k + 1)
    best[k] = np.zeros(budget + 1)
    for i in range(k - 1, 0, -1):
        nxt, c, g = best[i + 1], costs[i], values[i]
        cur = nxt + g[0]
        for n in range(1, len(g)):
            off = n * c
            np.maximum(cur[off:], g[n] + nxt[: budget + 1 - off], out=cur[off:])
        best[i] = cur

    # Walk forward picking the smallest count that can still reach the optimum.
    # The full sum nests as g0 + (g1 + (... + tail)) and rounding is monotone,
    # so count n works iff wrapping its best tail in the already-fixed outer
    # terms reproduces the optimum. Checking the suffix alone is not enough:
    # outer terms can absorb a suffix shortfall of a few ulps.
    counts: list[int] = []
    remaining = budget
    optimum = None
    for i in range(k):
        nxt, c, g = best[i + 1], costs[i], values[i]
        n_max = remaining // c
        cand = g[: n_max + 1] + nxt[remaining - c * np.arange(n_max + 1)]
        for j in reversed(range(i)):
            cand = values[j][counts[j]] + cand
        if optimum is None:
            optimum = cand.max()
        n = int(np.argmax(cand == optimum))
        counts.append(n)
        remaining -= n * c
    alloc = make_allocation(ts, prof, counts, "dp")
    excluded = [ts.ids[i] for i, v in enumerate(prof.informativeness) if v <= 0.0]
    if excluded:
        log.info("tasks with non-positive informativeness receive no labels: %s", ", ".join(excluded))
    return alloc


def _greedy_counts(ts: TaskSet, prof: InformationProfile) -> list[int]:
    k, costs = ts.k, ts.costs
    info, beta = prof.informativeness, prof.beta
    counts = [0] * k
    remaining = ts.budget
    heap = [(-info[i] / costs[i], i) for i in range(k) if info[i] > 0.0]
    heapq.heapify(heap)
    while heap:
        _, i = heapq.heappop(heap)
        if costs[i] > remaining:
            continue  # the budget only shrinks, so task i is done
        counts[i] += 1
        remaining -= costs[i]
        m = marginal(info[i], beta[i], counts[i])
        if m > 0.0:
            heapq.heappush(heap, (-m / costs[i], i))
    return counts


def _trim(ts: TaskSet, prof: InformationProfile, counts: list[int]) -> list[int]:
    """Drop labels that leave the objective unchanged, lowest task index first.

    Far enough down a geometric tail a label's value vanishes below float
    resolution; the exact solver does not buy such labels either, since it
    prefers the lexicographically smallest optimum.
    """
    target = objective(ts, prof, counts)
    counts = counts.copy()
    for i in range(ts.k):
        lo, hi = 0, counts[i]
        while lo < hi:
            mid = (lo + hi) // 2
            counts[i] = mid
            if objective(ts, prof, counts) == target:
                hi = mid
            else:
                lo = mid + 1
        counts[i] = lo
    return counts


def _swap_refine(ts: TaskSet, prof: InformationProfile, counts: list[int]) -> list[int]:
    """One pass over ordered task pairs: give up one label of ``a`` and buy as many ``b`` labels as now fit.

    A move is kept when it raises the objective.
    """
    costs = ts.costs
    current = objective(ts, prof, counts)
    for a in range(ts.k):
        for b in range(ts.k):
            if a == b or counts[a] == 0:
                continue
            trial = counts.copy()
            trial[a] -= 1
            free = ts.budget - ts.spend(trial)
            add = free // costs[b]
            if add == 0:
                continue
            trial[b] += add
            value = objective(ts, prof, trial)
            # exact ties follow the package-wide rule: lexicographically smaller wins
            if value > current or (value == current and trial < counts):
                counts, current = trial, value
    return counts


def solve_greedy(ts: TaskSet, prof: InformationProfile) -> Allocation:
    """Marginal value-per-cost greedy followed by one pass of pairwise swap refinement.

    Ties go to the lower task index and tasks with non-positive
    informativeness get nothing. Labels whose value is lost to rounding are
    trimmed at the end.
    """
    _check_profile(ts, prof)
    counts = _trim(ts, prof, _swap_refine(ts, prof, _greedy_counts(ts, prof)))
    return make_allocation(ts, prof, counts, "greedy")


def continuous_upper_bound(ts: TaskSet, prof: InformationProfile) -> float:
    """Upper bound on the optimum from the fractional-label (LP / Lagrangian) relaxation.

    Labels are taken in value-per-cost order and the first one that does not
    fit is taken fractionally; no integer allocation can do better. This is
    the Lagrangian dual bound at the optimal budget multiplier.
    """
    _check_profile(ts, prof)
    costs, info, beta = ts.costs, prof.informativeness, prof.beta
    counts = [0] * ts.k
    remaining = ts.budget
    value = 0.0
    heap = [(-info[i] / costs[i], i) for i in range(ts.k) if info[i] > 0.0]
    heapq.heapify(heap)
    while heap:
        neg_ratio, i = heapq.heappop(heap)
        m = -neg_ratio * costs[i]
        if costs[i] > remaining:
            return value + m * remaining / costs[i]
        value += m
        remaining -= costs[i]
        counts[i] += 1
        m = marginal(info[i], beta[i], counts[i])
        if m > 0.0:
            heapq.heappush(heap, (-m / costs[i], i))
    return value


def solve(
    ts: TaskSet,
    prof: InformationProfile,
    solver: str = "auto",
    cell_limit: int = DEFAULT_DP_CELL_LIMIT,
) -> Allocation:
    """Dispatch to the exact or greedy solver.

    ``auto`` uses the exact solver whenever its table fits in ``cell_limit``.
    """
    if solver == "dp":
        return solve_dp(ts, prof, cell_limit)
    if solver == "greedy":
        return solve_greedy(ts, prof)
    if solver != "auto":
        raise DomainError(f"unknown solver {solver!r}")
    ts.require_valid()
    if dp_cell_count(ts) <= cell_limit:
        return solve_dp(ts, prof, cell_limit)
    return solve_greedy(ts, prof)


def baseline_equal_images(ts: TaskSet, prof: InformationProfile | None = None) -> Allocation:
    """Same number of new labels for every task, as many as the budget allows."""
    ts.require_valid()
    n = ts.budget // sum(ts.costs)
    return make_allocation(ts, prof, [n] * ts.k, "equal_images")


def baseline_same_images(ts: TaskSet, prof: InformationProfile | None = None) -> Allocation:
    """Equal-images counts where all tasks label one shared set of images."""
    ts.require_valid()
    n = ts.budget // sum(ts.costs)
    return make_allocation(ts, prof, [n] * ts.k, "same_images", same_images=True)


def baseline_equal_budget(ts: TaskSet, prof: InformationProfile | None = None) -> Allocation:
    """Split the budget evenly across tasks, then convert each share to a label count."""
    ts.require_valid()
    share = Fraction(ts.budget, ts.k)
    counts = [int(share // c) for c in ts.costs]
    return make_allocation(ts, prof, counts, "equal_budget")


def baseline_single_task(ts: TaskSet, i: int, prof: InformationProfile | None = None) -> Allocation:
    """Spend the whole budget on task ``i``."""
    ts.require_valid()
    if not 0 <= i < ts.k:
        raise DomainError(f"task index {i} out of range for {ts.k} tasks")
    counts = [0] * ts.k
    counts[i] = ts.budget // ts.costs[i]
    return make_allocation(ts, prof, counts, f"single:{ts.ids[i]}")


def baselines(ts: TaskSet, prof: InformationProfile | None = None) -> list[Allocation]:
    """Every heuristic baseline in report order."""
    out = [
        baseline_equal_images(ts, prof),
        baseline_same_images(ts, prof),
        baseline_equal_budget(ts, prof),
    ]
    out.extend(baseline_single_task(ts, i, prof) for i in range(ts.k))
    return out
