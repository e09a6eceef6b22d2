"""Synthetic multi-task world that turns label counts into task scores.

A task's score moves by the information it receives from every task's new
labels, scaled into score units:

    info_j   = sum_i transfer[i][j] * (1 - beta_i**N_i) / (1 - beta_i)
    after_j  = before_j + sign_j * gain_scale_j * info_j + noise_j

where ``sign_j`` is -1 for lower-is-better metrics so that information always
moves the score in the improving direction. Noise is Gaussian, drawn from
numpy's ``default_rng`` (PCG64) seeded with the world seed, or with
``seed + row index`` when strategies are compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import allocator
from .core import (
    Allocation,
    DomainError,
    InformationProfile,
    ScorePair,
    TaskSet,
    TransferMatrix,
)
from .infomodel import gather
from .metrics import overall_gain, relative_gain

SAME_IMAGES_CAVEAT = (
    "same_images is simulated exactly like equal_images: the world has no model "
    "for correlation between labels of one shared image set"
)


@dataclass(frozen=True)
class SimWorld:
    task_set: TaskSet
    true_transfer: TransferMatrix
    true_beta: tuple[float, ...]
    base_scores: tuple[float, ...]
    gain_scale: tuple[float, ...]
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("true_beta", "base_scores", "gain_scale"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        k = self.task_set.k
        if self.true_transfer.k != k or any(len(getattr(self, n)) != k for n in ("true_beta", "base_scores", "gain_scale")):
            raise DomainError(f"world arrays must all have {k} entries")
        if any(not 0.0 <= b <= 1.0 for b in self.true_beta):
            raise DomainError("true_beta entries must lie in [0, 1]")
        if any(not s > 0.0 for s in self.base_scores):
            raise DomainError("base_scores must be positive")
        if any(not s > 0.0 for s in self.gain_scale):
            raise DomainError("gain_scale must be positive")
        if not self.noise_std >= 0.0:
            raise DomainError("noise_std must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_set": self.task_set.to_dict(),
            "true_transfer": self.true_transfer.to_dict(),
            "true_beta": list(self.true_beta),
            "base_scores": list(self.base_scores),
            "gain_scale": list(self.gain_scale),
            "noise_std": self.noise_std,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SimWorld:
        return cls(
            task_set=TaskSet.from_dict(d["task_set"]),
            true_transfer=TransferMatrix.from_dict(d["true_transfer"]),
            true_beta=d["true_beta"],
            base_scores=d["base_scores"],
            gain_scale=d["gain_scale"],
            noise_std=float(d.get("noise_std", 0.0)),
            seed=int(d.get("seed", 0)),
        )


def matching_world(
    task_set: TaskSet,
    transfer: TransferMatrix,
    beta: Sequence[float],
    base_scores: Sequence[float],
    scale: float,
    noise_std: float = 0.0,
    seed: int = 0,
) -> SimWorld:
    """World whose gain scales are proportional to the base scores.

    In such a world every unit of information is worth the same relative
    gain on every task, so the profile of plain transfer row sums is exact.
    """
    return SimWorld(
        task_set=task_set,
        true_transfer=transfer,
        true_beta=tuple(beta),
        base_scores=tuple(base_scores),
        gain_scale=tuple(scale * s for s in base_scores),
        noise_std=noise_std,
        seed=seed,
    )


def world_profile(world: SimWorld) -> InformationProfile:
    """The information profile under which modeled information is proportional to noiseless overall gain.

    Each transfer entry is weighted by its target's relative gain per unit of
    information, normalised to mean 1. For a world built by
    :func:`matching_world` this reduces to the transfer row sums.
    """
    w = [g / s for g, s in zip(world.gain_scale, world.base_scores)]
    mean_w = math.fsum(w) / len(w)
    info = tuple(
        math.fsum(t * wj for t, wj in zip(row, w)) / mean_w for row in world.true_transfer.values
    )
    return InformationProfile(info, world.true_beta)


def simulate_scores(world: SimWorld, counts: Sequence[int], seed: int | None = None) -> list[ScorePair]:
    """Scores of every task after buying ``counts`` new labels.

    ``seed`` overrides the world seed for the noise draw. With
    ``noise_std == 0`` no random numbers are drawn and the seed is irrelevant.
    """
    ts = world.task_set
    if len(counts) != ts.k or any(int(n) < 0 for n in counts):
        raise DomainError(f"counts must be {ts.k} non-negative integers")
    if ts.spend(counts) > ts.budget:
        raise DomainError(f"counts spend {ts.spend(counts)} exceeds budget {ts.budget}")
    k = ts.k
    gathered = [gather(1.0, world.true_beta[i], int(counts[i])) for i in range(k)]
    if world.noise_std > 0.0:
        rng = np.random.default_rng(world.seed if seed is None else seed)
        noise = rng.normal(0.0, world.noise_std, size=k).tolist()
    else:
        noise = [0.0] * k
    out = []
    for j, task in enumerate(ts.tasks):
        info = math.fsum(world.true_transfer.values[i][j] * gathered[i] for i in range(k))
        sign = -1.0 if task.lower_is_better else 1.0
        after = world.base_scores[j] + sign * world.gain_scale[j] * info + noise[j]
        out.append(ScorePair(before=world.base_scores[j], after=after))
    return out


@dataclass(frozen=True)
class StrategyRow:
    strategy: str
    allocation: Allocation
    scores: tuple[ScorePair, ...]
    gains: tuple[float, ...]
    delta_t: float

    def to_dict(self) -> dict[str, Any]:
        ids = self.allocation.task_ids
        return {
            "strategy": self.strategy,
            "counts": dict(zip(ids, self.allocation.counts)),
            "spent": self.allocation.spent,
            "objective": self.allocation.objective,
            "gains": dict(zip(ids, self.gains)),
            "delta_t": self.delta_t,
        }


@dataclass(frozen=True)
class StrategyReport:
    rows: tuple[StrategyRow, ...]
    sweep: tuple[tuple[float, float], ...] | None = None
    notes: tuple[str, ...] = field(default=())

    def row(self, strategy: str) -> StrategyRow:
        for r in self.rows:
            if r.strategy == strategy:
                return r
        raise KeyError(strategy)

    def best(self) -> StrategyRow:
        """Row with the highest overall gain; earlier rows win ties."""
        return max(self.rows, key=lambda r: r.delta_t)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"rows": [r.to_dict() for r in self.rows]}
        if self.sweep is not None:
            d["sweep"] = [{"split_fraction": f, "delta_t": v} for f, v in self.sweep]
        d["notes"] = list(self.notes)
        return d


def evaluate(world: SimWorld, alloc: Allocation, seed: int | None = None, strategy: str | None = None) -> StrategyRow:
    scores = simulate_scores(world, alloc.counts, seed=seed)
    gains = tuple(relative_gain(p, t.lower_is_better) for p, t in zip(scores, world.task_set.tasks))
    return StrategyRow(
        strategy=strategy or alloc.solver,
        allocation=alloc,
        scores=tuple(scores),
        gains=gains,
        delta_t=overall_gain(gains),
    )


def split_counts(ts: TaskSet, step: int, steps: int) -> tuple[int, int]:
    """Counts when a fraction ``step / (steps - 1)`` of the budget goes to the first of two tasks."""
    b0 = int(Fraction(ts.budget * step, steps - 1))
    c0, c1 = ts.costs
    return b0 // c0, (ts.budget - b0) // c1


def sweep_split(world: SimWorld, steps: int = 21, seed: int | None = None) -> tuple[tuple[float, float], ...]:
    """Overall gain across evenly spaced budget splits of a two-task world.

    Point ``k`` gives ``k / (steps - 1)`` of the budget to the first task and
    the rest to the second.
    """
    ts = world.task_set
    if ts.k != 2:
        raise DomainError(f"budget-split sweep needs exactly 2 tasks, world has {ts.k}")
    if steps < 2:
        raise DomainError("sweep needs at least 2 steps")
    base = world.seed if seed is None else seed
    out = []
    for s in range(steps):
        counts = split_counts(ts, s, steps)
        alloc = allocator.make_allocation(ts, None, counts, "sweep")
        row = evaluate(world, alloc, seed=base + s)
        out.append((s / (steps - 1), row.delta_t))
    return tuple(out)


def compare_strategies(
    world: SimWorld,
    prof: InformationProfile,
    solver: str = "auto",
    cell_limit: int = allocator.DEFAULT_DP_CELL_LIMIT,
    sweep_steps: int | None = None,
) -> StrategyReport:
    """Evaluate the optimised allocation and every baseline in ``world``.

    The first row is the optimised allocation (strategy ``"taba"``). Row ``r``
    draws its noise with seed ``world.seed + r``. Objectives are computed
    under ``prof``.
    """
    ts = world.task_set
    allocs = [allocator.solve(ts, prof, solver, cell_limit)]
    names = ["taba"]
    for b in allocator.baselines(ts, prof):
        allocs.append(b)
        names.append(b.solver)
    rows = tuple(evaluate(world, a, seed=world.seed + r, strategy=n) for r, (a, n) in enumerate(zip(allocs, names)))
    sweep = None
    if sweep_steps is not None:
        sweep = sweep_split(world, sweep_steps, seed=world.seed + len(rows))
    notes = [SAME_IMAGES_CAVEAT]
    excluded = [ts.ids[i] for i, v in enumerate(prof.informativeness) if v <= 0.0]
    if excluded:
        notes.append("non-positive informativeness, never purchased: " + ", ".join(excluded))
    return StrategyReport(rows=rows, sweep=sweep, notes=tuple(notes))
