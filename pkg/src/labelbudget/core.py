"""Domain types shared across the allocation pipeline.

Every type is a frozen dataclass with a ``to_dict``/``from_dict`` pair that
maps onto the JSON file formats consumed and produced by the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

DIAGONAL_TOL = 1e-12


class LabelBudgetError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LabelBudgetError, ValueError):
    """An argument lies outside the domain of an operation."""


class IncompleteLogError(LabelBudgetError, ValueError):
    """A task pair has no usable probe records."""

    def __init__(self, source: int, target: int):
        self.pair = (source, target)
        super().__init__(f"no usable probe records for pair {source}->{target}")


class InsufficientDataError(LabelBudgetError, ValueError):
    """A learning curve has too few points to fit."""


class ProblemTooLargeError(LabelBudgetError, RuntimeError):
    """The exact solver would exceed its configured work budget."""


class InvalidTaskSetError(LabelBudgetError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = tuple(violations)
        super().__init__("invalid task set: " + "; ".join(self.violations))


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TaskSpec:
    id: str
    cost: int
    lower_is_better: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "cost": self.cost, "lower_is_better": self.lower_is_better}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TaskSpec:
        return cls(id=str(d["id"]), cost=d["cost"], lower_is_better=bool(d.get("lower_is_better", False)))


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class TaskSet:
    """Ordered tasks plus the total label budget ``B``.

    Task order is the canonical index order used by every matrix and vector
    in the package. Construction does not validate; call
    :func:`validate_task_set` or :meth:`require_valid`.
    """

    tasks: tuple[TaskSpec, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def k(self) -> int:
        return len(self.tasks)

    @property
    def costs(self) -> tuple[int, ...]:
        return tuple(t.cost for t in self.tasks)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.tasks)

    def index(self, task_id: str) -> int:
        for i, t in enumerate(self.tasks):
            if t.id == task_id:
                return i
        raise DomainError(f"unknown task id {task_id!r}")

    def spend(self, counts: Sequence[int]) -> int:
        if len(counts) != self.k:
            raise DomainError(f"expected {self.k} counts, got {len(counts)}")
        return sum(int(n) * t.cost for n, t in zip(counts, self.tasks))

    def require_valid(self) -> TaskSet:
        report = validate_task_set(self)
        if not report.ok:
            raise InvalidTaskSetError(report.violations)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {"tasks": [t.to_dict() for t in self.tasks], "budget": self.budget}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TaskSet:
        return cls(tasks=tuple(TaskSpec.from_dict(t) for t in d["tasks"]), budget=d["budget"])


def _is_int(x: Any) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def validate_task_set(ts: TaskSet) -> ValidationReport:
    """Check a task set against its invariants without raising."""
    violations = []
    if ts.k < 1:
        violations.append("at least one task is required")
    if not _is_int(ts.budget):
        violations.append("budget must be an integer")
    elif ts.budget < 0:
        violations.append("budget must be >= 0")
    seen = set()
    for t in ts.tasks:
        if not _is_int(t.cost):
            violations.append(f"task {t.id!r}: cost must be an integer")
        elif t.cost < 1:
            violations.append(f"task {t.id!r}: cost must be >= 1")
        if t.id in seen:
            violations.append(f"task {t.id!r}: id must be unique")
        seen.add(t.id)
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class TransferMatrix:
    """Pairwise transferred informativeness; row = source task, column = target task."""

    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.values)
        k = len(rows)
        if k < 1 or any(len(r) != k for r in rows):
            raise DomainError("transfer matrix must be square and non-empty")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                _require_finite(f"transfer[{i}][{j}]", v)
            if abs(row[i] - 1.0) > DIAGONAL_TOL:
                raise DomainError(f"transfer diagonal must be 1, got {row[i]!r} at ({i}, {i})")
        object.__setattr__(self, "values", rows)

    @property
    def k(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def to_dict(self) -> dict[str, Any]:
        return {"values": [list(r) for r in self.values]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TransferMatrix:
        return cls(values=d["values"])


@dataclass(frozen=True)
class InformationProfile:
    informativeness: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        info = tuple(float(v) for v in self.informativeness)
        beta = tuple(float(v) for v in self.beta)
        if len(info) != len(beta):
            raise DomainError("informativeness and beta must have the same length")
        for i, (v, b) in enumerate(zip(info, beta)):
            _require_finite(f"informativeness[{i}]", v)
            if not 0.0 <= b <= 1.0:
                raise DomainError(f"beta[{i}] must lie in [0, 1], got {b!r}")
        object.__setattr__(self, "informativeness", info)
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return len(self.beta)

    def to_dict(self) -> dict[str, Any]:
        return {"informativeness": list(self.informativeness), "beta": list(self.beta)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> InformationProfile:
        return cls(informativeness=d["informativeness"], beta=d["beta"])


@dataclass(frozen=True)
class Allocation:
    """Per-task label counts for one strategy.

    ``objective`` is the modeled total information, or ``None`` for baseline
    allocations built without a profile. ``same_images`` marks the variant
    where every task labels one shared image set.
    """

    task_ids: tuple[str, ...]
    counts: tuple[int, ...]
    spent: int
    objective: float | None
    solver: str
    same_images: bool = False

    def __post_init__(self):
        object.__setattr__(self, "task_ids", tuple(self.task_ids))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))

    def to_dict(self) -> dict[str, Any]:
        d = {
            "counts": {tid: n for tid, n in zip(self.task_ids, self.counts)},
            "spent": self.spent,
            "objective": self.objective,
            "solver": self.solver,
        }
        if self.same_images:
            d["same_images"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Allocation:
        counts = d["counts"]
        return cls(
            task_ids=tuple(counts),
            counts=tuple(counts.values()),
            spent=d["spent"],
            objective=d.get("objective"),
            solver=d.get("solver", "unknown"),
            same_images=bool(d.get("same_images", False)),
        )


@dataclass(frozen=True)
class ProbeRecord:
    """One lookahead probe of how training on ``source`` moved ``target``'s score."""

    step: int
    source: int
    target: int
    score_joint: float
    score_self_pair: float
    score_base: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "source": self.source,
            "target": self.target,
            "score_joint": self.score_joint,
            "score_self_pair": self.score_self_pair,
            "score_base": self.score_base,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ProbeRecord:
        return cls(
            step=int(d["step"]),
            source=int(d["source"]),
            target=int(d["target"]),
            score_joint=float(d["score_joint"]),
            score_self_pair=float(d["score_self_pair"]),
            score_base=float(d["score_base"]),
        )


@dataclass(frozen=True)
class CurvePoint:
    n: int
    gain: float


@dataclass(frozen=True)
class LearningCurve:
    task: str
    points: tuple[CurvePoint, ...]

    def __post_init__(self):
        pts = tuple(p if isinstance(p, CurvePoint) else CurvePoint(int(p[0]), float(p[1])) for p in self.points)
        for p in pts:
            if p.n < 1:
                raise DomainError(f"curve counts must be positive, got {p.n}")
        for a, b in zip(pts, pts[1:]):
            if b.n <= a.n:
                raise DomainError("curve counts must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(p.n for p in self.points)

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(p.gain for p in self.points)

    def to_dict(self) -> dict[str, Any]:
        return {"task": self.task, "points": [{"n": p.n, "gain": p.gain} for p in self.points]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LearningCurve:
        return cls(task=str(d["task"]), points=tuple(CurvePoint(int(p["n"]), float(p["gain"])) for p in d["points"]))


@dataclass(frozen=True)
class ScorePair:
    before: float
    after: float

    def to_dict(self) -> dict[str, Any]:
        return {"before": self.before, "after": self.after}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ScorePair:
        return cls(before=float(d["before"]), after=float(d["after"]))


@dataclass(frozen=True)
class BetaFit:
    beta: float
    ds: float
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return {"beta": self.beta, "ds": self.ds, "residual": self.residual}


__all__ = [
    "Allocation",
    "BetaFit",
    "CurvePoint",
    "DomainError",
    "IncompleteLogError",
    "InformationProfile",
    "InsufficientDataError",
    "InvalidTaskSetError",
    "LabelBudgetError",
    "LearningCurve",
    "ProbeRecord",
    "ProblemTooLargeError",
    "ScorePair",
    "TaskSet",
    "TaskSpec",
    "TransferMatrix",
    "ValidationReport",
    "validate_task_set",
]
