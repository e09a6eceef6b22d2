import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from labelbudget.core import (
    Allocation,
    DomainError,
    InformationProfile,
    InvalidTaskSetError,
    LearningCurve,
    ProbeRecord,
    ScorePair,
    TaskSet,
    TaskSpec,
    TransferMatrix,
    validate_task_set,
)
from labelbudget.simulator import SimWorld


class TestValidateTaskSet:
    def test_pascal_costs_are_valid(self):
        ts = TaskSet([TaskSpec("cls", 1), TaskSpec("seg", 20)], 6300)
        assert validate_task_set(ts).ok

    def test_zero_cost(self):
        report = validate_task_set(TaskSet([TaskSpec("a", 0)], 10))
        assert not report.ok
        assert any("cost must be >= 1" in v for v in report.violations)

    def test_duplicate_ids(self):
        report = validate_task_set(TaskSet([TaskSpec("a", 1), TaskSpec("a", 2)], 10))
        assert any("unique" in v for v in report.violations)

    @pytest.mark.parametrize(
        "ts, needle",
        [
            (TaskSet([], 5), "at least one task"),
            (TaskSet([TaskSpec("a", 1)], -1), "budget must be >= 0"),
            (TaskSet([TaskSpec("a", 1.5)], 5), "cost must be an integer"),
            (TaskSet([TaskSpec("a", 1)], 2.0), "budget must be an integer"),
        ],
    )
    def test_other_violations(self, ts, needle):
        assert any(needle in v for v in validate_task_set(ts).violations)

    def test_require_valid_raises(self):
        with pytest.raises(InvalidTaskSetError):
            TaskSet([TaskSpec("a", 0)], 1).require_valid()


class TestTransferMatrix:
    def test_diagonal_tolerance(self):
        TransferMatrix([[1.0 + 1e-13, 0.2], [0.1, 1.0]])
        with pytest.raises(DomainError):
            TransferMatrix([[1.0 + 1e-11, 0.2], [0.1, 1.0]])

    def test_negative_off_diagonal_allowed(self):
        m = TransferMatrix([[1, -0.4], [0.2, 1]])
        assert m.values[0][1] == -0.4

    @pytest.mark.parametrize("values", [[[1, 0.2]], [[1, float("nan")], [0, 1]], []])
    def test_rejects_malformed(self, values):
        with pytest.raises(DomainError):
            TransferMatrix(values)


def test_profile_beta_range():
    with pytest.raises(DomainError):
        InformationProfile([1.0], [1.01])
    with pytest.raises(DomainError):
        InformationProfile([float("inf")], [0.5])


def test_learning_curve_counts_strictly_increasing():
    with pytest.raises(DomainError):
        LearningCurve("t", [(5, 0.1), (5, 0.2)])
    with pytest.raises(DomainError):
        LearningCurve("t", [(0, 0.1)])


# -- JSON round trips --------------------------------------------------------

ids = st.text(alphabet="abcdefgh_", min_size=1, max_size=6)
finite = st.floats(-1e6, 1e6, allow_nan=False)
unit = st.floats(0.0, 1.0)


@st.composite
def task_sets(draw):
    names = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
    tasks = [TaskSpec(n, draw(st.integers(1, 50)), draw(st.booleans())) for n in names]
    return TaskSet(tasks, draw(st.integers(0, 10**6)))


@st.composite
def transfer_matrices(draw):
    k = draw(st.integers(1, 4))
    return TransferMatrix([[1.0 if i == j else draw(finite) for j in range(k)] for i in range(k)])


@st.composite
def profiles(draw):
    k = draw(st.integers(1, 5))
    return InformationProfile(draw(st.lists(finite, min_size=k, max_size=k)), draw(st.lists(unit, min_size=k, max_size=k)))


@st.composite
def curves(draw):
    ns = sorted(draw(st.sets(st.integers(1, 10**5), min_size=1, max_size=8)))
    return LearningCurve(draw(ids), [(n, draw(finite)) for n in ns])


@st.composite
def allocations(draw):
    names = draw(st.lists(ids, min_size=1, max_size=4, unique=True))
    counts = draw(st.lists(st.integers(0, 1000), min_size=len(names), max_size=len(names)))
    return Allocation(names, counts, draw(st.integers(0, 10**6)), draw(st.one_of(st.none(), finite)), "dp", draw(st.booleans()))


@st.composite
def worlds(draw):
    m = draw(transfer_matrices())
    k = m.k
    names = [f"t{i}" for i in range(k)]
    ts = TaskSet([TaskSpec(n, draw(st.integers(1, 9))) for n in names], draw(st.integers(0, 500)))
    pos = st.floats(1e-3, 1e3)
    return SimWorld(
        ts,
        m,
        draw(st.lists(unit, min_size=k, max_size=k)),
        draw(st.lists(pos, min_size=k, max_size=k)),
        draw(st.lists(pos, min_size=k, max_size=k)),
        draw(st.floats(0, 1)),
        draw(st.integers(0, 2**31)),
    )


probe_records = st.builds(
    ProbeRecord, st.integers(0, 10**6), st.integers(0, 5), st.integers(0, 5), finite, finite, finite
)
score_pairs = st.builds(ScorePair, finite, finite)


@pytest.mark.parametrize(
    "strategy, cls",
    [
        (task_sets(), TaskSet),
        (transfer_matrices(), TransferMatrix),
        (profiles(), InformationProfile),
        (curves(), LearningCurve),
        (allocations(), Allocation),
        (worlds(), SimWorld),
        (probe_records, ProbeRecord),
        (score_pairs, ScorePair),
        (st.builds(TaskSpec, ids, st.integers(1, 99), st.booleans()), TaskSpec),
    ],
    ids=lambda x: getattr(x, "__name__", ""),
)
def test_json_round_trip(strategy, cls):
    @given(strategy)
    def check(obj):
        text = json.dumps(obj.to_dict())
        assert cls.from_dict(json.loads(text)) == obj

    check()
