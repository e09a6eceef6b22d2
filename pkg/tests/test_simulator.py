import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelbudget.core import DomainError, TaskSet, TaskSpec, TransferMatrix
from labelbudget.simulator import (
    SimWorld,
    compare_strategies,
    matching_world,
    simulate_scores,
    split_counts,
    sweep_split,
    world_profile,
)


def world(transfer, beta, costs=None, budget=100, base=None, scale=None, noise=0.0, seed=0, lower=None):
    k = len(beta)
    costs = costs or [1] * k
    lower = lower or [False] * k
    ts = TaskSet([TaskSpec(f"t{i}", c, lo) for i, (c, lo) in enumerate(zip(costs, lower))], budget)
    return SimWorld(ts, TransferMatrix(transfer), beta, base or [1.0] * k, scale or [1.0] * k, noise, seed)


def deltas(w, counts, seed=None):
    return [p.after - p.before for p in simulate_scores(w, counts, seed)]


class TestSimulateScores:
    def test_no_labels_no_change(self):
        w = world([[1, 0.3], [0.2, 1]], [0.9, 0.8])
        assert deltas(w, (0, 0)) == [0.0, 0.0]

    def test_linear_without_transfer(self):
        w = world([[1, 0], [0, 1]], [1.0, 1.0], scale=[0.5, 2.0])
        assert deltas(w, (4, 3)) == [2.0, 6.0]

    def test_hand_summed(self):
        w = world([[1, 0.5], [0, 1]], [0.5, 1.0])
        assert deltas(w, (2, 3)) == pytest.approx([1.5, 3.75], rel=1e-15)

    def test_lower_is_better_moves_down(self):
        w = world([[1]], [0.5], lower=[True], base=[2.0])
        assert simulate_scores(w, (1,))[0].after == 1.0

    def test_infeasible_counts(self):
        w = world([[1, 0], [0, 1]], [0.5, 0.5], budget=3)
        with pytest.raises(DomainError):
            simulate_scores(w, (2, 2))
        with pytest.raises(DomainError):
            simulate_scores(w, (-1, 0))

    def test_noiseless_ignores_seed(self):
        w = world([[1, 0.3], [0.2, 1]], [0.9, 0.8])
        assert simulate_scores(w, (3, 4), seed=1) == simulate_scores(w, (3, 4), seed=99)

    def test_noise_reproducible(self):
        w = world([[1, 0.3], [0.2, 1]], [0.9, 0.8], noise=0.1, seed=7)
        assert simulate_scores(w, (3, 4)) == simulate_scores(w, (3, 4))
        assert simulate_scores(w, (3, 4), seed=8) != simulate_scores(w, (3, 4))

    def test_noise_stream_is_pcg64(self):
        w = world([[1, 0], [0, 1]], [0.5, 0.5], noise=0.1, seed=3)
        expected = np.random.default_rng(3).normal(0.0, 0.1, 2)
        assert deltas(w, (0, 0)) == pytest.approx(expected.tolist(), abs=1e-15)

    def test_world_validation(self):
        with pytest.raises(DomainError):
            world([[1]], [0.5], base=[0.0])
        with pytest.raises(DomainError):
            world([[1, 0], [0, 1]], [0.5])


def oriented(w, counts):
    return [(p.after - p.before) * (-1 if x.lower_is_better else 1) for p, x in zip(simulate_scores(w, counts), w.task_set.tasks)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gain_monotone_in_nonnegative_sources(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    t = rng.uniform(-1, 2, (k, k))
    np.fill_diagonal(t, 1.0)
    w = world(t.tolist(), rng.uniform(0, 1, k).tolist(), budget=10**6, lower=rng.integers(0, 2, k).astype(bool).tolist())
    counts = rng.integers(0, 50, k)
    gains0 = oriented(w, counts.tolist())
    i = int(rng.integers(0, k))
    more = counts.copy()
    more[i] += int(rng.integers(1, 20))
    gains1 = oriented(w, more.tolist())
    for j in range(k):
        if t[i][j] >= 0:
            assert gains1[j] >= gains0[j] - 1e-12


class TestProfile:
    def test_matching_world_profile_is_row_sums(self, pascal):
        ts, prof, w = pascal
        wp = world_profile(w)
        assert wp.informativeness == pytest.approx(prof.informativeness, rel=1e-12)
        assert wp.beta == prof.beta

    def test_matching_world_builder(self):
        ts = TaskSet([TaskSpec("a", 1), TaskSpec("b", 2)], 10)
        w = matching_world(ts, TransferMatrix([[1, 0.1], [0.2, 1]]), (0.9, 0.8), (0.5, 0.25), 0.01)
        assert w.gain_scale == (0.005, 0.0025)


class TestCompare:
    def test_pascal_optimised_row_is_best(self, pascal):
        ts, prof, w = pascal
        report = compare_strategies(w, prof)
        assert report.rows[0].strategy == "taba"
        assert report.best().strategy == "taba"
        assert all(report.rows[0].allocation.objective > r.allocation.objective for r in report.rows[1:])
        assert any("same_images" in n for n in report.notes)

    def test_zero_budget(self, pascal):
        _, prof, w = pascal
        d = w.to_dict()
        d["task_set"]["budget"] = 0
        report = compare_strategies(SimWorld.from_dict(d), prof)
        assert all(r.delta_t == 0.0 for r in report.rows)

    def test_excluded_tasks_noted(self):
        w = world([[1, -2.0], [0.1, 1]], [0.9, 0.9], budget=20)
        report = compare_strategies(w, world_profile(w))
        assert any("never purchased" in n for n in report.notes)


class TestSweep:
    def test_split_counts(self, pascal):
        ts = pascal[0]
        assert split_counts(ts, 0, 21) == (0, 315)
        assert split_counts(ts, 20, 21) == (6300, 0)
        assert split_counts(ts, 10, 21) == (3150, 157)

    def test_requires_two_tasks(self, taskonomy):
        with pytest.raises(DomainError):
            sweep_split(taskonomy[2])

    def test_shape(self, pascal):
        curve = sweep_split(pascal[2])
        assert len(curve) == 21
        assert curve[0][0] == 0.0 and curve[-1][0] == 1.0
        vals = [v for _, v in curve]
        peak = vals.index(max(vals))
        assert 0 < peak < 20


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimised_dominates_random_worlds(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    t = rng.uniform(-0.5, 1.5, (k, k))
    np.fill_diagonal(t, 1.0)
    w = world(
        t.tolist(),
        rng.uniform(0.5, 1, k).tolist(),
        costs=rng.integers(1, 5, k).tolist(),
        budget=int(rng.integers(0, 80)),
        base=rng.uniform(0.1, 2, k).tolist(),
        scale=rng.uniform(1e-3, 1e-1, k).tolist(),
        lower=rng.integers(0, 2, k).astype(bool).tolist(),
    )
    report = compare_strategies(w, world_profile(w), solver="dp")
    top = report.rows[0].delta_t
    for r in report.rows[1:]:
        assert top >= r.delta_t - 1e-9 * max(1.0, abs(top))
