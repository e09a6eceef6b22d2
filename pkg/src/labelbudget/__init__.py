"""Label-budget allocation for multi-task learning.

Estimate how informative each task's labels are (including what they
transfer to other tasks), fit how fast that information saturates, and split
a fixed labelling budget to maximise the total.
"""

from .allocator import (
    baseline_equal_budget,
    baseline_equal_images,
    baseline_same_images,
    baseline_single_task,
    baselines,
    continuous_upper_bound,
    objective,
    solve,
    solve_dp,
    solve_greedy,
)
from .betafit import fit_reduction_rate, predict_curve
from .core import (
    Allocation,
    BetaFit,
    DomainError,
    IncompleteLogError,
    InformationProfile,
    InsufficientDataError,
    LearningCurve,
    ProbeRecord,
    ProblemTooLargeError,
    ScorePair,
    TaskSet,
    TaskSpec,
    TransferMatrix,
    validate_task_set,
)
from .infomodel import aggregate_informativeness, gather, marginal
from .metrics import overall_gain, relative_gain
from .relatedness import estimate_transfer, step_transfer
from .simulator import SimWorld, compare_strategies, simulate_scores, sweep_split, world_profile

__version__ = "0.1.0"
