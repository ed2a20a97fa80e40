"""Die guessing and perturbed rank guessing: policies, exact adversary, instances."""
from .evaluate import (
    DEFAULT_MAX_N,
    DeletionCase,
    RankGuessInstance,
    perturbations,
    win_probability,
    worst_case_breakdown,
    worst_case_expected_reward,
)
from .instances import (
    diffs,
    fibonacci_violated,
    is_strictly_monotone,
    level_condition,
    level_instance,
    random_instance,
)
from .policies import (
    EXP_LEVELS,
    ConstantPolicy,
    DieGuessPolicy,
    ExpGapsPolicy,
    FaceReductionPolicy,
    GuessPolicy,
    MonoGapsPolicy,
    RandomPolicy,
    RecursiveGuessPolicy,
    Warmup2Policy,
    Warmup3Policy,
    die_guess_policy,
    exp_gaps,
    exp_gaps_set,
    face_reduction,
    guess_recursive,
    make_policy,
    mono_gaps,
    warmup2,
    warmup3,
)

__all__ = [
    "DEFAULT_MAX_N", "DeletionCase", "RankGuessInstance", "perturbations", "win_probability",
    "worst_case_breakdown", "worst_case_expected_reward", "diffs", "fibonacci_violated",
    "is_strictly_monotone", "level_condition", "level_instance", "random_instance", "EXP_LEVELS",
    "ConstantPolicy", "DieGuessPolicy", "ExpGapsPolicy", "FaceReductionPolicy", "GuessPolicy",
    "MonoGapsPolicy", "RandomPolicy", "RecursiveGuessPolicy", "Warmup2Policy", "Warmup3Policy",
    "die_guess_policy", "exp_gaps", "exp_gaps_set", "face_reduction", "guess_recursive",
    "make_policy", "mono_gaps", "warmup2", "warmup3",
]
