"""Game of googol: level chain, deletion identities, level-secretary DPs, gap-splitting simulation."""
from .dp import LevelDP, SecretaryDP, level_secretary_dp, observed_levels, ordinal_secretary_dp
from .instances import (
    GoogolInstance,
    level_construction_dist,
    level_value_bound,
    sample_instance,
    sample_levels,
)
from .levels import (
    CHAIN_MAX_N,
    DeletionIdentityReport,
    LevelChain,
    build_transition_matrix,
    check_level_perm,
    check_partial_levels,
    delete_level,
    level_distribution,
    level_states,
    stationary_distribution,
    uniform_delete,
    verify_deletion_identities,
)
from .maxguess import LevelMaxGuessBayes, always_no, always_yes, level_maxguess_bayes, max_guess_eval
from .simulation import (
    SimExactReport,
    SimRun,
    TrialsReport,
    appc_simulation,
    appc_trials,
    failure_bound,
    make_googol_policy,
    split_gaps,
    verify_sim_exact,
)

__all__ = [
    "LevelDP", "SecretaryDP", "level_secretary_dp", "observed_levels", "ordinal_secretary_dp",
    "GoogolInstance", "level_construction_dist", "level_value_bound", "sample_instance",
    "sample_levels", "CHAIN_MAX_N", "DeletionIdentityReport", "LevelChain",
    "build_transition_matrix", "check_level_perm", "check_partial_levels", "delete_level",
    "level_distribution", "level_states", "stationary_distribution", "uniform_delete",
    "verify_deletion_identities", "LevelMaxGuessBayes", "always_no", "always_yes",
    "level_maxguess_bayes", "max_guess_eval", "SimExactReport", "SimRun", "TrialsReport",
    "appc_simulation", "appc_trials", "failure_bound", "make_googol_policy", "split_gaps",
    "verify_sim_exact",
]
