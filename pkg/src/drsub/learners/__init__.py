"""Online learners."""

from .base import SubLearner
from .frank_wolfe import (
    Alg1State,
    MetaFwState,
    alg1_bound,
    alg1_round,
    default_alg1_k,
    default_metafw_k,
    metafw_round,
    run_alg1,
    run_metafw,
    tradeoff_schedule,
)
from .ftl import FtlState, FtrlState, StepSchedule, ftl_regret, ftl_select, ftl_update
from .random_order import blocked_random_order_run, blocked_run
from .stochastic import (
    Alg2State,
    Alg3State,
    StochasticAlgorithm,
    alg2_bound,
    alg2_round,
    alg3_round,
    osfw_round,
    run_iid,
)

__all__ = [
    "Alg1State",
    "Alg2State",
    "Alg3State",
    "FtlState",
    "FtrlState",
    "MetaFwState",
    "StepSchedule",
    "StochasticAlgorithm",
    "SubLearner",
    "alg1_bound",
    "alg1_round",
    "alg2_bound",
    "alg2_round",
    "alg3_round",
    "blocked_random_order_run",
    "blocked_run",
    "default_alg1_k",
    "default_metafw_k",
    "ftl_regret",
    "ftl_select",
    "ftl_update",
    "metafw_round",
    "osfw_round",
    "run_alg1",
    "run_iid",
    "run_metafw",
    "tradeoff_schedule",
]
