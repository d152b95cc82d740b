"""Stochastic list scheduling of Bernoulli jobs on identical machines."""

from .job_model import (
    Bernoulli,
    CapExceededError,
    Deterministic,
    Discrete,
    Instance,
    JobSpec,
    Realization,
    enumerate_realizations,
    sample_realization,
)
from .list_engine import Trace, run_list_schedule
from .oracle import opt_adaptive_completion, opt_free_time_det
from .policies import choose_jobs, resolve_algorithm, stoch_free_order

__all__ = [
    "Bernoulli",
    "CapExceededError",
    "Deterministic",
    "Discrete",
    "Instance",
    "JobSpec",
    "Realization",
    "Trace",
    "choose_jobs",
    "enumerate_realizations",
    "opt_adaptive_completion",
    "opt_free_time_det",
    "resolve_algorithm",
    "run_list_schedule",
    "sample_realization",
    "stoch_free_order",
]
