"""List orders and batch constructions.

Every function returns a list of job ids. "Arbitrary order" steps are fixed
to ascending id so outputs are reproducible.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass

from .job_model import (
    Instance,
    JobSpec,
    Realization,
    make_rng,
    normalize_and_partition,
    prob_param,
    size_classes,
    size_param,
)
from .list_engine import run_list_schedule

OrderRule = Callable[[Sequence[int]], list]


@dataclass(frozen=True)
class BatchPlan:
    """Nested job sets ``J_1 ⊆ ... ⊆ J_K`` and the jobs outside ``J_K``."""

    batches: tuple[frozenset, ...]
    leftover: frozenset

    @property
    def K(self) -> int:
        return len(self.batches)

    def increments(self) -> list[frozenset]:
        """``I_k = J_k \\ J_{k-1}`` for k = 1..K."""
        out, prev = [], frozenset()
        for J in self.batches:
            out.append(J - prev)
            prev = J
        return out


def spt_order(instance: Instance, realization: Mapping[int, float]) -> list[int]:
    for job in instance.jobs:
        if job.id not in realization:
            raise KeyError(f"realization has no size for job {job.id}")
    return sorted(range(instance.n), key=lambda j: (realization[j], j))


def size_param_key(instance: Instance):
    return lambda j: (size_param(instance.jobs[j].dist), j)


def bernoulli_size_order(instance: Instance) -> list[int]:
    instance.require_bernoulli()
    return sorted(range(instance.n), key=size_param_key(instance))


def random_order(instance: Instance, seed: int) -> list[int]:
    return [int(j) for j in make_rng(seed).permutation(instance.n)]


def sept_order(instance: Instance) -> list[int]:
    return sorted(range(instance.n), key=lambda j: (instance.jobs[j].mean, j))


def choose_jobs(instance: Instance) -> BatchPlan:
    """For k = 1..ceil(log2 n), drop from J_k the ceil(n/2^k) highest-probability
    jobs of every size class (larger id dropped first on ties)."""
    instance.require_bernoulli()
    n = instance.n
    if n == 0:
        return BatchPlan((), frozenset())
    K = (n - 1).bit_length()
    everything = frozenset(range(n))
    if K == 0:
        return BatchPlan((), everything)
    # per class, most-likely-to-be-excluded first
    ranked = [
        sorted(ids, key=lambda j: (prob_param(instance.jobs[j].dist), j), reverse=True)
        for ids in size_classes(instance).values()
    ]
    batches = []
    for k in range(1, K + 1):
        r = -(-n // (1 << k))
        removed = set()
        for ids in ranked:
            removed.update(ids[:r])
        batches.append(everything - removed)
    return BatchPlan(tuple(batches), everything - batches[-1])


def bft_from_ft(plan: BatchPlan, per_batch_order: OrderRule) -> list[int]:
    """Concatenate ``per_batch_order(I_k)`` over k; leftover jobs are not appended."""
    out = []
    for inc in plan.increments():
        out.extend(per_batch_order(sorted(inc)))
    return out


def size_order_rule(instance: Instance) -> OrderRule:
    key = size_param_key(instance)
    return lambda ids: sorted(ids, key=key)


def stoch_free_order(instance: Instance) -> list[int]:
    instance.require_bernoulli()
    if instance.machines == 1:
        return sept_order(instance)
    plan = choose_jobs(instance)
    return bft_from_ft(plan, size_order_rule(instance)) + sorted(plan.leftover)


def _subinstance(instance: Instance, ids: Iterable[int]) -> tuple[Instance, list[int]]:
    ids = sorted(ids)
    sub = Instance(
        instance.machines,
        tuple(JobSpec(i, instance.jobs[j].dist) for i, j in enumerate(ids)),
    )
    return sub, ids


def rescale_wrapper_order(instance: Instance) -> list[int]:
    """Large jobs, then small jobs, then StochFree on the medium jobs."""
    prep = normalize_and_partition(instance)
    sub, back = _subinstance(prep.instance, prep.medium)
    return sorted(prep.large) + sorted(prep.small) + [back[j] for j in stoch_free_order(sub)]


def halve_machines_order(instance: Instance, realization: Mapping[int, float]) -> list[int]:
    """Jobs by completion time in the m-machine SPT schedule, for use on m/2 machines."""
    if instance.machines < 2:
        raise ValueError("halving needs m >= 2")
    trace = run_list_schedule(instance, realization, spt_order(instance, realization))
    done = {sj.job_id: sj.completion for sj in trace.jobs}
    return sorted(range(instance.n), key=lambda j: (done[j], j))


def halved_loads(m: int) -> list[float]:
    """Initial loads that leave only the first m // 2 machines usable."""
    half = m // 2
    return [0.0] * half + [float("inf")] * (m - half)


# --------------------------------------------------------------------------
# registry used by the CLI and the Monte Carlo runner


@dataclass(frozen=True)
class Algorithm:
    name: str
    order: Callable[[Instance, Realization, int], list]
    halves_machines: bool = False

    def initial_loads(self, instance: Instance):
        return halved_loads(instance.machines) if self.halves_machines else None


_PER_BATCH_RULES = {
    "size": lambda inst, real: size_order_rule(inst),
    "spt": lambda inst, real: (lambda ids: sorted(ids, key=lambda j: (real[j], j))),
    "id": lambda inst, real: sorted,
}

ALGORITHMS = {
    "spt": Algorithm("spt", lambda inst, real, seed: spt_order(inst, real)),
    "size-order": Algorithm("size-order", lambda inst, real, seed: bernoulli_size_order(inst)),
    "random": Algorithm("random", lambda inst, real, seed: random_order(inst, seed)),
    "sept": Algorithm("sept", lambda inst, real, seed: sept_order(inst)),
    "stochfree": Algorithm("stochfree", lambda inst, real, seed: stoch_free_order(inst)),
    "rescale-stochfree": Algorithm(
        "rescale-stochfree", lambda inst, real, seed: rescale_wrapper_order(inst)
    ),
    "halve": Algorithm(
        "halve", lambda inst, real, seed: halve_machines_order(inst, real), halves_machines=True
    ),
}


def resolve_algorithm(name: str) -> Algorithm:
    """Look up an algorithm; ``bft:<rule>`` builds ChooseJobs batches ordered by
    ``rule`` (size, spt, id) with leftovers appended in id order."""
    if name in ALGORITHMS:
        return ALGORITHMS[name]
    if name.startswith("bft:"):
        rule_name = name[4:]
        if rule_name not in _PER_BATCH_RULES:
            raise KeyError(f"unknown per-batch rule {rule_name!r}")
        make_rule = _PER_BATCH_RULES[rule_name]

        def order(inst, real, seed):
            plan = choose_jobs(inst)
            return bft_from_ft(plan, make_rule(inst, real)) + sorted(plan.leftover)

        return Algorithm(name, order)
    raise KeyError(f"unknown algorithm {name!r}")


def algorithm_names() -> list[str]:
    return sorted(ALGORITHMS) + [f"bft:{r}" for r in sorted(_PER_BATCH_RULES)]
