"""Exact baselines for small instances.

The optimal adaptive policy for Bernoulli jobs is a decision tree: each node
starts one job on a least-loaded machine and branches on whether the job
came up heads. ``AdaptiveDP`` solves that tree by memoized recursion over
(sorted machine loads, set of unscheduled jobs).
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from .job_model import CapExceededError, Instance, prob_param, size_param
from .list_engine import Trace, run_list_schedule
from .policies import BatchPlan

DEFAULT_DP_MAX_JOBS = 10
DEFAULT_DP_MAX_MACHINES = 4
DEFAULT_PERM_MAX_JOBS = 9

_QUANT = 1e9


def _key(loads: tuple, mask: int) -> tuple:
    return tuple(round(x * _QUANT) for x in loads), mask


def _place(loads: tuple, size: float) -> tuple:
    """Add ``size`` to the least-loaded machine and re-sort."""
    if size == 0:
        return loads
    return tuple(sorted((loads[0] + size,) + loads[1:]))


class AdaptiveDP:
    """Optimal expected total completion time over adaptive policies.

    With ``constrained=True`` a job may only start once every job of the same
    size with smaller ``(prob, id)`` has started.
    """

    def __init__(self, instance: Instance, constrained: bool = False):
        instance.require_bernoulli()
        self.instance = instance
        self.constrained = constrained
        self.s = [size_param(j.dist) for j in instance.jobs]
        self.p = [prob_param(j.dist) for j in instance.jobs]
        self._memo: dict = {}
        self.choice: dict = {}

    def _candidates(self, mask: int) -> list[int]:
        seen_param = set()
        seen_class = set()
        out = []
        # ascending (s, p, id): the first job of each (s, p) pair stands in for
        # its identical twins, and the first of each size class is the only one
        # the constrained variant may start
        for j in sorted(
            (j for j in range(self.instance.n) if mask >> j & 1),
            key=lambda j: (self.s[j], self.p[j], j),
        ):
            if self.constrained:
                if self.s[j] in seen_class:
                    continue
                seen_class.add(self.s[j])
            if (self.s[j], self.p[j]) in seen_param:
                continue
            seen_param.add((self.s[j], self.p[j]))
            out.append(j)
        return out

    def value(self, loads: tuple, mask: int) -> float:
        if not mask:
            return 0.0
        key = _key(loads, mask)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        low = loads[0]
        scored = []
        for j in self._candidates(mask):
            rest = mask & ~(1 << j)
            s, p = self.s[j], self.p[j]
            v = low + p * s
            if p > 0 and s > 0:
                v += p * self.value(_place(loads, s), rest)
            if p < 1 or s == 0:
                v += (1 - p if s > 0 else 1.0) * self.value(loads, rest)
            scored.append((v, j))
        best = min(v for v, _ in scored)
        tol = 1e-10 * max(1.0, abs(best))
        # canonical choice among (near-)optimal jobs: smallest (s, p, id)
        v, j = min(
            ((v, j) for v, j in scored if v <= best + tol),
            key=lambda vj: (self.s[vj[1]], self.p[vj[1]], vj[1]),
        )
        self._memo[key] = v
        self.choice[key] = j
        return v

    def choose(self, loads: tuple, mask: int) -> int:
        key = _key(loads, mask)
        if key not in self.choice:
            self.value(loads, mask)
        return self.choice[key]

    def solve(self) -> float:
        return self.value((0.0,) * self.instance.machines, (1 << self.instance.n) - 1)


@dataclass
class OracleResult:
    value: float
    canonical_first_choice: dict = field(repr=False)
    solver: AdaptiveDP = field(repr=False)


def _check_dp_caps(instance: Instance, max_jobs: int, max_machines: int) -> None:
    if instance.n > max_jobs:
        raise CapExceededError(f"n = {instance.n} exceeds the adaptive-DP cap {max_jobs}")
    if instance.machines > max_machines:
        raise CapExceededError(
            f"m = {instance.machines} exceeds the adaptive-DP cap {max_machines}"
        )


def opt_adaptive_completion(
    instance: Instance,
    max_jobs: int = DEFAULT_DP_MAX_JOBS,
    max_machines: int = DEFAULT_DP_MAX_MACHINES,
) -> OracleResult:
    _check_dp_caps(instance, max_jobs, max_machines)
    dp = AdaptiveDP(instance)
    value = dp.solve()
    return OracleResult(value, dp.choice, dp)


def opt_adaptive_sequence(
    instance: Instance, realization: Mapping[int, float], result: OracleResult | None = None
) -> list[int]:
    """Start order of the canonical optimal policy on one realization."""
    if result is None:
        result = opt_adaptive_completion(instance)
    dp = result.solver
    loads = (0.0,) * instance.machines
    mask = (1 << instance.n) - 1
    seq = []
    while mask:
        j = dp.choose(loads, mask)
        seq.append(j)
        loads = _place(loads, realization[j])
        mask &= ~(1 << j)
    return seq


def opt_adaptive_trace(
    instance: Instance, realization: Mapping[int, float], result: OracleResult | None = None
) -> Trace:
    # started on a least-loaded machine each time, the adaptive path is
    # exactly a list schedule of its own start order
    seq = opt_adaptive_sequence(instance, realization, result)
    return run_list_schedule(instance, realization, seq)


def check_exchange_property(
    instance: Instance,
    max_jobs: int = DEFAULT_DP_MAX_JOBS,
    max_machines: int = DEFAULT_DP_MAX_MACHINES,
) -> tuple[float, float]:
    """(value with same-size jobs forced into increasing-probability order, unconstrained value)."""
    _check_dp_caps(instance, max_jobs, max_machines)
    constrained = AdaptiveDP(instance, constrained=True).solve()
    return constrained, opt_adaptive_completion(instance, max_jobs, max_machines).value


# --------------------------------------------------------------------------
# free-time optima over list orders


def _sizes_of(jobs) -> list[float]:
    if isinstance(jobs, Mapping):
        return [float(v) for v in jobs.values()]
    out = []
    for item in jobs:
        out.append(float(item[1]) if isinstance(item, tuple) else float(item))
    return out


def _start_loads(m: int, initial: Sequence[float] | None) -> tuple:
    loads = [0.0] * m if initial is None else [float(x) for x in initial]
    if len(loads) != m:
        raise ValueError(f"initial load vector has length {len(loads)}, expected {m}")
    return tuple(sorted(loads))


@lru_cache(maxsize=200_000)
def _opt_free(loads: tuple, remaining: tuple) -> float:
    # remaining is a sorted multiset of sizes; only distinct sizes branch
    if not remaining:
        return loads[0]
    if math.isinf(loads[0]):
        raise ValueError("every machine is disabled")
    best = math.inf
    prev = None
    for idx, s in enumerate(remaining):
        if s == prev:
            continue
        prev = s
        rest = remaining[:idx] + remaining[idx + 1 :]
        best = min(best, _opt_free(_place(loads, s), rest))
    return best


def opt_free_time_det(
    jobs,
    m: int,
    initial: Sequence[float] | None = None,
    max_jobs: int = DEFAULT_PERM_MAX_JOBS,
) -> float:
    """Minimum over all list orders of the final free time.

    ``jobs`` is a mapping id -> size, or an iterable of ``(id, size)`` pairs
    or plain sizes. The search runs over list-schedule states (sorted loads,
    multiset of unscheduled sizes), which covers every permutation.
    """
    sizes = _sizes_of(jobs)
    if len(sizes) > max_jobs:
        raise CapExceededError(f"{len(sizes)} jobs exceed the free-time oracle cap {max_jobs}")
    return _opt_free(_start_loads(m, initial), tuple(sorted(sizes)))


@lru_cache(maxsize=200_000)
def _reachable(loads: tuple, remaining: tuple) -> frozenset:
    """Every sorted load vector reachable by list-scheduling ``remaining`` in some order."""
    if not remaining:
        return frozenset([loads])
    out = set()
    prev = None
    for idx, s in enumerate(remaining):
        if s == prev:
            continue
        prev = s
        out |= _reachable(_place(loads, s), remaining[:idx] + remaining[idx + 1 :])
    return frozenset(out)


def opt_batch_free_times(
    plan: BatchPlan,
    instance: Instance,
    realization: Mapping[int, float],
    m: int | None = None,
    max_jobs: int = DEFAULT_PERM_MAX_JOBS,
) -> list[float]:
    """Optimal batch-respecting free time of each prefix ``J_k``.

    Entry k minimises F(|J_k|) over orders that list I_1, then I_2, ...,
    then I_k, each in any internal order.
    """
    m = instance.machines if m is None else m
    total = len(plan.batches[-1]) if plan.batches else 0
    if total > max_jobs:
        raise CapExceededError(f"{total} batched jobs exceed the oracle cap {max_jobs}")
    states = {(0.0,) * m}
    out = []
    for inc in plan.increments():
        sizes = tuple(sorted(float(realization[j]) for j in inc))
        nxt = set()
        for st in states:
            nxt |= _reachable(st, sizes)
        states = nxt
        out.append(min(st[0] for st in states))
    return out

