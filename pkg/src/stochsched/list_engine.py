"""List scheduling on identical machines with initial loads.

Each listed job goes to a least-loaded machine (lowest index on ties) and
starts at that machine's current load; no machine ever idles. ``F(i)``, the
i-th free time, is the minimum machine load once the first ``i`` listed
jobs have been assigned. A machine with infinite initial load is never
chosen, which is how a machine is removed.
"""

from __future__ import annotations

import csv
import heapq
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .job_model import Instance


@dataclass(frozen=True)
class ScheduledJob:
    job_id: int
    machine: int
    start: float
    completion: float
    size: float


@dataclass(frozen=True)
class Trace:
    jobs: tuple[ScheduledJob, ...]
    free_times: tuple[float, ...]
    order: tuple[int, ...]
    initial: tuple[float, ...]
    final: tuple[float, ...]

    def by_id(self) -> dict[int, ScheduledJob]:
        return {sj.job_id: sj for sj in self.jobs}


def run_list_schedule(
    instance: Instance,
    realization: Mapping[int, float],
    order: Sequence[int],
    initial: Sequence[float] | None = None,
) -> Trace:
    m = instance.machines
    loads = [0.0] * m if initial is None else [float(x) for x in initial]
    if len(loads) != m:
        raise ValueError(f"initial load vector has length {len(loads)}, expected {m}")
    if any(x < 0 for x in loads):
        raise ValueError("initial loads must be nonnegative")
    seen = set()
    for jid in order:
        if not 0 <= jid < instance.n:
            raise KeyError(f"unknown job id {jid}")
        if jid in seen:
            raise ValueError(f"job {jid} listed twice")
        if jid not in realization:
            raise KeyError(f"realization has no size for job {jid}")
        seen.add(jid)

    heap = [(x, i) for i, x in enumerate(loads)]
    heapq.heapify(heap)
    scheduled = []
    free = [heap[0][0]]
    for jid in order:
        load, i = heap[0]
        if math.isinf(load):
            raise ValueError("every machine is disabled")
        size = float(realization[jid])
        heapq.heapreplace(heap, (load + size, i))
        loads[i] = load + size
        scheduled.append(ScheduledJob(jid, i, load, load + size, size))
        free.append(heap[0][0])
    return Trace(
        jobs=tuple(scheduled),
        free_times=tuple(free),
        order=tuple(order),
        initial=tuple(float(x) for x in (initial if initial is not None else [0.0] * m)),
        final=tuple(loads),
    )


def final_free_time(sizes: Sequence[float], loads: Sequence[float]) -> float:
    """F(len(sizes)) for the list ``sizes`` without building a trace."""
    heap = list(loads)
    heapq.heapify(heap)
    for s in sizes:
        heapq.heapreplace(heap, heap[0] + s)
    return heap[0]


def total_completion(trace: Trace) -> float:
    return sum(sj.completion for sj in trace.jobs)


def free_time_after(trace: Trace, i: int) -> float:
    if not 0 <= i < len(trace.free_times):
        raise IndexError(f"free time index {i} outside 0..{len(trace.free_times) - 1}")
    return trace.free_times[i]


def checkpoint_weights(n: int) -> list[tuple[int, int]]:
    """``(weight, i)`` pairs for k = 1..K: weight ceil(n/2^k) at F(n - ceil(n/2^k)).

    K = ceil(log2 n), but at least 1 so that n = 1 keeps its F(0) term.
    """
    K = max(1, (n - 1).bit_length())
    out = []
    for k in range(1, K + 1):
        w = -(-n // (1 << k))
        out.append((w, n - w))
    return out


def weighted_free_time(trace: Trace, n: int) -> float:
    if n < 1:
        raise ValueError("weighted free time needs n >= 1")
    if len(trace.jobs) != n:
        raise ValueError(f"trace scheduled {len(trace.jobs)} jobs, not {n}")
    return sum(w * trace.free_times[i] for w, i in checkpoint_weights(n))


def makespan(trace: Trace) -> float:
    finite = [x for x in trace.final if not math.isinf(x)]
    return max(finite) if finite else 0.0


def write_trace_csv(trace: Trace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["job_id", "machine", "start", "completion", "size"])
    for sj in trace.jobs:
        w.writerow([sj.job_id, sj.machine, repr(sj.start), repr(sj.completion), repr(sj.size)])


def write_free_times_csv(trace: Trace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["i", "F_i"])
    for i, f in enumerate(trace.free_times):
        w.writerow([i, repr(f)])
