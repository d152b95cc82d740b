"""Jobs, instances, realizations, and instance generators.

A job's processing time is a random variable with finite support. The
algorithms in this package are built for Bernoulli jobs (size ``s`` with
probability ``p``, else 0); deterministic jobs are the ``p = 1`` case and
discrete jobs are accepted by the sampler and the list engine only.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Union

import numpy as np

PROB_SUM_TOL = 1e-9
DEFAULT_ENUM_CAP = 16
DEFAULT_JOB_CAP = 1_000_000


class CapExceededError(ValueError):
    """An exhaustive computation would exceed its configured size cap."""


class UnsupportedDistributionError(ValueError):
    """The operation is only defined for Bernoulli/deterministic jobs."""


class NormalizationError(ValueError):
    pass


# --------------------------------------------------------------------------
# distributions


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability {p!r} outside [0, 1]")


def _check_size(s: float) -> None:
    if not s >= 0.0 or math.isinf(s):
        raise ValueError(f"size {s!r} must be finite and nonnegative")


@dataclass(frozen=True)
class Bernoulli:
    size: float
    prob: float

    def __post_init__(self):
        _check_size(self.size)
        _check_prob(self.prob)

    def mean(self) -> float:
        return self.size * self.prob

    def support(self) -> list[tuple[float, float]]:
        return [(0.0, 1.0 - self.prob), (self.size, self.prob)]

    def draw(self, u: float) -> float:
        return self.size if u < self.prob else 0.0


@dataclass(frozen=True)
class Deterministic:
    size: float

    def __post_init__(self):
        _check_size(self.size)

    @property
    def prob(self) -> float:
        return 1.0

    def mean(self) -> float:
        return self.size

    def support(self) -> list[tuple[float, float]]:
        return [(self.size, 1.0)]

    def draw(self, u: float) -> float:
        return self.size


@dataclass(frozen=True)
class Discrete:
    support_: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.support_:
            raise ValueError("discrete distribution needs a nonempty support")
        total = 0.0
        for v, p in self.support_:
            _check_size(v)
            _check_prob(p)
            total += p
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"discrete probabilities sum to {total}, not 1")

    def mean(self) -> float:
        return sum(v * p for v, p in self.support_)

    def support(self) -> list[tuple[float, float]]:
        return list(self.support_)

    def draw(self, u: float) -> float:
        acc = 0.0
        for v, p in self.support_:
            acc += p
            if u < acc:
                return v
        return self.support_[-1][0]


Distribution = Union[Bernoulli, Deterministic, Discrete]


def size_param(dist: Distribution) -> float:
    """The size parameter ``s_j`` of a Bernoulli or deterministic job."""
    if isinstance(dist, Discrete):
        raise UnsupportedDistributionError("discrete jobs have no size parameter")
    return dist.size


def prob_param(dist: Distribution) -> float:
    if isinstance(dist, Discrete):
        raise UnsupportedDistributionError("discrete jobs have no probability parameter")
    return dist.prob


# --------------------------------------------------------------------------
# jobs and instances


@dataclass(frozen=True)
class JobSpec:
    id: int
    dist: Distribution

    @property
    def mean(self) -> float:
        return self.dist.mean()


@dataclass(frozen=True)
class Instance:
    machines: int
    jobs: tuple[JobSpec, ...] = ()

    def __post_init__(self):
        if self.machines < 1:
            raise ValueError(f"need at least one machine, got {self.machines}")
        object.__setattr__(self, "jobs", tuple(self.jobs))
        for i, job in enumerate(self.jobs):
            if job.id != i:
                raise ValueError("job ids must be 0..n-1 in order")

    @property
    def n(self) -> int:
        return len(self.jobs)

    def __getitem__(self, job_id: int) -> JobSpec:
        return self.jobs[job_id]

    @classmethod
    def from_dists(cls, machines: int, dists) -> "Instance":
        return cls(machines, tuple(JobSpec(i, d) for i, d in enumerate(dists)))

    def with_machines(self, machines: int) -> "Instance":
        return Instance(machines, self.jobs)

    def require_bernoulli(self) -> None:
        for job in self.jobs:
            if isinstance(job.dist, Discrete):
                raise UnsupportedDistributionError(
                    f"job {job.id} has a discrete distribution"
                )


@dataclass(frozen=True)
class Realization(Mapping):
    """Realized size for every job, keyed by job id."""

    sizes: Mapping[int, float] = field(default_factory=dict)

    def __getitem__(self, job_id: int) -> float:
        return self.sizes[job_id]

    def __iter__(self) -> Iterator[int]:
        return iter(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __hash__(self):
        return hash(tuple(sorted(self.sizes.items())))


# --------------------------------------------------------------------------
# randomness

_MASK64 = (1 << 64) - 1


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Counter-based stream keyed by ``(seed, *path)``.

    Streams for different paths are independent, so trial ``t`` always sees
    the same numbers no matter which worker runs it.
    """
    entropy = [seed & _MASK64, *(p & _MASK64 for p in path)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def sample_realization(instance: Instance, seed: int) -> Realization:
    rng = make_rng(seed)
    u = rng.random(instance.n)
    return Realization({job.id: float(job.dist.draw(u[job.id])) for job in instance.jobs})


def _is_coin(dist: Distribution) -> bool:
    return isinstance(dist, Bernoulli) and dist.size > 0 and 0.0 < dist.prob < 1.0


def enumerate_realizations(
    instance: Instance, cap: int = DEFAULT_ENUM_CAP
) -> list[tuple[Realization, float]]:
    """Every outcome of the nondegenerate coins with its exact probability."""
    instance.require_bernoulli()
    coins = [job.id for job in instance.jobs if _is_coin(job.dist)]
    if len(coins) > cap:
        raise CapExceededError(
            f"{len(coins)} nondegenerate Bernoulli jobs exceed the enumeration cap {cap}"
        )
    base = {}
    for job in instance.jobs:
        if not _is_coin(job.dist):
            # degenerate: prob 0, prob 1, or size 0
            base[job.id] = job.dist.size if job.dist.prob == 1.0 else 0.0
    out = []
    for heads in itertools.product((False, True), repeat=len(coins)):
        sizes = dict(base)
        prob = 1.0
        for jid, h in zip(coins, heads):
            d = instance.jobs[jid].dist
            sizes[jid] = d.size if h else 0.0
            prob *= d.prob if h else 1.0 - d.prob
        out.append((Realization(dict(sorted(sizes.items()))), prob))
    return out


# --------------------------------------------------------------------------
# generators


def gen_free_time_gap_instance(m: int) -> Instance:
    """m unit jobs followed by m-1 jobs of size m (ids in that order)."""
    if m < 2:
        raise ValueError("gap instance needs m >= 2")
    dists = [Deterministic(1)] * m + [Deterministic(m)] * (m - 1)
    return Instance.from_dists(m, dists)


def gen_machine_sensitivity_instance(
    m: int, c: float, job_cap: int = DEFAULT_JOB_CAP
) -> Instance:
    """ceil(7/8 * m * L) identical Ber(1/L) unit jobs, with L = ceil(e^(c m))."""
    if m < 2 or m % 2:
        raise ValueError("sensitivity instance needs an even m >= 2")
    if not c > 0:
        raise ValueError("c must be positive")
    # shave a relative ulp-scale amount so exp() landing just above an integer
    # (including 1 as c -> 0+) does not bump the ceiling
    L = max(1, math.ceil(math.exp(c * m) * (1 - 1e-12)))
    count = math.ceil(7 * m * L / 8)
    if count > job_cap:
        raise CapExceededError(f"{count} jobs exceed the job cap {job_cap}")
    return Instance.from_dists(m, [Bernoulli(1, 1.0 / L)] * count)


def gen_random_bernoulli(
    n: int, m: int, seed: int, sizes=(1, 2, 3, 4, 6, 8), prob_grid: int = 10
) -> Instance:
    """Bernoulli jobs with sizes from ``sizes`` and probabilities on a 1/prob_grid grid."""
    rng = make_rng(seed)
    dists = []
    for _ in range(n):
        s = int(sizes[rng.integers(len(sizes))])
        p = int(rng.integers(prob_grid + 1)) / prob_grid
        dists.append(Bernoulli(s, p))
    return Instance.from_dists(m, dists)


def gen_random_deterministic(n: int, m: int, seed: int, max_size: int = 6) -> Instance:
    rng = make_rng(seed)
    return Instance.from_dists(
        m, [Deterministic(int(rng.integers(1, max_size + 1))) for _ in range(n)]
    )


# --------------------------------------------------------------------------
# preprocessing


def round_up_pow2(x: float) -> float:
    if x <= 0:
        return 0.0
    mant, exp = math.frexp(x)
    return x if mant == 0.5 else math.ldexp(1.0, exp)


@dataclass(frozen=True)
class PreparedInstance:
    scale: float
    small: frozenset
    medium: frozenset
    large: frozenset
    instance: Instance


def normalize_and_partition(instance: Instance) -> PreparedInstance:
    """Round sizes up to powers of 2, rescale to unit total mean, split S/M/L.

    With ``n`` jobs the rescaled size parameter puts a job in S below 1/n^2,
    in L at n^8 or above, and in M otherwise.
    """
    instance.require_bernoulli()
    rounded = []
    for job in instance.jobs:
        s = round_up_pow2(job.dist.size)
        rounded.append(
            Deterministic(s) if isinstance(job.dist, Deterministic) else Bernoulli(s, job.dist.prob)
        )
    total = sum(d.mean() for d in rounded)
    if not total > 0:
        raise NormalizationError("instance has zero total expected size")
    scale = 1.0 / total
    scaled = []
    for d in rounded:
        s = d.size * scale
        scaled.append(Deterministic(s) if isinstance(d, Deterministic) else Bernoulli(s, d.prob))
    n = instance.n
    lo, hi = 1.0 / n**2, float(n) ** 8
    small, medium, large = set(), set(), set()
    for jid, d in enumerate(scaled):
        if d.size < lo:
            small.add(jid)
        elif d.size < hi:
            medium.add(jid)
        else:
            large.add(jid)
    return PreparedInstance(
        scale=scale,
        small=frozenset(small),
        medium=frozenset(medium),
        large=frozenset(large),
        instance=Instance.from_dists(instance.machines, scaled),
    )


def distinct_size_count(instance: Instance) -> int:
    return len({j.dist.size for j in instance.jobs if not isinstance(j.dist, Discrete) and j.dist.size > 0})


def size_classes(instance: Instance) -> dict[float, list[int]]:
    """Job ids grouped by size parameter (zero included), in id order."""
    classes: dict[float, list[int]] = {}
    for job in instance.jobs:
        classes.setdefault(size_param(job.dist), []).append(job.id)
    return classes
