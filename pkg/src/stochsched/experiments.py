"""Monte Carlo estimation, ratio reports, and bound-verification suites.

Every suite draws its cases from streams keyed by (master seed, suite id,
case index), so an outcome depends only on the seed and the config, never on
how many workers evaluated it. Provable inequalities are checked with an
absolute slack of ``TOL``.
"""

from __future__ import annotations

import csv
import math
import os
import zlib
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import formats
from .job_model import (
    Bernoulli,
    Deterministic,
    Instance,
    enumerate_realizations,
    gen_free_time_gap_instance,
    gen_machine_sensitivity_instance,
    make_rng,
    sample_realization,
    size_classes,
)
from .list_engine import (
    Trace,
    final_free_time,
    makespan,
    run_list_schedule,
    total_completion,
    weighted_free_time,
)
from .oracle import (
    check_exchange_property,
    opt_adaptive_completion,
    opt_adaptive_sequence,
    opt_adaptive_trace,
    opt_batch_free_times,
    opt_free_time_det,
)
from .policies import (
    Algorithm,
    BatchPlan,
    bft_from_ft,
    choose_jobs,
    halve_machines_order,
    resolve_algorithm,
    sept_order,
    size_order_rule,
    spt_order,
    stoch_free_order,
)

TOL = 1e-9
METRICS = ("free_time", "total_completion", "weighted_free_time", "makespan")

# --------------------------------------------------------------------------
# Monte Carlo


def derive_seed(seed: int, *path: int) -> int:
    words = make_rng(seed, *path).integers(0, 2**32, size=2, dtype=np.uint64)
    return int(words[0]) << 32 | int(words[1])


def metric_value(trace: Trace, metric: str) -> float:
    if metric == "free_time":
        return trace.free_times[-1]
    if metric == "total_completion":
        return total_completion(trace)
    if metric == "weighted_free_time":
        return weighted_free_time(trace, len(trace.jobs)) if trace.jobs else 0.0
    if metric == "makespan":
        return makespan(trace)
    raise KeyError(f"unknown metric {metric!r}")


def _as_algorithm(alg) -> Algorithm:
    if isinstance(alg, Algorithm):
        return alg
    if isinstance(alg, str):
        return resolve_algorithm(alg)
    return Algorithm(getattr(alg, "__name__", "custom"), alg)


def run_algorithm(alg, instance: Instance, realization, seed: int = 0) -> Trace:
    alg = _as_algorithm(alg)
    order = alg.order(instance, realization, seed)
    return run_list_schedule(instance, realization, order, alg.initial_loads(instance))


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci95: float
    std: float
    trials: int


def monte_carlo_metric(instance: Instance, alg, metric: str, trials: int, seed: int) -> Estimate:
    """Mean and 95% CI half-width of ``metric`` over sampled realizations.

    Trial ``t`` samples its realization from stream ``(seed, t, 0)`` and gives
    the algorithm seed ``(seed, t, 1)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if metric not in METRICS:
        raise KeyError(f"unknown metric {metric!r}")
    alg = _as_algorithm(alg)
    values = np.empty(trials)
    for t in range(trials):
        real = sample_realization(instance, derive_seed(seed, t, 0))
        values[t] = metric_value(run_algorithm(alg, instance, real, derive_seed(seed, t, 1)), metric)
    std = float(values.std(ddof=1)) if trials > 1 else 0.0
    return Estimate(float(values.mean()), 1.96 * std / math.sqrt(trials), std, trials)


def exact_metric(instance: Instance, alg, metric: str, seed: int = 0) -> float:
    """Expectation of ``metric`` over all enumerated realizations."""
    alg = _as_algorithm(alg)
    return math.fsum(
        prob * metric_value(run_algorithm(alg, instance, real, seed), metric)
        for real, prob in enumerate_realizations(instance)
    )


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class RatioReport:
    instance_id: str
    alg: str
    metric: str
    mean: float
    ci95: float
    baseline: float | None
    ratio: float | None
    trials: int
    seed: int


REPORT_COLUMNS = ("instance_id", "alg", "metric", "mean", "ci95", "baseline", "ratio", "trials", "seed")


def write_reports_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in REPORT_COLUMNS])


def ratio_report(
    instance: Instance, instance_id: str, alg, metric: str, trials: int, seed: int, baseline=None
) -> RatioReport:
    est = monte_carlo_metric(instance, alg, metric, trials, seed)
    ratio = est.mean / baseline if baseline else None
    return RatioReport(instance_id, _as_algorithm(alg).name, metric, est.mean, est.ci95, baseline, ratio, trials, seed)


@dataclass(frozen=True)
class ProxyReport:
    completion: Estimate
    weighted_free_time: Estimate
    opt: float | None


def _batch_weighted_free_time(trace: Trace, plan: BatchPlan, n: int) -> float:
    return sum(
        -(-n // (1 << k)) * trace.free_times[len(J)] for k, J in enumerate(plan.batches, start=1)
    )


def report_weighted_free_time_proxy(instance: Instance, trials: int, seed: int) -> ProxyReport:
    """StochFree's expected completion time beside its batch-checkpoint free time
    ``sum_k ceil(n/2^k) F(J_k)`` and, when the DP is feasible, the adaptive optimum.

    The relation between these numbers holds only up to unspecified constants,
    so nothing here is asserted.
    """
    plan = choose_jobs(instance)
    order = stoch_free_order(instance)
    comp = np.empty(trials)
    wft = np.empty(trials)
    for t in range(trials):
        real = sample_realization(instance, derive_seed(seed, t, 0))
        trace = run_list_schedule(instance, real, order)
        comp[t] = total_completion(trace)
        wft[t] = _batch_weighted_free_time(trace, plan, instance.n)

    def est(v):
        sd = float(v.std(ddof=1)) if trials > 1 else 0.0
        return Estimate(float(v.mean()), 1.96 * sd / math.sqrt(trials), sd, trials)

    try:
        opt = opt_adaptive_completion(instance).value
    except ValueError:
        opt = None
    return ProxyReport(est(comp), est(wft), opt)


# --------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 7
    cases: int | None = None  # overrides every per-suite count when set
    gap_ms: tuple = (2, 3, 4, 5, 6)
    spt_cases: int = 200
    spt_max_n: int = 8
    spt_ms: tuple = (2, 4)
    spt_max_size: int = 6
    bernoulli_cases: int = 100
    bernoulli_max_n: int = 8
    bernoulli_ms: tuple = (2, 4)
    bft_cases: int = 50
    bft_max_n: int = 7
    bft_max_k: int = 3
    monotonicity_cases: int = 1000
    exchange_cases: int = 100
    exchange_max_n: int = 6
    exchange_max_m: int = 3
    containment_cases: int = 500
    containment_max_n: int = 40
    containment_oracle_cases: int = 50
    containment_oracle_max_n: int = 6
    random_list_cases: int = 50
    random_list_max_n: int = 9
    random_list_max_m: int = 6
    random_list_orders: int = 2000
    halving_cases: int = 200
    halving_max_m: int = 6
    halving_max_n: int = 12
    sept_cases: int = 100
    sept_max_n: int = 6
    free_vol_cases: int = 30
    free_vol_max_n: int = 6
    free_vol_ms: tuple = (2, 3)
    sensitivity_ms: tuple = (2, 4)
    sensitivity_c: float = 0.5
    sensitivity_trials: int = 4000

    def count(self, default: int) -> int:
        return default if self.cases is None else self.cases


@dataclass
class SuiteOutcome:
    check: str
    cases: int
    failures: list = field(default_factory=list)
    worst_slack: float | None = None
    worst_ratio: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class _Case:
    """Accumulator for one case: slack = bound - observed, failing below -TOL."""

    failures: list = field(default_factory=list)
    slack: float | None = None
    ratio: float | None = None
    counters: dict = field(default_factory=dict)

    def check(self, lhs: float, rhs: float, payload: dict, kind: str | None = None) -> bool:
        """Record ``lhs <= rhs`` (within TOL)."""
        s = rhs - lhs
        self.slack = s if self.slack is None else min(self.slack, s)
        if rhs > 0:
            r = lhs / rhs
            self.ratio = r if self.ratio is None else max(self.ratio, r)
        if kind:
            self.counters[f"{kind}_checks"] = self.counters.get(f"{kind}_checks", 0) + 1
        if s < -TOL:
            self.failures.append({**payload, "lhs": lhs, "rhs": rhs, **({"kind": kind} if kind else {})})
            if kind:
                key = f"{kind}_failures"
                self.counters[key] = self.counters.get(key, 0) + 1
            return False
        return True

    def equal(self, a: float, b: float, payload: dict, tol: float = TOL) -> bool:
        d = abs(a - b)
        self.slack = -d if self.slack is None else min(self.slack, -d)
        if d > tol:
            self.failures.append({**payload, "a": a, "b": b})
            return False
        return True

    def fail(self, payload: dict) -> None:
        self.failures.append(payload)


def _suite_id(name: str) -> int:
    return zlib.crc32(name.encode())


def _case_rng(config: SuiteConfig, suite: str, index: int) -> np.random.Generator:
    return make_rng(config.seed, _suite_id(suite), index)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("STOCHSCHED_THREADS", "1")))
    except ValueError:
        return 1


def _run_cases(name: str, fn: Callable, config: SuiteConfig, count: int) -> SuiteOutcome:
    args = [(config, i) for i in range(count)]
    workers = min(_workers(), count) if count else 1
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_call, [fn] * count, args, chunksize=max(1, count // (4 * workers))))
    else:
        results = [fn(*a) for a in args]
    out = SuiteOutcome(name, count)
    for res in results:  # already in case order
        out.failures.extend(res.failures)
        if res.slack is not None:
            out.worst_slack = res.slack if out.worst_slack is None else min(out.worst_slack, res.slack)
        if res.ratio is not None:
            out.worst_ratio = res.ratio if out.worst_ratio is None else max(out.worst_ratio, res.ratio)
        for k, v in res.counters.items():
            out.extra[k] = out.extra.get(k, 0) + v
    return out


def _call(fn, args):
    return fn(*args)


def _tag(config: SuiteConfig, index: int, inst: Instance, **more) -> dict:
    return {"case": index, "seed": config.seed, "instance": formats.instance_to_dict(inst), **more}


def _random_bernoulli(rng, n: int, m: int, sizes=(1, 2, 3, 4, 6, 8)) -> Instance:
    dists = [
        Bernoulli(int(sizes[rng.integers(len(sizes))]), int(rng.integers(11)) / 10) for _ in range(n)
    ]
    return Instance.from_dists(m, dists)


def _random_deterministic(rng, n: int, m: int, max_size: int) -> Instance:
    return Instance.from_dists(m, [Deterministic(int(rng.integers(1, max_size + 1))) for _ in range(n)])


def _check_small_volume(case: _Case, sizes, f_opt: float, m: int, payload: dict) -> None:
    """Optimal free time is at least half the small-job volume per machine."""
    vol = math.fsum(s for s in sizes if s <= f_opt)
    case.check(vol / (2 * m), f_opt, payload, kind="opt_small_lower")


# -- gap instance ------------------------------------------------------------


def verify_free_time_gap(config: SuiteConfig) -> SuiteOutcome:
    out = SuiteOutcome("gap", len(config.gap_ms))
    for m in config.gap_ms:
        inst = gen_free_time_gap_instance(m)
        sizes = {j.id: j.dist.size for j in inst.jobs}
        big_first = list(range(m, 2 * m - 1)) + list(range(m))
        f_big = run_list_schedule(inst, sizes, big_first).free_times[-1]
        f_spt = run_list_schedule(inst, sizes, spt_order(inst, sizes)).free_times[-1]
        f_opt = opt_free_time_det(sizes, m, max_jobs=inst.n)
        if not (f_big == m and f_opt == 1 and f_spt == 1):
            out.failures.append({"m": m, "big_first": f_big, "opt": f_opt, "spt": f_spt})
        ratio = f_big / f_opt if f_opt else None
        if ratio is not None:
            out.worst_ratio = ratio if out.worst_ratio is None else max(out.worst_ratio, ratio)
        out.extra[f"ratio_m{m}"] = ratio
    out.worst_slack = 0.0 if out.passed else -1.0
    return out


# -- SPT on deterministic jobs ------------------------------------------------


def _spt_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "spt", index)
    n = int(rng.integers(1, config.spt_max_n + 1))
    m = int(rng.integers(config.spt_ms[0], config.spt_ms[1] + 1))
    inst = _random_deterministic(rng, n, m, config.spt_max_size)
    sizes = [j.dist.size for j in inst.jobs]
    case = _Case()
    f_alg = final_free_time(sorted(sizes), [0.0] * m)
    f_opt = opt_free_time_det(sizes, m)
    tag = _tag(config, index, inst)
    case.check(f_alg, 4 * f_opt, tag)
    _check_small_volume(case, sizes, f_opt, m, tag)
    return case


def verify_spt_four_approx(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("spt", _spt_case, config, config.count(config.spt_cases))


# -- size-parameter order, per realization -------------------------------------


def _bernoulli_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "bernoulli", index)
    n = int(rng.integers(1, config.bernoulli_max_n + 1))
    m = int(rng.integers(config.bernoulli_ms[0], config.bernoulli_ms[1] + 1))
    inst = _random_bernoulli(rng, n, m)
    order = sorted(range(n), key=lambda j: (inst.jobs[j].dist.size, j))
    case = _Case()
    for real, _ in enumerate_realizations(inst):
        sizes = [real[j] for j in order]
        f_alg = final_free_time(sizes, [0.0] * m)
        f_opt = opt_free_time_det(sizes, m)
        tag = _tag(config, index, inst, realization=dict(real))
        case.check(f_alg, 4 * f_opt, tag)
        _check_small_volume(case, sizes, f_opt, m, tag)
    return case


def verify_bernoulli_per_realization(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("bernoulli", _bernoulli_case, config, config.count(config.bernoulli_cases))


# -- batch free time ---------------------------------------------------------


def _random_nesting(rng, n: int, max_k: int) -> BatchPlan:
    K = int(rng.integers(1, max_k + 1))
    perm = [int(j) for j in rng.permutation(n)]
    cuts = sorted(int(c) for c in rng.integers(0, n + 1, size=K))
    cuts[-1] = max(cuts[-1], 1)
    batches = tuple(frozenset(perm[:c]) for c in cuts)
    return BatchPlan(batches, frozenset(range(n)) - batches[-1])


def _bft_instance(config: SuiteConfig, suite: str, index: int):
    rng = _case_rng(config, suite, index)
    n = int(rng.integers(1, config.bft_max_n + 1))
    m = int(rng.integers(2, 5))
    inst = _random_bernoulli(rng, n, m)
    plan = choose_jobs(inst) if index % 2 == 0 else None
    if plan is None or plan.K == 0 or plan.K > config.bft_max_k:
        plan = _random_nesting(rng, n, config.bft_max_k)
    return inst, plan


def _bft_check(case: _Case, config, index, inst, plan, rule_factory, alpha) -> None:
    m = inst.machines
    for real, _ in enumerate_realizations(inst):
        order = bft_from_ft(plan, rule_factory(inst, real))
        free = run_list_schedule(inst, real, order).free_times
        opts = opt_batch_free_times(plan, inst, real)
        acc = 0.0
        for k, (J, f_opt) in enumerate(zip(plan.batches, opts), start=1):
            acc += f_opt
            tag = _tag(config, index, inst, realization=dict(real), k=k,
                       batches=[sorted(b) for b in plan.batches])
            case.check(free[len(J)], (alpha + 1) * acc, tag)
            _check_small_volume(case, [real[j] for j in J], f_opt, m, tag)


def _size_rule(inst, real):
    return size_order_rule(inst)


def _clairvoyant_rule(inst, real):
    return lambda ids: sorted(ids, key=lambda j: (real[j], j))


def _bft_case(config: SuiteConfig, index: int) -> _Case:
    inst, plan = _bft_instance(config, "bft", index)
    case = _Case()
    _bft_check(case, config, index, inst, plan, _size_rule, 4)
    return case


def verify_bft_five_approx(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("bft", _bft_case, config, config.count(config.bft_cases))


# per-batch rules with a per-realization free-time guarantee: (factory, alpha)
FT_RULES = {"size": (_size_rule, 4), "clairvoyant-spt": (_clairvoyant_rule, 4)}


def _ft_to_bft_case(config: SuiteConfig, index: int) -> _Case:
    inst, plan = _bft_instance(config, "ft-to-bft", index)
    case = _Case()
    for name in sorted(FT_RULES):
        factory, alpha = FT_RULES[name]
        _bft_check(case, config, index, inst, plan, factory, alpha)
    return case


def verify_ft_to_bft(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("ft-to-bft", _ft_to_bft_case, config, config.count(config.bft_cases))


# -- monotonicity in initial loads ---------------------------------------------


def _monotonicity_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "monotonicity", index)
    m = int(rng.integers(1, 6))
    n = int(rng.integers(0, 9))
    inst = Instance.from_dists(m, [Deterministic(int(rng.integers(0, 13)) / 2) for _ in range(n)])
    sizes = {j.id: j.dist.size for j in inst.jobs}
    order = [int(j) for j in rng.permutation(n)]
    low = [float(x) for x in rng.integers(0, 6, size=m)]
    variants = {"raise": [a + float(b) / 2 for a, b in zip(low, rng.integers(0, 7, size=m))]}
    if m >= 2:
        k = int(rng.integers(1, m))
        off = set(int(i) for i in rng.choice(m, size=k, replace=False))
        variants["remove"] = [math.inf if i in off else x for i, x in enumerate(low)]
    base = run_list_schedule(inst, sizes, order, low)
    case = _Case()
    for name, high in sorted(variants.items()):
        other = run_list_schedule(inst, sizes, order, high)
        tag = _tag(config, index, inst, order=order, low=low, high=[repr(x) for x in high], variant=name)
        for i, (a, b) in enumerate(zip(base.free_times, other.free_times)):
            case.check(a, b, {**tag, "i": i}, kind="free_time")
        case.check(total_completion(base), total_completion(other), tag, kind="total_completion")
    return case


def verify_monotonicity(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("monotonicity", _monotonicity_case, config, config.count(config.monotonicity_cases))


# -- same-size exchange --------------------------------------------------------


def _exchange_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "exchange", index)
    n = int(rng.integers(1, config.exchange_max_n + 1))
    m = int(rng.integers(1, config.exchange_max_m + 1))
    # few distinct sizes so that size classes share jobs
    inst = _random_bernoulli(rng, n, m, sizes=(1, 2, 3))
    constrained, free = check_exchange_property(inst)
    case = _Case()
    case.equal(constrained, free, _tag(config, index, inst))
    return case


def verify_exchange(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("exchange", _exchange_case, config, config.count(config.exchange_cases))


# -- ChooseJobs structure and containment ------------------------------------------


def check_plan_structure(inst: Instance, plan: BatchPlan) -> list[str]:
    """Problems with nesting, batch sizes, or per-class prefixes (empty when valid)."""
    n = inst.n
    problems = []
    classes = size_classes(inst)
    L = len(classes)
    prev = frozenset()
    for k, J in enumerate(plan.batches, start=1):
        r = -(-n // (1 << k))
        if not prev <= J:
            problems.append(f"J_{k - 1} not contained in J_{k}")
        if len(J) > n - r:
            problems.append(f"|J_{k}| = {len(J)} > n - ceil(n/2^k) = {n - r}")
        if len(J) < max(0, n - L * r):
            problems.append(f"|J_{k}| = {len(J)} < n - L*ceil(n/2^k) = {n - L * r}")
        for ids in classes.values():
            ranked = sorted(ids, key=lambda j: (inst.jobs[j].dist.prob, j))
            kept = [j in J for j in ranked]
            if kept != sorted(kept, reverse=True):
                problems.append(f"J_{k} keeps a non-prefix of a size class")
        prev = J
    if plan.batches and plan.leftover != frozenset(range(n)) - plan.batches[-1]:
        problems.append("leftover is not the complement of J_K")
    return problems


def _containment_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "containment", index)
    case = _Case()
    n = int(rng.integers(0, config.containment_max_n + 1))
    inst = _random_bernoulli(rng, n, int(rng.integers(1, 5)), sizes=(0, 1, 2, 3, 4, 6, 8))
    for problem in check_plan_structure(inst, choose_jobs(inst)):
        case.fail(_tag(config, index, inst, problem=problem))
    case.counters["structure_checks"] = 1
    if index >= config.count(config.containment_oracle_cases):
        return case
    # oracle part: J_k must sit inside the canonical optimum's first n - ceil(n/2^k) starts
    n = int(rng.integers(1, config.containment_oracle_max_n + 1))
    inst = _random_bernoulli(rng, n, int(rng.integers(1, 4)), sizes=(1, 2, 3))
    plan = choose_jobs(inst)
    result = opt_adaptive_completion(inst)
    for real, _ in enumerate_realizations(inst):
        seq = opt_adaptive_sequence(inst, real, result)
        for k, J in enumerate(plan.batches, start=1):
            prefix = set(seq[: n - -(-n // (1 << k))])
            case.counters["containment_checks"] = case.counters.get("containment_checks", 0) + 1
            if not J <= prefix:
                case.fail(_tag(config, index, inst, realization=dict(real), k=k,
                               J=sorted(J), opt_prefix=sorted(prefix)))
    return case


def verify_batch_containment(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("containment", _containment_case, config, config.count(config.containment_cases))


# -- random list order -------------------------------------------------------------


def random_list_bound(m: int) -> float:
    return 4 * (1 + math.log(m))


def _random_list_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "random-list", index)
    n = int(rng.integers(1, config.random_list_max_n + 1))
    m = int(rng.integers(1, config.random_list_max_m + 1))
    inst = _random_deterministic(rng, n, m, 6)
    sizes = np.array([j.dist.size for j in inst.jobs], dtype=float)
    orders = rng.permuted(np.tile(sizes, (config.random_list_orders, 1)), axis=1)
    zeros = [0.0] * m
    mean_f = float(np.mean([final_free_time(row, zeros) for row in orders.tolist()]))
    f_opt = opt_free_time_det(sizes.tolist(), m)
    case = _Case()
    case.check(mean_f, random_list_bound(m) * f_opt, _tag(config, index, inst, mean_free_time=mean_f))
    return case


def verify_random_list_logm(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("random-list", _random_list_case, config, config.count(config.random_list_cases))


# -- halving the machine count ----------------------------------------------------


def _halving_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "halving", index)
    m = 2 * int(rng.integers(1, config.halving_max_m // 2 + 1))
    n = int(rng.integers(1, config.halving_max_n + 1))
    inst = _random_deterministic(rng, n, m, 6)
    sizes = {j.id: j.dist.size for j in inst.jobs}
    full = run_list_schedule(inst, sizes, spt_order(inst, sizes)).by_id()
    half = run_list_schedule(inst.with_machines(m // 2), sizes, halve_machines_order(inst, sizes)).by_id()
    case = _Case()
    for j in range(n):
        case.check(half[j].completion, 3 * full[j].completion, _tag(config, index, inst, job=j))
    return case


def verify_halving(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("halving", _halving_case, config, config.count(config.halving_cases))


# -- SEPT on one machine ------------------------------------------------------------


def _sept_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "sept", index)
    n = int(rng.integers(1, config.sept_max_n + 1))
    inst = _random_bernoulli(rng, n, 1, sizes=(1, 2, 3, 4, 5, 6, 7, 8))
    order = sept_order(inst)
    expected = math.fsum(
        prob * total_completion(run_list_schedule(inst, real, order))
        for real, prob in enumerate_realizations(inst)
    )
    case = _Case()
    case.equal(opt_adaptive_completion(inst).value, expected, _tag(config, index, inst))
    return case


def verify_sept_optimal(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("sept", _sept_case, config, config.count(config.sept_cases))


# -- free time vs. small volume over unclogged machines ---------------------------------


def _free_vol_case(config: SuiteConfig, index: int) -> _Case:
    rng = _case_rng(config, "free-vol", index)
    n = int(rng.integers(1, config.free_vol_max_n + 1))
    m = int(rng.integers(config.free_vol_ms[0], config.free_vol_ms[1] + 1))
    inst = _random_bernoulli(rng, n, m)
    plan = choose_jobs(inst)
    order = stoch_free_order(inst)
    result = opt_adaptive_completion(inst)
    reals = enumerate_realizations(inst)
    opt_free = [opt_adaptive_trace(inst, real, result).free_times for real, _ in reals]
    checkpoints = [n - -(-n // (1 << k)) for k in range(1, plan.K + 1)]
    mean_opt = [math.fsum(p * f[i] for (_, p), f in zip(reals, opt_free)) for i in checkpoints]
    case = _Case()
    for (real, _), f_star in zip(reals, opt_free):
        # started jobs above F*(i) occupy distinct machines and miss the idle one
        seq = opt_adaptive_sequence(inst, real, result)
        for i in range(n + 1):
            big = sum(real[j] > f_star[i] for j in seq[:i])
            case.counters["big_threshold_checks"] = case.counters.get("big_threshold_checks", 0) + 1
            if big >= m:
                case.fail(_tag(config, index, inst, realization=dict(real), i=i, big=big))
        free = run_list_schedule(inst, real, order).free_times
        prev = frozenset()
        for k, (J, i_k, mean_k) in enumerate(zip(plan.batches, checkpoints, mean_opt), start=1):
            tau = 2 * max(mean_k, f_star[i_k])
            inc = J - prev
            vol = math.fsum(real[j] for j in inc if real[j] <= tau)
            unclogged = m - sum(real[j] > tau for j in prev)
            tag = _tag(config, index, inst, realization=dict(real), k=k, tau=tau)
            if unclogged < 1:
                case.fail({**tag, "unclogged": unclogged})
            else:
                case.check(free[len(J)], free[len(prev)] + vol / unclogged + 2 * tau, tag)
            prev = J
    return case


def verify_free_vol_inequality(config: SuiteConfig) -> SuiteOutcome:
    return _run_cases("free-vol", _free_vol_case, config, config.count(config.free_vol_cases))


# -- machine-count sensitivity ----------------------------------------------------------


@dataclass(frozen=True)
class SensitivityRow:
    m: int
    jobs: int
    prob: float
    opt_m: float
    opt_half: float
    ratio: float
    method: str


def sensitivity_sweep(ms, c: float, trials: int = 4000, seed: int = 7) -> list[SensitivityRow]:
    """Expected optimum on m versus m/2 machines for the identical-job instance.

    All jobs are identical, so every list order is an optimal policy; the DP
    value is used when it fits the oracle caps and StochFree's Monte Carlo
    mean otherwise.
    """
    rows = []
    for m in ms:
        inst = gen_machine_sensitivity_instance(m, c)
        vals, method = [], "dp"
        for mm in (m, m // 2):
            sub = inst.with_machines(mm)
            try:
                vals.append(opt_adaptive_completion(sub).value)
            except ValueError:
                method = "monte-carlo"
                vals.append(monte_carlo_metric(sub, "stochfree", "total_completion", trials, derive_seed(seed, m, mm)).mean)
        rows.append(SensitivityRow(m, inst.n, inst.jobs[0].dist.prob, vals[0], vals[1], vals[1] / vals[0], method))
    return rows


def verify_sensitivity(config: SuiteConfig) -> SuiteOutcome:
    rows = sensitivity_sweep(config.sensitivity_ms, config.sensitivity_c, config.sensitivity_trials, config.seed)
    out = SuiteOutcome("sensitivity", len(rows))
    prev = None
    for row in rows:
        if not row.ratio > 1:
            out.failures.append({"m": row.m, "ratio": row.ratio, "problem": "ratio <= 1"})
        if prev is not None and row.ratio < prev:
            out.failures.append({"m": row.m, "ratio": row.ratio, "previous": prev, "problem": "ratio decreased"})
        prev = row.ratio
    out.worst_ratio = max((r.ratio for r in rows), default=None)
    out.extra["rows"] = [asdict(r) for r in rows]
    return out


# --------------------------------------------------------------------------

SUITES: dict[str, Callable[[SuiteConfig], SuiteOutcome]] = {
    "gap": verify_free_time_gap,
    "spt": verify_spt_four_approx,
    "bernoulli": verify_bernoulli_per_realization,
    "bft": verify_bft_five_approx,
    "ft-to-bft": verify_ft_to_bft,
    "monotonicity": verify_monotonicity,
    "exchange": verify_exchange,
    "containment": verify_batch_containment,
    "random-list": verify_random_list_logm,
    "halving": verify_halving,
    "sept": verify_sept_optimal,
    "free-vol": verify_free_vol_inequality,
    "sensitivity": verify_sensitivity,
}


def run_suites(names, config: SuiteConfig) -> list[SuiteOutcome]:
    names = list(SUITES) if names in ("all", ["all"]) else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](config) for n in names]


def with_cases(config: SuiteConfig, cases: int | None) -> SuiteConfig:
    return replace(config, cases=cases)
