import io
import json

import pytest

from stochsched.experiments import (
    SUITES,
    SuiteConfig,
    _Case,
    check_plan_structure,
    exact_metric,
    monte_carlo_metric,
    random_list_bound,
    ratio_report,
    report_weighted_free_time_proxy,
    run_suites,
    sensitivity_sweep,
    write_reports_csv,
)
from stochsched.job_model import Bernoulli, Deterministic, Instance
from stochsched.policies import BatchPlan, choose_jobs


def test_deterministic_zero_variance():
    inst = Instance.from_dists(2, [Deterministic(s) for s in (3, 1, 2)])
    est = monte_carlo_metric(inst, "spt", "total_completion", 50, seed=1)
    assert est.mean == 1 + 2 + 4 and est.std == 0 and est.ci95 == 0


def test_single_bernoulli_mean():
    inst = Instance.from_dists(1, [Bernoulli(2, 0.5)])
    est = monte_carlo_metric(inst, "sept", "total_completion", 100_000, seed=3)
    assert abs(est.mean - 1.0) <= 0.02


@pytest.mark.parametrize("metric", ["free_time", "total_completion", "weighted_free_time", "makespan"])
def test_monte_carlo_agrees_with_exact(metric):
    inst = Instance.from_dists(2, [Bernoulli(s, p) for s, p in [(1, 0.3), (4, 0.5), (2, 0.8), (3, 0.4), (6, 0.1)]])
    est = monte_carlo_metric(inst, "stochfree", metric, 4000, seed=9)
    exact = exact_metric(inst, "stochfree", metric)
    assert abs(est.mean - exact) <= 3 * est.ci95 + 1e-12


def test_monte_carlo_deterministic_for_seed():
    inst = Instance.from_dists(3, [Bernoulli(s, 0.5) for s in (1, 2, 3, 4, 5)])
    a = monte_carlo_metric(inst, "random", "free_time", 200, seed=5)
    assert a == monte_carlo_metric(inst, "random", "free_time", 200, seed=5)
    assert a != monte_carlo_metric(inst, "random", "free_time", 200, seed=6)


def test_monte_carlo_rejects_bad_args():
    inst = Instance.from_dists(1, [Deterministic(1)])
    with pytest.raises(ValueError):
        monte_carlo_metric(inst, "spt", "free_time", 0, seed=1)
    with pytest.raises(KeyError):
        monte_carlo_metric(inst, "spt", "latency", 5, seed=1)


def test_halve_runs_on_half_the_machines():
    inst = Instance.from_dists(4, [Deterministic(1)] * 4)
    assert exact_metric(inst, "halve", "makespan") == 2
    assert exact_metric(inst, "spt", "makespan") == 1


def test_report_csv():
    inst = Instance.from_dists(2, [Deterministic(2), Deterministic(2)])
    rows = [ratio_report(inst, "x", "spt", "total_completion", 3, 1, baseline=2.0)]
    buf = io.StringIO()
    write_reports_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "instance_id,alg,metric,mean,ci95,baseline,ratio,trials,seed"
    assert lines[1] == "x,spt,total_completion,4.0,0.0,2.0,2.0,3,1"


class TestProxy:
    def test_one_machine_chain(self):
        inst = Instance.from_dists(1, [Deterministic(1)] * 4)
        rep = report_weighted_free_time_proxy(inst, 5, seed=1)
        # chain 1,2,3,4; batches J_1 = 2 jobs (F=2, weight 2), J_2 = 3 jobs (F=3, weight 1)
        assert rep.completion.mean == 10 and rep.weighted_free_time.mean == 7 and rep.opt == 10

    def test_single_job(self):
        rep = report_weighted_free_time_proxy(Instance.from_dists(2, [Bernoulli(3, 0.5)]), 10, seed=1)
        assert rep.weighted_free_time.mean == 0

    def test_random_instance_emits_all(self):
        inst = Instance.from_dists(2, [Bernoulli(s, 0.5) for s in (1, 2, 3, 4, 5, 6)])
        rep = report_weighted_free_time_proxy(inst, 100, seed=2)
        assert rep.completion.mean > 0 and rep.weighted_free_time.mean >= 0 and rep.opt > 0


class TestCaseAccumulator:
    def test_records_violation(self):
        case = _Case()
        assert case.check(1.0, 1.0 + 1e-12, {"i": 0})
        assert not case.check(2.0, 1.0, {"i": 1}, kind="demo")
        assert case.failures[0]["i"] == 1 and case.counters == {"demo_checks": 1, "demo_failures": 1}
        assert case.slack == -1.0

    def test_equal(self):
        case = _Case()
        assert case.equal(1.0, 1.0 + 5e-10, {})
        assert not case.equal(1.0, 1.1, {})


def test_plan_structure_checker_flags_bad_plans():
    inst = Instance.from_dists(2, [Bernoulli(1, p) for p in (0.1, 0.2, 0.3, 0.4)])
    assert check_plan_structure(inst, choose_jobs(inst)) == []
    not_nested = BatchPlan((frozenset({0, 1}), frozenset({0, 2, 3})), frozenset({1}))
    assert any("contained" in p for p in check_plan_structure(inst, not_nested))
    wrong_prefix = BatchPlan((frozenset({2, 3}), frozenset({0, 2, 3})), frozenset({1}))
    assert any("prefix" in p for p in check_plan_structure(inst, wrong_prefix))


def test_random_list_bound():
    assert random_list_bound(1) == 4
    assert random_list_bound(4) == pytest.approx(9.545, abs=1e-3)


def test_sensitivity_degenerate_c():
    (row,) = sensitivity_sweep([2], 1e-15)
    # two unit jobs: 1 + 1 on two machines, 1 + 2 on one
    assert row.jobs == 2 and row.opt_m == 2 and row.opt_half == 3 and row.method == "dp"


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites(["gap", "nope"], SuiteConfig())


def _small(seed):
    return SuiteConfig(seed=seed, cases=4, sensitivity_trials=200)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_pass_and_repeat(name):
    a = [o.to_json() for o in run_suites([name], _small(11))]
    b = [o.to_json() for o in run_suites([name], _small(11))]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a[0]["passed"], a[0]["failures"][:3]


def test_worker_count_does_not_change_outcome(monkeypatch):
    names = ["spt", "bernoulli", "exchange", "containment"]
    monkeypatch.setenv("STOCHSCHED_THREADS", "1")
    one = json.dumps([o.to_json() for o in run_suites(names, _small(5))], sort_keys=True)
    monkeypatch.setenv("STOCHSCHED_THREADS", "3")
    many = json.dumps([o.to_json() for o in run_suites(names, _small(5))], sort_keys=True)
    assert one == many
