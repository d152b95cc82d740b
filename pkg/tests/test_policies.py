import itertools
from collections import Counter

import pytest

from stochsched.job_model import (
    Bernoulli,
    Deterministic,
    Discrete,
    Instance,
    UnsupportedDistributionError,
    gen_free_time_gap_instance,
)
from stochsched.list_engine import run_list_schedule
from stochsched.policies import (
    BatchPlan,
    algorithm_names,
    bernoulli_size_order,
    bft_from_ft,
    choose_jobs,
    halve_machines_order,
    halved_loads,
    random_order,
    rescale_wrapper_order,
    resolve_algorithm,
    sept_order,
    size_order_rule,
    spt_order,
    stoch_free_order,
)


@pytest.fixture
def four():
    return Instance.from_dists(
        2, [Bernoulli(10, 0.9), Bernoulli(10, 0.5), Bernoulli(1, 0.8), Bernoulli(1, 0.2)]
    )


def test_spt():
    inst = Instance.from_dists(1, [Deterministic(1)] * 3)
    assert spt_order(inst, {0: 3, 1: 1, 2: 2}) == [1, 2, 0]
    assert spt_order(inst, {0: 1, 1: 1, 2: 1}) == [0, 1, 2]
    with pytest.raises(KeyError):
        spt_order(inst, {0: 1})


def test_spt_on_gap_reaches_one():
    inst = gen_free_time_gap_instance(3)
    sizes = {j.id: j.dist.size for j in inst.jobs}
    order = spt_order(inst, sizes)
    assert order[:3] == [0, 1, 2]
    assert run_list_schedule(inst, sizes, order).free_times[-1] == 1


def test_size_order():
    inst = Instance.from_dists(1, [Bernoulli(5, 0.1), Bernoulli(1, 1), Bernoulli(1, 0.3)])
    assert bernoulli_size_order(inst) == [1, 2, 0]
    assert bernoulli_size_order(Instance.from_dists(1, [Bernoulli(3, 0.5)])) == [0]
    assert bernoulli_size_order(Instance.from_dists(1, [Bernoulli(2, 0.9), Bernoulli(2, 0.1)])) == [0, 1]
    with pytest.raises(UnsupportedDistributionError):
        bernoulli_size_order(Instance.from_dists(1, [Discrete(((1.0, 1.0),))]))


def test_random_order_basic():
    assert random_order(Instance.from_dists(1, [Deterministic(1)]), 5) == [0]
    inst = Instance.from_dists(1, [Deterministic(1)] * 6)
    assert random_order(inst, 11) == random_order(inst, 11)
    assert sorted(random_order(inst, 11)) == list(range(6))


def test_random_order_uniform():
    inst = Instance.from_dists(1, [Deterministic(1)] * 3)
    counts = Counter(tuple(random_order(inst, s)) for s in range(60000))
    assert set(counts) == set(itertools.permutations(range(3)))
    assert all(abs(c / 60000 - 1 / 6) <= 0.01 for c in counts.values())


def test_sept():
    assert sept_order(Instance.from_dists(1, [Bernoulli(10, 0.1), Deterministic(2)])) == [0, 1]
    assert sept_order(Instance.from_dists(1, [Bernoulli(4, 0.5), Deterministic(2)])) == [0, 1]
    assert sept_order(Instance.from_dists(1, [Deterministic(3), Bernoulli(2, 0.5)])) == [1, 0]


class TestChooseJobs:
    def test_four_job_example(self, four):
        plan = choose_jobs(four)
        assert plan.batches == (frozenset(), frozenset({1, 3}))
        assert plan.leftover == {0, 2}
        assert plan.increments() == [frozenset(), frozenset({1, 3})]

    def test_identical_sizes_tight(self):
        inst = Instance.from_dists(2, [Bernoulli(1, p / 10) for p in range(8)])
        plan = choose_jobs(inst)
        assert [len(J) for J in plan.batches] == [4, 6, 7]
        # lowest probabilities are kept
        assert plan.batches[0] == {0, 1, 2, 3}

    def test_single_job(self):
        plan = choose_jobs(Instance.from_dists(2, [Bernoulli(1, 0.5)]))
        assert plan.K == 0 and plan.leftover == {0}

    def test_empty(self):
        assert choose_jobs(Instance(2)) == BatchPlan((), frozenset())

    def test_probability_ties_drop_larger_id(self):
        inst = Instance.from_dists(2, [Bernoulli(1, 0.5)] * 4)
        assert choose_jobs(inst).batches == (frozenset({0, 1}), frozenset({0, 1, 2}))

    def test_deterministic_as_p1(self):
        inst = Instance.from_dists(2, [Deterministic(1), Bernoulli(1, 0.9), Bernoulli(1, 0.1), Bernoulli(1, 0.2)])
        assert choose_jobs(inst).batches[0] == {2, 3}

    def test_non_power_of_two(self):
        inst = Instance.from_dists(2, [Bernoulli(1, 0.5)] * 5)
        plan = choose_jobs(inst)
        assert plan.K == 3 and [len(J) for J in plan.batches] == [2, 3, 4]


class TestBft:
    def test_single_batch(self):
        inst = Instance.from_dists(2, [Bernoulli(s, 0.5) for s in (3, 1, 2)])
        plan = BatchPlan((frozenset({0, 1, 2}),), frozenset())
        assert bft_from_ft(plan, size_order_rule(inst)) == [1, 2, 0]

    def test_singletons_ignore_rule(self):
        plan = BatchPlan((frozenset({1}), frozenset({0, 1})), frozenset())
        assert bft_from_ft(plan, lambda ids: sorted(ids, reverse=True)) == [1, 0]

    def test_leftover_not_appended(self, four):
        plan = choose_jobs(four)
        out = bft_from_ft(plan, size_order_rule(four))
        assert out == [3, 1]


class TestStochFree:
    def test_four_job_example(self, four):
        assert stoch_free_order(four) == [3, 1, 0, 2]

    def test_single_job(self):
        assert stoch_free_order(Instance.from_dists(2, [Bernoulli(1, 0.5)])) == [0]

    def test_identical_jobs_id_order(self):
        inst = Instance.from_dists(3, [Bernoulli(2, 0.5)] * 7)
        assert stoch_free_order(inst) == list(range(7))

    def test_one_machine_is_sept(self, four):
        one = four.with_machines(1)
        assert stoch_free_order(one) == sept_order(one)


class TestRescale:
    def test_all_medium_matches_core(self):
        inst = Instance.from_dists(
            2, [Bernoulli(2, 0.9), Bernoulli(2, 0.5), Bernoulli(1, 0.8), Bernoulli(1, 0.2)]
        )
        assert rescale_wrapper_order(inst) == stoch_free_order(inst) == [3, 1, 0, 2]

    def test_huge_job_first(self):
        dists = [Bernoulli(1, 0.5)] * 3 + [Bernoulli(2.0**40, 1e-15)]
        assert rescale_wrapper_order(Instance.from_dists(2, dists))[0] == 3

    def test_tiny_job_before_medium(self):
        dists = [Bernoulli(1, 0.5), Bernoulli(2, 0.5), Bernoulli(1e-6, 0.5), Bernoulli(1, 0.4)]
        order = rescale_wrapper_order(Instance.from_dists(2, dists))
        assert order[0] == 2 and sorted(order) == [0, 1, 2, 3]


class TestHalving:
    def test_two_jobs(self):
        inst = Instance.from_dists(2, [Deterministic(1), Deterministic(2)])
        assert halve_machines_order(inst, {0: 1, 1: 2}) == [0, 1]

    def test_gap_small_first(self):
        inst = gen_free_time_gap_instance(4)
        sizes = {j.id: j.dist.size for j in inst.jobs}
        assert halve_machines_order(inst, sizes)[:4] == [0, 1, 2, 3]

    def test_needs_two_machines(self):
        with pytest.raises(ValueError):
            halve_machines_order(Instance.from_dists(1, [Deterministic(1)]), {0: 1})

    def test_halved_loads(self):
        assert halved_loads(4) == [0, 0, float("inf"), float("inf")]
        assert halved_loads(5)[:2] == [0, 0] and halved_loads(5).count(0) == 2


class TestRegistry:
    def test_names(self):
        assert set(algorithm_names()) >= {
            "spt", "size-order", "random", "sept", "stochfree", "rescale-stochfree", "halve", "bft:size",
        }

    def test_unknown(self):
        with pytest.raises(KeyError):
            resolve_algorithm("fifo")
        with pytest.raises(KeyError):
            resolve_algorithm("bft:nope")

    def test_bft_rule_appends_leftover(self, four):
        alg = resolve_algorithm("bft:size")
        assert alg.order(four, {j: 0.0 for j in range(4)}, 0) == stoch_free_order(four)

    def test_halve_uses_half_machines(self):
        alg = resolve_algorithm("halve")
        assert alg.halves_machines and alg.initial_loads(Instance(4)) == halved_loads(4)

    @pytest.mark.parametrize("name", ["spt", "size-order", "random", "sept", "stochfree", "rescale-stochfree", "halve", "bft:spt", "bft:id"])
    def test_every_algorithm_is_a_permutation(self, name, four):
        real = {0: 10.0, 1: 0.0, 2: 1.0, 3: 1.0}
        assert sorted(resolve_algorithm(name).order(four, real, 3)) == [0, 1, 2, 3]
