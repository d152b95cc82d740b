import io
import math

import pytest

from stochsched.job_model import Deterministic, Instance, gen_free_time_gap_instance
from stochsched.list_engine import (
    checkpoint_weights,
    final_free_time,
    free_time_after,
    makespan,
    run_list_schedule,
    total_completion,
    weighted_free_time,
    write_free_times_csv,
    write_trace_csv,
)

from reference import simulate


def det(m, sizes):
    inst = Instance.from_dists(m, [Deterministic(s) for s in sizes])
    return inst, {i: float(s) for i, s in enumerate(sizes)}


@pytest.fixture
def hand():
    inst, sizes = det(2, [2, 3, 1])
    return run_list_schedule(inst, sizes, [0, 1, 2])


def test_hand_trace(hand):
    assert [sj.machine for sj in hand.jobs] == [0, 1, 0]
    assert [sj.start for sj in hand.jobs] == [0, 0, 2]
    assert [sj.completion for sj in hand.jobs] == [2, 3, 3]
    assert list(hand.free_times) == [0, 0, 2, 3]


def test_hand_metrics(hand):
    assert total_completion(hand) == 8
    assert free_time_after(hand, 0) == 0
    assert free_time_after(hand, 2) == 2
    assert free_time_after(hand, 3) == min(hand.final)
    assert makespan(hand) == 3


def test_free_time_index_range(hand):
    with pytest.raises(IndexError):
        free_time_after(hand, 4)
    with pytest.raises(IndexError):
        free_time_after(hand, -1)


def test_empty_order():
    inst, sizes = det(2, [])
    tr = run_list_schedule(inst, sizes, [], [4, 7])
    assert tr.free_times == (4,) and not tr.jobs
    assert total_completion(tr) == 0
    assert makespan(tr) == 7


def test_single_job_on_loads():
    inst, sizes = det(3, [2.5])
    tr = run_list_schedule(inst, sizes, [0], [4, 1, 3])
    assert total_completion(tr) == 3.5 and tr.jobs[0].machine == 1


def test_one_job_makespan():
    inst, sizes = det(2, [6])
    assert makespan(run_list_schedule(inst, sizes, [0])) == 6


def test_gap_big_first():
    inst = gen_free_time_gap_instance(3)
    sizes = {j.id: j.dist.size for j in inst.jobs}
    assert run_list_schedule(inst, sizes, [3, 4, 0, 1, 2]).free_times[-1] == 3


def test_tie_breaks_to_lowest_index():
    inst, sizes = det(3, [1, 1, 1])
    tr = run_list_schedule(inst, sizes, [0, 1, 2], [5, 2, 2])
    assert [sj.machine for sj in tr.jobs] == [1, 2, 1]


def test_removed_machine_is_never_used():
    inst, sizes = det(3, [1, 2, 3, 4])
    tr = run_list_schedule(inst, sizes, [0, 1, 2, 3], [0, math.inf, 0])
    assert all(sj.machine != 1 for sj in tr.jobs)
    assert makespan(tr) == 6


def test_all_removed():
    inst, sizes = det(1, [1])
    with pytest.raises(ValueError):
        run_list_schedule(inst, sizes, [0], [math.inf])


def test_bad_inputs():
    inst, sizes = det(2, [1, 2])
    with pytest.raises(KeyError):
        run_list_schedule(inst, sizes, [0, 5])
    with pytest.raises(KeyError):
        run_list_schedule(inst, {0: 1.0}, [0, 1])
    with pytest.raises(ValueError):
        run_list_schedule(inst, sizes, [0, 0])
    with pytest.raises(ValueError):
        run_list_schedule(inst, sizes, [0, 1], [0.0])


def test_partial_order_allowed():
    inst, sizes = det(2, [1, 2, 3])
    tr = run_list_schedule(inst, sizes, [2])
    assert len(tr.jobs) == 1 and tr.free_times == (0, 0)


class TestWeighted:
    def test_chain_m1(self):
        inst, sizes = det(1, [1, 1, 1, 1])
        tr = run_list_schedule(inst, sizes, range(4))
        assert weighted_free_time(tr, 4) == 2 * 2 + 1 * 3

    def test_n1(self):
        inst, sizes = det(1, [9])
        assert weighted_free_time(run_list_schedule(inst, sizes, [0]), 1) == 0

    def test_n2(self):
        inst, sizes = det(2, [5, 5])
        assert weighted_free_time(run_list_schedule(inst, sizes, [0, 1]), 2) == 0

    def test_weights(self):
        assert checkpoint_weights(1) == [(1, 0)]
        assert checkpoint_weights(4) == [(2, 2), (1, 3)]
        assert checkpoint_weights(5) == [(3, 2), (2, 3), (1, 4)]

    def test_mismatch(self):
        inst, sizes = det(1, [1, 1])
        tr = run_list_schedule(inst, sizes, [0, 1])
        with pytest.raises(ValueError):
            weighted_free_time(tr, 3)
        with pytest.raises(ValueError):
            weighted_free_time(tr, 0)


def test_fast_path_matches_reference():
    sizes = [3.0, 0.5, 2.0, 2.0, 7.0, 1.0]
    for m in (1, 2, 3):
        _, free, _ = simulate(sizes, m)
        assert final_free_time(sizes, [0.0] * m) == free[-1]


def test_csv_writers(hand):
    buf = io.StringIO()
    write_trace_csv(hand, buf)
    assert buf.getvalue().splitlines() == [
        "job_id,machine,start,completion,size",
        "0,0,0.0,2.0,2.0",
        "1,1,0.0,3.0,3.0",
        "2,0,2.0,3.0,1.0",
    ]
    buf = io.StringIO()
    write_free_times_csv(hand, buf)
    assert buf.getvalue().splitlines()[1:] == ["0,0.0", "1,0.0", "2,2.0", "3,3.0"]
