import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lastmile.lifecycle import (
    IllegalTransition,
    Orientation,
    Package,
    Stage,
    age_packages,
    reschedule_failed,
    resolve_delivery_attempt,
    reverse_orientation,
    sample_pickups,
    stage_counts,
)


def staged(pid=0, day=1, intent=False, centroid=0):
    p = Package(pid, dest=10 + pid, arrival_day=day, pickup_intent=intent)
    p.stage_at(centroid, day)
    return p


def out_for_delivery(pid=0):
    p = staged(pid)
    p.load(van=0, day=3)
    return p


class TestAging:
    def test_first_day_not_due(self):
        p = staged(day=1)
        assert age_packages([p], 2) == []
        assert p.residence_days == 1

    def test_third_day_due(self):
        p = staged(day=1)
        p.residence_days = 1
        assert age_packages([p], 3) == [p]
        assert p.residence_days == 2

    def test_staged_today_not_aged(self):
        p = staged(day=4)
        assert age_packages([p], 4) == []
        assert p.residence_days == 0

    @pytest.mark.parametrize("d", [1, 5, 17])
    def test_cohort_due_two_days_after_arrival(self, d):
        cohort = [staged(i, day=d, intent=bool(i % 3 == 0)) for i in range(30)]
        due_on = {}
        for day in range(d, d + 6):
            sample_pickups(cohort, day, np.random.default_rng(day))
            for p in age_packages(cohort, day):
                due_on.setdefault(p.id, day)
            for p in cohort:
                if p.id in due_on and p.stage is Stage.AT_CENTROID:
                    p.load(0, day)
                    p.stage = Stage.DELIVERED
        survivors = [p for p in cohort if p.stage is not Stage.PICKED_UP]
        assert survivors
        assert {due_on[p.id] for p in survivors} == {d + 2}
        assert all(p.residence_days <= 2 for p in cohort)

    def test_clock_saturates(self):
        p = staged(day=1)
        for day in range(2, 8):
            age_packages([p], day)
        assert p.residence_days == 2


class TestPickups:
    def test_no_intent_never_picked(self):
        pk = [staged(i, intent=False) for i in range(50)]
        for day in (1, 2, 3):
            assert sample_pickups(pk, day, 3) == []

    def test_window_split_is_even(self):
        pk = [staged(i, day=1, intent=True) for i in range(10_000)]
        first = sample_pickups(pk, 1, 99)
        second = sample_pickups(pk, 2, 99)
        assert len(first) + len(second) == 10_000
        assert 0.47 <= len(first) / 10_000 <= 0.53
        assert 0.47 <= len(second) / 10_000 <= 0.53

    def test_deterministic(self):
        a = [staged(i, intent=True) for i in range(100)]
        b = [staged(i, intent=True) for i in range(100)]
        assert [p.id for p in sample_pickups(a, 1, 5)] == [p.id for p in sample_pickups(b, 1, 5)]

    def test_picked_never_due(self):
        pk = [staged(i, day=1, intent=True) for i in range(40)]
        sample_pickups(pk, 1, 1)
        age_packages(pk, 2)
        sample_pickups(pk, 2, 1)
        assert all(p.stage is Stage.PICKED_UP for p in pk)
        assert age_packages(pk, 3) == []

    def test_terminal_absorbing(self):
        p = staged(intent=True)
        p.pick_up(1)
        with pytest.raises(IllegalTransition):
            p.load(0, 2)
        with pytest.raises(IllegalTransition):
            p.pick_up(2)


class TestDeliveryAttempt:
    def test_certain_success(self):
        rng = np.random.default_rng(0)
        for i in range(50):
            p = out_for_delivery(i)
            out = resolve_delivery_attempt(p, 1.0, [0], 0, rng, 3)
            assert out.success and p.stage is Stage.DELIVERED

    def test_failure_mid_tour_goes_to_next(self):
        p = out_for_delivery()
        out = resolve_delivery_attempt(p, 0.0, [1, 2, 3], 1, np.random.default_rng(0), 3)
        assert not out.success
        assert out.unloaded_at == 3 and p.location == 3
        assert p.stage is Stage.ROLLED_OVER and p.rolled_from == 2
        assert p.residence_days == 0

    def test_failure_at_last_centroid_stays(self):
        p = out_for_delivery()
        resolve_delivery_attempt(p, 0.0, [1, 2, 3], 2, np.random.default_rng(0), 3)
        assert p.location == 3

    def test_requires_out_for_delivery(self):
        with pytest.raises(IllegalTransition):
            resolve_delivery_attempt(staged(), 1.0, [0], 0, np.random.default_rng(0), 1)

    def test_rolled_package_keeps_home(self):
        p = out_for_delivery()
        p.home_centroid = 1
        resolve_delivery_attempt(p, 0.0, [1, 2], 0, np.random.default_rng(0), 3)
        assert p.home_centroid == 1 and p.location == 2


class TestReschedule:
    def test_none(self):
        assert reschedule_failed([], 4) == set()

    def test_one_rollover(self):
        p = out_for_delivery(7)
        resolve_delivery_attempt(p, 0.0, [0, 1], 0, np.random.default_rng(0), 4)
        assert reschedule_failed([p], 4) == {7}
        assert p.due_override == 5

    def test_only_rolled(self):
        with pytest.raises(IllegalTransition):
            reschedule_failed([staged()], 1)


def test_orientation_alternates():
    assert reverse_orientation(Orientation.FORWARD) is Orientation.REVERSED
    assert reverse_orientation(Orientation.REVERSED) is Orientation.FORWARD


def test_stage_counts_buckets():
    a = staged(0)
    b = out_for_delivery(1)
    resolve_delivery_attempt(b, 0.0, [0], 0, np.random.default_rng(0), 3)
    c = Package(2, 5, 1, False)
    counts = stage_counts([a, b, c])
    assert counts == {"AtDC": 1, "AtCentroid": 2, "OutForDelivery": 0, "Delivered": 0, "PickedUp": 0}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40), st.floats(0.0, 1.0))
def test_random_lifecycle_conserves(seed, n, q):
    rng = np.random.default_rng(seed)
    pk = [Package(i, i, 1, bool(rng.random() < 0.3)) for i in range(n)]
    for day in range(1, 8):
        for p in pk:
            if p.stage is Stage.AT_DC and rng.random() < 0.7:
                p.stage_at(int(rng.integers(3)), day)
        sample_pickups(pk, day, seed)
        due = age_packages(pk, day)
        due += [p for p in pk if p.stage is Stage.ROLLED_OVER and p.due_override == day]
        failed = []
        for p in due:
            p.load(0, day)
            out = resolve_delivery_attempt(p, q, [0, 1, 2], int(rng.integers(3)), rng, day)
            if not out.success:
                failed.append(p)
        reschedule_failed(failed, day)
        counts = stage_counts(pk)
        assert sum(counts.values()) == n
        assert counts["OutForDelivery"] == 0
        assert all(p.residence_days <= 2 for p in pk)
