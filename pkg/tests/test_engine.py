import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanetsim.engine import RngStream, SchedulingError, Simulator, to_seconds, to_us


def test_same_time_events_fire_in_insertion_order():
    sim = Simulator()
    fired = []
    for tag in "abc":
        sim.schedule(5, fired.append, tag)
    sim.schedule(1, fired.append, "first")
    assert sim.run(10) == 4
    assert fired == ["first", "a", "b", "c"]
    assert sim.now == 10


@given(st.lists(st.integers(0, 1000), max_size=60))
def test_dispatch_order_matches_stable_sort(times):
    sim = Simulator()
    fired = []
    for i, t in enumerate(times):
        sim.schedule(t, lambda i=i: fired.append((sim.now, i)))
    sim.run(1000)
    assert fired == sorted(((t, i) for i, t in enumerate(times)))


def test_cancelled_event_does_not_fire():
    sim = Simulator()
    fired = []
    ev = sim.schedule(3, fired.append, 1)
    sim.schedule(4, fired.append, 2)
    ev.cancel()
    assert sim.pending() == 1
    sim.run(10)
    assert fired == [2]


def test_scheduling_in_the_past_is_rejected():
    sim = Simulator()
    sim.run(100)
    with pytest.raises(SchedulingError):
        sim.schedule(99, print)
    with pytest.raises(SchedulingError):
        sim.run(50)


def test_run_stops_at_horizon_and_resumes():
    sim = Simulator()
    fired = []
    sim.schedule(10, fired.append, "x")
    sim.schedule(11, fired.append, "y")
    sim.run(10)
    assert fired == ["x"] and sim.pending() == 1
    sim.run(11)
    assert fired == ["x", "y"]


def test_events_scheduled_during_dispatch_at_now_still_fire():
    sim = Simulator()
    fired = []
    sim.schedule(5, lambda: sim.schedule_in(0, fired.append, "child"))
    sim.run(5)
    assert fired == ["child"]


def test_time_conversion():
    assert to_us(0.25) == 250_000
    assert to_us(1.0000005) == 1_000_001
    assert to_us(-0.0000015) == -2
    assert to_seconds(1_500_000) == 1.5


def test_rng_streams_are_reproducible_and_independent():
    a = [RngStream(7, "mobility").random() for _ in range(2)]
    assert a[0] == a[1]
    assert RngStream(7, "mobility").random() != RngStream(7, "traffic").random()
    assert RngStream(7, "mobility").child(1).random() != RngStream(7, "mobility").child(2).random()
    assert RngStream(7, "mobility").random() != RngStream(8, "mobility").random()
    with pytest.raises(ValueError):
        RngStream(0, "bogus")


@settings(max_examples=50)
@given(st.floats(-1e6, 1e6), st.floats(0, 1e6))
def test_uniform_stays_half_open(lo, width):
    r = RngStream(1, "jitter")
    hi = lo + width
    v = r.uniform(lo, hi)
    assert v == lo if lo == hi else lo <= v < hi


def test_uniform_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        RngStream(0, "jitter").uniform(2, 1)


def test_choice_pairs_distinct_and_valid():
    pairs = RngStream(3, "traffic").choice_pairs(5, 20)
    assert len(set(pairs)) == 20
    assert all(a != b and 0 <= a < 5 and 0 <= b < 5 for a, b in pairs)
    with pytest.raises(ValueError):
        RngStream(3, "traffic").choice_pairs(3, 7)
