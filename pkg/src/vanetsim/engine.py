"""Discrete-event engine: integer-microsecond clock, event heap, seeded RNG streams."""

import heapq
import math

import numpy as np

US_PER_S = 1_000_000

RNG_LABELS = ("mobility", "traffic", "jitter", "topology")


def to_us(seconds):
    """Convert seconds to integer microseconds (round half away from zero)."""
    us = math.floor(abs(seconds) * US_PER_S + 0.5)
    return us if seconds >= 0 else -us


def to_seconds(us):
    return us / US_PER_S


class SchedulingError(ValueError):
    """Raised when an event is scheduled before the current clock."""


class Event:
    """A scheduled action. Ordered by ``(fire_at, seq)``."""

    __slots__ = ("fire_at", "seq", "target", "action", "args", "cancelled")

    def __init__(self, fire_at, seq, target, action, args):
        self.fire_at = fire_at
        self.seq = seq
        self.target = target
        self.action = action
        self.args = args
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def __repr__(self):
        return f"Event(fire_at={self.fire_at}, seq={self.seq}, target={self.target})"


class Simulator:
    """Single-threaded event loop.

    Same-time events fire in insertion order. ``now`` only moves forward.
    """

    def __init__(self):
        self.now = 0
        self._heap = []
        self._seq = 0

    def schedule(self, fire_at, action, *args, target=None):
        if fire_at < self.now:
            raise SchedulingError(
                f"cannot schedule at {fire_at} us, clock is already at {self.now} us"
            )
        ev = Event(fire_at, self._seq, target, action, args)
        heapq.heappush(self._heap, (fire_at, self._seq, ev))
        self._seq += 1
        return ev

    def schedule_in(self, delay, action, *args, target=None):
        return self.schedule(self.now + delay, action, *args, target=target)

    def pending(self):
        return sum(1 for _, _, ev in self._heap if not ev.cancelled)

    def run(self, until):
        """Dispatch every event with ``fire_at <= until``; return the dispatch count."""
        if until < self.now:
            raise SchedulingError(f"run(until={until}) is behind the clock ({self.now})")
        heap = self._heap
        pop = heapq.heappop
        count = 0
        while heap and heap[0][0] <= until:
            fire_at, _, ev = pop(heap)
            if ev.cancelled:
                continue
            self.now = fire_at
            ev.action(*ev.args)
            count += 1
        self.now = until
        return count


class RngStream:
    """Named random stream derived from ``(seed, label)``.

    Backed by numpy's PCG64, whose output is identical on every platform.
    ``child(i)`` gives an independent sub-stream, used for per-node draws.
    """

    def __init__(self, seed, label, path=()):
        if label not in RNG_LABELS:
            raise ValueError(f"unknown rng stream label {label!r}")
        self.seed = int(seed)
        self.label = label
        self.path = tuple(path)
        ss = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(RNG_LABELS.index(label), *self.path)
        )
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, index):
        return RngStream(self.seed, self.label, self.path + (int(index),))

    def random(self):
        return float(self._gen.random())

    def uniform(self, lo, hi):
        if lo > hi:
            raise ValueError(f"uniform: lo={lo} > hi={hi}")
        if lo == hi:
            return float(lo)
        v = lo + (hi - lo) * float(self._gen.random())
        # rounding can land exactly on hi
        return v if v < hi else math.nextafter(hi, lo)

    def integers(self, lo, hi):
        """Integer in ``[lo, hi)``."""
        return int(self._gen.integers(lo, hi))

    def choice_pairs(self, n, k):
        """``k`` distinct ordered pairs ``(a, b)`` with ``a != b`` drawn from ``range(n)``."""
        total = n * (n - 1)
        if k > total:
            raise ValueError(f"cannot draw {k} distinct pairs from {n} nodes")
        picks = self._gen.choice(total, size=k, replace=False)
        pairs = []
        for p in picks:
            a, r = divmod(int(p), n - 1)
            b = r if r < a else r + 1
            pairs.append((a, b))
        return pairs
