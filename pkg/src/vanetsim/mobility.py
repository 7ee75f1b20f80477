"""Random waypoint mobility inside a rectangular arena."""

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

V_MIN = 0.1


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass(frozen=True)
class MotionLeg:
    """One move: depart ``origin`` at ``depart_at`` (seconds), travel to
    ``destination`` at ``speed``, then stay put for ``pause`` seconds."""

    node: int
    origin: Position
    destination: Position
    speed: float
    depart_at: float
    pause: float

    @property
    def arrive_at(self):
        dx = self.destination.x - self.origin.x
        dy = self.destination.y - self.origin.y
        return self.depart_at + float(np.hypot(dx, dy)) / self.speed


class RandomWaypoint:
    """Precomputed random-waypoint trajectories for ``n_nodes`` nodes.

    Each node is placed, waits an initial pause drawn from ``[0, pause]``,
    then repeatedly picks a uniform destination and a speed in
    ``[v_min, v_max]`` and pauses ``pause`` seconds on arrival. With
    ``v_max == 0`` the nodes never move.

    Trajectories are piecewise linear; ``knots[i]`` holds ``(t, x, y)``
    breakpoints for node ``i``.
    """

    def __init__(self, n_nodes, width, height, v_max, pause, horizon,
                 rng, initial=None, v_min=V_MIN):
        if v_max > 0 and v_min > v_max:
            v_min = v_max
        self.n = n_nodes
        self.width = float(width)
        self.height = float(height)
        self.v_min = float(v_min)
        self.v_max = float(v_max)
        self.pause = float(pause)
        self.horizon = float(horizon)
        self.legs = [[] for _ in range(n_nodes)]
        self._t = []
        self._x = []
        self._y = []
        for node in range(n_nodes):
            node_rng = rng.child(node)
            if initial is None:
                x0 = node_rng.uniform(0.0, self.width)
                y0 = node_rng.uniform(0.0, self.height)
            else:
                x0, y0 = initial[node]
            self._build(node, x0, y0, node_rng)
        self._setup_cursor()

    def _build(self, node, x0, y0, rng):
        ts, xs, ys = [0.0], [x0], [y0]
        if self.v_max <= 0:
            self._t.append(ts), self._x.append(xs), self._y.append(ys)
            return
        now = rng.uniform(0.0, self.pause)
        here = Position(x0, y0)
        while now < self.horizon:
            ts.append(now), xs.append(here.x), ys.append(here.y)
            leg = self.next_leg(node, here, now, rng)
            self.legs[node].append(leg)
            arrive = leg.arrive_at
            ts.append(arrive), xs.append(leg.destination.x), ys.append(leg.destination.y)
            here = leg.destination
            now = arrive + leg.pause
        self._t.append(ts), self._x.append(xs), self._y.append(ys)

    def next_leg(self, node, origin, now, rng):
        dest = Position(rng.uniform(0.0, self.width), rng.uniform(0.0, self.height))
        speed = rng.uniform(self.v_min, self.v_max) if self.v_min < self.v_max else self.v_max
        return MotionLeg(node, origin, dest, speed, now, self.pause)

    def position_at(self, node, t):
        """Position of ``node`` at ``t`` seconds."""
        ts, xs, ys = self._t[node], self._x[node], self._y[node]
        k = bisect_right(ts, t) - 1
        if k < 0:
            return Position(xs[0], ys[0])
        if k >= len(ts) - 1:
            return Position(xs[-1], ys[-1])
        t0, t1 = ts[k], ts[k + 1]
        if t1 <= t0:
            return Position(xs[k + 1], ys[k + 1])
        f = (t - t0) / (t1 - t0)
        return Position(xs[k] + f * (xs[k + 1] - xs[k]), ys[k] + f * (ys[k + 1] - ys[k]))

    # Vectorised snapshot for the medium. Queries arrive in non-decreasing
    # time order during a run, so each node keeps a cursor into its knots.

    def _setup_cursor(self):
        n = self.n
        self._cur = np.zeros(n, dtype=np.int64)
        self._seg = np.zeros((6, n))  # t0, t1, x0, y0, x1, y1
        for i in range(n):
            self._load_segment(i, 0)
        self._snap_t = None
        self._snap = None

    def _load_segment(self, i, k):
        ts, xs, ys = self._t[i], self._x[i], self._y[i]
        last = len(ts) - 1
        if k >= last:
            self._seg[:, i] = (ts[last], np.inf, xs[last], ys[last], xs[last], ys[last])
            k = last
        else:
            self._seg[:, i] = (ts[k], ts[k + 1], xs[k], ys[k], xs[k + 1], ys[k + 1])
        self._cur[i] = k

    def positions(self, t):
        """``(n, 2)`` array of all node positions at ``t`` seconds."""
        if self._snap_t == t:
            return self._snap
        if self._snap_t is not None and t < self._snap_t:
            self._setup_cursor()
        seg = self._seg
        for i in np.nonzero(seg[1] < t)[0]:
            k = bisect_right(self._t[i], t) - 1
            self._load_segment(i, k)
        t0, t1, x0, y0, x1, y1 = seg
        span = t1 - t0
        with np.errstate(invalid="ignore", divide="ignore"):
            f = np.where(np.isfinite(t1) & (span > 0), (t - t0) / span, 0.0)
        np.clip(f, 0.0, 1.0, out=f)
        pos = np.empty((self.n, 2))
        pos[:, 0] = x0 + f * (x1 - x0)
        pos[:, 1] = y0 + f * (y1 - y0)
        self._snap_t = t
        self._snap = pos
        return pos

    def neighbors(self, node, t, radio_range):
        """Other nodes within ``radio_range`` of ``node`` at ``t`` (inclusive)."""
        return set(self.neighbor_list(node, t, radio_range))

    def neighbor_list(self, node, t, radio_range):
        if radio_range <= 0:
            raise ValueError("range must be positive")
        pos = self.positions(t)
        d = pos - pos[node]
        d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]
        mask = d2 <= radio_range * radio_range
        mask[node] = False
        return np.flatnonzero(mask).tolist()

    def distance(self, a, b, t):
        pos = self.positions(t)
        return float(np.hypot(*(pos[a] - pos[b])))

    def in_range(self, a, b, t, radio_range):
        # two scalar lookups are far cheaper than a full snapshot
        if self._snap_t == t:
            pa, pb = self._snap[a], self._snap[b]
            dx, dy = pa[0] - pb[0], pa[1] - pb[1]
        else:
            pa, pb = self.position_at(a, t), self.position_at(b, t)
            dx, dy = pa.x - pb.x, pa.y - pb.y
        return dx * dx + dy * dy <= radio_range * radio_range

    def export_schedule(self):
        """Text motion schedule: one line per leg."""
        lines = []
        for node in range(self.n):
            lines.append(
                f"node {node} start {self._x[node][0]!r} {self._y[node][0]!r}"
            )
            for leg in self.legs[node]:
                lines.append(
                    f"{node} {leg.depart_at!r} {leg.destination.x!r} "
                    f"{leg.destination.y!r} {leg.speed!r} {leg.pause!r}"
                )
        return "\n".join(lines) + "\n"


def cluster_placement(n_nodes, width, height, diameter, rng):
    """Uniform placement inside a disk of ``diameter`` centred in the arena."""
    cx, cy = width / 2.0, height / 2.0
    r = diameter / 2.0
    pts = []
    for _ in range(n_nodes):
        while True:
            x = rng.uniform(-r, r)
            y = rng.uniform(-r, r)
            if x * x + y * y <= r * r:
                break
        pts.append((cx + x, cy + y))
    return pts
