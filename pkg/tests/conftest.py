import random
from collections import deque

import pytest

from vanetsim.config import ScenarioConfig
from vanetsim.engine import RngStream, to_us
from vanetsim.mobility import RandomWaypoint
from vanetsim.scenario import Network
from vanetsim.trace import TraceRecord
from vanetsim.traffic import FlowSpec


def static_mobility(points, width=1000.0, height=1000.0, horizon=10.0):
    return RandomWaypoint(len(points), width, height, 0.0, 0.0, horizon,
                          RngStream(0, "mobility"), initial=points)


def static_network(points, protocol="aodv", flows=(), sim_time=10.0, **overrides):
    """A network whose nodes sit still at ``points``."""
    cfg = ScenarioConfig(protocol=protocol, nodes=len(points), v_max=0.0,
                         sim_time=sim_time, area=(1000.0, 1000.0), connections=1,
                         flow_start_max=0.0, **overrides)
    mob = static_mobility(points, horizon=sim_time)
    return Network(cfg, flows=list(flows), mobility=mob)


def cbr_flow(src, dst, port=0, start=0.0, stop=10.0, interval=0.25, size=512):
    return FlowSpec(src, dst, port, port, "cbr", to_us(start), to_us(stop),
                    cbr_size=size, cbr_interval=interval)


def chain(n, spacing=200.0):
    """Nodes on a line, each only in range of its neighbours (range 250)."""
    return [(50.0 + i * spacing, 500.0) for i in range(n)]


def bfs(adj, src):
    dist = {src: 0}
    q = deque([src])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def unit_disk(points, radio_range=250.0):
    r2 = radio_range * radio_range
    adj = {i: set() for i in range(len(points))}
    for i, (xi, yi) in enumerate(points):
        for j, (xj, yj) in enumerate(points):
            if i != j and (xi - xj) ** 2 + (yi - yj) ** 2 <= r2:
                adj[i].add(j)
    return adj


def random_trace(rng, max_records=200, data_type="cbr"):
    """Synthetic time-ordered trace: packets of a few flows are sent, relayed,
    received or dropped, mixed with control and other-type noise. Flows may
    share seqnos and a flow may reuse one."""
    n = rng.randint(1, max_records)
    flows = [(rng.randrange(8), rng.randrange(4), rng.randrange(8), rng.randrange(4))
             for _ in range(rng.randint(1, 4))]
    events = []  # (time, order, record fields)
    order = 0
    while len(events) < n:
        src, sport, dst, dport = rng.choice(flows)
        ptype = rng.choice((data_type, data_type, data_type, "ack", "rreq"))
        seq = rng.randrange(15)
        size = rng.randint(1, 1500)
        t0 = rng.randrange(10**9)
        events.append((t0, order, ("s", src, "AGT", seq, ptype, size, src, sport, dst, dport)))
        order += 1
        t = t0
        for _ in range(rng.randrange(3)):
            t += rng.choice((0, 1, 999, 250_000))
            events.append((t, order, ("f", rng.randrange(8), "RTR", seq, ptype, size + 20,
                                      src, sport, dst, dport)))
            order += 1
        fate = rng.random()
        t += rng.choice((0, 1, 7, 1_000_000, 33_333_333))
        if fate < 0.6:
            events.append((t, order, ("r", dst, "AGT", seq, ptype, size, src, sport, dst, dport)))
        elif fate < 0.8:
            layer = rng.choice(("RTR", "MAC"))
            events.append((t, order, ("D", rng.randrange(8), layer, seq, ptype, size,
                                      src, sport, dst, dport)))
        order += 1
    events.sort(key=lambda e: (e[0], e[1]))
    return [TraceRecord(f[0], t, f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9])
            for t, _, f in events[:n]]


@pytest.fixture
def pyrng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
