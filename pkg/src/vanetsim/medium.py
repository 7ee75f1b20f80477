"""Unit-disk wireless medium with per-node FIFO interface queues."""

from collections import deque
from dataclasses import dataclass

from .engine import US_PER_S, to_us


@dataclass(frozen=True)
class LinkParams:
    range: float = 250.0
    bitrate: float = 2_000_000.0
    ifq_capacity: int = 50
    broadcast_jitter_max: float = 0.010
    loss_prob: float = 0.0

    def __post_init__(self):
        for name in ("range", "bitrate", "ifq_capacity", "broadcast_jitter_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"LinkParams.{name} must be strictly positive")
        if not 0.0 <= self.loss_prob < 1.0:
            raise ValueError("LinkParams.loss_prob must lie in [0, 1)")

    def tx_delay_us(self, size):
        """Serialisation delay of ``size`` bytes, rounded up to whole microseconds."""
        num = size * 8 * US_PER_S
        bps = int(self.bitrate) if float(self.bitrate).is_integer() else None
        if bps is not None:
            return max(1, -(-num // bps))
        return max(1, to_us(size * 8 / self.bitrate))


class Medium:
    """Shared medium.

    ``network`` must provide ``sim`` (the :class:`~vanetsim.engine.Simulator`),
    ``mobility`` (positions), ``trace`` and three callbacks:
    ``receive(node, packet, prev_hop)``, ``link_failed(node, packet, next_hop)``
    and ``ifq_dropped(node, packet)``.

    A packet is sent as soon as the interface is idle; otherwise it waits in
    the node's FIFO queue, which holds at most ``ifq_capacity`` packets.
    Connectivity is sampled when the packet starts transmission.
    """

    def __init__(self, network, params, n_nodes, jitter_rng):
        self.net = network
        self.params = params
        self.rng = jitter_rng
        self.queues = [deque() for _ in range(n_nodes)]
        self.busy_until = [0] * n_nodes
        self.draining = [False] * n_nodes
        self._jitter_us = to_us(params.broadcast_jitter_max)
        self.max_occupancy = 0

    def enqueue(self, node, packet, next_hop):
        """Hand ``packet`` to ``node``'s interface. Returns False if the queue was full."""
        sim = self.net.sim
        q = self.queues[node]
        if not q and not self.draining[node] and self.busy_until[node] <= sim.now:
            self._start(node, packet, next_hop)
            return True
        if len(q) >= self.params.ifq_capacity:
            self.net.ifq_dropped(node, packet)
            return False
        q.append((packet, next_hop))
        if len(q) > self.max_occupancy:
            self.max_occupancy = len(q)
        if not self.draining[node]:
            self.draining[node] = True
            sim.schedule(max(sim.now, self.busy_until[node]), self._drain, node)
        return True

    def _drain(self, node):
        q = self.queues[node]
        packet, next_hop = q.popleft()
        self._start(node, packet, next_hop)
        if q:
            self.net.sim.schedule(self.busy_until[node], self._drain, node)
        else:
            self.draining[node] = False

    def _start(self, node, packet, next_hop):
        sim = self.net.sim
        now = sim.now
        tx = self.params.tx_delay_us(packet.size)
        self.busy_until[node] = now + tx
        self.transmit(node, packet, next_hop, now, tx)

    def transmit(self, sender, packet, next_hop, now, tx):
        """Schedule deliveries for a packet that starts transmission at ``now``."""
        net = self.net
        t = now / US_PER_S
        if next_hop is None:
            receivers = net.mobility.neighbor_list(sender, t, self.params.range)
            if self.params.loss_prob > 0:
                receivers = [r for r in receivers if self.rng.random() >= self.params.loss_prob]
            jitter = to_us(self.rng.uniform(0.0, self.params.broadcast_jitter_max))
            if receivers:
                net.sim.schedule(now + tx + jitter, self._deliver_many, receivers, packet, sender)
            return receivers
        if net.mobility.in_range(sender, next_hop, t, self.params.range) and (
                self.params.loss_prob == 0 or self.rng.random() >= self.params.loss_prob):
            net.sim.schedule(now + tx, net.receive, next_hop, packet, sender)
            return [next_hop]
        net.sim.schedule(now + tx, net.link_failed, sender, packet, next_hop)
        return []

    def _deliver_many(self, receivers, packet, sender):
        # receivers share one read-only packet; agents copy before forwarding
        agents = self.net.routing
        for r in receivers:
            agents[r].recv(packet, sender)
