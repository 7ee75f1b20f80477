"""Machinery shared by the on-demand routing agents: send buffer and discovery timers."""

from collections import deque
from dataclasses import dataclass

from .engine import to_us


@dataclass(frozen=True)
class RoutingParams:
    active_route_timeout: float = 10.0
    rreq_retries: int = 3
    rreq_backoff: float = 1.0
    buffer_cap: int = 64
    rreq_ttl: int = 30
    dsr_cache_reply: bool = True

    def __post_init__(self):
        if self.active_route_timeout <= 0 or self.rreq_backoff <= 0:
            raise ValueError("routing timers must be positive")
        if self.rreq_retries < 0 or self.buffer_cap < 1 or self.rreq_ttl < 1:
            raise ValueError("invalid routing limits")


class RoutingAgent:
    """Base for per-node on-demand routing agents.

    Subclasses implement ``route_to(dest)`` (True if a usable route exists),
    ``forward_originated(pkt)``, ``send_request(dest)`` and ``recv``.
    """

    name = "base"

    def __init__(self, node, net, params):
        self.node = node
        self.net = net
        self.params = params
        self.buffer = deque()
        self.pending = {}  # dest -> [retries_done, timer]
        self.request_id = 0
        self.seen = set()

    # -- plumbing -------------------------------------------------------

    @property
    def now(self):
        return self.net.sim.now

    def unicast(self, pkt, next_hop, event="f"):
        self.net.log(event, self.node, "RTR", pkt)
        self.net.medium.enqueue(self.node, pkt, next_hop)

    def broadcast(self, pkt, event="s"):
        self.net.log(event, self.node, "RTR", pkt)
        self.net.medium.enqueue(self.node, pkt, None)

    def drop(self, pkt):
        self.net.log("D", self.node, "RTR", pkt)

    # -- origination and buffering ---------------------------------------

    def send(self, pkt):
        """Entry point for packets originated by the local transport agent."""
        if self.route_to(pkt.dst):
            self.forward_originated(pkt)
            return
        self.enbuffer(pkt)
        if pkt.dst not in self.pending:
            self.discover(pkt.dst)

    def enbuffer(self, pkt):
        if len(self.buffer) >= self.params.buffer_cap:
            self.drop(self.buffer.popleft())
        self.buffer.append(pkt)

    def discover(self, dest):
        self.pending[dest] = [0, None]
        self._request(dest)

    def _request(self, dest):
        state = self.pending[dest]
        wait = to_us(self.params.rreq_backoff * (2 ** state[0]))
        state[1] = self.net.sim.schedule_in(wait, self._request_timeout, dest)
        self.send_request(dest)

    def _request_timeout(self, dest):
        state = self.pending.get(dest)
        if state is None:
            return
        if self.route_to(dest):
            self.route_found(dest)
            return
        if state[0] >= self.params.rreq_retries:
            del self.pending[dest]
            keep = deque()
            for p in self.buffer:
                if p.dst == dest:
                    self.drop(p)
                else:
                    keep.append(p)
            self.buffer = keep
            return
        state[0] += 1
        self._request(dest)

    def route_found(self, dest):
        """A route to ``dest`` became available: stop the timer and flush."""
        state = self.pending.pop(dest, None)
        if state is not None and state[1] is not None:
            state[1].cancel()
        if not any(p.dst == dest for p in self.buffer):
            return
        ready = [p for p in self.buffer if p.dst == dest]
        self.buffer = deque(p for p in self.buffer if p.dst != dest)
        for p in ready:
            if self.route_to(dest):
                self.forward_originated(p)
            else:
                self.enbuffer(p)
        if any(p.dst == dest for p in self.buffer) and dest not in self.pending:
            self.discover(dest)

    def next_request_id(self):
        self.request_id += 1
        self.seen.add((self.node, self.request_id))
        return self.request_id

    # -- subclass hooks -------------------------------------------------

    def route_to(self, dest):
        raise NotImplementedError

    def forward_originated(self, pkt):
        raise NotImplementedError

    def send_request(self, dest):
        raise NotImplementedError

    def recv(self, pkt, prev_hop):
        raise NotImplementedError

    def link_failed(self, pkt, next_hop):
        raise NotImplementedError
