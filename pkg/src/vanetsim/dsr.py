"""Dynamic Source Routing agent and its multi-path route cache."""

from .packet import (BROADCAST, IP_HEADER, ROUTING_PORT, DsrRerr, DsrRrep, DsrRreq,
                     Packet)
from .routing import RoutingAgent

DSR_PER_HOP = 4
RREQ_BASE = 32
RREP_BASE = 32
RERR_SIZE = 40


def source_routed_size(payload, route):
    """Wire size of a source-routed packet: payload + IP + DSR option."""
    return payload + IP_HEADER + DSR_PER_HOP * len(route)


class DsrRouteCache:
    """Paths from ``owner`` to other nodes; several per destination may coexist.

    Adding a path also caches each of its prefixes, so ``[A, B, C]`` gives
    routes to both B and C. Lookups return the shortest path, breaking ties
    by the most recently learned one.
    """

    def __init__(self, owner):
        self.owner = owner
        self.paths = {}  # dest -> {path: learned_at}

    def add(self, path, now):
        path = tuple(path)
        if len(path) < 2 or path[0] != self.owner or len(set(path)) != len(path):
            return False
        for i in range(1, len(path)):
            self.paths.setdefault(path[i], {})[path[: i + 1]] = now
        return True

    def find(self, dest):
        entries = self.paths.get(dest)
        if not entries:
            return None
        return min(entries.items(), key=lambda kv: (len(kv[0]), -kv[1]))[0]

    def remove_link(self, a, b):
        """Drop every path that uses the hop ``a -> b``. Returns how many went."""
        removed = 0
        for dest in list(self.paths):
            entries = self.paths[dest]
            dead = [p for p in entries if _uses_link(p, a, b)]
            for p in dead:
                del entries[p]
            removed += len(dead)
            if not entries:
                del self.paths[dest]
        return removed

    def all_paths(self):
        return [p for entries in self.paths.values() for p in entries]

    def __len__(self):
        return sum(len(v) for v in self.paths.values())


def _uses_link(path, a, b):
    for i in range(len(path) - 1):
        if path[i] == a and path[i + 1] == b:
            return True
    return False


class DsrAgent(RoutingAgent):
    """One DSR agent per node.

    Discovery floods an RREQ that accumulates the nodes it crossed; the
    target (or a node holding a cached continuation) returns the full path
    in an RREP along the reversed record. Data then carries the complete
    route in its header. A broken hop is reported back to the packet source
    with an RERR; there is no salvaging at intermediate nodes.
    """

    name = "dsr"

    def __init__(self, node, net, params):
        super().__init__(node, net, params)
        self.cache = DsrRouteCache(node)

    def route_to(self, dest):
        return self.cache.find(dest) is not None

    def forward_originated(self, pkt):
        route = self.cache.find(pkt.dst)
        pkt.source_route = route
        pkt.size = source_routed_size(pkt.payload_size, route)
        self.unicast(pkt, route[1], "s")

    def send_request(self, dest):
        rid = self.next_request_id()
        record = (self.node,)
        pkt = Packet(self.node, BROADCAST, ROUTING_PORT, ROUTING_PORT, rid, "rreq",
                     RREQ_BASE + DSR_PER_HOP * len(record), ttl=self.params.rreq_ttl,
                     header=DsrRreq(self.node, dest, rid), rreq_record=record,
                     created_at=self.now)
        self.broadcast(pkt, "s")

    def recv(self, pkt, prev_hop):
        self.net.log("r", self.node, "RTR", pkt)
        if pkt.ptype == "rreq":
            self.handle_rreq(pkt, prev_hop)
        else:
            self.forward_source_routed(pkt)

    def handle_rreq(self, pkt, prev_hop):
        h = pkt.header
        record = pkt.rreq_record
        key = (h.originator, h.request_id)
        if self.node in record or key in self.seen:
            return
        self.seen.add(key)
        full = record + (self.node,)
        self.cache.add(full[::-1], self.now)
        if h.target == self.node:
            self._send_rrep(full)
            return
        if self.params.dsr_cache_reply:
            tail = self.cache.find(h.target)
            if tail is not None:
                route = full + tail[1:]
                if len(set(route)) == len(route):
                    self._send_rrep(route, back=full[::-1])
                    return
        if pkt.ttl <= 1:
            return
        fwd = pkt.copy()
        fwd.ttl -= 1
        fwd.hops += 1
        fwd.rreq_record = full
        fwd.size = RREQ_BASE + DSR_PER_HOP * len(full)
        self.broadcast(fwd, "f")

    def _send_rrep(self, route, back=None):
        back = route[::-1] if back is None else back
        pkt = Packet(self.node, route[0], ROUTING_PORT, ROUTING_PORT, 0, "rrep",
                     RREP_BASE + DSR_PER_HOP * len(route), header=DsrRrep(tuple(route)),
                     source_route=tuple(back), created_at=self.now)
        self.unicast(pkt, back[1], "s")

    def forward_source_routed(self, pkt):
        route = pkt.source_route
        idx = route.index(self.node)
        kind = pkt.ptype
        if kind == "rrep":
            found = pkt.header.route
            j = found.index(self.node)
            self.cache.add(found[j:], self.now)
        elif kind == "rerr":
            self.cache.remove_link(*pkt.header.broken)
        if idx == len(route) - 1:
            if kind == "rrep":
                target = pkt.header.route[-1]
                if self.route_to(target):
                    self.route_found(target)
            elif kind != "rerr":
                self.net.deliver_local(self.node, pkt)
            return
        pkt.ttl -= 1
        if pkt.ttl <= 0:
            self.drop(pkt)
            return
        pkt.hops += 1
        self.unicast(pkt, route[idx + 1], "f")

    def link_failed(self, pkt, next_hop):
        self.handle_link_break((self.node, next_hop), pkt)

    def handle_link_break(self, broken, pkt):
        """Purge paths over ``broken`` and tell the packet's source about it."""
        self.cache.remove_link(*broken)
        if not pkt.is_transport:
            self.drop(pkt)
            return
        if pkt.src == self.node:
            pkt.source_route = None
            self.send(pkt)
            return
        self.drop(pkt)
        route = pkt.source_route
        back = route[: route.index(self.node) + 1][::-1]
        if len(back) < 2:
            return
        err = Packet(self.node, pkt.src, ROUTING_PORT, ROUTING_PORT, 0, "rerr", RERR_SIZE,
                     header=DsrRerr(tuple(broken), pkt.src), source_route=back,
                     created_at=self.now)
        self.unicast(err, back[1], "s")
