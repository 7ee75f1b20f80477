"""Ad-hoc On-demand Distance Vector routing agent."""

from dataclasses import dataclass, field

from .engine import to_us
from .packet import (BROADCAST, IP_HEADER, ROUTING_PORT, AodvRerr, AodvRrep,
                     AodvRreq, Packet)
from .routing import RoutingAgent

RREQ_SIZE = 48
RREP_SIZE = 44
RERR_BASE = 12
RERR_PER_DEST = 8


@dataclass
class AodvRouteEntry:
    dest: int
    next_hop: int
    hop_count: int
    dest_seqno: int
    expires_at: int
    valid: bool = True
    precursors: set = field(default_factory=set)


class AodvAgent(RoutingAgent):
    """One AODV agent per node.

    Routes are discovered with an RREQ flood answered by an RREP travelling
    back along the reverse path. Each node keeps at most one entry per
    destination; freshness is decided by destination sequence numbers, then
    by hop count. A failed unicast invalidates every route through the lost
    neighbour and an RERR is broadcast to the upstream precursors.
    """

    name = "aodv"

    def __init__(self, node, net, params):
        super().__init__(node, net, params)
        self.seqno = 0
        self.table = {}
        self._art = to_us(params.active_route_timeout)
        # (dest, old_seqno, new_seqno) for every change; for invariant checks
        self.seqno_history = []

    # -- route table ------------------------------------------------------

    def lookup(self, dest):
        """Valid, unexpired entry for ``dest`` or None."""
        e = self.table.get(dest)
        if e is None or not e.valid:
            return None
        if e.expires_at <= self.now:
            e.valid = False
            return None
        return e

    def route_to(self, dest):
        return self.lookup(dest) is not None

    def _refresh(self, e):
        t = self.now + self._art
        if t > e.expires_at:
            e.expires_at = t

    def _set_seqno(self, e, seqno):
        if seqno != e.dest_seqno:
            self.seqno_history.append((e.dest, e.dest_seqno, seqno))
            e.dest_seqno = seqno

    def update_route(self, dest, next_hop, hop_count, seqno):
        """Install or replace the entry for ``dest`` if the offer is fresher.

        Fresher means a larger sequence number, or an equal one with fewer
        hops (or replacing a dead entry). Returns True when the table changed.
        """
        e = self.table.get(dest)
        if e is None:
            self.table[dest] = AodvRouteEntry(dest, next_hop, hop_count, seqno,
                                              self.now + self._art)
            self.seqno_history.append((dest, None, seqno))
            return True
        live = e.valid and e.expires_at > self.now
        if seqno > e.dest_seqno or (seqno == e.dest_seqno and (hop_count < e.hop_count or not live)):
            e.next_hop = next_hop
            e.hop_count = hop_count
            self._set_seqno(e, seqno)
            e.valid = True
            e.expires_at = self.now + self._art
            return True
        return False

    def _update_reverse(self, dest, next_hop, hop_count, seqno):
        # a fresh RREQ always (re)points the reverse route; seqno never goes back
        e = self.table.get(dest)
        if e is None:
            self.update_route(dest, next_hop, hop_count, seqno)
            return
        e.next_hop = next_hop
        e.hop_count = hop_count
        self._set_seqno(e, max(e.dest_seqno, seqno))
        e.valid = True
        self._refresh(e)

    # -- origination ------------------------------------------------------

    def forward_originated(self, pkt):
        e = self.lookup(pkt.dst)
        self._refresh(e)
        pkt.size = pkt.payload_size + IP_HEADER
        self.unicast(pkt, e.next_hop, "s")

    def send_request(self, dest):
        self.seqno += 1
        rid = self.next_request_id()
        known = self.table.get(dest)
        hdr = AodvRreq(self.node, self.seqno, dest,
                       known.dest_seqno if known is not None else -1, 0, rid)
        pkt = Packet(self.node, BROADCAST, ROUTING_PORT, ROUTING_PORT, rid, "rreq",
                     RREQ_SIZE, ttl=self.params.rreq_ttl, header=hdr,
                     created_at=self.now)
        self.broadcast(pkt, "s")

    # -- reception --------------------------------------------------------

    def recv(self, pkt, prev_hop):
        self.net.log("r", self.node, "RTR", pkt)
        kind = pkt.ptype
        if kind == "rreq":
            self.handle_rreq(pkt, prev_hop)
        elif kind == "rrep":
            self.handle_rrep(pkt, prev_hop)
        elif kind == "rerr":
            self.handle_rerr(pkt, prev_hop)
        else:
            self.handle_data(pkt, prev_hop)

    def handle_data(self, pkt, prev_hop):
        back = self.lookup(pkt.src)
        if back is not None:
            self._refresh(back)
        if pkt.dst == self.node:
            self.net.deliver_local(self.node, pkt)
            return
        e = self.lookup(pkt.dst)
        if e is None:
            self.drop(pkt)
            stale = self.table.get(pkt.dst)
            seq = stale.dest_seqno if stale is not None else -1
            self._send_rerr(((pkt.dst, seq),))
            return
        pkt.ttl -= 1
        if pkt.ttl <= 0:
            self.drop(pkt)
            return
        pkt.hops += 1
        e.precursors.add(prev_hop)
        self._refresh(e)
        self.unicast(pkt, e.next_hop, "f")

    def handle_rreq(self, pkt, prev_hop):
        h = pkt.header
        key = (h.originator, h.request_id)
        if key in self.seen:
            return
        self.seen.add(key)
        self._update_reverse(h.originator, prev_hop, h.hop_count + 1, h.orig_seqno)
        if h.dest == self.node:
            self.seqno = max(self.seqno, h.dest_seqno) + 1
            self._send_rrep(AodvRrep(h.originator, self.node, self.seqno, 0), prev_hop)
            return
        e = self.lookup(h.dest)
        if e is not None and e.dest_seqno >= h.dest_seqno and e.next_hop != prev_hop:
            e.precursors.add(prev_hop)
            rev = self.table[h.originator]
            rev.precursors.add(e.next_hop)
            self._send_rrep(AodvRrep(h.originator, h.dest, e.dest_seqno, e.hop_count), prev_hop)
            return
        if pkt.ttl <= 1:
            return
        stale = self.table.get(h.dest)
        dseq = h.dest_seqno if stale is None else max(h.dest_seqno, stale.dest_seqno)
        fwd = pkt.copy()
        fwd.ttl -= 1
        fwd.hops += 1
        fwd.header = h._replace(hop_count=h.hop_count + 1, dest_seqno=dseq)
        self.broadcast(fwd, "f")

    def _send_rrep(self, hdr, next_hop):
        pkt = Packet(self.node, hdr.originator, ROUTING_PORT, ROUTING_PORT, hdr.dest_seqno,
                     "rrep", RREP_SIZE, header=hdr, created_at=self.now)
        self.unicast(pkt, next_hop, "s")

    def handle_rrep(self, pkt, prev_hop):
        h = pkt.header
        updated = self.update_route(h.dest, prev_hop, h.hop_count + 1, h.dest_seqno)
        if h.originator == self.node:
            if self.route_to(h.dest):
                self.route_found(h.dest)
            return
        if not updated:
            return
        rev = self.lookup(h.originator)
        if rev is None:
            self.drop(pkt)
            return
        self.table[h.dest].precursors.add(rev.next_hop)
        rev.precursors.add(prev_hop)
        self._refresh(rev)
        fwd = pkt.copy()
        fwd.hops += 1
        fwd.header = h._replace(hop_count=h.hop_count + 1)
        self.unicast(fwd, rev.next_hop, "f")

    def handle_rerr(self, pkt, prev_hop):
        lost = []
        notify = set()
        for dest, seq in pkt.header.unreachable:
            e = self.table.get(dest)
            if e is None or not e.valid or e.next_hop != prev_hop:
                continue
            e.valid = False
            self._set_seqno(e, max(e.dest_seqno, seq))
            lost.append((dest, e.dest_seqno))
            notify |= e.precursors
        if lost and notify - {prev_hop}:
            self._send_rerr(tuple(lost))

    # -- maintenance ------------------------------------------------------

    def link_failed(self, pkt, next_hop):
        self.on_link_break(next_hop)
        if pkt.is_transport and pkt.src == self.node:
            self.send(pkt)
        else:
            self.drop(pkt)

    def on_link_break(self, next_hop):
        """Invalidate every route through ``next_hop``; RERR the precursors."""
        lost = []
        notify = set()
        for e in self.table.values():
            if e.valid and e.next_hop == next_hop:
                e.valid = False
                self._set_seqno(e, e.dest_seqno + 1)
                lost.append((e.dest, e.dest_seqno))
                notify |= e.precursors
        if lost and notify:
            self._send_rerr(tuple(lost))
        return lost

    def _send_rerr(self, unreachable):
        pkt = Packet(self.node, BROADCAST, ROUTING_PORT, ROUTING_PORT, 0, "rerr",
                     RERR_BASE + RERR_PER_DEST * len(unreachable), ttl=1,
                     header=AodvRerr(tuple(unreachable)), created_at=self.now)
        self.broadcast(pkt, "s")
