"""Simulated frames and their protocol headers."""

from itertools import count
from typing import NamedTuple, Optional, Tuple

BROADCAST = -1
ROUTING_PORT = 255
IP_HEADER = 20
DEFAULT_TTL = 32

DATA_TYPES = ("cbr", "tcp")
PACKET_TYPES = ("cbr", "tcp", "ack", "rreq", "rrep", "rerr")


class AodvRreq(NamedTuple):
    originator: int
    orig_seqno: int
    dest: int
    dest_seqno: int  # -1 when unknown
    hop_count: int
    request_id: int


class AodvRrep(NamedTuple):
    originator: int
    dest: int
    dest_seqno: int
    hop_count: int


class AodvRerr(NamedTuple):
    unreachable: Tuple[Tuple[int, int], ...]  # (dest, dest_seqno)


class DsrRreq(NamedTuple):
    originator: int
    target: int
    request_id: int


class DsrRrep(NamedTuple):
    route: Tuple[int, ...]  # originator ... target


class DsrRerr(NamedTuple):
    broken: Tuple[int, int]
    notify: int  # source of the packet that hit the break


class TcpAck(NamedTuple):
    ackno: int  # next expected segment


_uids = count()


def reset_uids():
    global _uids
    _uids = count()


class Packet:
    """A frame in flight.

    ``ptype`` is the trace type (cbr, tcp, ack, rreq, rrep, rerr). Data and
    ack packets carry a flow ``(src, dst, sport, dport)``; control packets
    use the routing port and ``dst = BROADCAST`` when flooded.
    """

    __slots__ = ("uid", "src", "dst", "sport", "dport", "seqno", "ptype", "size",
                 "payload_size", "ttl", "source_route", "rreq_record", "header",
                 "created_at", "hops")

    def __init__(self, src, dst, sport, dport, seqno, ptype, size, ttl=DEFAULT_TTL,
                 header=None, source_route: Optional[tuple] = None,
                 rreq_record: Optional[tuple] = None, created_at=0, uid=None):
        if size <= 0:
            raise ValueError("packet size must be positive")
        self.uid = next(_uids) if uid is None else uid
        self.src = src
        self.dst = dst
        self.sport = sport
        self.dport = dport
        self.seqno = seqno
        self.ptype = ptype
        self.size = size
        self.payload_size = size
        self.ttl = ttl
        self.header = header
        self.source_route = source_route
        self.rreq_record = rreq_record
        self.created_at = created_at
        self.hops = 0

    @property
    def is_data(self):
        return self.ptype in DATA_TYPES

    @property
    def is_transport(self):
        """Data or ack: routed end to end rather than hop-scoped control."""
        return self.ptype in DATA_TYPES or self.ptype == "ack"

    @property
    def flow(self):
        return (self.src, self.dst, self.sport, self.dport)

    def copy(self):
        p = Packet.__new__(Packet)
        p.uid = self.uid
        p.src = self.src
        p.dst = self.dst
        p.sport = self.sport
        p.dport = self.dport
        p.seqno = self.seqno
        p.ptype = self.ptype
        p.size = self.size
        p.payload_size = self.payload_size
        p.ttl = self.ttl
        p.header = self.header
        p.source_route = self.source_route
        p.rreq_record = self.rreq_record
        p.created_at = self.created_at
        p.hops = self.hops
        return p

    def __repr__(self):
        return (f"Packet(uid={self.uid}, {self.ptype} {self.src}:{self.sport}->"
                f"{self.dst}:{self.dport} seq={self.seqno} size={self.size} ttl={self.ttl})")
