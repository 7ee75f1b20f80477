"""Application and transport agents: CBR over datagrams and a Tahoe-style reliable transport."""

import math
from dataclasses import dataclass, field

from .engine import to_us
from .packet import Packet

ACK_SIZE = 40


@dataclass(frozen=True)
class FlowSpec:
    src: int
    dst: int
    src_port: int
    dst_port: int
    kind: str  # "cbr" | "tcp"
    start_at: int  # us
    stop_at: int  # us
    cbr_size: int = 512
    cbr_interval: float = 0.25

    def __post_init__(self):
        if self.kind not in ("cbr", "tcp"):
            raise ValueError(f"unknown flow kind {self.kind!r}")
        if self.src == self.dst:
            raise ValueError("flow endpoints must differ")
        if not 0 <= self.start_at < self.stop_at:
            raise ValueError("flow must satisfy 0 <= start_at < stop_at")
        if self.cbr_size <= 0 or self.cbr_interval <= 0:
            raise ValueError("cbr size and interval must be positive")


@dataclass(frozen=True)
class TcpParams:
    segment_size: int = 1040
    initial_cwnd: float = 1.0
    initial_ssthresh: float = 32.0
    initial_rto: float = 3.0
    min_rto: float = 1.0
    max_rto: float = 64.0
    max_retries: int = 12
    window: int = 20
    # seconds between segments offered by the application; 0 = bulk transfer
    app_interval: float = 0.25


class CbrSource:
    """Fixed-size packets at a fixed interval; nothing is ever acknowledged."""

    def __init__(self, net, flow):
        self.net = net
        self.flow = flow
        self.seqno = 0
        self._interval = to_us(flow.cbr_interval)

    def start(self):
        self.net.sim.schedule(self.flow.start_at, self.emit)

    def emit(self):
        """Send the next packet and schedule the one after it (if before stop)."""
        f = self.flow
        now = self.net.sim.now
        if now >= f.stop_at:
            return None
        pkt = Packet(f.src, f.dst, f.src_port, f.dst_port, self.seqno, "cbr", f.cbr_size,
                     created_at=now)
        self.seqno += 1
        self.net.log("s", f.src, "AGT", pkt)
        self.net.routing[f.src].send(pkt)
        nxt = f.start_at + self.seqno * self._interval
        if nxt < f.stop_at:
            self.net.sim.schedule(nxt, self.emit)
        return pkt


class CbrSink:
    def __init__(self, net, flow):
        self.net = net
        self.flow = flow
        self.received = []

    def recv(self, pkt):
        self.received.append(pkt.seqno)
        self.net.log("r", self.flow.dst, "AGT", pkt)


@dataclass
class ReliableState:
    cwnd: float
    ssthresh: float
    rto: float
    next_seq: int = 0
    highest_acked: int = -1
    srtt: float = None
    rttvar: float = None
    max_sent: int = -1
    dupacks: int = 0
    timeouts: int = 0
    unacked: dict = field(default_factory=dict)  # seq -> last send time (us)

    @property
    def una(self):
        return self.highest_acked + 1

    @property
    def in_flight(self):
        return self.next_seq - self.una


class TcpSender:
    """Reliable transport sender with slow start, congestion avoidance and
    timeout-only recovery (Tahoe without fast retransmit).

    Sequence numbers count segments. The AGT ``s`` record is written once
    per segment, at its first transmission; retransmissions only show up at
    the routing layer.
    """

    def __init__(self, net, flow, params=TcpParams()):
        self.net = net
        self.flow = flow
        self.params = params
        self.state = ReliableState(cwnd=params.initial_cwnd,
                                   ssthresh=params.initial_ssthresh,
                                   rto=params.initial_rto)
        self.retransmitted = set()
        self.retries = {}
        self.available = math.inf if params.app_interval <= 0 else 0
        self.aborted = False
        self._timer = None
        self._app_us = to_us(params.app_interval) if params.app_interval > 0 else 0
        self.cwnd_history = [self.state.cwnd]

    @property
    def active(self):
        return not self.aborted and self.net.sim.now < self.flow.stop_at

    def start(self):
        if self._app_us:
            self.net.sim.schedule(self.flow.start_at, self._app_tick)
        else:
            self.net.sim.schedule(self.flow.start_at, self.send_window)

    def _app_tick(self):
        if not self.active:
            return
        self.available += 1
        self.send_window()
        nxt = self.flow.start_at + self.available * self._app_us
        if nxt < self.flow.stop_at:
            self.net.sim.schedule(nxt, self._app_tick)

    def send_window(self):
        """Send as many segments as the congestion window and the application allow."""
        st = self.state
        sent = []
        if not self.active:
            return sent
        limit = min(int(st.cwnd), self.params.window)
        while st.in_flight < limit and st.next_seq < self.available:
            sent.append(self._transmit(st.next_seq))
            st.next_seq += 1
        if st.in_flight and self._timer is None:
            self._arm_timer()
        return sent

    def _transmit(self, seq):
        st = self.state
        f = self.flow
        now = self.net.sim.now
        pkt = Packet(f.src, f.dst, f.src_port, f.dst_port, seq, "tcp",
                     self.params.segment_size, created_at=now)
        if seq > st.max_sent:
            st.max_sent = seq
            self.net.log("s", f.src, "AGT", pkt)
        else:
            self.retransmitted.add(seq)
        st.unacked[seq] = now
        self.net.routing[f.src].send(pkt)
        return pkt

    def _arm_timer(self):
        if self._timer is not None:
            self._timer.cancel()
        self._timer = self.net.sim.schedule_in(to_us(self.state.rto), self.on_timeout)

    def _stop_timer(self):
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None

    def on_ack(self, ackno):
        st = self.state
        if self.aborted:
            return
        if ackno - 1 <= st.highest_acked:
            st.dupacks += 1
            return
        now = self.net.sim.now
        seg = ackno - 1
        if seg not in self.retransmitted and seg in st.unacked:
            self._rtt_sample((now - st.unacked[seg]) / 1e6)
        for s in range(st.una, ackno):
            st.unacked.pop(s, None)
            self.retries.pop(s, None)
        st.highest_acked = seg
        st.dupacks = 0
        if st.next_seq < st.una:
            st.next_seq = st.una
        if st.cwnd < st.ssthresh:
            st.cwnd += 1.0
        else:
            st.cwnd += 1.0 / st.cwnd
        self.cwnd_history.append(st.cwnd)
        self._stop_timer()
        self.send_window()
        if st.in_flight and self._timer is None:
            self._arm_timer()

    def _rtt_sample(self, r):
        st = self.state
        if st.srtt is None:
            st.srtt = r
            st.rttvar = r / 2.0
        else:
            st.rttvar = 0.75 * st.rttvar + 0.25 * abs(st.srtt - r)
            st.srtt = 0.875 * st.srtt + 0.125 * r
        st.rto = min(self.params.max_rto, max(self.params.min_rto, st.srtt + 4.0 * st.rttvar))

    def on_timeout(self):
        self._timer = None
        st = self.state
        if not self.active or st.in_flight == 0:
            return
        seq = st.una
        self.retries[seq] = self.retries.get(seq, 0) + 1
        if self.retries[seq] > self.params.max_retries:
            self.aborted = True
            return
        st.timeouts += 1
        st.ssthresh = max(st.cwnd / 2.0, 2.0)
        st.cwnd = 1.0
        st.rto = min(st.rto * 2.0, self.params.max_rto)
        self.cwnd_history.append(st.cwnd)
        for s in range(st.una, st.next_seq):
            st.unacked.pop(s, None)
        st.next_seq = st.una
        self.send_window()
        self._arm_timer()


class TcpSink:
    """In-order receiver: accepts only the next expected segment, acks cumulatively."""

    def __init__(self, net, flow):
        self.net = net
        self.flow = flow
        self.rcv_nxt = 0
        self.delivered = []

    def recv(self, pkt):
        f = self.flow
        if pkt.seqno == self.rcv_nxt:
            self.rcv_nxt += 1
            self.delivered.append(pkt.seqno)
            self.net.log("r", f.dst, "AGT", pkt)
        ack = Packet(f.dst, f.src, f.dst_port, f.src_port, self.rcv_nxt, "ack", ACK_SIZE,
                     created_at=self.net.sim.now)
        self.net.routing[f.dst].send(ack)
