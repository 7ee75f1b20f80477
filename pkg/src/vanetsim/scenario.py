"""Wiring a full network from a :class:`ScenarioConfig` and running it."""

import os
from dataclasses import dataclass

from .analysis import MetricsReport, NoTrafficError, compute_metrics
from .aodv import AodvAgent
from .config import ScenarioConfig
from .dsr import DsrAgent
from .engine import RngStream, Simulator, to_us
from .medium import LinkParams, Medium
from .mobility import RandomWaypoint, cluster_placement
from .routing import RoutingParams
from .trace import TraceWriter
from .traffic import CbrSink, CbrSource, FlowSpec, TcpParams, TcpSender, TcpSink

AGENTS = {"aodv": AodvAgent, "dsr": DsrAgent}


def make_flows(cfg, rng):
    """Random distinct (src, dst) pairs with starts spread over ``[0, flow_start_max]``."""
    pairs = rng.choice_pairs(cfg.nodes, cfg.connections)
    stop = to_us(cfg.sim_time)
    flows = []
    for i, (a, b) in enumerate(pairs):
        start = to_us(rng.uniform(0.0, cfg.flow_start_max))
        flows.append(FlowSpec(a, b, i, i, cfg.traffic, start, stop,
                              cbr_size=cfg.cbr_size, cbr_interval=cfg.cbr_interval))
    return flows


def build_mobility(cfg):
    """Motion depends only on seed, node count, arena, speed, pause and placement."""
    initial = None
    if cfg.cluster > 0:
        initial = cluster_placement(cfg.nodes, cfg.area[0], cfg.area[1], cfg.cluster,
                                    RngStream(cfg.seed, "topology"))
    return RandomWaypoint(cfg.nodes, cfg.area[0], cfg.area[1], cfg.v_max, cfg.pause,
                          cfg.sim_time, RngStream(cfg.seed, "mobility"),
                          initial=initial, v_min=cfg.v_min)


class Network:
    """Everything one run needs: clock, motion, medium, agents and the trace."""

    def __init__(self, cfg, flows=None, mobility=None):
        self.cfg = cfg
        self.sim = Simulator()
        self.trace = TraceWriter()
        self.mobility = mobility if mobility is not None else build_mobility(cfg)
        self.link = LinkParams(cfg.range, cfg.bitrate, cfg.ifq_capacity, cfg.jitter_max,
                               cfg.loss_prob)
        self.medium = Medium(self, self.link, cfg.nodes, RngStream(cfg.seed, "jitter"))
        self.routing_params = RoutingParams(cfg.active_route_timeout, cfg.rreq_retries,
                                            cfg.rreq_backoff, cfg.buffer_cap, cfg.rreq_ttl,
                                            cfg.dsr_cache_reply)
        agent = AGENTS[cfg.protocol]
        self.routing = [agent(i, self, self.routing_params) for i in range(cfg.nodes)]
        self.tcp_params = TcpParams(segment_size=cfg.tcp_segment, window=cfg.tcp_window,
                                    app_interval=cfg.tcp_interval)
        if flows is None:
            flows = make_flows(cfg, RngStream(cfg.seed, "traffic"))
        self.flows = flows
        self.sources = []
        self.sinks = []
        self._endpoints = {}
        for f in flows:
            self.add_flow(f)

    def add_flow(self, f):
        if f.kind == "cbr":
            src, sink = CbrSource(self, f), CbrSink(self, f)
        else:
            src, sink = TcpSender(self, f, self.tcp_params), TcpSink(self, f)
            self._endpoints[(f.src, f.src_port)] = lambda pkt, s=src: s.on_ack(pkt.seqno)
        self._endpoints[(f.dst, f.dst_port)] = sink.recv
        self.sources.append(src)
        self.sinks.append(sink)
        return src, sink

    # callbacks used by the medium and the agents

    def log(self, event, node, layer, pkt):
        self.trace.log(event, self.sim.now, node, layer, pkt)

    def receive(self, node, pkt, prev_hop):
        self.routing[node].recv(pkt, prev_hop)

    def link_failed(self, node, pkt, next_hop):
        self.routing[node].link_failed(pkt, next_hop)

    def ifq_dropped(self, node, pkt):
        self.log("D", node, "MAC", pkt)

    def deliver_local(self, node, pkt):
        handler = self._endpoints.get((node, pkt.dport))
        if handler is None:
            self.log("D", node, "RTR", pkt)
            return
        handler(pkt)

    def run(self, until=None):
        for s in self.sources:
            s.start()
        end = to_us(self.cfg.sim_time if until is None else until)
        return self.sim.run(end)


@dataclass
class RunResult:
    config: ScenarioConfig
    report: MetricsReport
    trace_path: str
    network: Network

    @property
    def trace_text(self):
        return self.network.trace.text()


def run_scenario(cfg, out_dir=None, trace_path=None, keep_network=True):
    """Simulate ``cfg``, write its trace and compute delivery metrics.

    The trace lands in ``trace_path`` or ``<out_dir>/<scenario_id>.tr``; with
    neither given nothing is written. Raises :class:`NoTrafficError` if the
    run sent no application packets.
    """
    net = Network(cfg)
    net.run()
    if trace_path is None and out_dir is not None:
        trace_path = os.path.join(out_dir, f"{cfg.scenario_id}.tr")
    if trace_path is not None:
        parent = os.path.dirname(trace_path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        net.trace.write(trace_path)
    try:
        report = compute_metrics(net.trace.records("AGT"), cfg.traffic)
    except NoTrafficError as exc:
        raise NoTrafficError(f"{cfg.scenario_id}: {exc}") from None
    return RunResult(cfg, report, trace_path, net if keep_network else None)
