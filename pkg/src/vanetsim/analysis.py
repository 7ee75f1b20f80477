"""Delivery metrics from trace records, band classification and decision tables."""

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

NS_PER_MS = 1_000_000


class NoTrafficError(ValueError):
    """The trace holds no sent packets of the requested type."""


@dataclass(frozen=True)
class MetricsReport:
    n_sent: int
    n_received: int
    pdr: float
    lpr: float
    avg_e2e_ms: float
    delay_count: int
    total_delay_ns: int

    @classmethod
    def from_counts(cls, n_sent, n_received, total_delay_ns=0, delay_count=0):
        if n_sent <= 0:
            raise NoTrafficError("no traffic: zero packets sent")
        if not 0 <= n_received <= n_sent:
            raise ValueError(f"received count {n_received} outside [0, {n_sent}]")
        pdr = n_received / n_sent * 100
        # the complement keeps pdr + lpr == 100 exact in floating point
        lpr = 100.0 - pdr
        avg_e2e_ms = total_delay_ns / delay_count / NS_PER_MS if delay_count else math.nan
        return cls(n_sent, n_received, pdr, lpr, avg_e2e_ms, delay_count, total_delay_ns)


def compute_metrics(records, data_type):
    """PDR, LPR and mean end-to-end delay for packets of ``data_type``.

    Counts application-layer sends and receives. Delay pairs the first
    send and first receive of each ``(flow, seqno)``; only packets that were
    actually received contribute.
    """
    n_sent = n_received = 0
    start = {}
    end = {}
    for r in records:
        if r.layer != "AGT" or r.pkt_type != data_type:
            continue
        key = (r.src, r.sport, r.dst, r.dport, r.seqno)
        if r.event == "s":
            n_sent += 1
            start.setdefault(key, r.time)
        elif r.event == "r":
            n_received += 1
            end.setdefault(key, r.time)
    total = 0
    count = 0
    for key, t_end in end.items():
        t0 = start.get(key)
        if t0 is not None:
            total += t_end - t0
            count += 1
    return MetricsReport.from_counts(n_sent, n_received, total, count)


def compute_metrics_script_compat(records, data_type):
    """Metrics computed the way the classic pair of awk scripts does it.

    Quirks kept on purpose: sends and receives are counted at the AGT layer
    regardless of packet type; delay tables are indexed by seqno alone, so
    flows sharing a seqno overwrite each other; the end time comes from any
    ``r`` record of ``data_type`` at any layer (last write wins) and a
    matching ``D`` record marks the packet lost. Non-positive delays are
    counted in the denominator but not summed.
    """
    n_sent = n_received = 0
    seqno = -1
    start = {}
    end = {}
    for r in records:
        agt = r.layer == "AGT"
        if agt and r.event == "s":
            n_sent += 1
        if agt and r.event == "r":
            n_received += 1
        if agt and r.event == "s" and seqno < r.seqno:
            seqno = r.seqno
        if agt and r.event == "s":
            start[r.seqno] = r.time
        elif r.pkt_type == data_type and r.event == "r":
            end[r.seqno] = r.time
        elif r.event == "D" and r.pkt_type == data_type:
            end[r.seqno] = -1
    count = 0
    total = 0
    for x in range(0, seqno + 1):
        t_end = end.get(x, 0)
        if t_end > 0:
            d = t_end - start.get(x, 0)
            count += 1
            if d > 0:
                total += d
    return MetricsReport.from_counts(n_sent, n_received, total, count)


# -- classification -----------------------------------------------------------

class Band(str, Enum):
    HIGH = "High"
    AVERAGE = "Average"
    LOW = "Low"

    @property
    def short(self):
        return "Avg" if self is Band.AVERAGE else self.value


SWEEP_KINDS = ("pause", "speed")
METRICS = ("PDR", "E2E", "LPR")

# (high threshold, high inclusive, average threshold) per metric and sweep.
# Anything below the average threshold is Low.
THRESHOLDS = {
    ("PDR", "pause"): (98.0, True, 96.0),
    ("PDR", "speed"): (98.0, True, 96.0),
    ("E2E", "pause"): (351.0, True, 151.0),
    ("E2E", "speed"): (150.0, True, 51.0),
    ("LPR", "pause"): (2.0, False, 1.0),
    ("LPR", "speed"): (3.0, False, 1.5),
}


def band_for(metric, sweep_kind, value):
    if sweep_kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {sweep_kind!r}")
    if math.isnan(value):
        raise ValueError(f"{metric} is undefined (no packet received)")
    high, inclusive, avg = THRESHOLDS[(metric, sweep_kind)]
    if value > high or (inclusive and value == high):
        return Band.HIGH
    if value >= avg:
        return Band.AVERAGE
    return Band.LOW


def classify(report, sweep_kind):
    return {
        "PDR": band_for("PDR", sweep_kind, report.pdr),
        "E2E": band_for("E2E", sweep_kind, report.avg_e2e_ms),
        "LPR": band_for("LPR", sweep_kind, report.lpr),
    }


# -- decision tables ----------------------------------------------------------

MOBILITY_LABELS = {30: "low", 90: "average", 150: "high"}


def mobility_label(nodes):
    """Density label used in table titles: 30 low, 90 average, 150 high."""
    if nodes in MOBILITY_LABELS:
        return MOBILITY_LABELS[nodes]
    if nodes < 60:
        return "low"
    return "high" if nodes >= 120 else "average"


@dataclass(frozen=True)
class DecisionCell:
    protocol: str  # "AODV" | "DSR"
    traffic: str  # "TCP" | "CBR"
    metric: str  # "PDR" | "E2E" | "LPR"
    band: Band


@dataclass(frozen=True)
class Regime:
    mobility: str  # "low" | "high"
    axis: str  # "pause" | "speed"
    level: str  # "low" | "high"

    @property
    def title(self):
        what = "PAUSE TIME" if self.axis == "pause" else "SPEED TIME"
        return (f"PDR, E-2-E AND LPR WITH RESPECT TO {self.mobility.upper()} MOBILITY & "
                f"{self.level.upper()} {what} FOR TCP & CBR CONNECTIONS")

    @property
    def key(self):
        return f"{self.mobility}-mobility/{self.axis}-{self.level}"


REGIMES = tuple(Regime(m, a, lv) for m in ("low", "high") for a in ("pause", "speed")
                for lv in ("low", "high"))
TABLE_PROTOCOLS = ("AODV", "DSR")
TABLE_TRAFFIC = ("TCP", "CBR")


class IncompleteTableError(ValueError):
    def __init__(self, missing):
        self.missing = missing
        names = ", ".join(f"({p}, {t}, {m})" for p, t, m in missing)
        super().__init__(f"decision table incomplete, missing cells: {names}")


@dataclass(frozen=True)
class DecisionTable:
    number: int
    regime: Regime
    rows: tuple  # ((protocol, (band x 6)), ...)

    def render(self):
        head = f"TABLE-{self.number}: {self.regime.title}"
        cols = ["Protocols", "PDR TCP", "PDR CBR", "E2E TCP", "E2E CBR", "LPR TCP", "LPR CBR"]
        body = [[p] + [b.short for b in bands] for p, bands in self.rows]
        widths = [max(len(r[i]) for r in [cols] + body) for i in range(len(cols))]
        lines = [head]
        for r in [cols] + body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines)

    def csv_rows(self):
        return [[self.number, self.regime.key, p] + [b.value for b in bands]
                for p, bands in self.rows]


def build_decision_table(cells, regime, number=None):
    """Arrange 12 classified cells as two protocol rows by six metric columns."""
    lookup = {}
    for c in cells:
        lookup[(c.protocol, c.traffic, c.metric)] = c.band
    missing = [(p, t, m) for p in TABLE_PROTOCOLS for m in METRICS for t in TABLE_TRAFFIC
               if (p, t, m) not in lookup]
    if missing:
        raise IncompleteTableError(missing)
    rows = tuple(
        (p, tuple(lookup[(p, t, m)] for m in METRICS for t in TABLE_TRAFFIC))
        for p in TABLE_PROTOCOLS
    )
    if number is None:
        number = REGIMES.index(regime) + 2
    return DecisionTable(number, regime, rows)


def render_tables(tables):
    return "\n\n".join(t.render() for t in tables) + "\n"


def tables_csv(tables):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "regime", "protocol", "pdr_tcp", "pdr_cbr", "e2e_tcp", "e2e_cbr",
                "lpr_tcp", "lpr_cbr"])
    for t in tables:
        w.writerows(t.csv_rows())
    return buf.getvalue()
