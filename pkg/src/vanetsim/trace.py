"""Line-oriented trace format.

One record per line::

    <event> <sec.9dp> _<node>_ <layer> --- <seqno> <type> <size> [<src>:<sport> <dst>:<dport>]

Whitespace-split field positions line up with the classic awk accesses:
``$1`` event, ``$2`` time, ``$4`` layer, ``$6`` seqno, ``$7`` type.
Times are integer nanoseconds in memory.
"""

import gzip
import re
from dataclasses import dataclass

from .packet import PACKET_TYPES

EVENTS = ("s", "r", "D", "f")
LAYERS = ("AGT", "RTR", "MAC")
NS_PER_US = 1000
NS_PER_S = 1_000_000_000

_ENDPOINT_RE = re.compile(r"(-1|\d+):(\d+)")


class TraceParseError(ValueError):
    def __init__(self, lineno, field, message):
        self.lineno = lineno
        self.field = field
        where = f"line {lineno}" if lineno is not None else "trace line"
        super().__init__(f"{where}: {field}: {message}")


@dataclass(frozen=True)
class TraceRecord:
    event: str
    time: int  # nanoseconds
    node: int
    layer: str
    seqno: int
    pkt_type: str
    size: int
    src: int
    sport: int
    dst: int
    dport: int

    @property
    def flow(self):
        return (self.src, self.sport, self.dst, self.dport)

    @property
    def seconds(self):
        return self.time / NS_PER_S


def format_time(ns):
    s, frac = divmod(ns, NS_PER_S)
    return f"{s}.{frac:09d}"


def emit(rec):
    return (f"{rec.event} {format_time(rec.time)} _{rec.node}_ {rec.layer} --- "
            f"{rec.seqno} {rec.pkt_type} {rec.size} "
            f"[{rec.src}:{rec.sport} {rec.dst}:{rec.dport}]")


def format_line(event, t_us, node, layer, pkt):
    """Hot-path formatter used by the simulator; identical output to :func:`emit`."""
    s, frac = divmod(t_us, 1_000_000)
    return (f"{event} {s}.{frac:06d}000 _{node}_ {layer} --- {pkt.seqno} {pkt.ptype} "
            f"{pkt.size} [{pkt.src}:{pkt.sport} {pkt.dst}:{pkt.dport}]")


_FIELDS = ("event", "time", "node", "layer", "separator", "seqno", "type", "size",
           "flow source", "flow destination")


def _uint(tok):
    return tok.isascii() and tok.isdigit()


def parse(line, lineno=None):
    tokens = line.rstrip("\n").split(" ")
    if len(tokens) != len(_FIELDS) or "" in tokens:
        if len(tokens) < len(_FIELDS) and "" not in tokens:
            raise TraceParseError(lineno, _FIELDS[len(tokens)],
                                  f"missing field (got {len(tokens)} of {len(_FIELDS)})")
        raise TraceParseError(lineno, "line",
                              f"expected {len(_FIELDS)} single-space separated fields")
    ev, tm, nd, layer, sep, seq, ptype, size, fsrc, fdst = tokens
    if ev not in EVENTS:
        raise TraceParseError(lineno, "event", f"unknown event {ev!r}")
    whole, dot, frac = tm.partition(".")
    if not (dot and _uint(whole) and len(frac) == 9 and _uint(frac)):
        raise TraceParseError(lineno, "time", f"bad time {tm!r}")
    if not (len(nd) > 2 and nd[0] == "_" and nd[-1] == "_" and _uint(nd[1:-1])):
        raise TraceParseError(lineno, "node", f"bad node {nd!r}")
    if layer not in LAYERS:
        raise TraceParseError(lineno, "layer", f"unknown layer {layer!r}")
    if sep != "---":
        raise TraceParseError(lineno, "separator", f"expected '---', got {sep!r}")
    if not _uint(seq):
        raise TraceParseError(lineno, "seqno", f"bad seqno {seq!r}")
    if ptype not in PACKET_TYPES:
        raise TraceParseError(lineno, "type", f"unknown packet type {ptype!r}")
    if not _uint(size) or int(size) == 0:
        raise TraceParseError(lineno, "size", f"bad size {size!r}")
    if not fsrc.startswith("["):
        raise TraceParseError(lineno, "flow source", f"expected '[', got {fsrc!r}")
    ms = _ENDPOINT_RE.fullmatch(fsrc[1:])
    if not ms:
        raise TraceParseError(lineno, "flow source", f"bad endpoint {fsrc!r}")
    if not fdst.endswith("]"):
        raise TraceParseError(lineno, "flow destination", f"expected ']', got {fdst!r}")
    md = _ENDPOINT_RE.fullmatch(fdst[:-1])
    if not md:
        raise TraceParseError(lineno, "flow destination", f"bad endpoint {fdst!r}")
    return TraceRecord(ev, int(whole) * NS_PER_S + int(frac), int(nd[1:-1]), layer,
                       int(seq), ptype, int(size), int(ms.group(1)), int(ms.group(2)),
                       int(md.group(1)), int(md.group(2)))


def parse_lines(lines):
    """Parse an iterable of lines; errors carry 1-based line numbers."""
    records = []
    last = -1
    for i, line in enumerate(lines, 1):
        rec = parse(line, i)
        if rec.time < last:
            raise TraceParseError(i, "time", "trace time went backwards")
        last = rec.time
        records.append(rec)
    return records


def read_trace(path):
    """Parse a trace file (``.gz`` files are decompressed transparently)."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return parse_lines(lines)


class TraceWriter:
    """Collects trace lines in memory; ``write`` saves them with LF endings."""

    def __init__(self):
        self.lines = []
        # A broadcast is logged once per receiver at the same instant, so the
        # time text and the packet tail are usually the same as last call.
        # Only ``size`` is ever changed on a packet after it is created.
        self._t_us = None
        self._t_text = ""
        self._pkt = None
        self._size = None
        self._tail = ""

    def log(self, event, t_us, node, layer, pkt):
        if t_us != self._t_us:
            s, frac = divmod(t_us, 1_000_000)
            self._t_us = t_us
            self._t_text = f"{s}.{frac:06d}000"
        if pkt is not self._pkt or pkt.size != self._size:
            self._pkt = pkt
            self._size = pkt.size
            self._tail = (f" --- {pkt.seqno} {pkt.ptype} {pkt.size} "
                          f"[{pkt.src}:{pkt.sport} {pkt.dst}:{pkt.dport}]")
        self.lines.append(f"{event} {self._t_text} _{node}_ {layer}{self._tail}")

    def text(self):
        return "".join(line + "\n" for line in self.lines)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.text())

    def records(self, layer=None):
        """Parsed records, optionally only those of one layer."""
        if layer is None:
            return [parse(line, i) for i, line in enumerate(self.lines, 1)]
        tag = f" {layer} ---"
        return [parse(line, i) for i, line in enumerate(self.lines, 1) if tag in line]
