import gzip

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vanetsim.packet import PACKET_TYPES, Packet
from vanetsim.trace import (EVENTS, LAYERS, TraceParseError, TraceRecord, TraceWriter, emit,
                            format_line, parse, parse_lines, read_trace)

nat = st.integers(0, 10**6)
records = st.builds(
    TraceRecord, st.sampled_from(EVENTS), st.integers(0, 10**13), nat, st.sampled_from(LAYERS),
    nat, st.sampled_from(PACKET_TYPES), st.integers(1, 10**5),
    st.one_of(st.just(-1), nat), nat, st.one_of(st.just(-1), nat), nat)


@given(records)
def test_parse_emit_roundtrip(rec):
    line = emit(rec)
    assert parse(line) == rec
    assert emit(parse(line)) == line


def test_known_line():
    line = "s 1.250000000 _3_ AGT --- 7 cbr 512 [3:0 5:0]"
    rec = parse(line)
    assert rec == TraceRecord("s", 1_250_000_000, 3, "AGT", 7, "cbr", 512, 3, 0, 5, 0)
    # awk field positions: $1 event, $2 time, $4 layer, $6 seqno, $7 type
    f = line.split()
    assert (f[0], f[1], f[3], f[5], f[6]) == ("s", "1.250000000", "AGT", "7", "cbr")


def test_hot_path_formatter_matches_emit():
    pkt = Packet(2, -1, 255, 255, 9, "rreq", 48)
    line = format_line("f", 12_345_678, 4, "RTR", pkt)
    assert line == emit(TraceRecord("f", 12_345_678_000, 4, "RTR", 9, "rreq", 48, 2, 255, -1, 255))


@pytest.mark.parametrize("line,field", [
    ("s 1.000000000 _3_ AGT --- 7 cbr 512 [3:0", "flow destination"),
    ("s 1.000000000 _3_", "layer"),
    ("x 1.000000000 _3_ AGT --- 7 cbr 512 [3:0 5:0]", "event"),
    ("s 1.0 _3_ AGT --- 7 cbr 512 [3:0 5:0]", "time"),
    ("s -1.000000000 _3_ AGT --- 7 cbr 512 [3:0 5:0]", "time"),
    ("s 1.000000000 3 AGT --- 7 cbr 512 [3:0 5:0]", "node"),
    ("s 1.000000000 _3_ IFQ --- 7 cbr 512 [3:0 5:0]", "layer"),
    ("s 1.000000000 _3_ AGT -- 7 cbr 512 [3:0 5:0]", "separator"),
    ("s 1.000000000 _3_ AGT --- -7 cbr 512 [3:0 5:0]", "seqno"),
    ("s 1.000000000 _3_ AGT --- 7 udp 512 [3:0 5:0]", "type"),
    ("s 1.000000000 _3_ AGT --- 7 cbr 0 [3:0 5:0]", "size"),
    ("s 1.000000000 _3_ AGT --- 7 cbr 512 3:0 5:0]", "flow source"),
    ("s 1.000000000 _3_ AGT --- 7 cbr 512 [3:0 5:0", "flow destination"),
    ("s 1.000000000 _3_ AGT --- 7 cbr 512 [3:x 5:0]", "flow source"),
    ("s  1.000000000 _3_ AGT --- 7 cbr 512 [3:0 5:0]", "line"),
])
def test_malformed_lines_are_rejected_with_position(line, field):
    with pytest.raises(TraceParseError) as exc:
        parse_lines(["s 0.000000000 _0_ AGT --- 0 cbr 1 [0:0 1:0]", line])
    assert exc.value.lineno == 2
    assert exc.value.field == field
    assert "line 2" in str(exc.value)


def test_time_going_backwards_is_rejected():
    lines = ["s 2.000000000 _0_ AGT --- 0 cbr 1 [0:0 1:0]",
             "r 1.000000000 _1_ AGT --- 0 cbr 1 [0:0 1:0]"]
    with pytest.raises(TraceParseError, match="backwards"):
        parse_lines(lines)


def test_writer_roundtrip_plain_and_gzip(tmp_path):
    w = TraceWriter()
    pkt = Packet(0, 1, 0, 0, 0, "cbr", 512)
    w.log("s", 0, 0, "AGT", pkt)
    w.log("r", 1500, 1, "AGT", pkt)
    w.log("f", 1600, 1, "RTR", pkt)
    p = tmp_path / "t.tr"
    w.write(p)
    assert p.read_bytes().count(b"\n") == 3 and b"\r" not in p.read_bytes()
    recs = read_trace(p)
    assert [r.event for r in recs] == ["s", "r", "f"]
    assert [r.event for r in w.records("AGT")] == ["s", "r"]
    g = tmp_path / "t.tr.gz"
    g.write_bytes(gzip.compress(p.read_bytes()))
    assert read_trace(g) == recs


def test_writer_cache_matches_reference_formatter():
    w = TraceWriter()
    shared = Packet(1, -1, 255, 255, 3, "rreq", 48)
    calls = [("r", 10, 2, "RTR", shared), ("r", 10, 3, "RTR", shared), ("f", 10, 3, "RTR", shared),
             ("s", 11, 1, "AGT", Packet(1, 4, 0, 0, 0, "cbr", 512))]
    expected = []
    for c in calls:
        w.log(*c)
        expected.append(format_line(*c))
    shared.size = 60  # the one field agents ever change in place
    w.log("f", 12, 5, "RTR", shared)
    expected.append(format_line("f", 12, 5, "RTR", shared))
    assert w.lines == expected
