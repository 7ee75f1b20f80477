import math

from vanetsim.dsr import DsrRouteCache, source_routed_size

from conftest import cbr_flow, chain, static_network


def test_cache_keeps_prefixes_and_prefers_short_then_recent():
    c = DsrRouteCache(0)
    assert c.add((0, 1, 2, 3), now=1)
    assert c.find(2) == (0, 1, 2)
    assert c.add((0, 4, 3), now=2)
    assert c.find(3) == (0, 4, 3)
    assert c.add((0, 5, 3), now=3)
    assert c.find(3) == (0, 5, 3)
    assert not c.add((1, 2), now=4)  # not ours
    assert not c.add((0, 1, 0), now=4)  # loop


def test_cache_link_removal_is_directional():
    c = DsrRouteCache(0)
    c.add((0, 1, 2, 3), now=0)
    assert c.remove_link(2, 1) == 0
    assert c.remove_link(1, 2) == 2  # (0,1,2) and (0,1,2,3)
    assert c.find(3) is None and c.find(1) == (0, 1)


def test_source_routed_size_grows_per_hop():
    assert source_routed_size(512, (0, 1, 2)) == 512 + 20 + 12


def test_chain_discovery_delivers_on_exact_route():
    pts = chain(5)
    net = static_network(pts, protocol="dsr", flows=[cbr_flow(0, 4, stop=5.0)], sim_time=5.0)
    net.run()
    assert net.routing[0].cache.find(4) == (0, 1, 2, 3, 4)
    agt = [l for l in net.trace.lines if " AGT " in l]
    assert sum(l.startswith("s ") for l in agt) == sum(l.startswith("r ") for l in agt) == 20


def test_cached_routes_are_hop_by_hop_feasible():
    pts = [(100, 100), (300, 100), (300, 300), (500, 300), (100, 300), (700, 300), (700, 500)]
    flows = [cbr_flow(0, 6, 0), cbr_flow(4, 5, 1), cbr_flow(6, 1, 2)]
    net = static_network(pts, protocol="dsr", flows=flows, sim_time=5.0)
    net.run()
    for a in net.routing:
        for path in a.cache.all_paths():
            assert len(set(path)) == len(path)
            for u, v in zip(path, path[1:]):
                assert math.dist(pts[u], pts[v]) <= 250


def test_broken_link_triggers_route_error_and_purge():
    pts = chain(4)
    net = static_network(pts, protocol="dsr", sim_time=5.0)
    a = net.routing[0]
    a.cache.add((0, 1, 2, 3), now=0)
    net.routing[1].cache.add((1, 2, 3), now=0)
    from vanetsim.packet import Packet
    pkt = Packet(0, 3, 0, 0, 0, "cbr", 512, source_route=(0, 1, 2, 3))
    net.routing[1].handle_link_break((1, 2), pkt)
    net.sim.run(1_000_000)
    assert net.routing[1].cache.find(3) is None
    assert a.cache.find(3) is None  # the rerr reached the source
    assert any(l.startswith("D ") and "_1_ RTR" in l for l in net.trace.lines)
