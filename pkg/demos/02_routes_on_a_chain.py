# %% [markdown]
# # Watching route discovery on a fixed chain
#
# Five parked nodes 200 m apart with a 250 m radio range: each node only
# hears its direct neighbours, so node 0 needs four hops to reach node 4.

# %%
from vanetsim.config import ScenarioConfig
from vanetsim.engine import RngStream, to_us
from vanetsim.mobility import RandomWaypoint
from vanetsim.scenario import Network
from vanetsim.traffic import FlowSpec

points = [(50.0 + 200.0 * i, 500.0) for i in range(5)]
flow = FlowSpec(0, 4, 0, 0, "cbr", 0, to_us(5.0))


def build(protocol):
    cfg = ScenarioConfig(protocol=protocol, nodes=5, v_max=0.0, sim_time=5.0,
                         area=(1000.0, 1000.0), connections=1, flow_start_max=0.0)
    mob = RandomWaypoint(5, 1000.0, 1000.0, 0.0, 0.0, 5.0, RngStream(0, "mobility"),
                         initial=points)
    return Network(cfg, flows=[flow], mobility=mob)


# %%
aodv = build("aodv")
aodv.run()
for node in range(4):
    e = aodv.routing[node].lookup(4)
    print(f"node {node}: to 4 via {e.next_hop}, {e.hop_count} hops, seqno {e.dest_seqno}")

# %% [markdown]
# The first data packet waits in node 0's buffer while the RREQ floods out
# and the RREP comes back. Its delay is the discovery time; later packets
# only pay four transmissions.

# %%
agt = [l for l in aodv.trace.lines if " AGT " in l]
print("\n".join(agt[:4]))

# %% [markdown]
# DSR learns the whole path once and stamps it on every packet.

# %%
dsr = build("dsr")
dsr.run()
print(dsr.routing[0].cache.find(4))
print([l for l in dsr.trace.lines if " cbr " in l][:3])
