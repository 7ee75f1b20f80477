import pytest

from vanetsim.config import ConfigError, ScenarioConfig, format_config, load_config, parse_config, write_config


def test_defaults():
    cfg = ScenarioConfig()
    assert cfg.area == (840.0, 840.0) and cfg.sim_time == 200 and cfg.connections == 8
    assert cfg.scenario_id == "aodv-cbr-n30-p50-v15-s0"


def test_parse_overrides_and_comments():
    cfg = parse_config("""
        # a comment
        protocol = dsr
        traffic = tcp   # trailing comment
        nodes = 90
        area = 1000 x 500
        dsr_cache_reply = false
    """)
    assert (cfg.protocol, cfg.traffic, cfg.nodes, cfg.area) == ("dsr", "tcp", 90, (1000.0, 500.0))
    assert cfg.dsr_cache_reply is False


@pytest.mark.parametrize("text,field", [
    ("bogus = 1", "bogus"),
    ("nodes = 3\nnodes = 4", "nodes"),
    ("nodes = many", "nodes"),
    ("protocol = olsr", "protocol"),
    ("nodes = 1", "nodes"),
    ("area = 10", "area"),
    ("just words", "line 1"),
    ("connections = 100\nnodes = 5", "connections"),
    ("flow_start_max = 300", "flow_start_max"),
])
def test_invalid_configs_name_the_field(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_format_roundtrip(tmp_path):
    cfg = ScenarioConfig(protocol="dsr", pause=123.456, v_max=0.1 + 0.2, seed=9, cluster=200.0)
    assert parse_config(format_config(cfg)) == cfg
    p = tmp_path / "c.cfg"
    write_config(cfg, p)
    assert load_config(p) == cfg
