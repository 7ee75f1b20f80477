"""Scenario configuration and its ``key = value`` file format."""

import dataclasses
from dataclasses import dataclass, fields

PROTOCOLS = ("aodv", "dsr")
TRAFFIC_TYPES = ("cbr", "tcp")

TABLE1_NODES = (30, 90, 150)
TABLE1_SPEEDS = (5.0, 10.0, 15.0, 20.0, 25.0)
TABLE1_PAUSES = (50.0, 100.0, 150.0, 200.0, 250.0)


class ConfigError(ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation run. Defaults reproduce the 840 m x 840 m, 200 s,
    8-connection setup with 30 nodes moving at up to 15 m/s and 50 s pauses."""

    protocol: str = "aodv"
    traffic: str = "cbr"
    nodes: int = 30
    area: tuple = (840.0, 840.0)
    sim_time: float = 200.0
    v_max: float = 15.0
    v_min: float = 0.1
    pause: float = 50.0
    connections: int = 8
    seed: int = 0
    # medium
    range: float = 250.0
    bitrate: float = 2_000_000.0
    ifq_capacity: int = 50
    jitter_max: float = 0.010
    loss_prob: float = 0.0
    # traffic
    cbr_size: int = 512
    cbr_interval: float = 0.25
    tcp_segment: int = 1040
    tcp_interval: float = 0.25
    tcp_window: int = 20
    flow_start_max: float = 10.0
    # placement: diameter of a central disk holding every node; 0 = whole arena
    cluster: float = 0.0
    # routing
    active_route_timeout: float = 10.0
    rreq_retries: int = 3
    rreq_backoff: float = 1.0
    buffer_cap: int = 64
    rreq_ttl: int = 30
    dsr_cache_reply: bool = True

    def __post_init__(self):
        validate(self)

    @property
    def scenario_id(self):
        return (f"{self.protocol}-{self.traffic}-n{self.nodes}-p{self.pause:g}"
                f"-v{self.v_max:g}-s{self.seed}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def validate(cfg):
    if cfg.protocol not in PROTOCOLS:
        raise ConfigError("protocol", f"must be one of {PROTOCOLS}, got {cfg.protocol!r}")
    if cfg.traffic not in TRAFFIC_TYPES:
        raise ConfigError("traffic", f"must be one of {TRAFFIC_TYPES}, got {cfg.traffic!r}")
    if cfg.nodes < 2:
        raise ConfigError("nodes", f"need at least 2 nodes, got {cfg.nodes}")
    if len(cfg.area) != 2 or min(cfg.area) <= 0:
        raise ConfigError("area", "width and height must be positive")
    if cfg.sim_time <= 0:
        raise ConfigError("sim_time", "must be positive")
    if cfg.v_max < 0:
        raise ConfigError("v_max", "must be non-negative")
    if cfg.v_min <= 0:
        raise ConfigError("v_min", "must be positive")
    if cfg.pause < 0:
        raise ConfigError("pause", "must be non-negative")
    if cfg.connections < 1:
        raise ConfigError("connections", "need at least one connection")
    if cfg.connections > cfg.nodes * (cfg.nodes - 1):
        raise ConfigError("connections", "more connections than distinct node pairs")
    if cfg.seed < 0:
        raise ConfigError("seed", "must be non-negative")
    for name in ("range", "bitrate", "jitter_max", "cbr_interval", "rreq_backoff",
                 "active_route_timeout"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(name, "must be positive")
    for name in ("ifq_capacity", "cbr_size", "tcp_segment", "tcp_window", "buffer_cap",
                 "rreq_ttl"):
        if getattr(cfg, name) < 1:
            raise ConfigError(name, "must be at least 1")
    if not 0 <= cfg.loss_prob < 1:
        raise ConfigError("loss_prob", "must lie in [0, 1)")
    if cfg.tcp_interval < 0:
        raise ConfigError("tcp_interval", "must be non-negative (0 = bulk)")
    if not 0 <= cfg.flow_start_max < cfg.sim_time:
        raise ConfigError("flow_start_max", "flows must start before the end of the run")
    if cfg.cluster < 0:
        raise ConfigError("cluster", "must be non-negative")
    if cfg.rreq_retries < 0:
        raise ConfigError("rreq_retries", "must be non-negative")


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(key, raw):
    kind = _FIELD_TYPES[key]
    try:
        if key == "area":
            parts = raw.lower().replace("x", " ").split()
            if len(parts) != 2:
                raise ValueError(raw)
            return (float(parts[0]), float(parts[1]))
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
        if kind in (bool, "bool"):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        return raw
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None


def parse_config(text, base=None):
    """Build a :class:`ScenarioConfig` from ``key = value`` lines.

    Blank lines and ``#`` comments are ignored; anything not given keeps the
    value from ``base`` (the defaults when ``base`` is None).
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given twice")
        values[key] = _parse_value(key, raw)
    base = base or ScenarioConfig()
    return dataclasses.replace(base, **values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg):
    out = []
    for f in fields(ScenarioConfig):
        v = getattr(cfg, f.name)
        if f.name == "area":
            out.append(f"area = {v[0]!r} x {v[1]!r}")
        elif isinstance(v, bool):
            out.append(f"{f.name} = {'true' if v else 'false'}")
        else:
            out.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(out) + "\n"


def write_config(cfg, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_config(cfg))
