"""Discrete-event AODV/DSR simulator for vehicular ad-hoc networks, with
trace-driven delivery metrics and band classification."""

from .analysis import (Band, MetricsReport, classify, compute_metrics,
                       compute_metrics_script_compat)
from .config import ScenarioConfig, load_config, write_config
from .scenario import Network, run_scenario

__version__ = "0.1.0"

__all__ = [
    "Band", "MetricsReport", "Network", "ScenarioConfig", "classify", "compute_metrics",
    "compute_metrics_script_compat", "load_config", "run_scenario", "write_config",
]
