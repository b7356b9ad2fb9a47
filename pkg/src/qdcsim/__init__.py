"""qdcsim: discrete-event simulation and exact queueing oracles for
spine-leaf quantum data center networks."""

from .config import ScenarioConfig, load_config
from .harness import execute, load_preset, validate_scenario
from .kernel import Kernel, RngStream, StreamFactory, sample_bernoulli, sample_exponential
from .metrics import RunStats
from .network import Request, Topology, Workload, build_topology, classify_route
from .oracle import BirthDeathChain, leaf_metrics, stationary_distribution
from .physics import compose_swap_fidelity, fidelity_at, renege_time
from .sim import Simulation, run_once

__version__ = "0.1.0"

__all__ = [
    "BirthDeathChain", "Kernel", "Request", "RngStream", "RunStats",
    "ScenarioConfig", "Simulation", "StreamFactory", "Topology", "Workload",
    "build_topology", "classify_route", "compose_swap_fidelity", "execute",
    "fidelity_at", "leaf_metrics", "load_config", "load_preset", "renege_time",
    "run_once", "sample_bernoulli", "sample_exponential",
    "stationary_distribution", "validate_scenario",
]
