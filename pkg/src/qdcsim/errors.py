"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all qdcsim errors."""


class ParameterError(SimulationError, ValueError):
    """A numeric argument is outside its legal range."""


class SchedulingError(SimulationError, ValueError):
    """An event was scheduled or run into the past."""


class RoutingError(SimulationError, ValueError):
    """A request cannot be routed on the given topology."""


class ConfigError(SimulationError, ValueError):
    """A scenario config is invalid; carries every violated field."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid config:\n" + "\n".join(f"  - {v}" for v in self.violations))


class OracleModeError(SimulationError, ValueError):
    """A simulation run cannot be compared against the Markov oracle."""
