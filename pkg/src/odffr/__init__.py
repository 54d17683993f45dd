"""On-demand sectored fractional frequency reuse: analytics, simulation and radio."""

from .errors import BandExhausted, ConfigError, ConsistencyError, DomainError

__version__ = "0.1.0"

__all__ = ["BandExhausted", "ConfigError", "ConsistencyError", "DomainError", "__version__"]
