"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario or model configuration."""


class BandExhausted(Exception):
    """No free channel left in the requested band."""

    def __init__(self, band):
        super().__init__(f"band F{int(band)} exhausted")
        self.band = band


class ConsistencyError(RuntimeError):
    """Channel bookkeeping went inconsistent; the run must be aborted."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""
