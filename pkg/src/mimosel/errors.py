"""Exception types shared across the package."""


class MimoselError(Exception):
    """Base class for package errors."""


class ConfigError(MimoselError, ValueError):
    """Invalid system configuration."""


class StatsFormatError(MimoselError, ValueError):
    """Malformed or inconsistent channel-statistics payload."""


class ConvergenceError(MimoselError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""
