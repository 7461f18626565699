"""Exception types shared across the package."""

from __future__ import annotations


class KitchenSimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(KitchenSimError):
    """A config document failed to parse or validate.

    Carries the source name and 1-based line number so callers can point
    at the offending line.
    """

    def __init__(self, message: str, *, source: str = "<config>", line: int | None = None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class LayoutError(KitchenSimError):
    """Scene geometry is inconsistent (overlapping stations, bad spawn...)."""


class PlanningError(KitchenSimError):
    """The goal is unreachable from the given state."""


class EpisodeOver(KitchenSimError):
    """An action was submitted to a finished episode."""


class TrajectoryError(KitchenSimError):
    """A trajectory file is malformed or has an unsupported version."""


class ProtocolError(KitchenSimError):
    """A wire frame violated the protocol."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)
