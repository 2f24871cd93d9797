"""
Exception hierarchy for the Rips laboratory.
"""

from typing import Any, Dict, Optional, Sequence, Tuple


class LabError(Exception):
    """Base class for every error raised deliberately by ripslab."""


class ConfigError(LabError, ValueError):
    """Invalid configuration (CLI exit code 2)."""


class GeometryError(LabError, ValueError):
    """Degenerate geometric input or a violated construction precondition."""


class SamplingError(LabError):
    """Rejection sampling accepts too rarely to be useful."""

    def __init__(self, message: str, acceptance: float):
        super().__init__(message)
        self.acceptance = acceptance


class ComplexBudgetError(LabError):
    """Clique enumeration exceeded its simplex budget."""

    def __init__(self, message: str, partial_counts: Sequence[int]):
        super().__init__(message)
        self.partial_counts = list(partial_counts)


class CoverError(LabError):
    """The cover construction failed an invariant."""


class CoverOverflowError(CoverError):
    """Some radius s_i would exceed 4r."""

    def __init__(self, message: str, index_set: Tuple[int, ...], epsilon: float):
        super().__init__(message)
        self.index_set = tuple(index_set)
        self.epsilon = epsilon


class SearchBudgetError(CoverError):
    """Face enumeration exhausted its probe budget."""


class PursuitError(LabError):
    """The pursuit game cannot be played with the given record."""


class ThresholdError(LabError):
    """Threshold estimation is impossible for the given results."""

    def __init__(self, message: str, observed: Optional[Dict[Any, Tuple[float, float]]] = None):
        super().__init__(message)
        self.observed = observed or {}


class LabIOError(LabError):
    """File input/output failed."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message} [{path}]")
        self.path = path
