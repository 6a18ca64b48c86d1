"""Zero-shot heuristics for point processes, jump processes and imputation."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    EventSequence,
    MalformedDataError,
    MjpObservationSet,
    SeededRng,
    TimeSeriesPanel,
    ValidationResult,
)

__all__ = [
    "__version__",
    "EventSequence",
    "MalformedDataError",
    "MjpObservationSet",
    "SeededRng",
    "TimeSeriesPanel",
    "ValidationResult",
]
