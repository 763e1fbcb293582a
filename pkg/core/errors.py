"""Exceptions raised by the simulator."""

from pathlib import Path
from typing import Optional, Union


class PadSimError(Exception):
    """Base class for all simulator errors."""


class NumericalError(PadSimError):
    """A computation could not produce a meaningful number."""


class SymmetryViolationError(NumericalError):
    """The joint homodyne density is not rotationally symmetric for this configuration."""

    def __init__(self, spread: float, tolerance: float):
        self.spread = spread
        self.tolerance = tolerance
        super().__init__(
            f"Angular spread {spread:.3e} of the joint density exceeds {tolerance:.1e}"
        )


class DegenerateAcceptanceError(NumericalError):
    """The post-selection accepts (numerically) nothing."""


class UnreachableRateError(NumericalError):
    """A requested probability rate exceeds what any acceptance radius achieves."""


class OutOfRangeError(NumericalError):
    """A target value lies outside the range a solver can match."""


class OutputError(PadSimError):
    """Writing a result table failed."""

    def __init__(self, path: Optional[Union[str, Path]], reason: str):
        self.path = path
        super().__init__(f"Could not write '{path}': {reason}")
