"""Master-equation simulator of a two-laser-driven trion Lambda-system."""
__version__ = "0.1.0"

from ._accel import NUMBA_ENABLED
from .errors import (
    DegenerateSteadyStateError,
    FitError,
    IntegrationError,
    NoSplittingError,
    SingularMatrixError,
    UndefinedNormalizationError,
)
from .trion import TrionParams
