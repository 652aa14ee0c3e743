"""
Value types of the Poisson solve.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import EmptyInteriorError, NonFiniteInputError

SOURCE_GRADIENTS = 'source'
MIXED_GRADIENTS = 'mixed'
GUIDANCE_MODES = (SOURCE_GRADIENTS, MIXED_GRADIENTS)


@dataclass(frozen=True, eq=False)
class GuidanceDivergence:
    """Divergence of the guidance field, H×W×C; only interior pixels are meaningful."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if not np.all(np.isfinite(values)):
            raise NonFiniteInputError("Guidance divergence contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True, eq=False)
class CloneMask:
    """Binary H×W mask of the pixels re-solved; never touches the patch border."""

    interior: np.ndarray

    def __post_init__(self):
        interior = np.array(self.interior, dtype=bool, copy=True)
        if interior.ndim != 2:
            raise EmptyInteriorError(f"Clone mask must be 2-D, got shape {interior.shape}")
        if not interior.any():
            raise EmptyInteriorError("Clone mask interior is empty")
        if interior[0, :].any() or interior[-1, :].any() or interior[:, 0].any() or interior[:, -1].any():
            raise EmptyInteriorError("Clone mask interior touches the border; a known boundary ring is required")
        interior.setflags(write=False)
        object.__setattr__(self, 'interior', interior)

    @property
    def shape(self):
        return self.interior.shape

    @property
    def unknowns(self) -> int:
        return int(self.interior.sum())


@dataclass(frozen=True)
class SolverParams:
    tolerance: float = 1e-8
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"Tolerance must be positive, got {self.tolerance}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")

    def iteration_budget(self, unknowns: int) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return max(200, int(10 * math.sqrt(unknowns)))


@dataclass(frozen=True, eq=False)
class InteriorSolution:
    """Solved values at the mask's interior pixels, in row-major order."""

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    residual: float
    iterations: int

    def to_array(self, boundary: np.ndarray) -> np.ndarray:
        """Full H×W×C array: boundary values outside the interior, solution inside."""
        full = np.array(boundary, dtype=np.float64, copy=True)
        full[self.rows, self.cols, :] = self.values
        return full
