"""
Head maps and detections.
"""
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import MalformedMapsError, ManifestFormatError, NonFiniteInputError
from datasets.models import Annotation, BBox

ALL_POINT = 'all'
ELEVEN_POINT = '11point'
INTERPOLATIONS = (ALL_POINT, ELEVEN_POINT)


@dataclass(frozen=True, eq=False)
class HeadMaps:
    """
    Detector head output at output-grid resolution.

    ``heat`` is K×H×W (one plane per category), ``wh`` is 2×H×W box width
    and height in input pixels, ``offset`` is 2×H×W sub-cell centre offsets.
    """

    heat: np.ndarray
    wh: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        heat = np.asarray(self.heat, dtype=np.float64)
        wh = np.asarray(self.wh, dtype=np.float64)
        offset = np.asarray(self.offset, dtype=np.float64)
        if heat.ndim != 3:
            raise MalformedMapsError(f"Heat map must be K×H×W, got shape {heat.shape}")
        grid = heat.shape[1:]
        for name, plane in (('wh', wh), ('offset', offset)):
            if plane.shape != (2, *grid):
                raise MalformedMapsError(
                    f"{name} map must be 2×{grid[0]}×{grid[1]}, got shape {plane.shape}",
                    map=name,
                )
        for name, plane in (('heat', heat), ('wh', wh), ('offset', offset)):
            if not np.all(np.isfinite(plane)):
                raise MalformedMapsError(f"{name} map contains non-finite values", map=name)
        if heat.size and (heat.min() < 0.0 or heat.max() > 1.0):
            raise MalformedMapsError("Heat values must lie in [0, 1]", map='heat')
        object.__setattr__(self, 'heat', heat)
        object.__setattr__(self, 'wh', wh)
        object.__setattr__(self, 'offset', offset)

    @property
    def categories(self) -> int:
        return self.heat.shape[0]

    @property
    def grid(self):
        return self.heat.shape[1:]


@dataclass(frozen=True)
class Detection:
    """A scored box; ``image_id`` groups detections for matching."""

    bbox: BBox
    score: float
    image_id: int = 0

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise NonFiniteInputError(f"Detection score must be finite, got {self.score}")
        if not 0.0 <= self.score <= 1.0:
            raise ManifestFormatError(f"Detection score must lie in [0, 1], got {self.score}", score=self.score)
        if self.bbox.w <= 0 or self.bbox.h <= 0:
            raise ManifestFormatError(f"Detection box must have positive size, got {self.bbox.to_list()}")

    @property
    def category(self) -> int:
        return self.bbox.category

    def to_annotation(self) -> Annotation:
        return Annotation(image_id=self.image_id, bbox=self.bbox, score=self.score)
