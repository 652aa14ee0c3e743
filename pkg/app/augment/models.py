"""
Augmentation parameters and results.
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from datasets.models import Annotation, ImageBuffer

BASELINE = 'baseline'
CUTOUT = 'cutout'
RANDOM_ERASE = 'rerase'
GRIDMASK = 'gridmask'
HIDE_AND_SEEK = 'has'
MIXUP = 'mixup'
METHODS = (BASELINE, CUTOUT, RANDOM_ERASE, GRIDMASK, HIDE_AND_SEEK, MIXUP)


@dataclass(frozen=True)
class BaselineParams:
    """Flip, scale, crop and mean subtraction of the baseline pipeline."""

    flip_prob: float = 0.5
    scale_range: Tuple[float, float] = (0.6, 1.3)
    crop_size: Optional[Tuple[int, int]] = None
    min_box_fraction: float = 0.25
    means: Tuple[float, ...] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, 'scale_range', tuple(float(s) for s in self.scale_range))
        object.__setattr__(self, 'means', tuple(float(m) for m in self.means))
        if self.crop_size is not None:
            object.__setattr__(self, 'crop_size', tuple(int(s) for s in self.crop_size))
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError(f"flip_prob must lie in [0, 1], got {self.flip_prob}")
        lo, hi = self.scale_range
        if not 0 < lo <= hi:
            raise ValueError(f"Scale range must be positive with lo <= hi, got {self.scale_range}")
        if not 0.0 <= self.min_box_fraction <= 1.0:
            raise ValueError(f"min_box_fraction must lie in [0, 1], got {self.min_box_fraction}")


@dataclass(frozen=True)
class AugmentSpec:
    """
    Method and parameters of one augmentation run.

    Unset region sizes are derived from the image: the cutout side is a
    quarter of the shorter image side.
    """

    method: str = BASELINE
    cutout_size: Optional[int] = None
    erase_area: Tuple[float, float] = (0.02, 0.4)
    erase_aspect: Tuple[float, float] = (0.3, 1 / 0.3)
    erase_attempts: int = 100
    grid_unit: Tuple[int, int] = (16, 64)
    grid_ratio: float = 0.4
    has_grid: int = 4
    has_prob: float = 0.5
    mixup_alpha: float = 1.5
    baseline: BaselineParams = field(default_factory=BaselineParams)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"Unknown method '{self.method}', choose from {METHODS}")
        object.__setattr__(self, 'erase_area', tuple(float(v) for v in self.erase_area))
        object.__setattr__(self, 'erase_aspect', tuple(float(v) for v in self.erase_aspect))
        object.__setattr__(self, 'grid_unit', tuple(int(v) for v in self.grid_unit))
        if self.cutout_size is not None and self.cutout_size < 1:
            raise ValueError(f"cutout_size must be positive, got {self.cutout_size}")
        if not 0 < self.erase_area[0] <= self.erase_area[1] <= 1:
            raise ValueError(f"erase_area must satisfy 0 < lo <= hi <= 1, got {self.erase_area}")
        if not 0 < self.erase_aspect[0] <= self.erase_aspect[1]:
            raise ValueError(f"erase_aspect must be positive with lo <= hi, got {self.erase_aspect}")
        if self.erase_attempts < 1:
            raise ValueError(f"erase_attempts must be at least 1, got {self.erase_attempts}")
        if not 1 <= self.grid_unit[0] <= self.grid_unit[1]:
            raise ValueError(f"grid_unit must satisfy 1 <= lo <= hi, got {self.grid_unit}")
        if not 0.0 <= self.grid_ratio < 1.0:
            raise ValueError(f"grid_ratio must lie in [0, 1), got {self.grid_ratio}")
        if self.has_grid < 1:
            raise ValueError(f"has_grid must be at least 1, got {self.has_grid}")
        if not 0.0 <= self.has_prob <= 1.0:
            raise ValueError(f"has_prob must lie in [0, 1], got {self.has_prob}")
        if self.mixup_alpha <= 0:
            raise ValueError(f"mixup_alpha must be positive, got {self.mixup_alpha}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'AugmentSpec':
        data = dict(data)
        baseline = data.pop('baseline', None) or {}
        return cls(**data, baseline=BaselineParams(**baseline))


@dataclass(frozen=True, eq=False)
class AugmentResult:
    """
    Augmented image and annotations.

    ``normalized`` is the image after mean subtraction; it may leave [0, 1].
    """

    image: ImageBuffer
    annotations: Tuple[Annotation, ...]
    normalized: np.ndarray
    flipped: bool = False
    scale: Tuple[float, float] = (1.0, 1.0)
    crop_origin: Tuple[int, int] = (0, 0)
    mix_weight: Optional[float] = None
