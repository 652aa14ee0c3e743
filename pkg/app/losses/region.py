"""
Box-driven region loss and the generator loss total.
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.exceptions import DimensionMismatchError, NonFiniteInputError
from datasets.models import BBox, ImageBuffer

INSIDE_WEIGHT = 100.0
OUTSIDE_WEIGHT = 0.1
ADVERSARIAL_WEIGHT = 1e-4

L1 = 'l1'
L2 = 'l2'
NORMS = (L1, L2)


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Single-plane H×W weights: INSIDE_WEIGHT under any box, OUTSIDE_WEIGHT elsewhere."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64, copy=True)
        if weights.ndim != 2:
            raise DimensionMismatchError(f"Region mask must be H×W, got shape {weights.shape}")
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @property
    def shape(self):
        return self.weights.shape

    @property
    def inside(self) -> np.ndarray:
        return self.weights == INSIDE_WEIGHT


@dataclass(frozen=True)
class LossBreakdown:
    region: float
    content: float
    adversarial: float
    adversarial_weight: float
    total: float

    def to_dict(self) -> dict:
        return {
            'region': self.region,
            'content': self.content,
            'adversarial': self.adversarial,
            'adversarial_weight': self.adversarial_weight,
            'total': self.total,
        }


def build_region_mask(boxes: Sequence[BBox], height: int, width: int) -> RegionMask:
    """
    Rasterise boxes by pixel-centre containment.

    Pixel (r, c) is inside a box when its centre (c + 0.5, r + 0.5) lies in
    [x, x + w) × [y, y + h).
    """
    inside = np.zeros((height, width), dtype=bool)
    for box in boxes:
        x0, y0, x1, y1 = box.centre_bounds(width, height)
        inside[y0:y1, x0:x1] = True
    return RegionMask(np.where(inside, INSIDE_WEIGHT, OUTSIDE_WEIGHT))


def region_loss(pred: ImageBuffer, target: ImageBuffer, mask: RegionMask, norm: str = L1) -> float:
    """
    Mask-weighted mean difference between two images.

    ``l1`` sums |pred − target|·weight, ``l2`` sums (|pred − target|·weight)²;
    both divide by c·h·w. The mask is broadcast over channels.
    """
    if pred.shape != target.shape:
        raise DimensionMismatchError(f"Prediction {pred.shape} and target {target.shape} differ")
    if mask.shape != pred.shape[:2]:
        raise DimensionMismatchError(f"Mask {mask.shape} does not match images {pred.shape[:2]}")
    if norm not in NORMS:
        raise ValueError(f"Unknown norm '{norm}', choose from {NORMS}")

    weighted = np.abs(pred.data - target.data) * mask.weights[:, :, None]
    if norm == L2:
        weighted = weighted ** 2
    return float(weighted.sum() / pred.data.size)


def dr_total(
    content: float, adversarial: float, region: float, adversarial_weight: float = ADVERSARIAL_WEIGHT
) -> LossBreakdown:
    """Combine loss terms: content + adversarial_weight·adversarial + region."""
    terms = {'content': content, 'adversarial': adversarial, 'region': region, 'adversarial_weight': adversarial_weight}
    bad = [name for name, value in terms.items() if not math.isfinite(value)]
    if bad:
        raise NonFiniteInputError(f"Loss terms must be finite: {', '.join(bad)}", terms=bad)
    return LossBreakdown(
        region=region,
        content=content,
        adversarial=adversarial,
        adversarial_weight=adversarial_weight,
        total=content + adversarial_weight * adversarial + region,
    )
