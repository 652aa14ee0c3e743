"""
Placement of embedded objects near same-category anchors.
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from core.exceptions import CropTooLargeError, PlacementFailedError
from core.utils import round_half_up
from datasets.models import BBox, ObjectCrop
from evaluation.metrics import iou

from .models import Placement, PlacementPolicy

logger = logging.getLogger(__name__)

# crops never shrink below a 3×3 patch, the smallest with a solvable interior
MIN_SIDE = 3


def scaled_size(crop: ObjectCrop, scale: float) -> Tuple[int, int]:
    """(width, height) of a crop after scaling."""
    return (max(MIN_SIDE, round_half_up(crop.width * scale)),
            max(MIN_SIDE, round_half_up(crop.height * scale)))


def _sample_in_disk(rng: np.random.Generator, cx: float, cy: float, radius: float) -> Tuple[float, float]:
    r = radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return cx + r * math.cos(theta), cy + r * math.sin(theta)


def propose_placement(
    existing: Sequence[BBox],
    crop: ObjectCrop,
    category: int,
    image_dims: Tuple[int, int],
    policy: PlacementPolicy,
    rng: np.random.Generator,
    anchors: Optional[Sequence[BBox]] = None,
) -> Placement:
    """
    Choose a position and scale for a crop.

    Each attempt draws a scale from the jitter range. With same-category
    anchors present, the centre is drawn uniformly in the vicinity disk of a
    randomly chosen anchor; otherwise the top-left corner is uniform over the
    positions keeping a 1-pixel margin. An attempt succeeds when the box keeps
    the margin, stays in the vicinity and overlaps every existing box with
    IoU at most ``policy.max_iou``.

    Args:
        existing: Boxes already in the image (including earlier embeds)
        crop: Object to place
        category: Category index of the crop
        image_dims: (height, width) of the background
        policy: Vicinity, overlap, jitter and attempt limits
        rng: Random generator
        anchors: Boxes eligible as vicinity anchors; defaults to the
            same-category boxes of ``existing``

    Raises:
        CropTooLargeError: the crop at maximum jitter leaves no margin
        PlacementFailedError: no attempt succeeded
    """
    height, width = image_dims
    lo, hi = policy.scale_range
    max_w, max_h = scaled_size(crop, hi)
    if max_w > width - 2 or max_h > height - 2:
        raise CropTooLargeError(
            f"Crop {crop.width}x{crop.height} scaled by {hi} does not fit in a {width}x{height} image",
            crop_size=[crop.width, crop.height],
            image_size=[width, height],
        )

    pool = existing if anchors is None else anchors
    anchors = [box for box in pool if box.category == category]

    for _ in range(policy.max_attempts):
        scale = float(rng.uniform(lo, hi))
        sw, sh = scaled_size(crop, scale)

        if anchors:
            anchor = anchors[int(rng.integers(len(anchors)))]
            radius = policy.radius_for(anchor)
            ax, ay = anchor.center
            cx, cy = _sample_in_disk(rng, ax, ay, radius)
            x = min(max(round_half_up(cx - sw / 2.0), 1), width - 1 - sw)
            y = min(max(round_half_up(cy - sh / 2.0), 1), height - 1 - sh)
            if math.hypot(x + sw / 2.0 - ax, y + sh / 2.0 - ay) > radius:
                continue
        else:
            anchor = None
            x = int(rng.integers(1, width - sw))
            y = int(rng.integers(1, height - sh))

        placement = Placement(x=x, y=y, width=sw, height=sh, scale=scale, anchor=anchor)
        candidate = placement.box(category)
        if all(iou(candidate, box) <= policy.max_iou for box in existing):
            return placement

    raise PlacementFailedError(
        f"No valid position after {policy.max_attempts} attempts",
        attempts=policy.max_attempts,
        anchored=bool(anchors),
    )
