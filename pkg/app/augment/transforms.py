"""
Baseline pipeline, information-dropping augmentations and mixup.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import CropLargerThanImageError, DimensionMismatchError
from core.utils import round_half_up
from datasets.imaging import resize_image
from datasets.models import Annotation, BBox, ImageBuffer

from .models import MIXUP, AugmentResult, AugmentSpec, BaselineParams

logger = logging.getLogger(__name__)


def flip_box(box: BBox, width: float) -> BBox:
    return BBox(width - box.x - box.w, box.y, box.w, box.h, box.category)


def _clip_box(box: BBox, width: float, height: float) -> Optional[BBox]:
    x0, y0 = max(box.x, 0.0), max(box.y, 0.0)
    x1, y1 = min(box.x2, width), min(box.y2, height)
    if x1 <= x0 or y1 <= y0:
        return None
    return BBox(x0, y0, x1 - x0, y1 - y0, box.category)


def _with_box(annotation: Annotation, box: BBox) -> Annotation:
    return Annotation(annotation.image_id, box, id=annotation.id, score=annotation.score, weight=annotation.weight)


def normalize(image: ImageBuffer, means: Sequence[float]) -> np.ndarray:
    """Per-channel mean subtraction."""
    means = np.asarray(means, dtype=np.float64)
    if means.size != image.channels:
        raise DimensionMismatchError(f"{means.size} means for a {image.channels}-channel image")
    return image.data - means[None, None, :]


def baseline_geometry(
    image: ImageBuffer,
    annotations: Sequence[Annotation],
    params: BaselineParams,
    rng: np.random.Generator,
) -> AugmentResult:
    """
    Flip, scale and crop an image with its boxes.

    The flip happens with probability ``flip_prob``; the scale is uniform in
    ``scale_range`` and boxes follow the actual resize factors. The crop
    origin is uniform; boxes are clipped to the crop and dropped when less
    than ``min_box_fraction`` of their scaled area survives.

    Raises:
        CropLargerThanImageError: crop size exceeds the scaled image
    """
    flipped = bool(rng.random() < params.flip_prob)
    data = image.data[:, ::-1] if flipped else image.data
    boxes = [flip_box(a.bbox, image.width) if flipped else a.bbox for a in annotations]

    s = float(rng.uniform(*params.scale_range))
    height = max(1, round_half_up(image.height * s))
    width = max(1, round_half_up(image.width * s))
    scaled = resize_image(ImageBuffer(data), height, width)
    sx, sy = width / image.width, height / image.height
    boxes = [box.scaled(sx, sy) for box in boxes]

    origin = (0, 0)
    if params.crop_size is not None:
        crop_h, crop_w = params.crop_size
        if crop_h > height or crop_w > width:
            raise CropLargerThanImageError(
                f"Crop {crop_w}x{crop_h} exceeds the scaled image {width}x{height}",
                crop_size=[crop_w, crop_h],
                image_size=[width, height],
            )
        x0 = int(rng.integers(0, width - crop_w + 1))
        y0 = int(rng.integers(0, height - crop_h + 1))
        origin = (x0, y0)
        scaled = scaled.region(x0, y0, crop_w, crop_h)
        boxes = [box.translated(-x0, -y0) for box in boxes]

    kept: List[Annotation] = []
    for annotation, box in zip(annotations, boxes):
        clipped = _clip_box(box, scaled.width, scaled.height)
        if clipped is None or clipped.area < params.min_box_fraction * box.area:
            continue
        kept.append(_with_box(annotation, clipped))

    return AugmentResult(
        image=scaled,
        annotations=tuple(kept),
        normalized=normalize(scaled, params.means),
        flipped=flipped,
        scale=(sx, sy),
        crop_origin=origin,
    )


def baseline_augment(
    image: ImageBuffer,
    annotations: Sequence[Annotation],
    rng: np.random.Generator,
    params: Optional[BaselineParams] = None,
) -> AugmentResult:
    """Baseline pipeline: flip, scale, crop, then mean subtraction (see baseline_geometry)."""
    return baseline_geometry(image, annotations, params or BaselineParams(), rng)


def _fill(image: ImageBuffer, x0: int, y0: int, x1: int, y1: int, values=0.0) -> ImageBuffer:
    data = image.writable()
    data[y0:y1, x0:x1] = values
    return ImageBuffer(data)


def cutout_region(image: ImageBuffer, cx: int, cy: int, side: int) -> ImageBuffer:
    """Zero a side×side square centred on (cx, cy), clipped at the borders."""
    x0, y0 = max(0, cx - side // 2), max(0, cy - side // 2)
    x1, y1 = min(image.width, cx - side // 2 + side), min(image.height, cy - side // 2 + side)
    return _fill(image, x0, y0, x1, y1)


def cutout(image: ImageBuffer, spec: AugmentSpec, rng: np.random.Generator) -> ImageBuffer:
    side = spec.cutout_size or max(1, min(image.height, image.width) // 4)
    cy = int(rng.integers(0, image.height))
    cx = int(rng.integers(0, image.width))
    return cutout_region(image, cx, cy, side)


def random_erase(image: ImageBuffer, spec: AugmentSpec, rng: np.random.Generator) -> ImageBuffer:
    """
    Fill one rectangle with uniform noise.

    Area fraction and aspect ratio are drawn until the rectangle fits, at
    most ``erase_attempts`` times; the image is returned unchanged otherwise.
    """
    area = image.height * image.width
    for _ in range(spec.erase_attempts):
        target = rng.uniform(*spec.erase_area) * area
        aspect = rng.uniform(*spec.erase_aspect)
        h = int(round(math.sqrt(target * aspect)))
        w = int(round(math.sqrt(target / aspect)))
        if 1 <= h <= image.height and 1 <= w <= image.width:
            y0 = int(rng.integers(0, image.height - h + 1))
            x0 = int(rng.integers(0, image.width - w + 1))
            noise = rng.uniform(0.0, 1.0, (h, w, image.channels))
            return _fill(image, x0, y0, x0 + w, y0 + h, noise)
    logger.debug("Random erase found no fitting rectangle")
    return image


def grid_mask_plane(height: int, width: int, unit: int, ratio: float, offset_x: int, offset_y: int) -> np.ndarray:
    """
    Boolean H×W plane of dropped pixels.

    Every period of ``unit`` pixels drops a band of round(ratio·unit) rows
    and one of as many columns starting at the offset, keeping squares of
    side unit − band.
    """
    band = round_half_up(ratio * unit)
    rows = (np.arange(height) - offset_y) % unit < band
    cols = (np.arange(width) - offset_x) % unit < band
    return rows[:, None] | cols[None, :]


def gridmask(
    image: ImageBuffer,
    spec: AugmentSpec,
    rng: np.random.Generator,
    unit: Optional[int] = None,
    offsets: Optional[Tuple[int, int]] = None,
) -> ImageBuffer:
    if unit is None:
        lo, hi = spec.grid_unit
        unit = int(rng.integers(lo, min(hi, max(lo, min(image.height, image.width))) + 1))
    if offsets is None:
        offsets = (int(rng.integers(0, unit)), int(rng.integers(0, unit)))
    dropped = grid_mask_plane(image.height, image.width, unit, spec.grid_ratio, *offsets)
    data = image.writable()
    data[dropped] = 0.0
    return ImageBuffer(data)


def hide_and_seek(image: ImageBuffer, spec: AugmentSpec, rng: np.random.Generator) -> ImageBuffer:
    """Split into has_grid × has_grid patches and zero each with probability has_prob."""
    rows = np.linspace(0, image.height, spec.has_grid + 1).astype(int)
    cols = np.linspace(0, image.width, spec.has_grid + 1).astype(int)
    hidden = rng.random((spec.has_grid, spec.has_grid)) < spec.has_prob
    data = image.writable()
    for i in range(spec.has_grid):
        for j in range(spec.has_grid):
            if hidden[i, j]:
                data[rows[i]:rows[i + 1], cols[j]:cols[j + 1]] = 0.0
    return ImageBuffer(data)


def mixup(
    image_a: ImageBuffer,
    annotations_a: Sequence[Annotation],
    image_b: ImageBuffer,
    annotations_b: Sequence[Annotation],
    lam: float,
    image_id: Optional[int] = None,
) -> Tuple[ImageBuffer, Tuple[Annotation, ...]]:
    """
    Blend two images as lam·a + (1 − lam)·b.

    Both annotation lists are kept; a's carry weight lam and b's 1 − lam.
    With ``image_id`` every annotation is rebound to that image.
    """
    if image_a.shape != image_b.shape:
        raise DimensionMismatchError(f"Cannot mix images of shapes {image_a.shape} and {image_b.shape}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"Mix coefficient must lie in [0, 1], got {lam}")
    if lam == 1.0:
        mixed = image_a
    elif lam == 0.0:
        mixed = image_b
    else:
        mixed = ImageBuffer(np.clip(lam * image_a.data + (1.0 - lam) * image_b.data, 0.0, 1.0))
    def _tag(annotation: Annotation, weight: float) -> Annotation:
        target = annotation.image_id if image_id is None else image_id
        return Annotation(target, annotation.bbox, score=annotation.score, weight=weight)

    weighted = tuple(_tag(a, lam) for a in annotations_a) + tuple(_tag(b, 1.0 - lam) for b in annotations_b)
    return mixed, weighted


DROPPING_METHODS = {
    'cutout': cutout,
    'rerase': random_erase,
    'gridmask': gridmask,
    'has': hide_and_seek,
}


def apply_method(
    image: ImageBuffer,
    annotations: Sequence[Annotation],
    spec: AugmentSpec,
    rng: np.random.Generator,
    partner: Optional[Tuple[ImageBuffer, Sequence[Annotation]]] = None,
    image_id: Optional[int] = None,
) -> AugmentResult:
    """
    Full augmentation of one image.

    Dropping methods run before the baseline pipeline. Mixup runs the
    baseline geometry on both images (the partner is resized to match when
    the crop leaves different sizes), mixes with lam ~ Beta(alpha, alpha)
    and normalises last.
    """
    if spec.method in DROPPING_METHODS:
        image = DROPPING_METHODS[spec.method](image, spec, rng)

    if spec.method != MIXUP:
        return baseline_geometry(image, annotations, spec.baseline, rng)

    if partner is None:
        raise ValueError("Mixup needs a partner image")
    first = baseline_geometry(image, annotations, spec.baseline, rng)
    second = baseline_geometry(partner[0], partner[1], spec.baseline, rng)
    other, other_annotations = second.image, second.annotations
    if other.shape[:2] != first.image.shape[:2]:
        sx, sy = first.image.width / other.width, first.image.height / other.height
        other = resize_image(other, first.image.height, first.image.width)
        other_annotations = tuple(_with_box(a, a.bbox.scaled(sx, sy)) for a in other_annotations)

    lam = float(rng.beta(spec.mixup_alpha, spec.mixup_alpha))
    mixed, mixed_annotations = mixup(
        first.image, first.annotations, other, other_annotations, lam, image_id=image_id,
    )
    return AugmentResult(
        image=mixed,
        annotations=mixed_annotations,
        normalized=normalize(mixed, spec.baseline.means),
        flipped=first.flipped,
        scale=first.scale,
        crop_origin=first.crop_origin,
        mix_weight=lam,
    )
