"""
Clone-image synthesis and real/fake training pairs.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from core.exceptions import IncompatibleCropError, InsufficientInstancesError, SeafarmError
from datasets.imaging import resize_bilinear, resize_image
from datasets.models import Annotation, ImageBuffer, ObjectCrop
from poisson.models import SolverParams
from poisson.solver import seamless_clone

from .models import EMBEDDED, FAILED, EmbedRecord, ObjectSet, PlacementPolicy, SynthesisResult, SynthesisSpec, TrainingPair
from .placement import propose_placement

logger = logging.getLogger(__name__)

# crop and box aspect ratios may differ by at most this factor
MAX_ASPECT_MISMATCH = 2.0


def rescale_crop(crop: ObjectCrop, width: int, height: int) -> ObjectCrop:
    """Bilinear rescale of patch and alpha to ``width`` × ``height``."""
    if (height, width) == (crop.height, crop.width):
        return crop
    return ObjectCrop(
        patch=resize_image(crop.patch, height, width),
        alpha=resize_bilinear(crop.alpha, height, width),
        category=crop.category,
        source_image_id=crop.source_image_id,
        source_bbox=crop.source_bbox,
    )


def draw_counts(object_set: ObjectSet, spec: SynthesisSpec, rng: np.random.Generator) -> Dict[str, int]:
    """Per-image embed counts drawn uniformly from each category's range."""
    counts = {}
    for name in object_set.categories:
        lo, hi = spec.range_for(name)
        counts[name] = int(rng.integers(lo, hi + 1)) if hi > 0 else 0
    return counts


def synthesize(
    background: ImageBuffer,
    annotations: Sequence[Annotation],
    object_set: ObjectSet,
    spec: SynthesisSpec,
    policy: PlacementPolicy,
    rng: np.random.Generator,
    counts: Optional[Mapping[str, int]] = None,
    image_id: int = 0,
    solver_params: Optional[SolverParams] = None,
) -> SynthesisResult:
    """
    Embed objects from the object set into one background.

    Objects are processed category by category in object-set order. Each one
    gets a placement, a bilinear rescale and a seamless clone; the placed box
    is appended to the annotations. Per-object placement or solver errors are
    recorded as failures and the remaining objects are still embedded.

    Args:
        background: Image receiving the objects
        annotations: Existing annotations of the background
        object_set: Crop pool; its category list indexes the new annotations
        spec: Per-image count ranges and guidance mode
        policy: Placement policy
        rng: Per-image random generator
        counts: Explicit embed counts per category, overriding the ranges
        image_id: Id stamped on new annotations
        solver_params: Poisson solver tolerance and budget

    Returns:
        SynthesisResult with the clone image, input + new annotations and one
        record per attempted object

    Raises:
        InsufficientInstancesError: a category is requested but has no crops
    """
    counts = dict(counts) if counts is not None else draw_counts(object_set, spec, rng)
    for name, n in counts.items():
        if n > 0 and not object_set.for_category(name):
            raise InsufficientInstancesError(name, 0, n)

    image = background
    output: List[Annotation] = list(annotations)
    anchors = [a.bbox for a in annotations]
    records: List[EmbedRecord] = []

    for name in object_set.categories:
        pool = object_set.for_category(name)
        category = object_set.category_index(name)
        for _ in range(counts.get(name, 0)):
            crop = pool[int(rng.integers(len(pool)))]
            try:
                placement = propose_placement(
                    [a.bbox for a in output], crop, category, (image.height, image.width),
                    policy, rng, anchors=anchors,
                )
                scaled = rescale_crop(crop, placement.width, placement.height)
                image = seamless_clone(image, scaled, placement.position, spec.mode, solver_params)
            except SeafarmError as exc:
                logger.warning(f"Image {image_id}: could not embed '{name}': {exc.message}")
                records.append(EmbedRecord(
                    category=name, status=FAILED, source_image_id=crop.source_image_id, error=exc.to_dict(),
                ))
                continue

            box = placement.box(category)
            output.append(Annotation(image_id=image_id, bbox=box))
            records.append(EmbedRecord(
                category=name,
                status=EMBEDDED,
                source_image_id=crop.source_image_id,
                bbox=box.to_list(),
                scale=placement.scale,
                anchored=placement.anchor is not None,
                anchor=placement.anchor.to_list() if placement.anchor is not None else None,
            ))

    return SynthesisResult(image=image, annotations=tuple(output), records=tuple(records))


def _compatible(crop: ObjectCrop, width: int, height: int) -> bool:
    ratio = crop.aspect_ratio / (width / height)
    return 1.0 / MAX_ASPECT_MISMATCH <= ratio <= MAX_ASPECT_MISMATCH


def build_training_pair(
    image: ImageBuffer,
    annotations: Sequence[Annotation],
    object_set: ObjectSet,
    rng: np.random.Generator,
    cover: Optional[int] = None,
) -> TrainingPair:
    """
    Build a (real, fake) pair by pasting clone-sourced crops over annotated objects.

    The fake image takes each covered box's pixel rectangle from a
    same-category crop of compatible aspect ratio, rescaled to the rectangle
    and alpha-composited directly (no Poisson solve).

    Args:
        image: Original image
        annotations: Its annotations
        object_set: Crops harvested from clone images
        rng: Random generator
        cover: Number of annotations to cover, chosen at random; None covers all

    Raises:
        IncompatibleCropError: no same-category crop within the aspect tolerance
    """
    order = rng.permutation(len(annotations))
    if cover is not None:
        order = order[:max(0, cover)]
    chosen = [annotations[i] for i in sorted(order)]

    fake = image.writable()
    for annotation in chosen:
        name = object_set.categories[annotation.category]
        x0, y0, x1, y1 = annotation.bbox.centre_bounds(image.width, image.height)
        width, height = x1 - x0, y1 - y0
        if width < 1 or height < 1:
            continue
        pool = [c for c in object_set.for_category(name) if _compatible(c, width, height)]
        if not pool:
            raise IncompatibleCropError(
                f"No '{name}' crop has an aspect ratio compatible with a {width}x{height} box",
                category=name,
                box=annotation.bbox.to_list(),
            )
        crop = rescale_crop(pool[int(rng.integers(len(pool)))], width, height)
        alpha = crop.alpha[:, :, None]
        region = fake[y0:y1, x0:x1]
        fake[y0:y1, x0:x1] = alpha * crop.patch.data + (1.0 - alpha) * region

    return TrainingPair(real=image, fake=ImageBuffer(np.clip(fake, 0.0, 1.0)), covered=tuple(chosen))
