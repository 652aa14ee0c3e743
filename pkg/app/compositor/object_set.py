"""
Object set harvesting, materialisation and loading.
"""
import hashlib
import logging
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from PIL import Image, ImageDraw

from core.exceptions import InsufficientInstancesError
from core.utils import read_json, slugify_name, write_json
from datasets.imaging import load_image, load_rgba, save_image
from datasets.models import Annotation, BBox, DatasetManifest, ImageBuffer, ImageRecord, ObjectCrop, RngConfig

from .models import ObjectSet

logger = logging.getLogger(__name__)

INDEX_FILE = 'index.json'

ImageSource = Union[Mapping[int, ImageBuffer], Callable[[ImageRecord], ImageBuffer]]


def image_loader(image_root: Union[str, Path]) -> Callable[[ImageRecord], ImageBuffer]:
    """Loader reading manifest images relative to ``image_root``."""
    root = Path(image_root)

    def _load(record: ImageRecord) -> ImageBuffer:
        return load_image(root / record.file_name)

    return _load


def _polygon_alpha(polygon, x0: int, y0: int, width: int, height: int) -> Optional[np.ndarray]:
    canvas = Image.new('L', (width, height), 0)
    ImageDraw.Draw(canvas).polygon([(px - x0, py - y0) for px, py in polygon], fill=255, outline=255)
    alpha = np.asarray(canvas, dtype=np.float64) / 255.0
    if not np.any(alpha > 0.5):
        return None
    return alpha


def crop_annotation(image: ImageBuffer, annotation: Annotation, category: str) -> ObjectCrop:
    """
    Cut an annotated object out of its image.

    The patch is the pixel rectangle covering the box. The alpha mask is the
    rasterised contour when the annotation has one, otherwise all ones.
    """
    x0, y0, x1, y1 = annotation.bbox.pixel_bounds(image.width, image.height)
    patch = image.region(x0, y0, x1 - x0, y1 - y0)
    alpha = None
    if annotation.polygon:
        alpha = _polygon_alpha(annotation.polygon, x0, y0, patch.width, patch.height)
        if alpha is None:
            logger.warning(
                f"Contour of annotation {annotation.id} on image {annotation.image_id} "
                f"covers no pixel; using the full box"
            )
    if alpha is None:
        alpha = np.ones(patch.shape[:2])
    return ObjectCrop(
        patch=patch,
        alpha=alpha,
        category=category,
        source_image_id=annotation.image_id,
        source_bbox=annotation.bbox,
    )


def build_object_set(
    manifest: DatasetManifest,
    images: ImageSource,
    per_category_counts: Mapping[str, int],
    rng: np.random.Generator,
) -> ObjectSet:
    """
    Sample object crops per category without replacement.

    Args:
        manifest: Source dataset
        images: Image buffers by image id, or a loader taking an ImageRecord
        per_category_counts: Number of crops to harvest per category name
        rng: Random generator driving the sampling

    Returns:
        ObjectSet whose category list is the manifest's

    Raises:
        InsufficientInstancesError: a category has fewer annotations than requested
    """
    for name in per_category_counts:
        manifest.category_index(name)

    cache: Dict[int, ImageBuffer] = {}
    records = manifest.image_index()

    def _image(image_id: int) -> ImageBuffer:
        if image_id not in cache:
            if callable(images):
                cache[image_id] = images(records[image_id])
            else:
                cache[image_id] = images[image_id]
        return cache[image_id]

    crops: Dict[str, Tuple[ObjectCrop, ...]] = {}
    for name in manifest.categories:
        requested = int(per_category_counts.get(name, 0))
        if requested <= 0:
            continue
        candidates = list(manifest.iter_category(name))
        if len(candidates) < requested:
            raise InsufficientInstancesError(name, len(candidates), requested)
        chosen = rng.choice(len(candidates), size=requested, replace=False)
        crops[name] = tuple(
            crop_annotation(_image(candidates[i].image_id), candidates[i], name) for i in chosen
        )
        logger.info(f"Harvested {requested} of {len(candidates)} '{name}' instances")

    return ObjectSet(categories=manifest.categories, crops=crops)


def save_object_set(out_dir: Union[str, Path], object_set: ObjectSet) -> Path:
    """
    Write every crop as an RGBA PNG plus an index document.

    Returns:
        Path of the index file
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries: List[dict] = []
    for name in object_set.categories:
        slug = slugify_name(name)
        for number, crop in enumerate(object_set.for_category(name)):
            file_name = f"{slug}_{number:05d}.png"
            save_image(out_dir / file_name, crop.patch, alpha=crop.alpha)
            entries.append({
                'file': file_name,
                'category': name,
                'source_image_id': crop.source_image_id,
                'source_bbox': crop.source_bbox.to_list(),
            })
    index_path = write_json(out_dir / INDEX_FILE, {
        'categories': list(object_set.categories),
        'crops': entries,
    })
    logger.info(f"Wrote {len(entries)} object crops to {out_dir}")
    return index_path


def load_object_set(directory: Union[str, Path]) -> ObjectSet:
    """Read an object set written by save_object_set."""
    directory = Path(directory)
    index = read_json(directory / INDEX_FILE)
    categories = tuple(index['categories'])
    crops: Dict[str, List[ObjectCrop]] = {}
    for entry in index['crops']:
        patch, alpha = load_rgba(directory / entry['file'])
        x, y, w, h = entry['source_bbox']
        name = entry['category']
        crops.setdefault(name, []).append(ObjectCrop(
            patch=patch,
            alpha=alpha,
            category=name,
            source_image_id=int(entry['source_image_id']),
            source_bbox=BBox(x, y, w, h, categories.index(name)),
        ))
    return ObjectSet(categories=categories, crops={name: tuple(items) for name, items in crops.items()})


@lru_cache(maxsize=8)
def _load_cached(directory: str, digest: str) -> ObjectSet:
    return load_object_set(directory)


def load_object_set_cached(directory: Union[str, Path]) -> ObjectSet:
    """load_object_set memoised on the directory and its index contents."""
    directory = Path(directory)
    digest = hashlib.sha256((directory / INDEX_FILE).read_bytes()).hexdigest()
    return _load_cached(str(directory.resolve()), digest)


def extract_crops(
    manifest: DatasetManifest,
    images: ImageSource,
    out_dir: Union[str, Path],
    counts: Mapping[str, int],
    seed: int,
) -> Tuple[ObjectSet, Path]:
    """
    Harvest crops and write them to ``out_dir``.

    Returns:
        (object set, index path)
    """
    object_set = build_object_set(manifest, images, counts, RngConfig(seed).generator())
    return object_set, save_object_set(out_dir, object_set)
