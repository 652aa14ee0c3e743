"""
Manifest serialization, validation and tallies.

The on-disk schema is documented in docs/manifest_schema.md.
"""
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

from core.exceptions import ManifestFormatError
from core.utils import read_json, write_json

from .models import Annotation, BBox, DatasetManifest, ImageRecord, Violation

logger = logging.getLogger(__name__)


def annotation_to_dict(annotation: Annotation) -> Dict[str, Any]:
    entry: Dict[str, Any] = {
        'image_id': annotation.image_id,
        'category_id': annotation.bbox.category,
        'bbox': annotation.bbox.to_list(),
    }
    if annotation.id is not None:
        entry['id'] = annotation.id
    if annotation.polygon is not None:
        entry['polygon'] = [list(point) for point in annotation.polygon]
    if annotation.score is not None:
        entry['score'] = annotation.score
    if annotation.weight != 1.0:
        entry['weight'] = annotation.weight
    return entry


def annotation_from_dict(entry: Mapping[str, Any]) -> Annotation:
    x, y, w, h = (float(v) for v in entry['bbox'])
    polygon = entry.get('polygon')
    return Annotation(
        image_id=int(entry['image_id']),
        bbox=BBox(x, y, w, h, int(entry['category_id'])),
        id=int(entry['id']) if entry.get('id') is not None else None,
        polygon=tuple((float(px), float(py)) for px, py in polygon) if polygon else None,
        score=float(entry['score']) if entry.get('score') is not None else None,
        weight=float(entry.get('weight', 1.0)),
    )


def image_record_to_dict(record: ImageRecord) -> Dict[str, Any]:
    return {'id': record.id, 'file_name': record.file_name, 'width': record.width, 'height': record.height}


def image_record_from_dict(entry: Mapping[str, Any]) -> ImageRecord:
    return ImageRecord(
        id=int(entry['id']),
        file_name=str(entry['file_name']),
        width=int(entry['width']),
        height=int(entry['height']),
    )


def manifest_to_dict(manifest: DatasetManifest) -> Dict[str, Any]:
    return {
        'categories': list(manifest.categories),
        'images': [image_record_to_dict(r) for r in manifest.images],
        'annotations': [annotation_to_dict(a) for a in manifest.annotations],
    }


def manifest_from_dict(payload: Mapping[str, Any]) -> DatasetManifest:
    """
    Build a manifest from its JSON document.

    Structural problems (missing keys, wrong types) raise ManifestFormatError;
    semantic problems are left for validate_manifest to report.
    """
    try:
        categories = tuple(str(name) for name in payload['categories'])
        images = tuple(image_record_from_dict(entry) for entry in payload['images'])
        annotations = tuple(annotation_from_dict(entry) for entry in payload['annotations'])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestFormatError(f"Malformed manifest: {exc!r}") from exc

    return DatasetManifest(categories=categories, images=images, annotations=annotations)


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    manifest = manifest_from_dict(read_json(path))
    logger.debug(
        f"Loaded manifest {path}: {len(manifest.images)} images, "
        f"{len(manifest.annotations)} annotations"
    )
    return manifest


def save_manifest(path: Union[str, Path], manifest: DatasetManifest) -> Path:
    return write_json(path, manifest_to_dict(manifest))


def validate_manifest(manifest: DatasetManifest) -> List[Violation]:
    """
    Check every manifest invariant.

    Returns:
        One violation per broken rule; an empty list means the manifest is valid
    """
    violations: List[Violation] = []
    records: Dict[int, ImageRecord] = {}

    for record in manifest.images:
        if record.id in records:
            violations.append(Violation('duplicate_image_id', f"Image id {record.id} is not unique", record.id))
        records.setdefault(record.id, record)
        if record.width <= 0 or record.height <= 0:
            violations.append(Violation(
                'image_dims', f"Image {record.id} has non-positive size {record.width}x{record.height}", record.id,
            ))

    for index, annotation in enumerate(manifest.annotations):
        box = annotation.bbox
        record = records.get(annotation.image_id)
        if record is None:
            violations.append(Violation(
                'unknown_image', f"Annotation {index} references unknown image {annotation.image_id}",
                annotation.image_id, index,
            ))
        if not 0 <= box.category < len(manifest.categories):
            violations.append(Violation(
                'unknown_category', f"Annotation {index} has category index {box.category}",
                annotation.image_id, index,
            ))
        if box.w <= 0 or box.h <= 0:
            violations.append(Violation(
                'degenerate_box', f"Annotation {index} has non-positive extent {box.w}x{box.h}",
                annotation.image_id, index,
            ))
        elif record is not None and not box.is_within(record.width, record.height):
            violations.append(Violation(
                'out_of_bounds',
                f"Annotation {index} box {box.to_list()} exceeds image {record.width}x{record.height}",
                annotation.image_id, index,
            ))

    if violations:
        logger.info(f"Manifest validation found {len(violations)} violations")
    return violations


def category_counts(manifest: DatasetManifest) -> Dict[str, int]:
    """Tally annotations per category, listing every category (zeros included)."""
    tally = Counter(annotation.category for annotation in manifest.annotations)
    return {name: tally.get(index, 0) for index, name in enumerate(manifest.categories)}
