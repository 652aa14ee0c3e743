"""
Manifest-level augmentation runs.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

import numpy as np

from core.dispatch import run_batch
from datasets.imaging import load_image, save_image
from datasets.manifests import (
    annotation_from_dict,
    annotation_to_dict,
    image_record_from_dict,
    image_record_to_dict,
    save_manifest,
)
from datasets.models import Annotation, DatasetManifest, ImageRecord, RngConfig

from .models import MIXUP, AugmentSpec
from .transforms import apply_method

logger = logging.getLogger(__name__)

MANIFEST_FILE = 'manifest.json'


@dataclass(frozen=True)
class AugmentRun:
    """Augmented manifest plus the images that could not be augmented."""

    manifest: DatasetManifest
    failures: Tuple[Dict[str, Any], ...] = ()

    @property
    def status(self) -> str:
        if not self.failures:
            return 'success'
        return 'partial' if self.manifest.images else 'failed'


def augment_payload(payload: Mapping[str, Any]) -> Dict[str, Any]:
    """Per-image unit of work: load, augment, write the PNG (and .npy when normalised)."""
    record = image_record_from_dict(payload['image'])
    spec = AugmentSpec.from_dict(payload['spec'])
    rng = RngConfig(payload['seed']).stream(record.id)
    image = load_image(payload['source_path'])
    annotations = [annotation_from_dict(entry) for entry in payload['annotations']]

    partner = None
    if spec.method == MIXUP:
        partner = (
            load_image(payload['partner_path']),
            [annotation_from_dict(entry) for entry in payload['partner_annotations']],
        )
    result = apply_method(image, annotations, spec, rng, partner=partner, image_id=record.id)

    output_path = Path(payload['output_path'])
    save_image(output_path, result.image)
    normalized_path = None
    if any(spec.baseline.means):
        normalized_path = output_path.with_suffix('.npy')
        np.save(normalized_path, result.normalized)

    return {
        'image_id': record.id,
        'width': result.image.width,
        'height': result.image.height,
        'annotations': [annotation_to_dict(a) for a in result.annotations],
        'normalized': str(normalized_path) if normalized_path else None,
        'mix_weight': result.mix_weight,
    }


def augment_manifest(
    manifest: DatasetManifest,
    image_root: Union[str, Path],
    spec: AugmentSpec,
    rng: RngConfig,
    out_dir: Union[str, Path],
    jobs: int = 1,
) -> AugmentRun:
    """
    Augment every image of a manifest and write the augmented dataset.

    Mixup partners are drawn per image from the stream (seed, image id, 1),
    excluding the image itself when another exists.

    Images whose task fails are left out of the manifest and listed in
    ``failures`` with their image id and error payload.

    Returns:
        AugmentRun with the manifest written to ``out_dir`` and the failures
    """
    from .tasks import augment_image_task

    image_root = Path(image_root)
    out_dir = Path(out_dir)
    by_image = manifest.annotations_by_image()
    records = list(manifest.images)

    payloads: List[Dict[str, Any]] = []
    for index, record in enumerate(records):
        payload = {
            'image': image_record_to_dict(record),
            'source_path': str(image_root / record.file_name),
            'output_path': str(out_dir / 'images' / f"{record.id:06d}.png"),
            'annotations': [annotation_to_dict(a) for a in by_image.get(record.id, ())],
            'spec': spec.to_dict(),
            'seed': rng.seed,
        }
        if spec.method == MIXUP:
            others = [i for i in range(len(records)) if i != index] or [index]
            partner = records[others[int(rng.stream(record.id, 1).integers(len(others)))]]
            payload['partner_path'] = str(image_root / partner.file_name)
            payload['partner_annotations'] = [annotation_to_dict(a) for a in by_image.get(partner.id, ())]
        payloads.append(payload)

    images: List[ImageRecord] = []
    annotations: List[Annotation] = []
    failures: List[Dict[str, Any]] = []
    for record, result in zip(records, run_batch(augment_image_task, payloads, jobs=jobs)):
        if result['status'] != 'success':
            failures.append({'image_id': record.id, 'error': result.get('error')})
            continue
        images.append(ImageRecord(record.id, f"images/{record.id:06d}.png", result['width'], result['height']))
        annotations.extend(annotation_from_dict(entry) for entry in result['annotations'])

    if failures:
        logger.warning(f"{len(failures)} of {len(records)} images failed to augment and were left out")

    augmented = DatasetManifest(categories=manifest.categories, images=tuple(images), annotations=tuple(annotations))
    save_manifest(out_dir / MANIFEST_FILE, augmented)
    logger.info(f"Augmented {len(images)} images with method '{spec.method}'")
    return AugmentRun(manifest=augmented, failures=tuple(failures))
