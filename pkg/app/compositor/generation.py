"""
Expanded-dataset generation: embed scheduling, per-image work and reports.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from core.dispatch import run_batch
from core.exceptions import InfeasibleTargetsError, InsufficientInstancesError, InvalidConfigError
from core.utils import write_json
from datasets.imaging import load_image, save_image
from datasets.manifests import (
    annotation_from_dict,
    annotation_to_dict,
    category_counts,
    image_record_from_dict,
    image_record_to_dict,
    save_manifest,
)
from datasets.models import Annotation, DatasetManifest, ImageRecord, RngConfig

from .models import EMBEDDED, ObjectSet, PlacementPolicy, SynthesisSpec
from .object_set import load_object_set_cached, save_object_set
from .synthesis import synthesize

logger = logging.getLogger(__name__)

IMAGES_DIR = 'images'
OBJECTS_DIR = 'objects'
MANIFEST_FILE = 'manifest.json'
REPORT_FILE = 'report.json'


@dataclass(frozen=True)
class GenerationResult:
    manifest: DatasetManifest
    report: Dict[str, Any]
    manifest_path: Path
    report_path: Path


def check_feasibility(
    existing: Mapping[str, int], image_count: int, spec: SynthesisSpec
) -> Dict[str, int]:
    """
    Validate the targets against per-image capacity.

    Returns:
        Embed deficit per targeted category

    Raises:
        InfeasibleTargetsError: a target is below the background count, above
            the reachable maximum or below the per-image minimum
    """
    deficits: Dict[str, int] = {}
    shortfall: Dict[str, int] = {}
    max_achievable: Dict[str, int] = {}
    reasons: List[str] = []

    for name, target in spec.targets.items():
        have = int(existing.get(name, 0))
        lo, hi = spec.range_for(name)
        deficit = target - have
        capacity = image_count * hi
        if deficit < 0:
            reasons.append(f"'{name}' backgrounds already hold {have} > target {target}")
            shortfall[name] = deficit
        elif deficit > capacity:
            reasons.append(f"'{name}' needs {deficit} embeds, at most {capacity} fit")
            shortfall[name] = deficit - capacity
        elif image_count * lo > deficit:
            reasons.append(f"'{name}' per-image minimum forces {image_count * lo} embeds, target allows {deficit}")
            shortfall[name] = deficit - image_count * lo
        else:
            deficits[name] = deficit
            continue
        max_achievable[name] = have + capacity

    if shortfall:
        raise InfeasibleTargetsError(shortfall, max_achievable, reason='; '.join(reasons))
    return deficits


def schedule_embeds(
    deficits: Mapping[str, int],
    image_ids: Sequence[int],
    spec: SynthesisSpec,
    categories: Sequence[str],
    used: Optional[Mapping[int, Mapping[str, int]]] = None,
    apply_minimum: bool = True,
) -> Dict[int, Dict[str, int]]:
    """
    Distribute embeds over images.

    Every image first gets its per-image minimum; the rest is dealt
    round-robin over the images, largest remaining deficit first, skipping
    images at their per-image maximum.

    Args:
        deficits: Embeds still needed per category
        image_ids: Images in dealing order
        spec: Per-image ranges
        categories: Category order for tie-breaking
        used: Embeds each image already received in earlier rounds
        apply_minimum: Whether to seed every image with its minimum

    Returns:
        Counts per image id and category (every category listed)
    """
    used = used or {}
    plan = {image_id: {name: 0 for name in categories} for image_id in image_ids}
    remaining = {name: int(deficits.get(name, 0)) for name in categories}

    if apply_minimum:
        for image_id in image_ids:
            for name in categories:
                if remaining[name] <= 0:
                    continue
                lo, _ = spec.range_for(name)
                plan[image_id][name] = lo
                remaining[name] -= lo

    def _room(image_id: int, name: str) -> int:
        _, hi = spec.range_for(name)
        return hi - plan[image_id][name] - used.get(image_id, {}).get(name, 0)

    cursor = 0
    n = len(image_ids)
    while n and any(count > 0 for count in remaining.values()):
        name = max((c for c in categories if remaining[c] > 0), key=lambda c: (remaining[c], -categories.index(c)))
        for step in range(n):
            image_id = image_ids[(cursor + step) % n]
            if _room(image_id, name) > 0:
                plan[image_id][name] += 1
                remaining[name] -= 1
                cursor = (cursor + step + 1) % n
                break
        else:
            logger.warning(f"No image has room for {remaining[name]} more '{name}' embeds")
            remaining[name] = 0

    return plan


def expand_backgrounds(manifest: DatasetManifest, image_count: int) -> DatasetManifest:
    """
    Reuse backgrounds cyclically until the manifest lists ``image_count`` images.

    Repeats get fresh ids above the largest existing one and carry copies of
    their source annotations. A manifest already that large is returned as is.
    """
    if image_count <= len(manifest.images) or not manifest.images:
        return manifest
    by_image = manifest.annotations_by_image()
    images = list(manifest.images)
    annotations = list(manifest.annotations)
    next_id = max(record.id for record in images) + 1
    for number in range(image_count - len(manifest.images)):
        source = manifest.images[number % len(manifest.images)]
        images.append(ImageRecord(next_id, source.file_name, source.width, source.height))
        annotations.extend(
            Annotation(next_id, a.bbox, polygon=a.polygon) for a in by_image.get(source.id, ())
        )
        next_id += 1
    logger.info(f"Expanded {len(manifest.images)} backgrounds to {image_count} images")
    return DatasetManifest(categories=manifest.categories, images=tuple(images), annotations=tuple(annotations))


def synthesize_payload(payload: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Per-image unit of work: load, embed, write.

    The payload is JSON-serialisable so it can travel to a Celery worker.
    """
    record = image_record_from_dict(payload['image'])
    object_set = load_object_set_cached(payload['objects_dir'])
    background = load_image(payload['source_path'])
    annotations = [annotation_from_dict(entry) for entry in payload['annotations']]
    rng = RngConfig(payload['seed']).stream(record.id, payload['round'])

    result = synthesize(
        background,
        annotations,
        object_set,
        SynthesisSpec.from_dict(payload['spec']),
        PlacementPolicy.from_dict(payload['policy']),
        rng,
        counts=payload['counts'],
        image_id=record.id,
    )
    save_image(payload['output_path'], result.image)
    return {
        'image_id': record.id,
        'annotations': [annotation_to_dict(a) for a in result.annotations],
        'records': [dict(r.to_dict(), round=payload['round']) for r in result.records],
        'embedded': result.embedded_counts(),
    }


def _output_name(record: ImageRecord) -> str:
    return f"{IMAGES_DIR}/{record.id:06d}_{Path(record.file_name).stem}.png"


def generate_dataset(
    backgrounds: DatasetManifest,
    object_set: ObjectSet,
    spec: SynthesisSpec,
    policy: PlacementPolicy,
    rng: RngConfig,
    out_dir: Union[str, Path],
    image_root: Union[str, Path],
    jobs: int = 1,
) -> GenerationResult:
    """
    Generate an expanded dataset whose category totals hit the targets.

    Round 0 embeds the scheduled counts into every background. Failed embeds
    are rescheduled onto images with spare capacity, using the previous
    round's clone as background, for up to ``spec.max_rounds`` rounds.

    Args:
        backgrounds: Background manifest
        object_set: Crop pool
        spec: Targets, per-image ranges and guidance mode
        policy: Placement policy
        rng: Pipeline seed; each image uses the stream (seed, image id, round)
        out_dir: Output directory (images/, objects/, manifest and report)
        image_root: Directory the background file names are relative to
        jobs: Concurrent images in eager mode

    Returns:
        GenerationResult with the written manifest and report

    Raises:
        InfeasibleTargetsError: targets unreachable with the per-image ranges
    """
    from .tasks import synthesize_image_task

    out_dir = Path(out_dir)
    image_root = Path(image_root)
    categories = list(backgrounds.categories)
    image_ids = [record.id for record in backgrounds.images]

    if list(object_set.categories) != categories:
        raise InvalidConfigError(
            f"Object set categories {list(object_set.categories)} differ from manifest categories {categories}"
        )
    unknown = sorted(set(spec.targets) - set(categories))
    if unknown:
        raise InvalidConfigError(f"Targets name unknown categories {unknown}", categories=unknown)

    existing = category_counts(backgrounds)
    deficits = check_feasibility(existing, len(image_ids), spec)
    for name, deficit in deficits.items():
        if deficit > 0 and not object_set.for_category(name):
            raise InsufficientInstancesError(name, 0, deficit)
    plan = schedule_embeds(deficits, image_ids, spec, categories)

    objects_dir = out_dir / OBJECTS_DIR
    save_object_set(objects_dir, object_set)

    by_image = backgrounds.annotations_by_image()
    state: Dict[int, Dict[str, Any]] = {}
    for record in backgrounds.images:
        state[record.id] = {
            'record': record,
            'source_path': str(image_root / record.file_name),
            'output_path': str(out_dir / _output_name(record)),
            'annotations': [annotation_to_dict(a) for a in by_image.get(record.id, ())],
            'embedded': {name: 0 for name in categories},
            'records': [],
            'errors': [],
        }

    common = {
        'objects_dir': str(objects_dir),
        'spec': spec.to_dict(),
        'policy': policy.to_dict(),
        'seed': rng.seed,
    }

    rounds = 0
    outstanding = dict(deficits)
    for round_index in range(spec.max_rounds):
        batch = [image_id for image_id in image_ids if round_index == 0 or any(plan[image_id].values())]
        if not batch:
            break
        rounds += 1
        scheduled = sum(sum(plan[i].values()) for i in batch)
        logger.info(f"Generation round {round_index}: {scheduled} embeds over {len(batch)} images")

        payloads = []
        for image_id in batch:
            entry = state[image_id]
            payloads.append({
                **common,
                'image': image_record_to_dict(entry['record']),
                'source_path': entry['source_path'],
                'output_path': entry['output_path'],
                'annotations': entry['annotations'],
                'counts': plan[image_id],
                'round': round_index,
            })

        for result in run_batch(synthesize_image_task, payloads, jobs=jobs):
            entry = state[result['image_id']]
            if result['status'] != 'success':
                entry['errors'].append(dict(result.get('error', {}), round=round_index))
                continue
            entry['annotations'] = result['annotations']
            entry['records'].extend(result['records'])
            entry['source_path'] = entry['output_path']
            for name, count in result['embedded'].items():
                entry['embedded'][name] += count
                outstanding[name] -= count

        for image_id in image_ids:
            entry = state[image_id]
            if not Path(entry['output_path']).exists():
                save_image(entry['output_path'], load_image(entry['source_path']))
                entry['source_path'] = entry['output_path']

        if not any(count > 0 for count in outstanding.values()):
            break
        used = {image_id: state[image_id]['embedded'] for image_id in image_ids}
        plan = schedule_embeds(outstanding, image_ids, spec, categories, used=used, apply_minimum=False)

    shortfall = {name: count for name, count in outstanding.items() if count > 0}
    if shortfall:
        logger.warning(f"Generation finished with shortfall {shortfall} after {rounds} rounds")

    images: List[ImageRecord] = []
    annotations: List[Annotation] = []
    for image_id in image_ids:
        entry = state[image_id]
        record = entry['record']
        images.append(ImageRecord(record.id, _output_name(record), record.width, record.height))
        annotations.extend(annotation_from_dict(item) for item in entry['annotations'])
    annotations = [
        Annotation(a.image_id, a.bbox, id=number, polygon=a.polygon, score=a.score, weight=a.weight)
        for number, a in enumerate(annotations, start=1)
    ]
    manifest = DatasetManifest(categories=tuple(categories), images=tuple(images), annotations=tuple(annotations))

    final_counts = category_counts(manifest)
    embedded_counts = {name: final_counts[name] - existing[name] for name in categories}
    all_records = [r for image_id in image_ids for r in state[image_id]['records']]
    report = {
        'seed': rng.seed,
        'rounds': rounds,
        'targets': dict(spec.targets),
        'background_counts': existing,
        'final_counts': final_counts,
        'embedded_counts': embedded_counts,
        'shortfall': shortfall,
        'placement_failures': sum(1 for r in all_records if r['status'] != EMBEDDED),
        'images': [
            {
                'image_id': image_id,
                'file_name': _output_name(state[image_id]['record']),
                'embedded': state[image_id]['embedded'],
                'records': state[image_id]['records'],
                'errors': state[image_id]['errors'],
            }
            for image_id in image_ids
        ],
    }

    manifest_path = save_manifest(out_dir / MANIFEST_FILE, manifest)
    report_path = write_json(out_dir / REPORT_FILE, report)
    logger.info(f"Generated {len(images)} images with final counts {final_counts}; report at {report_path}")
    return GenerationResult(manifest=manifest, report=report, manifest_path=manifest_path, report_path=report_path)
