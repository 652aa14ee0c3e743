"""
Real/fake pair sets written to disk for the refinement stage.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Set, Tuple, Union

from core.utils import write_json
from datasets.imaging import load_image, save_image
from datasets.models import DatasetManifest, RngConfig

from .models import EMBEDDED, ObjectSet
from .synthesis import build_training_pair

logger = logging.getLogger(__name__)

PAIRS_FILE = 'pairs.json'

BoxKey = Tuple[int, str, Tuple[float, float, float, float]]


def _box_key(image_id: int, category: str, coords) -> BoxKey:
    return int(image_id), category, tuple(round(float(v), 6) for v in coords)


def embedded_annotations(clones: DatasetManifest, report: Mapping[str, Any]) -> DatasetManifest:
    """
    Keep only the clone annotations that a generation report lists as embedded.

    Objects the backgrounds already carried are dropped, so crops harvested
    from the result come from Poisson-blended embeds alone.
    """
    embedded: Set[BoxKey] = set()
    for image in report.get('images', ()):
        for record in image.get('records', ()):
            if record.get('status') == EMBEDDED and record.get('bbox') is not None:
                embedded.add(_box_key(image['image_id'], record['category'], record['bbox']))

    kept = tuple(
        a for a in clones.annotations
        if _box_key(a.image_id, clones.category_name(a.category), a.bbox.to_list()) in embedded
    )
    logger.info(f"Kept {len(kept)} of {len(clones.annotations)} clone annotations as embedded objects")
    return DatasetManifest(categories=clones.categories, images=clones.images, annotations=kept)


def write_training_pairs(
    manifest: DatasetManifest,
    image_root: Union[str, Path],
    object_set: ObjectSet,
    rng: RngConfig,
    out_dir: Union[str, Path],
    cover: Optional[int] = None,
) -> Path:
    """
    Build one pair per image and write real/, fake/ and the pair index.

    Each image draws from its own stream (seed, image id).

    Returns:
        Path of the pair index
    """
    image_root = Path(image_root)
    out_dir = Path(out_dir)
    by_image = manifest.annotations_by_image()
    entries: List[Dict[str, Any]] = []

    for record in manifest.images:
        image = load_image(image_root / record.file_name)
        pair = build_training_pair(
            image, by_image.get(record.id, ()), object_set, rng.stream(record.id), cover=cover,
        )
        name = f"{record.id:06d}.png"
        save_image(out_dir / 'real' / name, pair.real)
        save_image(out_dir / 'fake' / name, pair.fake)
        entries.append({
            'image_id': record.id,
            'real': f"real/{name}",
            'fake': f"fake/{name}",
            'width': record.width,
            'height': record.height,
            'covered': [
                {'category': manifest.category_name(box.category), 'bbox': box.to_list()}
                for box in pair.covered_boxes()
            ],
        })

    index_path = write_json(
        out_dir / PAIRS_FILE, {'seed': rng.seed, 'categories': list(manifest.categories), 'pairs': entries},
    )
    logger.info(f"Wrote {len(entries)} training pairs to {out_dir}")
    return index_path
