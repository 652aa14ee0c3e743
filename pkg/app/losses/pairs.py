"""
Region loss over a written pair set.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from core.exceptions import ManifestFormatError
from core.utils import read_json
from datasets.imaging import load_image
from datasets.models import BBox

from .region import L1, build_region_mask, region_loss

logger = logging.getLogger(__name__)


def score_pairs(index_path: Union[str, Path], norm: str = L1) -> Dict[str, Any]:
    """
    Region loss between the fake and real image of every pair.

    The mask marks the covered boxes listed in the pair index.

    Returns:
        Report with one entry per pair and the mean loss
    """
    index_path = Path(index_path)
    root = index_path.parent
    entries = []
    document = read_json(index_path)
    if not isinstance(document, dict) or not isinstance(document.get('pairs'), list):
        raise ManifestFormatError(f"{index_path} has no 'pairs' list", path=str(index_path))

    for number, pair in enumerate(document['pairs']):
        try:
            image_id = int(pair['image_id'])
            boxes = [BBox(*entry['bbox']) for entry in pair['covered']]
            names = sorted({str(entry['category']) for entry in pair['covered']})
            real_path, fake_path = root / pair['real'], root / pair['fake']
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestFormatError(f"Malformed pair {number} in {index_path}: {exc!r}", pair_index=number) from exc
        real = load_image(real_path)
        fake = load_image(fake_path)
        mask = build_region_mask(boxes, real.height, real.width)
        entries.append({
            'image_id': image_id,
            'covered': len(boxes),
            'categories': names,
            'region_loss': region_loss(fake, real, mask, norm=norm),
        })

    mean = float(np.mean([e['region_loss'] for e in entries])) if entries else 0.0
    logger.info(f"Scored {len(entries)} pairs: mean region loss {mean:.6f}")
    return {'norm': norm, 'pairs': entries, 'mean_region_loss': mean}
