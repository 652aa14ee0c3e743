"""
Decoding of centre-heatmap detector outputs.
"""
import logging
from typing import List

import numpy as np
from scipy import ndimage

from datasets.models import BBox

from .models import Detection, HeadMaps

logger = logging.getLogger(__name__)


def find_peaks(heat: np.ndarray) -> np.ndarray:
    """Boolean K×H×W mask of cells no smaller than any of their 8 neighbours (ties kept)."""
    local_max = ndimage.maximum_filter(heat, size=(1, 3, 3), mode='constant', cval=-np.inf)
    return heat >= local_max


def decode(
    maps: HeadMaps,
    top_k: int = 100,
    score_thresh: float = 0.01,
    stride: int = 4,
    image_id: int = 0,
) -> List[Detection]:
    """
    Turn head maps into detections.

    Peaks of every heat plane are ranked by score (stable in category, row,
    column order); the best ``top_k`` are kept and those below
    ``score_thresh`` dropped. A peak at cell (i, j) yields the centre
    ((j + offset_x)·stride, (i + offset_y)·stride) and the box size read
    from the wh map at that cell.

    Returns:
        Detections in descending score order
    """
    peaks = find_peaks(maps.heat)
    categories, rows, cols = np.nonzero(peaks)
    scores = maps.heat[categories, rows, cols]
    order = np.argsort(-scores, kind='stable')[:top_k]

    detections: List[Detection] = []
    for index in order:
        score = float(scores[index])
        if score < score_thresh:
            continue
        c, i, j = int(categories[index]), int(rows[index]), int(cols[index])
        width, height = float(maps.wh[0, i, j]), float(maps.wh[1, i, j])
        if width <= 0 or height <= 0:
            continue
        cx = (j + float(maps.offset[0, i, j])) * stride
        cy = (i + float(maps.offset[1, i, j])) * stride
        detections.append(Detection(
            bbox=BBox(cx - width / 2.0, cy - height / 2.0, width, height, c),
            score=score,
            image_id=image_id,
        ))

    logger.debug(f"Decoded {len(detections)} detections from {len(order)} peaks")
    return detections


def merge_flip(maps: HeadMaps, flipped: HeadMaps) -> HeadMaps:
    """
    Average a prediction with the prediction on the mirrored input.

    Heat and size maps of ``flipped`` are mirrored back before averaging;
    offsets come from the unflipped prediction.
    """
    return HeadMaps(
        heat=(maps.heat + flipped.heat[:, :, ::-1]) / 2.0,
        wh=(maps.wh + flipped.wh[:, :, ::-1]) / 2.0,
        offset=maps.offset,
    )
