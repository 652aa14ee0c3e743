"""
Box overlap, average precision and mAP at IoU 0.5.
"""
import logging
from collections import defaultdict
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ManifestFormatError
from datasets.models import Annotation, BBox, DatasetManifest

from .models import ALL_POINT, ELEVEN_POINT, INTERPOLATIONS, Detection

logger = logging.getLogger(__name__)

GroundTruth = Union[BBox, Annotation]


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0 when either is degenerate."""
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return float(inter / union) if union > 0 else 0.0


def _split(gt: GroundTruth) -> Tuple[int, BBox]:
    if isinstance(gt, Annotation):
        return gt.image_id, gt.bbox
    return 0, gt


def match_detections(
    dets: Sequence[Detection], gts: Sequence[GroundTruth], iou_thresh: float = 0.5
) -> np.ndarray:
    """
    Greedy matching in descending score order.

    Each detection takes the unmatched ground truth of its image with the
    highest IoU, if that IoU reaches the threshold.

    Returns:
        True-positive flags in ranked order
    """
    by_image: Dict[int, List[BBox]] = defaultdict(list)
    for gt in gts:
        image_id, box = _split(gt)
        by_image[image_id].append(box)
    matched = {image_id: [False] * len(boxes) for image_id, boxes in by_image.items()}

    scores = np.array([d.score for d in dets], dtype=np.float64)
    order = np.argsort(-scores, kind='stable')
    flags = np.zeros(len(dets), dtype=bool)
    for rank, index in enumerate(order):
        det = dets[index]
        candidates = by_image.get(det.image_id, [])
        best, best_iou = -1, -1.0
        for k, box in enumerate(candidates):
            if matched[det.image_id][k]:
                continue
            overlap = iou(det.bbox, box)
            if overlap > best_iou:
                best, best_iou = k, overlap
        if best >= 0 and best_iou >= iou_thresh:
            matched[det.image_id][best] = True
            flags[rank] = True
    return flags


def precision_recall(flags: np.ndarray, gt_count: int) -> Tuple[np.ndarray, np.ndarray]:
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / gt_count
    precision = tp / np.maximum(tp + fp, np.finfo(np.float64).eps)
    return precision, recall


def area_under_pr(precision: np.ndarray, recall: np.ndarray, interpolation: str = ALL_POINT) -> float:
    if interpolation == ELEVEN_POINT:
        ap = 0.0
        for t in np.arange(0.0, 1.1, 0.1):
            above = recall >= t - 1e-12
            ap += (np.max(precision[above]) if np.any(above) else 0.0) / 11.0
        return float(ap)

    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    # precision envelope
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.where(mrec[1:] != mrec[:-1])[0]
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def average_precision(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruth],
    iou_thresh: float = 0.5,
    interpolation: str = ALL_POINT,
) -> float:
    """
    Average precision of one category.

    Ground truths given as bare boxes belong to image 0; annotations keep
    their image id. No ground truth and no detections scores 1.0, detections
    without ground truth score 0.0.

    Args:
        dets: Detections of the category
        gts: Ground-truth boxes or annotations of the category
        iou_thresh: Minimum IoU of a true positive
        interpolation: 'all' (precision envelope over every recall step) or '11point'
    """
    if interpolation not in INTERPOLATIONS:
        raise ValueError(f"Unknown interpolation '{interpolation}', choose from {INTERPOLATIONS}")
    if not gts:
        return 1.0 if not dets else 0.0
    if not dets:
        return 0.0
    precision, recall = precision_recall(match_detections(dets, gts, iou_thresh), len(gts))
    return area_under_pr(precision, recall, interpolation)


def map50(
    per_category: Mapping[str, Tuple[Sequence[Detection], Sequence[GroundTruth]]],
    interpolation: str = ALL_POINT,
    iou_thresh: float = 0.5,
) -> Tuple[Dict[str, float], float]:
    """
    Per-category AP and their unweighted mean.

    The mean runs over categories that have ground truth; APs of the other
    categories are still reported.
    """
    aps = {
        name: average_precision(dets, gts, iou_thresh, interpolation)
        for name, (dets, gts) in per_category.items()
    }
    present = [aps[name] for name, (_, gts) in per_category.items() if gts]
    if not present:
        logger.warning("No category has ground truth; mAP reported as 0.0")
        return aps, 0.0
    return aps, float(np.mean(present))


def evaluate_manifests(
    gt: DatasetManifest,
    dets: DatasetManifest,
    iou_thresh: float = 0.5,
    interpolation: str = ALL_POINT,
) -> Dict[str, Any]:
    """
    Score a detection manifest against a ground-truth manifest.

    Detections are matched by category name; every detection needs a score.

    Returns:
        Report with per-category AP, counts and the mean
    """
    grouped: Dict[str, Tuple[List[Detection], List[Annotation]]] = {name: ([], []) for name in gt.categories}
    for annotation in gt.annotations:
        grouped[gt.category_name(annotation.category)][1].append(annotation)

    for index, annotation in enumerate(dets.annotations):
        if annotation.score is None:
            raise ManifestFormatError(f"Detection {index} has no score", annotation_index=index)
        name = dets.category_name(annotation.category)
        if name not in grouped:
            raise ManifestFormatError(f"Detection {index} has unknown category '{name}'", annotation_index=index)
        try:
            detection = Detection(annotation.bbox, annotation.score, annotation.image_id)
        except ManifestFormatError as exc:
            raise ManifestFormatError(f"Detection {index}: {exc.message}", annotation_index=index) from exc
        grouped[name][0].append(detection)

    aps, mean = map50(grouped, interpolation=interpolation, iou_thresh=iou_thresh)
    logger.info(f"Evaluated {len(dets.annotations)} detections: mAP {mean:.4f}")
    return {
        'iou_threshold': iou_thresh,
        'interpolation': interpolation,
        'map50': mean,
        'per_category': {
            name: {'ap': aps[name], 'gt_count': len(gts), 'det_count': len(ds)}
            for name, (ds, gts) in grouped.items()
        },
    }
