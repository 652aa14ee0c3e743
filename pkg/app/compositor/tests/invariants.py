"""
Dataset-level placement checks over a generation report.
"""
import math

from datasets.models import BBox, DatasetManifest
from evaluation.metrics import iou

from compositor.models import EMBEDDED, PlacementPolicy


def placement_violations(manifest: DatasetManifest, report, policy: PlacementPolicy):
    """
    Every embedded record of the report checked against the final manifest.

    Returns one message per broken rule: the box is missing from the image,
    leaves the 1-pixel margin, overlaps another box of its image above
    ``policy.max_iou`` or lies outside its anchor's vicinity disk.
    """
    records = manifest.image_index()
    boxes = {
        image_id: [a.bbox for a in annotations]
        for image_id, annotations in manifest.annotations_by_image().items()
    }
    problems = []
    for image in report['images']:
        image_id = image['image_id']
        record = records[image_id]
        others = boxes.get(image_id, [])
        for entry in image['records']:
            if entry['status'] != EMBEDDED:
                continue
            box = BBox(*entry['bbox'], category=manifest.categories.index(entry['category']))
            if box not in others:
                problems.append(f"image {image_id}: embedded box {entry['bbox']} missing from the manifest")
            if box.x < 1 or box.y < 1 or box.x2 > record.width - 1 or box.y2 > record.height - 1:
                problems.append(f"image {image_id}: box {entry['bbox']} leaves the margin")
            for other in others:
                if other != box and iou(box, other) > policy.max_iou:
                    problems.append(f"image {image_id}: box {entry['bbox']} overlaps {other.to_list()}")
            if entry['anchor'] is not None:
                anchor = BBox(*entry['anchor'])
                (ax, ay), (bx, by) = anchor.center, box.center
                if math.hypot(bx - ax, by - ay) > policy.radius_for(anchor):
                    problems.append(f"image {image_id}: box {entry['bbox']} outside the vicinity of {entry['anchor']}")
    return problems
