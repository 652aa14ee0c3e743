"""
Score detections against ground truth.
"""
from pathlib import Path

from core.commands import ToolkitCommand
from core.utils import write_json
from datasets.manifests import load_manifest

from evaluation.metrics import evaluate_manifests
from evaluation.models import INTERPOLATIONS


class Command(ToolkitCommand):
    help = 'Per-category AP and mAP50 of a detection manifest'

    def add_arguments(self, parser):
        parser.add_argument('--gt', type=Path, required=True, help='Ground-truth manifest')
        parser.add_argument('--dets', type=Path, required=True, help='Detection manifest (annotations carry scores)')
        parser.add_argument('--iou', type=float, default=0.5, help='IoU threshold of a true positive')
        parser.add_argument('--interpolation', choices=INTERPOLATIONS, default='all')
        parser.add_argument('--report', type=Path, default=None, help='Also write the report to this file')

    def run(self, **options):
        report = evaluate_manifests(
            load_manifest(options['gt']),
            load_manifest(options['dets']),
            iou_thresh=options['iou'],
            interpolation=options['interpolation'],
        )
        if options['report'] is not None:
            write_json(options['report'], report)
        self.emit({'status': 'success', **report})
