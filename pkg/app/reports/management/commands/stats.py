"""
Describe instance sizes of a dataset.
"""
import argparse
from pathlib import Path

from core.commands import ToolkitCommand
from datasets.manifests import load_manifest

from reports.models import DEFAULT_REFERENCE, DEFAULT_THRESHOLDS
from reports.stats import stats


def resolution_argument(value: str):
    try:
        width, height = (int(part) for part in value.lower().split('x'))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Resolution must look like 512x512, got '{value}'") from exc
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"Resolution must be positive, got '{value}'")
    return width, height


class Command(ToolkitCommand):
    help = 'Relative instance areas, small-object fractions, count tables and an SVG histogram'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', type=Path, required=True, help='Manifest to describe')
        parser.add_argument('--reference', type=resolution_argument, default=DEFAULT_REFERENCE,
                            help='Resolution (WIDTHxHEIGHT) the mean object size is reported at')
        parser.add_argument('--threshold', type=float, action='append', default=None,
                            help='Relative-area threshold; repeat for several (default 0.01654)')
        self.add_output_argument(parser)

    def run(self, **options):
        manifest = load_manifest(options['manifest'])
        thresholds = options['threshold'] or list(DEFAULT_THRESHOLDS)
        report = stats(manifest, options['reference'], thresholds, out_dir=self.output_dir(options))
        self.emit({'status': 'success', **report.to_dict()})
