"""
Report the region loss of every training pair.
"""
from pathlib import Path

from core.commands import ToolkitCommand
from core.utils import write_json

from losses.pairs import score_pairs
from losses.region import NORMS


class Command(ToolkitCommand):
    help = 'Region loss between real and fake images of a pair set written by pairs'

    def add_arguments(self, parser):
        parser.add_argument('--pairs', type=Path, required=True, help='pairs.json written by pairs')
        parser.add_argument('--norm', choices=NORMS, default='l1')
        parser.add_argument('--report', type=Path, default=None, help='Also write the report to this file')

    def run(self, **options):
        report = score_pairs(options['pairs'], norm=options['norm'])
        if options['report'] is not None:
            write_json(options['report'], report)
        self.emit({'status': 'success', **report})
