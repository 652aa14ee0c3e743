"""
Augment a dataset with the baseline pipeline, an information-dropping method or mixup.
"""
from pathlib import Path

from core.commands import ToolkitCommand
from core.utils import load_config_file
from datasets.manifests import load_manifest
from datasets.models import RngConfig

from augment.forms import parse_augment_config
from augment.models import METHODS
from augment.pipeline import augment_manifest


class Command(ToolkitCommand):
    help = 'Write an augmented copy of a dataset (images plus manifest.json)'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', type=Path, required=True, help='Source manifest')
        parser.add_argument('--images', type=Path, default=None,
                            help='Image root (default: the manifest directory)')
        parser.add_argument('--method', choices=METHODS, default=None,
                            help='Augmentation method (overrides the config)')
        parser.add_argument('--config', type=Path, default=None,
                            help='Run configuration with "augment" and "baseline" blocks')
        self.add_seed_argument(parser)
        self.add_jobs_argument(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        spec = parse_augment_config(load_config_file(options['config']), method=options['method'])
        manifest = load_manifest(options['manifest'])
        image_root = options['images'] or options['manifest'].parent
        out_dir = self.output_dir(options)

        outcome = augment_manifest(
            manifest, image_root, spec, RngConfig(options['seed']), out_dir, jobs=options['jobs'],
        )
        augmented = outcome.manifest
        self.emit({
            'status': outcome.status,
            'method': spec.method,
            'manifest': str(out_dir / 'manifest.json'),
            'images': len(augmented.images),
            'annotations': len(augmented.annotations),
            'failures': list(outcome.failures),
        })
