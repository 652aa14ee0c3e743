"""
Harvest object crops from an annotated dataset.
"""
from pathlib import Path

from core.commands import ToolkitCommand, counts_argument
from datasets.manifests import load_manifest
from datasets.profiles import get_profile

from compositor.object_set import extract_crops, image_loader


class Command(ToolkitCommand):
    help = 'Crop annotated objects into an object set (RGBA PNGs plus index.json)'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', type=Path, required=True, help='Source manifest')
        parser.add_argument('--images', type=Path, default=None,
                            help='Image root (default: the manifest directory)')
        parser.add_argument('--counts', type=counts_argument, default=None,
                            help='Crops per category, e.g. seaurchin=1000,scallop=35')
        self.add_profile_arguments(parser)
        self.add_seed_argument(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        manifest = load_manifest(options['manifest'])
        counts = options['counts']
        if counts is None and options['profile']:
            counts = dict(get_profile(options['profile']).crop_counts)
        if not counts:
            counts = {name: 1 for name in manifest.categories}

        image_root = options['images'] or options['manifest'].parent
        object_set, index_path = extract_crops(
            manifest, image_loader(image_root), self.output_dir(options), counts, options['seed'],
        )
        self.emit({'status': 'success', 'index': str(index_path), 'crops': object_set.sizes()})
