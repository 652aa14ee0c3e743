"""
Build real/fake training pairs from originals and clone-sourced crops.
"""
from pathlib import Path

from django.core.management.base import CommandError

from core.commands import ToolkitCommand
from core.utils import read_json
from datasets.manifests import category_counts, load_manifest
from datasets.models import RngConfig

from compositor.generation import REPORT_FILE
from compositor.object_set import build_object_set, image_loader, load_object_set
from compositor.pairs import embedded_annotations, write_training_pairs


class Command(ToolkitCommand):
    help = 'Cover annotated objects with same-category crops cut from clone images'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', type=Path, required=True, help='Original manifest')
        parser.add_argument('--images', type=Path, default=None,
                            help='Image root of the originals (default: the manifest directory)')
        parser.add_argument('--clones', type=Path, default=None,
                            help='Manifest written by synthesize; the objects its report.json lists as embedded '
                                 'become the crop pool')
        parser.add_argument('--objects', type=Path, default=None,
                            help='Object set directory to use instead of --clones')
        parser.add_argument('--per-category', type=int, default=100,
                            help='Crops harvested per category from the clones')
        parser.add_argument('--cover', type=int, default=None,
                            help='Objects covered per image (default: all)')
        self.add_seed_argument(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        rng = RngConfig(options['seed'])
        if options['objects'] is not None:
            object_set = load_object_set(options['objects'])
        elif options['clones'] is not None:
            clones = embedded_annotations(
                load_manifest(options['clones']), read_json(options['clones'].parent / REPORT_FILE),
            )
            available = category_counts(clones)
            counts = {name: min(options['per_category'], n) for name, n in available.items()}
            object_set = build_object_set(
                clones, image_loader(options['clones'].parent), counts, rng.generator(),
            )
        else:
            raise CommandError('One of --clones or --objects is required')

        manifest = load_manifest(options['manifest'])
        index_path = write_training_pairs(
            manifest,
            options['images'] or options['manifest'].parent,
            object_set,
            rng,
            self.output_dir(options),
            cover=options['cover'],
        )
        self.emit({'status': 'success', 'pairs': str(index_path)})
