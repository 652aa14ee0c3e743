"""
Generate an expanded dataset of clone images.
"""
from pathlib import Path

from core.commands import ToolkitCommand, counts_argument
from core.utils import load_config_file
from datasets.manifests import load_manifest
from datasets.models import RngConfig
from datasets.profiles import get_profile

from compositor.forms import parse_generation_config
from compositor.generation import expand_backgrounds, generate_dataset
from compositor.object_set import build_object_set, image_loader, load_object_set


class Command(ToolkitCommand):
    help = 'Embed objects into backgrounds by Poisson blending until category targets are met'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', type=Path, required=True, help='Background manifest')
        parser.add_argument('--images', type=Path, default=None,
                            help='Image root (default: the manifest directory)')
        parser.add_argument('--objects', type=Path, default=None,
                            help='Object set directory written by crop-objects')
        parser.add_argument('--crop-counts', type=counts_argument, default=None,
                            help='Harvest the object set from the manifest when --objects is absent')
        parser.add_argument('--targets', type=counts_argument, default=None,
                            help='Dataset-level totals per category (overrides config and profile)')
        parser.add_argument('--image-count', type=int, default=None,
                            help='Reuse backgrounds until the dataset has this many images')
        parser.add_argument('--config', type=Path, default=None,
                            help='Run configuration with "synthesis" and "policy" blocks')
        parser.add_argument('--mixed-gradients', action='store_true',
                            help='Use mixed source/background gradients as guidance')
        self.add_profile_arguments(parser)
        self.add_seed_argument(parser)
        self.add_jobs_argument(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        config = load_config_file(options['config'])
        synthesis = dict(config.get('synthesis') or {})
        image_count = options['image_count']

        profile = get_profile(options['profile']) if options['profile'] else None
        if profile is not None:
            profile_images, profile_totals = profile.scaled_targets(options['scale'])
            synthesis.setdefault('targets', profile_totals)
            if image_count is None:
                image_count = profile_images
        if options['targets'] is not None:
            synthesis['targets'] = options['targets']
        if options['mixed_gradients']:
            synthesis['mode'] = 'mixed'
        spec, policy = parse_generation_config({'synthesis': synthesis, 'policy': config.get('policy')})

        manifest = load_manifest(options['manifest'])
        image_root = options['images'] or options['manifest'].parent
        rng = RngConfig(options['seed'])

        if options['objects'] is not None:
            object_set = load_object_set(options['objects'])
        else:
            counts = options['crop_counts']
            if counts is None and profile is not None:
                counts = dict(profile.crop_counts)
            object_set = build_object_set(manifest, image_loader(image_root), counts or {}, rng.stream(0))

        if image_count is not None:
            manifest = expand_backgrounds(manifest, image_count)

        result = generate_dataset(
            manifest, object_set, spec, policy, rng,
            out_dir=self.output_dir(options), image_root=image_root, jobs=options['jobs'],
        )
        self.emit({
            'status': 'success' if not result.report['shortfall'] else 'shortfall',
            'manifest': str(result.manifest_path),
            'report': str(result.report_path),
            'final_counts': result.report['final_counts'],
            'shortfall': result.report['shortfall'],
        })
