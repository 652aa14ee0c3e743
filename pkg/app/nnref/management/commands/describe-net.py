"""
Structural report of the fusion-block backbone.
"""
from pathlib import Path

from core.commands import ToolkitCommand
from core.exceptions import BackboneInvariantError
from datasets.models import RngConfig

from nnref.backbone import (
    STAGE_KERNELS,
    STAGES,
    BackboneDescriptor,
    BackboneStage,
    check_weights,
    describe_backbone,
    init_backbone_weights,
)
from nnref.weights import load_weights, save_weights, stored_param_count


def int_list(value: str):
    return [int(item) for item in value.split(',') if item.strip()]


class Command(ToolkitCommand):
    help = 'Per-stage fusion blocks, kernel sequences and parameter counts for given stage widths'

    def add_arguments(self, parser):
        parser.add_argument('--widths', type=int_list, required=True,
                            help='Channel width of stages 2-5, e.g. 24,40,80,160')
        parser.add_argument('--blocks', type=int_list, default=None,
                            help='Blocks per stage (default 2,2,2,2)')
        parser.add_argument('--weights', type=Path, default=None,
                            help='Weights container to compare against the layout')
        parser.add_argument('--write-weights', type=Path, default=None,
                            help='Write randomly initialised weights for the layout')
        self.add_seed_argument(parser)

    def run(self, **options):
        widths = options['widths']
        blocks = options['blocks'] or [2] * len(STAGES)
        if len(widths) != len(STAGES) or len(blocks) != len(STAGES):
            raise BackboneInvariantError(
                f"Expected {len(STAGES)} widths and block counts, got {len(widths)} and {len(blocks)}"
            )
        descriptor = BackboneDescriptor(tuple(
            BackboneStage(index=index, blocks=n, kernels=STAGE_KERNELS[index], channels=width)
            for index, n, width in zip(STAGES, blocks, widths)
        ))
        report = describe_backbone(descriptor)

        if options['write_weights'] is not None:
            tensors = init_backbone_weights(descriptor, RngConfig(options['seed']).generator())
            report['written_weights'] = str(save_weights(options['write_weights'], tensors))

        if options['weights'] is not None:
            tensors = load_weights(options['weights'])
            problems = check_weights(descriptor, tensors)
            report['stored_params'] = stored_param_count(tensors)
            report['weights_match'] = not problems and report['stored_params'] == report['total_params']
            report['weights_problems'] = problems

        self.emit({'status': 'success', **report})
