"""
Backbone stage layout and its structural report.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from core.exceptions import BackboneInvariantError, SeafarmError

from .mff import MffConfig, param_count

TOTAL_BLOCKS = 8
STAGES = (2, 3, 4, 5)
BLOCKS_PER_STAGE = 2
STAGE_KERNELS = {2: (3, 5, 7), 3: (3, 5, 7), 4: (3, 5, 7), 5: (3, 5, 7, 9)}


@dataclass(frozen=True)
class BackboneStage:
    index: int
    blocks: int
    kernels: Tuple[int, ...]
    channels: int

    def block_params(self) -> int:
        return param_count(MffConfig.zeros(self.channels, self.kernels))


@dataclass(frozen=True)
class BackboneDescriptor:
    stages: Tuple[BackboneStage, ...]

    def __post_init__(self):
        object.__setattr__(self, 'stages', tuple(self.stages))
        indices = tuple(stage.index for stage in self.stages)
        if indices != STAGES:
            raise BackboneInvariantError(f"Stages must be {list(STAGES)}, got {list(indices)}", stages=list(indices))
        total = sum(stage.blocks for stage in self.stages)
        if total != TOTAL_BLOCKS:
            raise BackboneInvariantError(
                f"Backbone must hold {TOTAL_BLOCKS} fusion blocks, got {total}", blocks=total,
            )
        for stage in self.stages:
            if tuple(stage.kernels) != STAGE_KERNELS[stage.index]:
                raise BackboneInvariantError(
                    f"Stage {stage.index} must use kernels {list(STAGE_KERNELS[stage.index])}, "
                    f"got {list(stage.kernels)}",
                    stage=stage.index,
                )
            if stage.channels < 1:
                raise BackboneInvariantError(f"Stage {stage.index} width must be positive", stage=stage.index)


def default_backbone(widths: Sequence[int]) -> BackboneDescriptor:
    """Two fusion blocks per stage 2–5 with the given channel widths."""
    if len(widths) != len(STAGES):
        raise BackboneInvariantError(f"Expected {len(STAGES)} stage widths, got {len(widths)}")
    return BackboneDescriptor(tuple(
        BackboneStage(index=index, blocks=BLOCKS_PER_STAGE, kernels=STAGE_KERNELS[index], channels=int(width))
        for index, width in zip(STAGES, widths)
    ))


def describe_backbone(descriptor: BackboneDescriptor) -> Dict[str, Any]:
    """Per-stage blocks, kernels and parameter counts with their totals."""
    stages = []
    for stage in descriptor.stages:
        per_block = stage.block_params()
        stages.append({
            'stage': stage.index,
            'blocks': stage.blocks,
            'kernels': list(stage.kernels),
            'channels': stage.channels,
            'params_per_block': per_block,
            'params': per_block * stage.blocks,
        })
    return {
        'stages': stages,
        'total_blocks': sum(s['blocks'] for s in stages),
        'total_params': sum(s['params'] for s in stages),
    }


def block_prefix(stage: int, block: int) -> str:
    return f"stage{stage}.block{block}."


def init_backbone_weights(descriptor: BackboneDescriptor, rng: np.random.Generator, scale: float = 0.1) -> Dict[str, np.ndarray]:
    """Random weights for every block, named by stage and block."""
    tensors: Dict[str, np.ndarray] = {}
    for stage in descriptor.stages:
        for block in range(stage.blocks):
            cfg = MffConfig.random(stage.channels, stage.kernels, rng, scale=scale)
            tensors.update(cfg.to_weights(block_prefix(stage.index, block)))
    return tensors


def check_weights(descriptor: BackboneDescriptor, tensors: Mapping[str, np.ndarray]) -> List[str]:
    """
    Compare a weights container with the descriptor.

    Returns:
        One message per missing or mis-shaped block; empty when they agree
    """
    problems = []
    for stage in descriptor.stages:
        for block in range(stage.blocks):
            prefix = block_prefix(stage.index, block)
            try:
                cfg = MffConfig.from_weights(tensors, prefix=prefix)
            except SeafarmError as exc:
                problems.append(f"{prefix}: {exc.message}")
                continue
            if cfg.channels != stage.channels or cfg.kernels != tuple(stage.kernels):
                problems.append(
                    f"{prefix}: stored {cfg.channels} channels with kernels {list(cfg.kernels)}, "
                    f"expected {stage.channels} with {list(stage.kernels)}"
                )
    return problems
