"""
Multi-scale contextual feature fusion block.

expand (1×1, C → N·C) → N depth-wise branches in an additive cascade →
concatenate (+ expanded maps) → project (1×1, N·C → C) → + input.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from core.exceptions import ChannelMismatchError, ConfigMismatchError, UnsupportedKernelError

from .kernels import Tensor4


def _check_kernels(kernels: Sequence[int]) -> Tuple[int, ...]:
    kernels = tuple(int(k) for k in kernels)
    if not kernels:
        raise UnsupportedKernelError("Kernel sequence is empty")
    for k in kernels:
        if k < 1 or k % 2 == 0:
            raise UnsupportedKernelError(f"Depth-wise kernels must be odd and positive, got {k}", size=k)
    return kernels


@dataclass(frozen=True, eq=False)
class MffConfig:
    """
    Weights of one block.

    Shapes: expand_weight (N·C, C), expand_bias (N·C,), one (C, k, k)
    depth-wise weight and (C,) bias per kernel, proj_weight (C, N·C),
    proj_bias (C,). ``skip_connections=False`` drops the branch cascade and
    the expanded-map residual.
    """

    channels: int
    kernels: Tuple[int, ...]
    expand_weight: np.ndarray
    expand_bias: np.ndarray
    dw_weights: Tuple[np.ndarray, ...]
    dw_biases: Tuple[np.ndarray, ...]
    proj_weight: np.ndarray
    proj_bias: np.ndarray
    skip_connections: bool = field(default=True)

    def __post_init__(self):
        kernels = _check_kernels(self.kernels)
        object.__setattr__(self, 'kernels', kernels)
        c, n = int(self.channels), len(kernels)
        expected = {
            'expand_weight': (self.expand_weight, (n * c, c)),
            'expand_bias': (self.expand_bias, (n * c,)),
            'proj_weight': (self.proj_weight, (c, n * c)),
            'proj_bias': (self.proj_bias, (c,)),
        }
        for name, (array, shape) in expected.items():
            array = np.asarray(array, dtype=np.float64)
            if array.shape != shape:
                raise ConfigMismatchError(f"{name} must have shape {shape}, got {array.shape}", tensor=name)
            object.__setattr__(self, name, array)
        if len(self.dw_weights) != n or len(self.dw_biases) != n:
            raise ConfigMismatchError(
                f"Expected {n} depth-wise branches, got {len(self.dw_weights)} weights and {len(self.dw_biases)} biases"
            )
        weights, biases = [], []
        for i, k in enumerate(kernels):
            weight = np.asarray(self.dw_weights[i], dtype=np.float64)
            bias = np.asarray(self.dw_biases[i], dtype=np.float64)
            if weight.shape != (c, k, k):
                raise ConfigMismatchError(
                    f"Branch {i} weight must have shape {(c, k, k)} for kernel {k}, got {weight.shape}", branch=i,
                )
            if bias.shape != (c,):
                raise ConfigMismatchError(f"Branch {i} bias must have shape {(c,)}, got {bias.shape}", branch=i)
            weights.append(weight)
            biases.append(bias)
        object.__setattr__(self, 'dw_weights', tuple(weights))
        object.__setattr__(self, 'dw_biases', tuple(biases))

    @property
    def expansion(self) -> int:
        return len(self.kernels)

    @classmethod
    def zeros(cls, channels: int, kernels: Sequence[int], skip_connections: bool = True) -> 'MffConfig':
        kernels = _check_kernels(kernels)
        c, n = channels, len(kernels)
        return cls(
            channels=c,
            kernels=kernels,
            expand_weight=np.zeros((n * c, c)),
            expand_bias=np.zeros(n * c),
            dw_weights=tuple(np.zeros((c, k, k)) for k in kernels),
            dw_biases=tuple(np.zeros(c) for _ in kernels),
            proj_weight=np.zeros((c, n * c)),
            proj_bias=np.zeros(c),
            skip_connections=skip_connections,
        )

    @classmethod
    def random(
        cls, channels: int, kernels: Sequence[int], rng: np.random.Generator,
        scale: float = 0.1, skip_connections: bool = True,
    ) -> 'MffConfig':
        kernels = _check_kernels(kernels)
        c, n = channels, len(kernels)
        return cls(
            channels=c,
            kernels=kernels,
            expand_weight=rng.normal(0.0, scale, (n * c, c)),
            expand_bias=rng.normal(0.0, scale, n * c),
            dw_weights=tuple(rng.normal(0.0, scale, (c, k, k)) for k in kernels),
            dw_biases=tuple(rng.normal(0.0, scale, c) for _ in kernels),
            proj_weight=rng.normal(0.0, scale, (c, n * c)),
            proj_bias=rng.normal(0.0, scale, c),
            skip_connections=skip_connections,
        )

    def to_weights(self, prefix: str = '') -> Dict[str, np.ndarray]:
        """Named tensors for the weights container."""
        tensors = {
            f"{prefix}expand.weight": self.expand_weight,
            f"{prefix}expand.bias": self.expand_bias,
        }
        for i in range(self.expansion):
            tensors[f"{prefix}branch.{i}.weight"] = self.dw_weights[i]
            tensors[f"{prefix}branch.{i}.bias"] = self.dw_biases[i]
        tensors[f"{prefix}proj.weight"] = self.proj_weight
        tensors[f"{prefix}proj.bias"] = self.proj_bias
        return tensors

    @classmethod
    def from_weights(
        cls, tensors: Mapping[str, np.ndarray], prefix: str = '', skip_connections: bool = True,
        kernels: Optional[Sequence[int]] = None,
    ) -> 'MffConfig':
        """
        Rebuild a block from named tensors; kernel sizes are read from the
        branch weights unless given.
        """
        try:
            expand_weight = tensors[f"{prefix}expand.weight"]
            branches = []
            i = 0
            while f"{prefix}branch.{i}.weight" in tensors:
                branches.append((tensors[f"{prefix}branch.{i}.weight"], tensors[f"{prefix}branch.{i}.bias"]))
                i += 1
            config = cls(
                channels=int(np.shape(expand_weight)[1]),
                kernels=tuple(kernels) if kernels is not None else tuple(int(np.shape(w)[-1]) for w, _ in branches),
                expand_weight=expand_weight,
                expand_bias=tensors[f"{prefix}expand.bias"],
                dw_weights=tuple(w for w, _ in branches),
                dw_biases=tuple(b for _, b in branches),
                proj_weight=tensors[f"{prefix}proj.weight"],
                proj_bias=tensors[f"{prefix}proj.bias"],
                skip_connections=skip_connections,
            )
        except KeyError as exc:
            raise ConfigMismatchError(f"Missing tensor {exc.args[0]}", tensor=exc.args[0]) from exc
        return config


def pointwise(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """1×1 convolution."""
    return np.einsum('oc,nchw->nohw', weight, x) + bias[None, :, None, None]


def depthwise(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Same-size depth-wise convolution with zero padding."""
    out = np.empty_like(x)
    for c in range(x.shape[1]):
        out[:, c] = ndimage.correlate(x[:, c], weight[c][None, :, :], mode='constant', cval=0.0)
    return out + bias[None, :, None, None]


def mff_forward(x: Tensor4, cfg: MffConfig) -> Tensor4:
    """
    Forward pass of one block.

    With skip connections, branch i sees its group plus the previous branch
    output; the expanded maps are added back before projection.
    """
    if x.channels != cfg.channels:
        raise ChannelMismatchError(
            f"Block expects {cfg.channels} channels, input has {x.channels}",
            expected=cfg.channels, actual=x.channels,
        )
    expanded = pointwise(x.data, cfg.expand_weight, cfg.expand_bias)
    groups = np.split(expanded, cfg.expansion, axis=1)

    outputs = []
    previous = None
    for i, group in enumerate(groups):
        branch_in = group if previous is None or not cfg.skip_connections else group + previous
        previous = depthwise(branch_in, cfg.dw_weights[i], cfg.dw_biases[i])
        outputs.append(previous)

    fused = np.concatenate(outputs, axis=1)
    if cfg.skip_connections:
        fused = fused + expanded
    return Tensor4(x.data + pointwise(fused, cfg.proj_weight, cfg.proj_bias))


def param_count(cfg: MffConfig) -> int:
    """Scalar parameters: expansion C·NC + NC, branches k²·C + C each, projection NC·C + C."""
    c, n = cfg.channels, cfg.expansion
    expand = c * n * c + n * c
    branches = sum(k * k * c + c for k in cfg.kernels)
    project = n * c * c + c
    return expand + branches + project
