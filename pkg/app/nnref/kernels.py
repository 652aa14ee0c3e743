"""
Tensors, blur kernels and the blur-pooled downsamplers.

Tensors are N×C×H×W float64 arrays; all kernels are forward-only.
"""
from dataclasses import dataclass
from typing import Callable, Iterable, Tuple

import numpy as np
from scipy import ndimage

from core.exceptions import (
    ChannelMismatchError,
    DimensionMismatchError,
    InvalidConfigError,
    NonFiniteInputError,
    UnsupportedKernelError,
)

# unnormalised binomial rows: Triangle-3, Binomial-5, Binomial-7
BLUR_ROWS = {
    3: (1.0, 2.0, 1.0),
    5: (1.0, 4.0, 6.0, 4.0, 1.0),
    7: (1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0),
}
MBP_KERNEL_SIZES = (3, 5, 7)


@dataclass(frozen=True, eq=False)
class Tensor4:
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 4:
            raise ChannelMismatchError(f"Expected an N×C×H×W tensor, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise NonFiniteInputError("Tensor contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return self.data.shape

    @property
    def channels(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class BlurKernel:
    size: int
    vector: np.ndarray
    weights: np.ndarray


def make_blur_kernel(size: int) -> BlurKernel:
    """Normalised separable blur: outer product of the normalised binomial row with itself."""
    if size not in BLUR_ROWS:
        raise UnsupportedKernelError(f"Blur kernel size must be one of {sorted(BLUR_ROWS)}, got {size}", size=size)
    vector = np.array(BLUR_ROWS[size])
    vector = vector / vector.sum()
    return BlurKernel(size=size, vector=vector, weights=np.outer(vector, vector))


def max_pool_stride1(x: np.ndarray) -> np.ndarray:
    """2×2 max over each pixel and its right/bottom neighbours, edge-replicated."""
    padded = np.pad(x, ((0, 0), (0, 0), (0, 1), (0, 1)), mode='edge')
    return np.maximum.reduce([
        padded[:, :, :-1, :-1], padded[:, :, 1:, :-1], padded[:, :, :-1, 1:], padded[:, :, 1:, 1:],
    ])


def blur_downsample(x: np.ndarray, size: int) -> np.ndarray:
    """Blur every channel with a reflect-padded kernel, then keep every second row and column."""
    kernel = make_blur_kernel(size).weights
    blurred = ndimage.correlate(x, kernel[None, None, :, :], mode='mirror')
    return blurred[:, :, ::2, ::2]


def mbp_forward(x: Tensor4, n_groups: int = 3) -> Tensor4:
    """
    Multi-scale blur-pooled downsampling.

    Stride-1 max pooling on every channel, then the channels are split into
    ``n_groups`` contiguous groups (earlier groups take the remainder) and
    group i is blur-downsampled with kernel size (3, 5, 7)[i].
    """
    if not 1 <= n_groups <= len(MBP_KERNEL_SIZES):
        raise UnsupportedKernelError(
            f"n_groups must be between 1 and {len(MBP_KERNEL_SIZES)}, got {n_groups}", n_groups=n_groups,
        )
    if x.channels < n_groups:
        raise ChannelMismatchError(
            f"{x.channels} channels cannot be split into {n_groups} groups",
            channels=x.channels, n_groups=n_groups,
        )
    pooled = max_pool_stride1(x.data)
    groups = np.array_split(pooled, n_groups, axis=1)
    return Tensor4(np.concatenate(
        [blur_downsample(group, MBP_KERNEL_SIZES[i]) for i, group in enumerate(groups)], axis=1,
    ))


def maxblurpool_forward(x: Tensor4, size: int = 3) -> Tensor4:
    """Single-kernel variant: stride-1 max pooling then one blur size on all channels."""
    return Tensor4(blur_downsample(max_pool_stride1(x.data), size))


def maxpool_forward(x: Tensor4) -> Tensor4:
    """Plain 2×2 max pooling with stride 2 (odd sizes edge-padded)."""
    data = x.data
    pad_h, pad_w = data.shape[2] % 2, data.shape[3] % 2
    if pad_h or pad_w:
        data = np.pad(data, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), mode='edge')
    n, c, h, w = data.shape
    return Tensor4(data.reshape(n, c, h // 2, 2, w // 2, 2).max(axis=(3, 5)))


def shift_consistency(
    pool: Callable[[Tensor4], Tensor4], inputs: Iterable[np.ndarray], margin: int = 4
) -> float:
    """
    Mean output change when the input moves one pixel to the left.

    Each input has one more column than the pooled window; the statistic
    compares pool(x[..., :-1]) with pool(x[..., 1:]) away from the borders.
    """
    if margin < 0:
        raise InvalidConfigError(f"Border margin must be non-negative, got {margin}", margin=margin)
    inner = slice(margin, -margin or None)
    values = []
    for sample in inputs:
        sample = np.asarray(sample, dtype=np.float64)
        base = pool(Tensor4(sample[..., :-1])).data
        shifted = pool(Tensor4(sample[..., 1:])).data
        diff = np.abs(base - shifted)[:, :, inner, inner]
        if diff.size == 0:
            raise DimensionMismatchError(
                f"Margin {margin} leaves nothing of a {base.shape[2]}x{base.shape[3]} output", margin=margin,
            )
        values.append(diff.mean())
    return float(np.mean(values))
