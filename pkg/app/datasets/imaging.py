"""
PNG input/output and resampling for image buffers.
"""
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from django.conf import settings
from PIL import Image

from core.exceptions import DimensionMismatchError

from .models import ImageBuffer


def to_uint8(data: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] samples to 8 bits, rounding half up."""
    return np.floor(np.clip(data, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def from_uint8(data: np.ndarray) -> np.ndarray:
    return np.asarray(data, dtype=np.float64) / 255.0


def load_image(path: Union[str, Path]) -> ImageBuffer:
    """Load a PNG as a 3-channel image buffer (alpha, if any, is dropped)."""
    with Image.open(path) as image:
        rgb = image.convert('RGB')
        return ImageBuffer(from_uint8(np.asarray(rgb)))


def load_rgba(path: Union[str, Path]) -> Tuple[ImageBuffer, np.ndarray]:
    """Load a PNG as (RGB buffer, alpha plane in [0, 1])."""
    with Image.open(path) as image:
        rgba = np.asarray(image.convert('RGBA'))
    return ImageBuffer(from_uint8(rgba[:, :, :3])), from_uint8(rgba[:, :, 3])


def save_image(path: Union[str, Path], image: ImageBuffer, alpha: Optional[np.ndarray] = None) -> Path:
    """
    Write an image buffer as an 8-bit PNG with fixed encoder settings.

    Args:
        path: Destination file
        image: Buffer to encode (1 or 3 channels)
        alpha: Optional H×W alpha plane; produces an RGBA file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    pixels = to_uint8(image.data)
    if image.channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    if alpha is not None:
        if alpha.shape != image.shape[:2]:
            raise DimensionMismatchError(
                f"Alpha {alpha.shape} does not match image {image.shape[:2]}"
            )
        pixels = np.dstack([pixels, to_uint8(alpha)])
        mode = 'RGBA'
    else:
        mode = 'RGB'

    Image.fromarray(pixels, mode=mode).save(
        path, format='PNG', optimize=False, compress_level=settings.SEAFARM_PNG_COMPRESS_LEVEL
    )
    return path


def resize_plane(plane: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize of a single float plane."""
    image = Image.fromarray(np.ascontiguousarray(plane, dtype=np.float32), mode='F')
    resized = image.resize((width, height), resample=Image.Resampling.BILINEAR)
    return np.asarray(resized, dtype=np.float64)


def resize_bilinear(data: np.ndarray, height: int, width: int) -> np.ndarray:
    """
    Bilinear resize of an H×W or H×W×C array of [0, 1] samples.

    Results are clipped back to [0, 1] to absorb float32 rounding.
    """
    if height < 1 or width < 1:
        raise DimensionMismatchError(f"Cannot resize to {height}x{width}")
    if data.ndim == 2:
        return np.clip(resize_plane(data, height, width), 0.0, 1.0)
    planes = [resize_plane(data[:, :, c], height, width) for c in range(data.shape[2])]
    return np.clip(np.stack(planes, axis=2), 0.0, 1.0)


def resize_image(image: ImageBuffer, height: int, width: int) -> ImageBuffer:
    if (height, width) == image.shape[:2]:
        return image
    return ImageBuffer(resize_bilinear(image.data, height, width))
