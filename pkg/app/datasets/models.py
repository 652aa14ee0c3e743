"""
Domain types shared by every stage of the toolkit.

All types are immutable values; array payloads are stored as read-only copies.
"""
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from core.exceptions import DimensionMismatchError, InvalidConfigError, ManifestFormatError, NonFiniteInputError

Polygon = Tuple[Tuple[float, float], ...]


def _frozen_array(array, dtype=np.float64) -> np.ndarray:
    data = np.array(array, dtype=dtype, copy=True)
    data.setflags(write=False)
    return data


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """
    H×W×C raster of floating-point samples in [0, 1].

    8-bit files are divided by 255 on load; see ``datasets.imaging``.
    """

    data: np.ndarray

    def __post_init__(self):
        data = _frozen_array(self.data)
        if data.ndim == 2:
            data = _frozen_array(data[:, :, None])
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise DimensionMismatchError(
                f"Image data must be H×W×C with C in (1, 3), got shape {data.shape}",
                shape=list(data.shape),
            )
        if not np.all(np.isfinite(data)):
            raise NonFiniteInputError("Image data contains non-finite samples")
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise NonFiniteInputError(
                f"Image samples must lie in [0, 1], got [{data.min():.4g}, {data.max():.4g}]"
            )
        object.__setattr__(self, 'data', data)

    @classmethod
    def from_array(cls, array, clip: bool = False) -> 'ImageBuffer':
        data = np.asarray(array, dtype=np.float64)
        if clip:
            data = np.clip(data, 0.0, 1.0)
        return cls(data)

    @classmethod
    def filled(cls, height: int, width: int, value: float = 0.0, channels: int = 3) -> 'ImageBuffer':
        return cls(np.full((height, width, channels), value, dtype=np.float64))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    def region(self, x: int, y: int, width: int, height: int) -> 'ImageBuffer':
        return ImageBuffer(self.data[y:y + height, x:x + width])

    def writable(self) -> np.ndarray:
        """Return a mutable copy of the samples."""
        return np.array(self.data, copy=True)


@dataclass(frozen=True)
class BBox:
    """
    Axis-aligned box in continuous pixel coordinates.

    ``category`` indexes the owning manifest's category list.
    """

    x: float
    y: float
    w: float
    h: float
    category: int = 0

    @property
    def area(self) -> float:
        return max(self.w, 0.0) * max(self.h, 0.0)

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    def to_list(self) -> list:
        return [self.x, self.y, self.w, self.h]

    def is_within(self, width: float, height: float) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x2 <= width and self.y2 <= height

    def pixel_bounds(self, width: Optional[int] = None, height: Optional[int] = None) -> Tuple[int, int, int, int]:
        """
        Integer pixel rectangle (x0, y0, x1, y1) covering the box, end-exclusive.

        Clipped to the image when its dimensions are given.
        """
        x0 = int(math.floor(self.x))
        y0 = int(math.floor(self.y))
        x1 = int(math.ceil(self.x2))
        y1 = int(math.ceil(self.y2))
        if width is not None:
            x0, x1 = max(0, x0), min(width, x1)
        if height is not None:
            y0, y1 = max(0, y0), min(height, y1)
        return x0, y0, x1, y1

    def centre_bounds(self, width: int, height: int) -> Tuple[int, int, int, int]:
        """
        Pixel rectangle (x0, y0, x1, y1) of the pixels whose centre lies in the box, end-exclusive.

        Pixel column c is inside when x <= c + 0.5 < x + w; rows likewise.
        """
        x0 = max(0, int(math.ceil(self.x - 0.5)))
        y0 = max(0, int(math.ceil(self.y - 0.5)))
        x1 = min(width, int(math.ceil(self.x2 - 0.5)))
        y1 = min(height, int(math.ceil(self.y2 - 0.5)))
        return x0, y0, max(x0, x1), max(y0, y1)

    def translated(self, dx: float, dy: float) -> 'BBox':
        return replace(self, x=self.x + dx, y=self.y + dy)

    def scaled(self, sx: float, sy: Optional[float] = None) -> 'BBox':
        sy = sx if sy is None else sy
        return replace(self, x=self.x * sx, y=self.y * sy, w=self.w * sx, h=self.h * sy)


@dataclass(frozen=True)
class Annotation:
    """A box bound to an image, plus optional contour, score and mix weight."""

    image_id: int
    bbox: BBox
    id: Optional[int] = None
    polygon: Optional[Polygon] = None
    score: Optional[float] = None
    weight: float = 1.0

    @property
    def category(self) -> int:
        return self.bbox.category


@dataclass(frozen=True)
class ImageRecord:
    id: int
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class DatasetManifest:
    """Categories, images and annotations of one dataset."""

    categories: Tuple[str, ...]
    images: Tuple[ImageRecord, ...] = ()
    annotations: Tuple[Annotation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'categories', tuple(self.categories))
        object.__setattr__(self, 'images', tuple(self.images))
        object.__setattr__(self, 'annotations', tuple(self.annotations))

    def category_index(self, name: str) -> int:
        try:
            return self.categories.index(name)
        except ValueError:
            raise KeyError(f"Unknown category '{name}'") from None

    def category_name(self, index: int) -> str:
        if not 0 <= index < len(self.categories):
            raise ManifestFormatError(
                f"Category index {index} outside [0, {len(self.categories)})", category=index,
            )
        return self.categories[index]

    def image_index(self) -> Dict[int, ImageRecord]:
        """Records by id; the first record wins for duplicated ids."""
        index: Dict[int, ImageRecord] = {}
        for record in self.images:
            index.setdefault(record.id, record)
        return index

    def annotations_by_image(self) -> Dict[int, Tuple[Annotation, ...]]:
        grouped: Dict[int, list] = {record.id: [] for record in self.images}
        for annotation in self.annotations:
            grouped.setdefault(annotation.image_id, []).append(annotation)
        return {image_id: tuple(items) for image_id, items in grouped.items()}

    def iter_category(self, name: str) -> Iterator[Annotation]:
        index = self.category_index(name)
        return (a for a in self.annotations if a.category == index)


@dataclass(frozen=True, eq=False)
class ObjectCrop:
    """An extracted object patch with its alpha mask (one element of the object set)."""

    patch: ImageBuffer
    alpha: np.ndarray
    category: str
    source_image_id: int
    source_bbox: BBox

    def __post_init__(self):
        alpha = _frozen_array(self.alpha)
        if alpha.ndim == 3 and alpha.shape[2] == 1:
            alpha = _frozen_array(alpha[:, :, 0])
        if alpha.shape != self.patch.shape[:2]:
            raise DimensionMismatchError(
                f"Alpha {alpha.shape} does not match patch {self.patch.shape[:2]}",
                alpha_shape=list(alpha.shape),
                patch_shape=list(self.patch.shape[:2]),
            )
        if not np.any(alpha > 0.5):
            raise DimensionMismatchError("Alpha mask has no sample above 0.5")
        object.__setattr__(self, 'alpha', alpha)

    @property
    def height(self) -> int:
        return self.patch.height

    @property
    def width(self) -> int:
        return self.patch.width

    @property
    def aspect_ratio(self) -> float:
        return self.width / self.height


@dataclass(frozen=True)
class RngConfig:
    """Seed of the whole pipeline; derived streams are keyed by non-negative integers."""

    seed: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidConfigError(f"Seed must be a 64-bit unsigned integer, got {self.seed}", seed=self.seed)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(int(self.seed)))

    def stream(self, *keys: int) -> np.random.Generator:
        """Independent generator for (seed, *keys), e.g. (seed, image id, round)."""
        return np.random.default_rng(np.random.SeedSequence([int(self.seed), *[int(k) for k in keys]]))


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    image_id: Optional[int] = None
    annotation_index: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            'rule': self.rule,
            'message': self.message,
            'image_id': self.image_id,
            'annotation_index': self.annotation_index,
        }


__all__ = [
    'Annotation', 'BBox', 'DatasetManifest', 'ImageBuffer', 'ImageRecord',
    'ObjectCrop', 'Polygon', 'RngConfig', 'Violation',
]
