"""
Value types of the compositor: object sets, placement policy and synthesis results.
"""
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from core.exceptions import DimensionMismatchError
from datasets.models import Annotation, BBox, ImageBuffer, ObjectCrop

DEFAULT_MAX_PER_IMAGE = 8

EMBEDDED = 'embedded'
FAILED = 'failed'


@dataclass(frozen=True)
class ObjectSet:
    """
    Pool of object crops per category name.

    ``categories`` is the full category list of the source manifest, so
    category indices of generated annotations line up with it.
    """

    categories: Tuple[str, ...]
    crops: Mapping[str, Tuple[ObjectCrop, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'categories', tuple(self.categories))
        crops = {}
        for name, items in self.crops.items():
            if name not in self.categories:
                raise KeyError(f"Object set lists crops for unknown category '{name}'")
            for crop in items:
                if crop.category != name:
                    raise DimensionMismatchError(
                        f"Crop of category '{crop.category}' filed under '{name}'"
                    )
            crops[name] = tuple(items)
        object.__setattr__(self, 'crops', crops)

    def for_category(self, name: str) -> Tuple[ObjectCrop, ...]:
        return self.crops.get(name, ())

    def category_index(self, name: str) -> int:
        return self.categories.index(name)

    def sizes(self) -> Dict[str, int]:
        return {name: len(self.crops.get(name, ())) for name in self.categories}

    def __len__(self) -> int:
        return sum(len(items) for items in self.crops.values())


@dataclass(frozen=True)
class PlacementPolicy:
    """
    Where embedded objects may go.

    The vicinity radius is ``vicinity_factor`` × the anchor box diagonal
    unless an absolute ``vicinity_radius`` in pixels is set.
    """

    vicinity_factor: float = 1.5
    vicinity_radius: Optional[float] = None
    max_iou: float = 0.3
    scale_range: Tuple[float, float] = (0.8, 1.25)
    max_attempts: int = 50

    def __post_init__(self):
        object.__setattr__(self, 'scale_range', tuple(float(s) for s in self.scale_range))
        if self.vicinity_factor <= 0:
            raise ValueError(f"Vicinity factor must be positive, got {self.vicinity_factor}")
        if self.vicinity_radius is not None and self.vicinity_radius <= 0:
            raise ValueError(f"Vicinity radius must be positive, got {self.vicinity_radius}")
        if not 0.0 <= self.max_iou < 1.0:
            raise ValueError(f"IoU threshold must lie in [0, 1), got {self.max_iou}")
        lo, hi = self.scale_range
        if not 0 < lo <= hi:
            raise ValueError(f"Scale range must be positive with lo <= hi, got {self.scale_range}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be at least 1, got {self.max_attempts}")

    def radius_for(self, anchor: BBox) -> float:
        if self.vicinity_radius is not None:
            return self.vicinity_radius
        return self.vicinity_factor * anchor.diagonal

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['scale_range'] = list(self.scale_range)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'PlacementPolicy':
        return cls(**{**data, 'scale_range': tuple(data.get('scale_range', (0.8, 1.25)))})


@dataclass(frozen=True)
class SynthesisSpec:
    """
    How many objects to embed.

    ``per_image`` maps a category to its (min, max) embeds per image;
    categories with a target but no range use (0, DEFAULT_MAX_PER_IMAGE).
    ``targets`` are dataset-level instance totals (existing + embedded).
    """

    per_image: Mapping[str, Tuple[int, int]] = field(default_factory=dict)
    targets: Mapping[str, int] = field(default_factory=dict)
    mode: str = 'source'
    max_rounds: int = 4

    def __post_init__(self):
        per_image = {name: (int(lo), int(hi)) for name, (lo, hi) in self.per_image.items()}
        for name, (lo, hi) in per_image.items():
            if not 0 <= lo <= hi:
                raise ValueError(f"Per-image range for '{name}' must satisfy 0 <= min <= max, got ({lo}, {hi})")
        targets = {name: int(count) for name, count in self.targets.items()}
        for name, count in targets.items():
            if count < 0:
                raise ValueError(f"Target for '{name}' must be non-negative, got {count}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")
        object.__setattr__(self, 'per_image', per_image)
        object.__setattr__(self, 'targets', targets)

    def range_for(self, name: str) -> Tuple[int, int]:
        if name in self.per_image:
            return self.per_image[name]
        if name in self.targets:
            return (0, DEFAULT_MAX_PER_IMAGE)
        return (0, 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'per_image': {name: list(bounds) for name, bounds in self.per_image.items()},
            'targets': dict(self.targets),
            'mode': self.mode,
            'max_rounds': self.max_rounds,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'SynthesisSpec':
        return cls(
            per_image={name: tuple(bounds) for name, bounds in data.get('per_image', {}).items()},
            targets=dict(data.get('targets', {})),
            mode=data.get('mode', 'source'),
            max_rounds=int(data.get('max_rounds', 4)),
        )


@dataclass(frozen=True)
class Placement:
    """Top-left pixel position and size of a placed crop."""

    x: int
    y: int
    width: int
    height: int
    scale: float
    anchor: Optional[BBox] = None

    def box(self, category: int) -> BBox:
        return BBox(float(self.x), float(self.y), float(self.width), float(self.height), category)

    @property
    def position(self) -> Tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True)
class EmbedRecord:
    """Outcome of one attempted embed; failures keep the error payload."""

    category: str
    status: str
    source_image_id: int
    bbox: Optional[List[float]] = None
    scale: Optional[float] = None
    anchored: bool = False
    anchor: Optional[List[float]] = None
    error: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    image: ImageBuffer
    annotations: Tuple[Annotation, ...]
    records: Tuple[EmbedRecord, ...]

    def embedded_counts(self) -> Dict[str, int]:
        return dict(Counter(r.category for r in self.records if r.status == EMBEDDED))

    @property
    def failures(self) -> Tuple[EmbedRecord, ...]:
        return tuple(r for r in self.records if r.status == FAILED)


@dataclass(frozen=True, eq=False)
class TrainingPair:
    """A real image and its fake twin with the covered boxes pasted over."""

    real: ImageBuffer
    fake: ImageBuffer
    covered: Tuple[Annotation, ...] = ()

    def covered_boxes(self) -> Tuple[BBox, ...]:
        return tuple(a.bbox for a in self.covered)

