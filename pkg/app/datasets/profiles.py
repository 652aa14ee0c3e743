"""
Dataset profiles: category lists and count defaults of known datasets.
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from core.utils import round_half_up

UDD_CATEGORIES = ('seacucumber', 'seaurchin', 'scallop')


@dataclass(frozen=True)
class DatasetProfile:
    """
    Defaults preloaded by ``--profile``.

    ``source_counts`` are the instance counts of the source dataset,
    ``crop_counts`` the object-set harvest and ``totals`` the per-category
    instance totals of the expanded dataset over ``image_count`` images.
    """

    name: str
    categories: Tuple[str, ...]
    source_counts: Mapping[str, int] = field(default_factory=dict)
    crop_counts: Mapping[str, int] = field(default_factory=dict)
    image_count: Optional[int] = None
    totals: Mapping[str, int] = field(default_factory=dict)

    def scaled_targets(self, scale: float = 1.0) -> Tuple[Optional[int], Dict[str, int]]:
        """Image count and totals multiplied by ``scale``, rounded half up."""
        images = round_half_up(self.image_count * scale) if self.image_count is not None else None
        totals = {name: round_half_up(count * scale) for name, count in self.totals.items()}
        return images, totals


PROFILES: Dict[str, DatasetProfile] = {
    'udd': DatasetProfile(
        name='udd',
        categories=UDD_CATEGORIES,
        source_counts={'seacucumber': 1148, 'seaurchin': 13592, 'scallop': 282},
        crop_counts={'seacucumber': 150, 'seaurchin': 1000, 'scallop': 35},
        image_count=18661,
        totals={'seacucumber': 18350, 'seaurchin': 101422, 'scallop': 9624},
    ),
    'pretrained': DatasetProfile(
        name='pretrained',
        categories=UDD_CATEGORIES,
        image_count=589080,
    ),
}


def get_profile(name: str) -> DatasetProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(f"Unknown profile '{name}', choose from {sorted(PROFILES)}") from None
