"""
Dataset statistics report.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

DEFAULT_REFERENCE = (512, 512)
DEFAULT_THRESHOLDS = (0.01654,)
QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class StatsReport:
    """
    Instance size statistics of one manifest.

    Relative areas are box area over image area, one per annotation in
    manifest order. ``below_threshold`` maps each requested threshold to the
    fraction of instances strictly below it. The mean box size is measured
    after rescaling every image to ``reference_resolution`` (width, height).
    """

    category_counts: Dict[str, int]
    relative_areas: Tuple[float, ...]
    quantiles: Dict[float, float]
    below_threshold: Dict[float, float]
    mean_box_size: Tuple[float, float]
    mean_relative_area: float
    reference_resolution: Tuple[int, int] = DEFAULT_REFERENCE
    outputs: Dict[str, str] = field(default_factory=dict)

    @property
    def instance_count(self) -> int:
        return len(self.relative_areas)

    def to_dict(self) -> Dict[str, Any]:
        width, height = self.mean_box_size
        return {
            'instances': self.instance_count,
            'category_counts': dict(self.category_counts),
            'quantiles': {f"{q:g}": value for q, value in self.quantiles.items()},
            'below_threshold': {f"{t:g}": value for t, value in self.below_threshold.items()},
            'reference_resolution': list(self.reference_resolution),
            'mean_box_size': [width, height],
            'mean_relative_area': self.mean_relative_area,
            'mean_relative_area_percent': f"{100 * self.mean_relative_area:.3f}%",
            'outputs': dict(self.outputs),
        }
