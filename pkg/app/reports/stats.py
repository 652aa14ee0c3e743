"""
Instance size statistics: relative areas, small-object fractions and plots.
"""
import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from core.exceptions import EmptyManifestError, ManifestFormatError  # noqa: E402
from core.utils import write_json  # noqa: E402
from datasets.manifests import category_counts  # noqa: E402
from datasets.models import DatasetManifest  # noqa: E402

from .models import DEFAULT_REFERENCE, DEFAULT_THRESHOLDS, QUANTILES, StatsReport  # noqa: E402

logger = logging.getLogger(__name__)

AREAS_FILE = 'relative_areas.csv'
COUNTS_FILE = 'category_counts.csv'
HISTOGRAM_FILE = 'relative_area_histogram.svg'
REPORT_FILE = 'stats.json'

# Fixed id salt and no date keep the SVG byte-reproducible.
SVG_RC = {'svg.hashsalt': 'seafarm-stats', 'svg.fonttype': 'path'}


def instance_table(manifest: DatasetManifest, reference: Tuple[int, int] = DEFAULT_REFERENCE) -> pd.DataFrame:
    """
    One row per annotation with its box, relative area and size at the reference resolution.

    Raises:
        EmptyManifestError: the manifest has no annotations
        ManifestFormatError: an annotation names an unknown image or category
    """
    if not manifest.annotations:
        raise EmptyManifestError("Manifest has no annotations to describe")

    ref_w, ref_h = reference
    records = manifest.image_index()
    rows = []
    for index, annotation in enumerate(manifest.annotations):
        record = records.get(annotation.image_id)
        if record is None:
            raise ManifestFormatError(
                f"Annotation {index} references unknown image {annotation.image_id}", annotation_index=index,
            )
        box = annotation.bbox
        rows.append({
            'image_id': annotation.image_id,
            'annotation_id': annotation.id,
            'category': manifest.category_name(box.category),
            'width': box.w,
            'height': box.h,
            'relative_area': min(box.area / (record.width * record.height), 1.0),
            'reference_width': box.w * ref_w / record.width,
            'reference_height': box.h * ref_h / record.height,
        })
    return pd.DataFrame(rows)


def compute_stats(
    manifest: DatasetManifest,
    reference: Tuple[int, int] = DEFAULT_REFERENCE,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> Tuple[StatsReport, pd.DataFrame]:
    """Build the report and the per-instance table without writing anything."""
    table = instance_table(manifest, reference)
    areas = table['relative_area']

    quantiles = {float(q): float(v) for q, v in areas.quantile(list(QUANTILES)).items()}
    below = {float(t): float((areas < t).mean()) for t in thresholds}
    mean_w = float(table['reference_width'].mean())
    mean_h = float(table['reference_height'].mean())

    report = StatsReport(
        category_counts=category_counts(manifest),
        relative_areas=tuple(float(a) for a in areas),
        quantiles=quantiles,
        below_threshold=below,
        mean_box_size=(mean_w, mean_h),
        mean_relative_area=mean_w * mean_h / (reference[0] * reference[1]),
        reference_resolution=tuple(reference),
    )
    return report, table


def plot_histogram(areas: Sequence[float], thresholds: Sequence[float], path: Union[str, Path]) -> Path:
    """Histogram of relative areas with the thresholds marked, as SVG."""
    path = Path(path)
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(np.asarray(areas) * 100, bins=50, color='#3b6ea5', edgecolor='white')
        for threshold in thresholds:
            ax.axvline(threshold * 100, color='#c0392b', linestyle='--', label=f"{threshold * 100:.3f}%")
        ax.set_xlabel('Instance area (% of image)')
        ax.set_ylabel('Instances')
        if thresholds:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    return path


def stats(
    manifest: DatasetManifest,
    reference: Tuple[int, int] = DEFAULT_REFERENCE,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    out_dir: Optional[Union[str, Path]] = None,
) -> StatsReport:
    """
    Describe instance sizes of a manifest.

    With ``out_dir`` the per-instance table, the per-category counts, the
    histogram and the JSON report are written there.

    Raises:
        EmptyManifestError: the manifest has no annotations
    """
    report, table = compute_stats(manifest, reference, thresholds)
    if out_dir is None:
        return report

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table.to_csv(out_dir / AREAS_FILE, index=False)
    counts = pd.DataFrame(
        {'category': list(report.category_counts), 'instances': list(report.category_counts.values())}
    )
    counts.to_csv(out_dir / COUNTS_FILE, index=False)
    plot_histogram(report.relative_areas, thresholds, out_dir / HISTOGRAM_FILE)

    outputs = {
        'areas': str(out_dir / AREAS_FILE),
        'counts': str(out_dir / COUNTS_FILE),
        'histogram': str(out_dir / HISTOGRAM_FILE),
        'report': str(out_dir / REPORT_FILE),
    }
    report = replace(report, outputs=outputs)
    write_json(out_dir / REPORT_FILE, report.to_dict())
    logger.info(f"Stats for {report.instance_count} instances written to {out_dir}")
    return report
