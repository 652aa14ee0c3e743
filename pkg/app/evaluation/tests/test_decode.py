import numpy as np
import pytest

from core.exceptions import MalformedMapsError
from evaluation.decode import decode, find_peaks, merge_flip
from evaluation.models import HeadMaps


def head_maps(peaks, size=(8, 8), categories=1, wh=(8.0, 12.0), offset=(0.0, 0.0)):
    """Heat planes with the given {(category, row, col): score}, uniform size and offset maps."""
    heat = np.zeros((categories, *size))
    for (c, i, j), score in peaks.items():
        heat[c, i, j] = score
    wh_map = np.stack([np.full(size, wh[0]), np.full(size, wh[1])])
    offset_map = np.stack([np.full(size, offset[0]), np.full(size, offset[1])])
    return HeadMaps(heat, wh_map, offset_map)


class TestDecode:
    def test_empty_heat(self):
        assert decode(head_maps({})) == []

    def test_single_peak(self):
        maps = head_maps({(0, 2, 3): 0.9}, offset=(0.1, 0.2))
        [det] = decode(maps)
        assert det.score == 0.9
        assert det.bbox.center == pytest.approx((12.4, 8.8))
        assert (det.bbox.w, det.bbox.h) == (8.0, 12.0)
        assert det.bbox.x == pytest.approx(8.4)
        assert det.bbox.y == pytest.approx(2.8)

    def test_two_separated_peaks(self):
        dets = decode(head_maps({(0, 1, 1): 0.6, (0, 1, 4): 0.6}))
        assert sorted(d.bbox.center[0] for d in dets) == [4.0, 16.0]

    def test_plateau_keeps_ties(self):
        assert len(decode(head_maps({(0, 3, 3): 0.5, (0, 3, 4): 0.5}))) == 2

    def test_neighbour_suppressed(self):
        dets = decode(head_maps({(0, 3, 3): 0.8, (0, 3, 4): 0.5}))
        assert [d.score for d in dets] == [0.8]

    def test_categories_and_ranking(self):
        dets = decode(head_maps({(0, 1, 1): 0.3, (1, 5, 5): 0.7, (2, 1, 6): 0.5}, categories=3))
        assert [(d.category, d.score) for d in dets] == [(1, 0.7), (2, 0.5), (0, 0.3)]

    def test_top_k_before_threshold(self):
        maps = head_maps({(0, 1, 1): 0.9, (0, 1, 4): 0.8, (0, 5, 1): 0.005})
        assert len(decode(maps, top_k=2)) == 2
        assert len(decode(maps, top_k=100, score_thresh=0.001)) == 3
        assert len(decode(maps, top_k=100)) == 2

    def test_translation_by_whole_cells(self):
        base = decode(head_maps({(0, 2, 2): 0.9}))
        moved = decode(head_maps({(0, 3, 4): 0.9}))
        assert moved[0].bbox.x - base[0].bbox.x == pytest.approx(2 * 4)
        assert moved[0].bbox.y - base[0].bbox.y == pytest.approx(1 * 4)

    def test_stride(self):
        [det] = decode(head_maps({(0, 2, 3): 0.9}), stride=8)
        assert det.bbox.center == pytest.approx((24.0, 16.0))

    def test_image_id(self):
        assert decode(head_maps({(0, 2, 3): 0.9}), image_id=7)[0].image_id == 7


class TestPeaks:
    def test_border_cells(self):
        heat = np.zeros((1, 3, 3))
        heat[0, 0, 0] = 1.0
        peaks = find_peaks(heat)
        assert peaks[0, 0, 0]
        assert not peaks[0, 0, 1]


class TestMergeFlip:
    def test_mirrored_prediction_agrees(self):
        maps = head_maps({(0, 2, 1): 0.8})
        flipped = HeadMaps(maps.heat[:, :, ::-1], maps.wh[:, :, ::-1], maps.offset)
        merged = merge_flip(maps, flipped)
        np.testing.assert_allclose(merged.heat, maps.heat)
        np.testing.assert_allclose(merged.wh, maps.wh)

    def test_averages_scores(self):
        maps = head_maps({(0, 2, 1): 0.8})
        other = head_maps({(0, 2, 6): 0.4})
        assert merge_flip(maps, other).heat[0, 2, 1] == pytest.approx(0.6)


class TestHeadMaps:
    def test_size_map_shape(self):
        with pytest.raises(MalformedMapsError):
            HeadMaps(np.zeros((1, 4, 4)), np.zeros((2, 4, 5)), np.zeros((2, 4, 4)))

    def test_heat_range(self):
        with pytest.raises(MalformedMapsError):
            HeadMaps(np.full((1, 4, 4), 1.5), np.zeros((2, 4, 4)), np.zeros((2, 4, 4)))

    def test_non_finite(self):
        wh = np.zeros((2, 4, 4))
        wh[0, 1, 1] = np.inf
        with pytest.raises(MalformedMapsError):
            HeadMaps(np.zeros((1, 4, 4)), wh, np.zeros((2, 4, 4)))
