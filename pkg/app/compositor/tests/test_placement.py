import math

import numpy as np
import pytest

from core.exceptions import CropTooLargeError, PlacementFailedError
from datasets.models import BBox
from evaluation.metrics import iou

from compositor.models import PlacementPolicy
from compositor.placement import propose_placement, scaled_size
from compositor.tests.factories import make_crop

ANCHOR = BBox(28, 28, 8, 8, 1)


class TestVicinity:
    @pytest.mark.parametrize('seed', range(20))
    def test_center_lies_within_the_anchor_radius(self, seed):
        policy = PlacementPolicy()
        placement = propose_placement(
            [ANCHOR], make_crop('seaurchin'), 1, (64, 64), policy, np.random.default_rng(seed),
        )
        box = placement.box(1)
        cx, cy = box.center
        assert math.hypot(cx - 32, cy - 32) <= policy.radius_for(ANCHOR)
        assert iou(box, ANCHOR) <= policy.max_iou
        assert placement.anchor == ANCHOR
        assert policy.scale_range[0] <= placement.scale <= policy.scale_range[1]

    def test_absolute_radius(self):
        policy = PlacementPolicy(vicinity_radius=12.0)
        for seed in range(10):
            placement = propose_placement(
                [ANCHOR], make_crop('seaurchin'), 1, (64, 64), policy, np.random.default_rng(seed),
            )
            cx, cy = placement.box(1).center
            assert math.hypot(cx - 32, cy - 32) <= 12.0

    def test_only_given_anchors_count(self):
        placement = propose_placement(
            [ANCHOR], make_crop('seaurchin'), 1, (64, 64), PlacementPolicy(), np.random.default_rng(0), anchors=[],
        )
        assert placement.anchor is None


class TestUniformFallback:
    def test_position_is_deterministic_and_in_bounds(self):
        crop = make_crop('scallop', 6, 9)
        first = propose_placement([ANCHOR], crop, 2, (48, 64), PlacementPolicy(), np.random.default_rng(5))
        second = propose_placement([ANCHOR], crop, 2, (48, 64), PlacementPolicy(), np.random.default_rng(5))
        assert first == second
        assert first.anchor is None
        assert first.x >= 1 and first.x + first.width <= 63
        assert first.y >= 1 and first.y + first.height <= 47

    def test_scaled_size_rounds_half_up_with_a_floor(self):
        crop = make_crop('scallop', 8, 10)
        assert scaled_size(crop, 1.25) == (13, 10)
        assert scaled_size(crop, 0.05) == (3, 3)


class TestFailures:
    @pytest.mark.parametrize('category', [0, 1])
    def test_fully_tiled_background_has_no_valid_position(self, category):
        tiles = [BBox(1 + 10 * i, 1 + 10 * j, 10, 10, 0) for i in range(10) for j in range(10)]
        policy = PlacementPolicy(max_iou=0.1, scale_range=(1.0, 1.0))
        # every 10×10 position inside the margin overlaps some tile too much
        for x in range(1, 92):
            for y in range(1, 92):
                assert max(iou(BBox(x, y, 10, 10), tile) for tile in tiles) > 0.1

        with pytest.raises(PlacementFailedError) as excinfo:
            propose_placement(tiles, make_crop('seacucumber', 10, 10), category, (102, 102), policy,
                              np.random.default_rng(0))
        assert excinfo.value.to_dict()['attempts'] == 50

    def test_crop_larger_than_image(self):
        with pytest.raises(CropTooLargeError):
            propose_placement([], make_crop('scallop', 30, 30), 2, (30, 30), PlacementPolicy(), np.random.default_rng(0))
