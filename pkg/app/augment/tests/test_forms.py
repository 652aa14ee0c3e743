import pytest

from core.exceptions import InvalidConfigError

from augment.forms import parse_augment_config, parse_baseline
from augment.models import AugmentSpec, BaselineParams


class TestParseAugmentConfig:
    def test_defaults(self):
        assert parse_augment_config(None) == AugmentSpec()

    def test_blocks(self):
        spec = parse_augment_config({
            'augment': {'method': 'gridmask', 'grid_unit_min': 8, 'grid_unit_max': 8, 'grid_ratio': 0.5},
            'baseline': {'flip_prob': 0.0, 'crop_height': 32, 'crop_width': 48, 'means': [0.4, 0.5, 0.6]},
        })
        assert spec.method == 'gridmask'
        assert spec.grid_unit == (8, 8)
        assert spec.grid_ratio == 0.5
        assert spec.baseline.crop_size == (32, 48)
        assert spec.baseline.means == (0.4, 0.5, 0.6)
        assert spec.baseline.scale_range == (0.6, 1.3)

    def test_method_override(self):
        assert parse_augment_config({'augment': {'method': 'cutout'}}, method='has').method == 'has'

    def test_unknown_method(self):
        with pytest.raises(InvalidConfigError) as exc:
            parse_augment_config({'augment': {'method': 'autoaugment'}})
        assert exc.value.to_dict()['block'] == 'augment'
        assert 'method' in exc.value.to_dict()['errors']

    def test_reversed_range(self):
        with pytest.raises(InvalidConfigError) as exc:
            parse_augment_config({'augment': {'erase_area_min': 0.5, 'erase_area_max': 0.1}})
        assert 'erase_area_max' in exc.value.to_dict()['errors']


class TestParseBaseline:
    def test_defaults(self):
        assert parse_baseline({}) == BaselineParams()

    def test_crop_needs_both_sides(self):
        with pytest.raises(InvalidConfigError):
            parse_baseline({'crop_height': 32})

    def test_scale_bounds(self):
        with pytest.raises(InvalidConfigError):
            parse_baseline({'scale_min': 1.5, 'scale_max': 1.0})

    def test_means_must_be_numbers(self):
        with pytest.raises(InvalidConfigError) as exc:
            parse_baseline({'means': {'r': 0.5}})
        assert exc.value.to_dict()['block'] == 'baseline'
