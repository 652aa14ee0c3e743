import pytest

from core.exceptions import InvalidConfigError

from compositor.forms import parse_generation_config, parse_policy, parse_synthesis
from compositor.models import PlacementPolicy, SynthesisSpec


class TestParsePolicy:
    def test_defaults(self):
        assert parse_policy(None) == PlacementPolicy()

    def test_values(self):
        policy = parse_policy({'vicinity_radius': 12, 'max_iou': 0.1, 'scale_min': 1, 'scale_max': 1})
        assert policy.vicinity_radius == 12.0
        assert policy.scale_range == (1.0, 1.0)
        assert policy.max_attempts == 50

    @pytest.mark.parametrize('block', [
        {'scale_min': 2.0, 'scale_max': 1.0},
        {'scale_min': -1.0},
        {'vicinity_factor': 0},
        {'max_iou': 1.0},
        {'max_attempts': 0},
    ])
    def test_invalid(self, block):
        with pytest.raises(InvalidConfigError) as excinfo:
            parse_policy(block)
        assert excinfo.value.to_dict()['block'] == 'policy'


class TestParseSynthesis:
    def test_defaults(self):
        assert parse_synthesis({}) == SynthesisSpec()

    def test_values(self):
        spec = parse_synthesis({
            'per_image': {'scallop': [1, 2]}, 'targets': {'scallop': 40}, 'mode': 'mixed', 'max_rounds': 2,
        })
        assert spec.range_for('scallop') == (1, 2)
        assert spec.targets == {'scallop': 40}
        assert spec.mode == 'mixed'
        assert spec.max_rounds == 2

    @pytest.mark.parametrize('block', [
        {'per_image': {'scallop': [3, 1]}},
        {'per_image': {'scallop': 2}},
        {'targets': {'scallop': -1}},
        {'targets': ['scallop']},
        {'mode': 'average'},
    ])
    def test_invalid(self, block):
        with pytest.raises(InvalidConfigError):
            parse_synthesis(block)

    def test_generation_config(self):
        spec, policy = parse_generation_config({'synthesis': {'targets': {'seaurchin': 5}}})
        assert spec.targets == {'seaurchin': 5}
        assert policy == PlacementPolicy()
