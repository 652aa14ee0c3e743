import struct

import numpy as np
import pytest

from core.exceptions import BackboneInvariantError, WeightsFormatError
from nnref.backbone import (
    STAGE_KERNELS,
    BackboneDescriptor,
    BackboneStage,
    check_weights,
    default_backbone,
    describe_backbone,
    init_backbone_weights,
)
from nnref.weights import load_weights, save_weights, stored_param_count


def stages(blocks=(2, 2, 2, 2), kernels=None, width=16):
    kernels = kernels or STAGE_KERNELS
    return tuple(
        BackboneStage(index=index, blocks=n, kernels=kernels[index], channels=width)
        for index, n in zip((2, 3, 4, 5), blocks)
    )


class TestDescriptor:
    def test_eight_blocks(self):
        report = describe_backbone(default_backbone([16, 16, 16, 16]))
        assert report['total_blocks'] == 8
        assert [s['kernels'] for s in report['stages']] == [[3, 5, 7], [3, 5, 7], [3, 5, 7], [3, 5, 7, 9]]

    def test_parameter_totals(self):
        report = describe_backbone(default_backbone([16, 16, 16, 16]))
        assert [s['params_per_block'] for s in report['stages']] == [2976, 2976, 2976, 4816]
        assert report['total_params'] == 2 * (3 * 2976 + 4816)

    def test_uneven_blocks_still_summing_to_eight(self):
        descriptor = BackboneDescriptor(stages(blocks=(1, 2, 2, 3)))
        assert describe_backbone(descriptor)['total_blocks'] == 8

    @pytest.mark.parametrize('blocks', [(2, 2, 2, 1), (2, 2, 2, 3)])
    def test_block_count(self, blocks):
        with pytest.raises(BackboneInvariantError):
            BackboneDescriptor(stages(blocks=blocks))

    def test_last_stage_kernels(self):
        kernels = {**STAGE_KERNELS, 5: (3, 5, 7)}
        with pytest.raises(BackboneInvariantError):
            BackboneDescriptor(stages(kernels=kernels))

    def test_missing_stage(self):
        with pytest.raises(BackboneInvariantError):
            BackboneDescriptor(stages()[1:])

    def test_width_count(self):
        with pytest.raises(BackboneInvariantError):
            default_backbone([16, 32, 64])


class TestWeightsContainer:
    def test_round_trip(self, tmp_path, rng):
        descriptor = default_backbone([4, 6, 8, 10])
        tensors = init_backbone_weights(descriptor, rng)
        loaded = load_weights(save_weights(tmp_path / 'net.mffw', tensors))
        assert list(loaded) == list(tensors)
        for name, array in tensors.items():
            np.testing.assert_array_equal(loaded[name], array.astype(np.float32))
        assert check_weights(descriptor, loaded) == []
        assert stored_param_count(loaded) == describe_backbone(descriptor)['total_params']

    def test_layout_mismatch(self, tmp_path, rng):
        tensors = init_backbone_weights(default_backbone([4, 6, 8, 10]), rng)
        problems = check_weights(default_backbone([4, 6, 8, 12]), tensors)
        assert len(problems) == 2
        assert all(p.startswith('stage5.') for p in problems)

    def test_missing_block(self, rng):
        descriptor = default_backbone([4, 4, 4, 4])
        tensors = {k: v for k, v in init_backbone_weights(descriptor, rng).items() if not k.startswith('stage3.block1.')}
        problems = check_weights(descriptor, tensors)
        assert len(problems) == 1 and problems[0].startswith('stage3.block1.')

    def test_header_layout(self, tmp_path):
        path = save_weights(tmp_path / 'one.mffw', {'w': np.array([[1.5, -2.0]])})
        blob = path.read_bytes()
        assert blob[:4] == b'MFFW'
        assert struct.unpack_from('<II', blob, 4) == (1, 1)
        assert blob[12:15] == b'\x01\x00w'
        assert struct.unpack_from('<B2I', blob, 15) == (2, 1, 2)
        assert struct.unpack('<2f', blob[-8:]) == (1.5, -2.0)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / 'bad.mffw'
        path.write_bytes(b'NOPE' + bytes(8))
        with pytest.raises(WeightsFormatError):
            load_weights(path)

    def test_truncated(self, tmp_path):
        path = save_weights(tmp_path / 'cut.mffw', {'w': np.ones((4, 4))})
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(WeightsFormatError):
            load_weights(path)

    def test_truncated_header(self, tmp_path):
        path = save_weights(tmp_path / 'cut.mffw', {'weights': np.ones(3)})
        path.write_bytes(path.read_bytes()[:14])
        with pytest.raises(WeightsFormatError):
            load_weights(path)

    def test_trailing_bytes(self, tmp_path):
        path = save_weights(tmp_path / 'long.mffw', {'w': np.ones(2)})
        path.write_bytes(path.read_bytes() + b'\x00')
        with pytest.raises(WeightsFormatError):
            load_weights(path)
