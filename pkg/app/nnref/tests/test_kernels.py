import numpy as np
import pytest
from scipy import ndimage

from core.exceptions import (
    ChannelMismatchError,
    DimensionMismatchError,
    InvalidConfigError,
    NonFiniteInputError,
    UnsupportedKernelError,
)
from nnref.kernels import (
    BLUR_ROWS,
    Tensor4,
    make_blur_kernel,
    maxblurpool_forward,
    maxpool_forward,
    mbp_forward,
    shift_consistency,
)


def smoothed_inputs(count, rng, shape=(1, 3, 32, 33)):
    for _ in range(count):
        yield ndimage.uniform_filter(rng.random(shape), size=(1, 1, 3, 3), mode='nearest')


class TestBlurKernel:
    @pytest.mark.parametrize('size', [3, 5, 7])
    def test_normalised_separable_symmetric(self, size):
        kernel = make_blur_kernel(size)
        assert kernel.weights.sum() == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(kernel.weights, np.outer(kernel.vector, kernel.vector))
        np.testing.assert_allclose(kernel.weights, kernel.weights.T)
        np.testing.assert_allclose(kernel.weights, kernel.weights[::-1, ::-1])

    def test_rows_before_normalisation(self):
        assert BLUR_ROWS[3] == (1.0, 2.0, 1.0)
        assert BLUR_ROWS[5] == (1.0, 4.0, 6.0, 4.0, 1.0)
        assert BLUR_ROWS[7] == (1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0)
        np.testing.assert_allclose(make_blur_kernel(3).vector, [0.25, 0.5, 0.25])

    @pytest.mark.parametrize('size', [1, 4, 9])
    def test_unsupported_size(self, size):
        with pytest.raises(UnsupportedKernelError):
            make_blur_kernel(size)


class TestTensor4:
    def test_rank(self):
        with pytest.raises(ChannelMismatchError):
            Tensor4(np.zeros((3, 8, 8)))

    def test_non_finite(self):
        data = np.zeros((1, 1, 2, 2))
        data[0, 0, 1, 1] = np.nan
        with pytest.raises(NonFiniteInputError):
            Tensor4(data)


class TestMbpForward:
    def test_halves_spatial_size(self, rng):
        out = mbp_forward(Tensor4(rng.random((1, 6, 8, 8))))
        assert out.shape == (1, 6, 4, 4)

    def test_odd_sizes_round_up(self, rng):
        assert mbp_forward(Tensor4(rng.random((2, 4, 9, 7)))).shape == (2, 4, 5, 4)

    def test_constant_input(self):
        out = mbp_forward(Tensor4(np.full((1, 6, 8, 8), 0.37)))
        np.testing.assert_allclose(out.data, 0.37, atol=1e-6)

    def test_triangle_group_impulse(self):
        data = np.zeros((1, 6, 8, 8))
        data[0, 0, 3, 3] = 1.0
        out = mbp_forward(Tensor4(data))
        # stride-1 max pool spreads the impulse over rows/cols 2..3
        expected = np.array([
            [0, 0, 0, 0],
            [0, 9, 3, 0],
            [0, 3, 1, 0],
            [0, 0, 0, 0],
        ]) / 16.0
        np.testing.assert_allclose(out.data[0, 0], expected, atol=1e-12)
        np.testing.assert_array_equal(out.data[0, 1:], 0.0)

    def test_uneven_channel_split(self):
        data = np.zeros((1, 7, 16, 16))
        data[0, :, 7, 7] = 1.0
        out = mbp_forward(Tensor4(data))
        # groups of 3, 2 and 2 channels use kernels 3, 5 and 7
        peaks = out.data[0, :, 3, 3]
        assert peaks[0] == peaks[1] == peaks[2]
        assert peaks[3] == peaks[4] and peaks[5] == peaks[6]
        assert peaks[0] > peaks[3] > peaks[5]

    def test_single_group_matches_maxblurpool(self, rng):
        x = Tensor4(rng.random((1, 2, 10, 10)))
        np.testing.assert_allclose(mbp_forward(x, n_groups=1).data, maxblurpool_forward(x, 3).data)

    def test_too_few_channels(self):
        with pytest.raises(ChannelMismatchError):
            mbp_forward(Tensor4(np.zeros((1, 2, 8, 8))))

    @pytest.mark.parametrize('groups', [0, 4])
    def test_group_count(self, groups):
        with pytest.raises(UnsupportedKernelError):
            mbp_forward(Tensor4(np.zeros((1, 6, 8, 8))), n_groups=groups)


class TestMaxPool:
    def test_stride_two(self):
        data = np.arange(16, dtype=float).reshape(1, 1, 4, 4)
        np.testing.assert_array_equal(maxpool_forward(Tensor4(data)).data[0, 0], [[5, 7], [13, 15]])

    def test_odd_size_edge_padding(self):
        data = np.arange(9, dtype=float).reshape(1, 1, 3, 3)
        np.testing.assert_array_equal(maxpool_forward(Tensor4(data)).data[0, 0], [[4, 5], [7, 8]])


class TestShiftConsistency:
    def test_identical_for_constant_inputs(self):
        inputs = [np.full((1, 3, 32, 33), 0.5)]
        assert shift_consistency(mbp_forward, inputs) == pytest.approx(0.0, abs=1e-12)

    def test_zero_margin_covers_the_whole_output(self):
        inputs = [np.full((1, 3, 32, 33), 0.5)]
        assert shift_consistency(mbp_forward, inputs, margin=0) == 0.0

    def test_negative_margin_is_rejected(self):
        with pytest.raises(InvalidConfigError):
            shift_consistency(mbp_forward, [np.zeros((1, 3, 32, 33))], margin=-1)

    def test_margin_swallowing_the_output_is_rejected(self):
        with pytest.raises(DimensionMismatchError):
            shift_consistency(mbp_forward, [np.zeros((1, 3, 32, 33))], margin=8)

    def test_blur_pooling_changes_less_than_max_pooling(self):
        blurred = shift_consistency(mbp_forward, smoothed_inputs(100, np.random.default_rng(7)))
        plain = shift_consistency(maxpool_forward, smoothed_inputs(100, np.random.default_rng(7)))
        assert blurred <= plain
