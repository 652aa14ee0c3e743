import numpy as np
import pytest

from datasets.tests.samples import textured
from core.exceptions import (
    DimensionMismatchError,
    EmptyInteriorError,
    PlacementOutOfBoundsError,
    SolverConvergenceError,
)
from datasets.models import ImageBuffer, ObjectCrop
from datasets.tests.factories import BBoxFactory
from poisson.models import CloneMask, GuidanceDivergence, SolverParams
from poisson.solver import build_guidance, clone_mask_from_alpha, laplacian, seamless_clone, solve_dirichlet


def dense_solve(div, boundary, interior):
    """Gaussian elimination on the explicitly enumerated 5-point system."""
    rows, cols = np.nonzero(interior)
    index = {(r, c): i for i, (r, c) in enumerate(zip(rows, cols))}
    n = len(index)
    matrix = np.zeros((n, n))
    rhs = np.zeros((n, boundary.shape[2]))
    for (r, c), i in index.items():
        matrix[i, i] = 4.0
        rhs[i] = -div[r, c]
        for q in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if q in index:
                matrix[i, index[q]] = -1.0
            else:
                rhs[i] += boundary[q]
    return rows, cols, np.linalg.solve(matrix, rhs)


def crop_of(patch, alpha=None):
    alpha = np.ones(patch.shape[:2]) if alpha is None else alpha
    return ObjectCrop(patch, alpha, 'seaurchin', 1, BBoxFactory())


def random_mask(rng, size):
    interior = np.zeros((size + 2, size + 2), dtype=bool)
    interior[1:-1, 1:-1] = rng.random((size, size)) < 0.7
    interior[1 + size // 2, 1 + size // 2] = True
    return interior


class TestGuidance:
    def test_constant_crop_has_zero_divergence(self):
        crop = crop_of(ImageBuffer.filled(6, 6, 0.4))
        div = build_guidance(crop, ImageBuffer.filled(6, 6, 0.9))
        np.testing.assert_array_equal(div.values, 0.0)

    @pytest.mark.parametrize('mode', ['source', 'mixed'])
    def test_crop_equal_to_background_gives_its_laplacian(self, mode):
        region = textured(7, 7, seed=3)
        div = build_guidance(crop_of(region), region, mode)
        np.testing.assert_allclose(div.values, laplacian(region.data), atol=1e-12)

    def test_divergence_matches_stencil(self, rng):
        patch = ImageBuffer(rng.random((5, 5, 3)))
        div = build_guidance(crop_of(patch), ImageBuffer.filled(5, 5, 0.0)).values
        g = patch.data
        for r in range(1, 4):
            for c in range(1, 4):
                expected = g[r - 1, c] + g[r + 1, c] + g[r, c - 1] + g[r, c + 1] - 4 * g[r, c]
                np.testing.assert_allclose(div[r, c], expected, atol=1e-12)

    def test_mixed_mode_keeps_the_stronger_gradient(self):
        background = np.full((5, 5, 1), 0.2)
        background[2, 3, 0] = 0.8
        crop = crop_of(ImageBuffer.filled(5, 5, 0.5, channels=1))
        div = build_guidance(crop, ImageBuffer(background), 'mixed').values
        # flat crop: every kept difference comes from the background spike
        assert div[2, 2, 0] == pytest.approx(0.6)
        assert div[2, 3, 0] == pytest.approx(-2.4)
        assert div[1, 1, 0] == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            build_guidance(crop_of(ImageBuffer.filled(4, 4)), ImageBuffer.filled(5, 4))


class TestCloneMask:
    def test_rectangle_alpha_loses_its_border_ring(self):
        mask = clone_mask_from_alpha(np.ones((5, 6)))
        expected = np.zeros((5, 6), dtype=bool)
        expected[1:-1, 1:-1] = True
        np.testing.assert_array_equal(mask.interior, expected)

    def test_alpha_is_thresholded_at_half(self):
        alpha = np.zeros((7, 7))
        alpha[1:6, 1:6] = 0.6
        alpha[3, 3] = 0.5
        mask = clone_mask_from_alpha(alpha)
        assert not mask.interior[3, 3]
        assert mask.interior[2, 2]

    def test_interior_touching_the_border(self):
        interior = np.zeros((4, 4), dtype=bool)
        interior[0, 1] = True
        with pytest.raises(EmptyInteriorError):
            CloneMask(interior)

    def test_tiny_alpha_erodes_to_nothing(self):
        with pytest.raises(EmptyInteriorError):
            clone_mask_from_alpha(np.ones((2, 2)))


class TestSolveDirichlet:
    def test_constant_boundary_is_reproduced(self):
        interior = np.zeros((9, 9), dtype=bool)
        interior[1:-1, 1:-1] = True
        solution = solve_dirichlet(
            GuidanceDivergence(np.zeros((9, 9, 3))), ImageBuffer.filled(9, 9, 0.3), CloneMask(interior),
        )
        np.testing.assert_allclose(solution.values, 0.3, atol=1e-6)

    def test_linear_ramp_is_reproduced(self):
        ramp = np.tile(np.linspace(0.0, 1.0, 11)[None, :, None], (8, 1, 1))
        interior = np.zeros((8, 11), dtype=bool)
        interior[1:-1, 1:-1] = True
        solution = solve_dirichlet(GuidanceDivergence(np.zeros_like(ramp)), ImageBuffer(ramp), CloneMask(interior))
        np.testing.assert_allclose(solution.to_array(ramp), ramp, atol=1e-6)

    @pytest.mark.parametrize('seed', range(20))
    def test_matches_dense_direct_solve(self, seed):
        rng = np.random.default_rng(seed)
        interior = random_mask(rng, 9)
        boundary = rng.random((11, 11, 3))
        div = rng.normal(scale=0.1, size=(11, 11, 3))
        solution = solve_dirichlet(GuidanceDivergence(div), ImageBuffer(boundary), CloneMask(interior))
        rows, cols, oracle = dense_solve(div, boundary, interior)
        np.testing.assert_array_equal(solution.rows, rows)
        np.testing.assert_array_equal(solution.cols, cols)
        assert np.linalg.norm(solution.values - oracle) <= 1e-6 * np.linalg.norm(oracle)

    def test_maximum_principle(self, rng):
        interior = random_mask(rng, 7)
        boundary = rng.random((9, 9, 1))
        solution = solve_dirichlet(GuidanceDivergence(np.zeros((9, 9, 1))), ImageBuffer(boundary), CloneMask(interior))
        ring = boundary[~interior]
        assert solution.values.min() >= ring.min() - 1e-9
        assert solution.values.max() <= ring.max() + 1e-9

    def test_linearity(self, rng):
        interior = random_mask(rng, 7)
        boundary = rng.random((9, 9, 3)) * 0.5
        div = rng.normal(scale=0.05, size=(9, 9, 3))
        mask = CloneMask(interior)
        base = solve_dirichlet(GuidanceDivergence(div), ImageBuffer(boundary), mask).values
        scaled = solve_dirichlet(GuidanceDivergence(2 * div), ImageBuffer(2 * boundary), mask).values
        np.testing.assert_allclose(scaled, 2 * base, atol=1e-6)

    def test_non_convergence_reports_the_residual(self, rng):
        interior = np.zeros((12, 12), dtype=bool)
        interior[1:-1, 1:-1] = True
        with pytest.raises(SolverConvergenceError) as excinfo:
            solve_dirichlet(
                GuidanceDivergence(rng.normal(size=(12, 12, 1))),
                ImageBuffer(rng.random((12, 12, 1))),
                CloneMask(interior),
                SolverParams(max_iterations=1),
            )
        assert excinfo.value.residual > 1e-8
        assert excinfo.value.to_dict()['code'] == 'solver_non_convergence'

    def test_iteration_budget_default(self):
        assert SolverParams().iteration_budget(100) == 200
        assert SolverParams().iteration_budget(10000) == 1000
        assert SolverParams(max_iterations=7).iteration_budget(10000) == 7


class TestSeamlessClone:
    @pytest.mark.parametrize('seed', range(50))
    def test_cloning_the_covered_region_is_identity(self, seed):
        rng = np.random.default_rng(seed)
        background = textured(24, 24, seed=seed)
        h, w = (int(v) for v in rng.integers(4, 9, size=2))
        x, y = int(rng.integers(1, 24 - w)), int(rng.integers(1, 24 - h))
        crop = crop_of(background.region(x, y, w, h))
        result = seamless_clone(background, crop, (x, y))
        np.testing.assert_allclose(result.data, background.data, atol=1e-6)

    def test_only_mask_interior_changes(self, rng):
        background = textured(20, 20, seed=1)
        alpha = np.zeros((9, 9))
        yy, xx = np.mgrid[:9, :9]
        alpha[(yy - 4) ** 2 + (xx - 4) ** 2 <= 12] = 1.0
        crop = crop_of(ImageBuffer(rng.random((9, 9, 3))), alpha)
        result = seamless_clone(background, crop, (5, 6))

        changed = np.zeros((20, 20), dtype=bool)
        changed[6:15, 5:14] = clone_mask_from_alpha(alpha).interior
        np.testing.assert_array_equal(result.data[~changed], background.data[~changed])

    def test_constant_crop_on_gradient_stays_within_the_ring(self):
        ramp = np.tile(np.linspace(0.1, 0.9, 15)[None, :, None], (15, 1, 3))
        background = ImageBuffer(ramp)
        result = seamless_clone(background, crop_of(ImageBuffer.filled(9, 9, 0.5)), (3, 3))
        ring = np.ones((9, 9), dtype=bool)
        ring[1:-1, 1:-1] = False
        region = ramp[3:12, 3:12]
        inside = result.data[4:11, 4:11]
        assert inside.min() >= region[ring].min() - 1e-6
        assert inside.max() <= region[ring].max() + 1e-6

    def test_clone_is_deterministic(self, rng):
        background = textured(16, 16, seed=2)
        crop = crop_of(ImageBuffer(rng.random((6, 6, 3))))
        first = seamless_clone(background, crop, (4, 4))
        second = seamless_clone(background, crop, (4, 4))
        np.testing.assert_array_equal(first.data, second.data)

    @pytest.mark.parametrize('position', [(0, 3), (3, 0), (11, 3), (3, 11)])
    def test_placement_needs_a_margin(self, position):
        with pytest.raises(PlacementOutOfBoundsError):
            seamless_clone(textured(16, 16), crop_of(ImageBuffer.filled(5, 5, 0.5)), position)

    def test_result_is_clamped(self):
        spiky = np.zeros((7, 7, 3))
        spiky[3, 3] = 1.0
        result = seamless_clone(ImageBuffer.filled(12, 12, 0.95), crop_of(ImageBuffer(spiky)), (2, 2))
        assert result.data.max() <= 1.0
        assert result.data.min() >= 0.0
