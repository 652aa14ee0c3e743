"""
Discrete Poisson solve for seamless cloning.

The system is Δf = div on the mask interior with f = boundary elsewhere,
discretised with the 5-point Laplacian. The matrix is symmetric positive
definite and solved per channel with unpreconditioned conjugate gradient.
"""
import logging
from typing import Optional, Tuple, Union

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse.linalg import cg

from core.exceptions import (
    DimensionMismatchError,
    EmptyInteriorError,
    NonFiniteInputError,
    PlacementOutOfBoundsError,
    SolverConvergenceError,
)
from datasets.models import ImageBuffer, ObjectCrop

from .models import (
    GUIDANCE_MODES,
    MIXED_GRADIENTS,
    CloneMask,
    GuidanceDivergence,
    InteriorSolution,
    SolverParams,
)

logger = logging.getLogger(__name__)

# (row, col) offsets of the 4-neighbourhood
NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def clone_mask_from_alpha(alpha: np.ndarray) -> CloneMask:
    """
    Threshold alpha at 0.5 and erode once.

    Erosion treats everything outside the patch as background, so the
    patch's outer ring always stays a known boundary; a full rectangle
    becomes the rectangle minus its border ring.
    """
    binary = np.asarray(alpha) > 0.5
    interior = ndimage.binary_erosion(
        binary, structure=ndimage.generate_binary_structure(2, 1), border_value=0
    )
    return CloneMask(interior)


def laplacian(values: np.ndarray) -> np.ndarray:
    """5-point Laplacian on interior pixels; the border ring is left at zero."""
    g = np.asarray(values, dtype=np.float64)
    out = np.zeros_like(g)
    out[1:-1, 1:-1] = (
        g[:-2, 1:-1] + g[2:, 1:-1] + g[1:-1, :-2] + g[1:-1, 2:] - 4.0 * g[1:-1, 1:-1]
    )
    return out


def _mixed_divergence(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    out = np.zeros_like(source)
    centre = (slice(1, -1), slice(1, -1))
    for dr, dc in NEIGHBOURS:
        shifted = (slice(1 + dr, source.shape[0] - 1 + dr), slice(1 + dc, source.shape[1] - 1 + dc))
        d_source = source[shifted] - source[centre]
        d_target = target[shifted] - target[centre]
        out[centre] += np.where(np.abs(d_source) >= np.abs(d_target), d_source, d_target)
    return out


def build_guidance(
    crop: Union[ObjectCrop, ImageBuffer],
    background_region: ImageBuffer,
    mode: str = 'source',
) -> GuidanceDivergence:
    """
    Divergence of the guidance field for a crop over the background it covers.

    Args:
        crop: Object crop (or bare patch) supplying the source gradients
        background_region: Background pixels under the crop, same shape
        mode: 'source' imports crop gradients; 'mixed' keeps, per pixel pair,
            whichever of crop/background gradient is larger in magnitude

    Returns:
        GuidanceDivergence with the same H×W×C shape as the crop
    """
    patch = crop.patch if isinstance(crop, ObjectCrop) else crop
    if patch.shape != background_region.shape:
        raise DimensionMismatchError(
            f"Crop {patch.shape} and background region {background_region.shape} differ",
            crop_shape=list(patch.shape),
            background_shape=list(background_region.shape),
        )
    if mode not in GUIDANCE_MODES:
        raise ValueError(f"Unknown guidance mode '{mode}', choose from {GUIDANCE_MODES}")

    if mode == MIXED_GRADIENTS:
        return GuidanceDivergence(_mixed_divergence(patch.data, background_region.data))
    return GuidanceDivergence(laplacian(patch.data))


def assemble_system(
    div: np.ndarray, boundary: np.ndarray, mask: CloneMask
) -> Tuple[sparse.csr_matrix, np.ndarray, np.ndarray, np.ndarray]:
    """
    Build the SPD system A f = b over the interior unknowns.

    Returns:
        (A, b with one column per channel, interior rows, interior cols)
    """
    rows, cols = np.nonzero(mask.interior)
    n = rows.size
    index = np.full(mask.shape, -1, dtype=np.int64)
    index[rows, cols] = np.arange(n)

    entry_rows = [np.arange(n)]
    entry_cols = [np.arange(n)]
    entry_data = [np.full(n, 4.0)]
    rhs = -div[rows, cols, :].copy()

    for dr, dc in NEIGHBOURS:
        n_rows, n_cols = rows + dr, cols + dc
        neighbour = index[n_rows, n_cols]
        inside = neighbour >= 0
        entry_rows.append(np.nonzero(inside)[0])
        entry_cols.append(neighbour[inside])
        entry_data.append(np.full(int(inside.sum()), -1.0))
        outside = ~inside
        rhs[outside] += boundary[n_rows[outside], n_cols[outside], :]

    matrix = sparse.csr_matrix(
        (np.concatenate(entry_data), (np.concatenate(entry_rows), np.concatenate(entry_cols))),
        shape=(n, n),
    )
    return matrix, rhs, rows, cols


def _solve_channel(matrix, rhs: np.ndarray, tolerance: float, budget: int) -> Tuple[np.ndarray, float, int]:
    norm_b = float(np.linalg.norm(rhs))
    if norm_b == 0.0:
        return np.zeros_like(rhs), 0.0, 0

    x = np.zeros_like(rhs)
    iterations = 0
    residual = 1.0

    def _count(_xk):
        nonlocal iterations
        iterations += 1

    while iterations < budget:
        before = iterations
        x, _info = cg(matrix, rhs, x0=x, rtol=tolerance, atol=0.0,
                      maxiter=budget - iterations, callback=_count)
        # cg stops on its recurrence residual; judge convergence on the true one
        residual = float(np.linalg.norm(rhs - matrix @ x)) / norm_b
        if residual <= tolerance or iterations == before:
            break

    if residual > tolerance:
        raise SolverConvergenceError(residual, iterations, tolerance)
    return x, residual, iterations


def solve_dirichlet(
    div: GuidanceDivergence,
    boundary: ImageBuffer,
    mask: CloneMask,
    params: Optional[SolverParams] = None,
) -> InteriorSolution:
    """
    Solve Δf = div on the mask interior with Dirichlet values from ``boundary``.

    Channels are solved independently on the shared matrix.

    Raises:
        SolverConvergenceError: relative residual above tolerance after the
            iteration budget
        EmptyInteriorError: nothing to solve
    """
    params = params or SolverParams()
    if div.shape != boundary.shape or mask.shape != boundary.shape[:2]:
        raise DimensionMismatchError(
            f"Divergence {div.shape}, boundary {boundary.shape} and mask {mask.shape} disagree"
        )
    if mask.unknowns == 0:
        raise EmptyInteriorError("Clone mask interior is empty")
    if not np.all(np.isfinite(boundary.data)):
        raise NonFiniteInputError("Boundary values must be finite")

    matrix, rhs, rows, cols = assemble_system(div.values, boundary.data, mask)
    budget = params.iteration_budget(mask.unknowns)

    values = np.empty_like(rhs)
    worst_residual = 0.0
    most_iterations = 0
    for channel in range(rhs.shape[1]):
        x, residual, iterations = _solve_channel(matrix, rhs[:, channel], params.tolerance, budget)
        values[:, channel] = x
        worst_residual = max(worst_residual, residual)
        most_iterations = max(most_iterations, iterations)

    logger.debug(
        f"Poisson solve: {mask.unknowns} unknowns x {rhs.shape[1]} channels, "
        f"{most_iterations} iterations, residual {worst_residual:.2e}"
    )
    return InteriorSolution(rows=rows, cols=cols, values=values,
                            residual=worst_residual, iterations=most_iterations)


def seamless_clone(
    background: ImageBuffer,
    crop: ObjectCrop,
    position: Tuple[int, int],
    mode: str = 'source',
    params: Optional[SolverParams] = None,
) -> ImageBuffer:
    """
    Embed a crop into a background by solving the Poisson equation.

    Args:
        background: Image receiving the object
        crop: Object crop; its alpha defines the clone mask
        position: (x, y) of the crop's top-left pixel in the background
        mode: Guidance mode, see build_guidance
        params: Solver tolerance and iteration budget

    Returns:
        A new image; only clone-mask pixels differ from ``background``,
        and those are clamped to [0, 1]
    """
    x, y = int(position[0]), int(position[1])
    height, width = crop.height, crop.width
    if x < 1 or y < 1 or x + width > background.width - 1 or y + height > background.height - 1:
        raise PlacementOutOfBoundsError(
            f"Crop {width}x{height} at ({x}, {y}) leaves no 1-pixel margin "
            f"in a {background.width}x{background.height} image",
            position=[x, y],
            size=[width, height],
        )

    region = background.region(x, y, width, height)
    mask = clone_mask_from_alpha(crop.alpha)
    div = build_guidance(crop, region, mode)
    solution = solve_dirichlet(div, region, mask, params)

    composite = background.writable()
    composite[y + solution.rows, x + solution.cols, :] = np.clip(solution.values, 0.0, 1.0)
    return ImageBuffer(composite)
