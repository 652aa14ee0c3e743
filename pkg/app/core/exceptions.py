"""
Error hierarchy shared by every toolkit application.
"""
from typing import Any, Dict, Mapping, Optional


class SeafarmError(Exception):
    """Base error carrying a stable code and a machine-readable payload."""

    code = 'seafarm_error'

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {'code': self.code, 'message': self.message, **self.details}


class DimensionMismatchError(SeafarmError, ValueError):
    code = 'dimension_mismatch'


class NonFiniteInputError(SeafarmError, ValueError):
    code = 'non_finite_input'


class ManifestFormatError(SeafarmError, ValueError):
    code = 'manifest_format'


class EmptyInteriorError(SeafarmError, ValueError):
    code = 'empty_interior'


class SolverConvergenceError(SeafarmError):
    """Conjugate gradient stopped above tolerance."""

    code = 'solver_non_convergence'

    def __init__(self, residual: float, iterations: int, tolerance: float):
        super().__init__(
            f"Solver did not converge: relative residual {residual:.3e} "
            f"after {iterations} iterations (tolerance {tolerance:.1e})",
            residual=residual,
            iterations=iterations,
            tolerance=tolerance,
        )
        self.residual = residual
        self.iterations = iterations


class PlacementOutOfBoundsError(SeafarmError, ValueError):
    code = 'placement_out_of_bounds'


class PlacementFailedError(SeafarmError):
    code = 'placement_failed'


class CropTooLargeError(SeafarmError, ValueError):
    code = 'crop_too_large'


class InsufficientInstancesError(SeafarmError, ValueError):
    code = 'insufficient_instances'

    def __init__(self, category: str, available: int, requested: int):
        super().__init__(
            f"Category '{category}' has {available} instances, {requested} requested",
            category=category,
            available=available,
            requested=requested,
        )
        self.category = category
        self.available = available
        self.requested = requested


class IncompatibleCropError(SeafarmError, ValueError):
    code = 'incompatible_crop'


class InfeasibleTargetsError(SeafarmError, ValueError):
    code = 'infeasible_targets'

    def __init__(self, shortfall: Mapping[str, int], max_achievable: Mapping[str, int],
                 reason: Optional[str] = None):
        names = ', '.join(sorted(shortfall))
        super().__init__(
            reason or f"Targets cannot be reached for: {names}",
            shortfall=dict(shortfall),
            max_achievable=dict(max_achievable),
        )
        self.shortfall = dict(shortfall)
        self.max_achievable = dict(max_achievable)


class UnsupportedKernelError(SeafarmError, ValueError):
    code = 'unsupported_kernel'


class ChannelMismatchError(SeafarmError, ValueError):
    code = 'channel_mismatch'


class ConfigMismatchError(SeafarmError, ValueError):
    code = 'config_mismatch'


class BackboneInvariantError(SeafarmError, ValueError):
    code = 'backbone_invariant'


class MalformedMapsError(SeafarmError, ValueError):
    code = 'malformed_maps'


class CropLargerThanImageError(SeafarmError, ValueError):
    code = 'crop_larger_than_image'


class WeightsFormatError(SeafarmError, ValueError):
    code = 'weights_format'


class InvalidConfigError(SeafarmError, ValueError):
    """Configuration file failed form validation."""

    code = 'invalid_config'


class EmptyManifestError(SeafarmError, ValueError):
    code = 'empty_manifest'
