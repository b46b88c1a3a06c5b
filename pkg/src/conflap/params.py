"""Parameter containers shared by all geometry modules."""

import math
from dataclasses import dataclass, field

from .errors import ParameterError

# Calibrated kernels must reproduce an independent check value to this
# relative accuracy, otherwise the calibration is rejected outright.
CALIBRATION_RESIDUAL_CAP = 1e-8


@dataclass(frozen=True)
class FracParams:
    """Dimension n and fractional order s of the operator family.

    The constructor pins down only n >= 1 and s > 0.  Stricter ranges are
    enforced by the operations that need them (s < n/2 for the critical
    exponents, s in (0, 1) non-integer for kernel representations), because
    several quantities, the sphere symbol among them, continue analytically
    past s = n/2 and remain useful there.
    """

    n: int
    s: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise ParameterError(f"dimension n must be an int, got {self.n!r}")
        if self.n < 1:
            raise ParameterError(f"dimension n must be >= 1, got {self.n}")
        s = float(self.s)
        if not math.isfinite(s) or s <= 0.0:
            raise ParameterError(f"order s must be finite and positive, got {self.s!r}")
        object.__setattr__(self, "s", s)

    @property
    def sigma(self):
        """Singularity exponent (n + 2s)/2 of the off-diagonal kernels."""
        return 0.5 * (self.n + 2.0 * self.s)

    @property
    def extension_weight(self):
        """Exponent a = 1 - 2s of the degenerate extension weight y^a."""
        return 1.0 - 2.0 * self.s

    def require_subcritical(self, context):
        if self.s >= 0.5 * self.n:
            raise ParameterError(
                f"{context} requires s < n/2, got n = {self.n}, s = {self.s}"
            )

    @property
    def two_star(self):
        """Critical Sobolev exponent 2n / (n - 2s)."""
        self.require_subcritical("the critical exponent")
        return 2.0 * self.n / (self.n - 2.0 * self.s)

    @property
    def q(self):
        """Nonlinearity exponent (n + 2s) / (n - 2s) of the curvature equation."""
        self.require_subcritical("the curvature-equation exponent")
        return (self.n + 2.0 * self.s) / (self.n - 2.0 * self.s)


@dataclass(frozen=True)
class KernelSpec:
    """A calibrated singular kernel on one of the model geometries.

    ``normalization`` multiplies the geometry's fixed kernel profile, and
    ``calibration`` records how the constant was matched against the spectral
    side (which mode or frequency, the target value, and the residual of an
    independent recheck).
    """

    params: FracParams
    normalization: float
    calibration: dict = field(default_factory=dict)

    def __post_init__(self):
        norm = float(self.normalization)
        if not math.isfinite(norm) or norm <= 0.0:
            raise ParameterError(
                f"kernel normalization must be positive, got {self.normalization!r}"
            )
        object.__setattr__(self, "normalization", norm)
        residual = self.calibration.get("residual")
        if residual is not None and not residual < CALIBRATION_RESIDUAL_CAP:
            raise ParameterError(
                f"kernel calibration residual {residual!r} exceeds "
                f"{CALIBRATION_RESIDUAL_CAP}"
            )
