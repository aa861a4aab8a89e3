"""
Domain exceptions

Services raise these; the command layer maps them to exit codes.
"""
from typing import Any, Dict, Optional


class OamLensError(Exception):
    """所有领域错误的基类"""

    #: CLI exit code used when the error reaches the command layer
    exit_code: int = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extras = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{self.message} ({extras})"


class DomainError(OamLensError, ValueError):
    """Input outside the mathematical domain of an operation"""


class FitError(OamLensError):
    """Least-squares fit cannot be performed"""


class BracketError(DomainError):
    """Root bracket has no sign change"""


class SingularityError(DomainError):
    """Evaluation at a singular point (e.g. r = 0)"""


class BeamwidthUndefinedError(OamLensError):
    """Pattern never falls to half power inside (0, π/2)"""


class LensCoverageError(DomainError):
    """Feed angle at or beyond the lens' asymptotic angle arccos(1/n)"""

    def __init__(self, angle_deg: float, limit_deg: float):
        super().__init__(
            f"angle {angle_deg:.4f}° exceeds lens angular coverage (μ_max = {limit_deg:.4f}°)",
            {"angle_deg": angle_deg, "mu_max_deg": limit_deg},
        )


class OffApertureError(DomainError):
    """Ray from the focus misses the lens aperture"""


class GeometryError(OamLensError):
    """Bifocal geometry has no real solution"""


class BeamGeometryError(OamLensError):
    """Divergence angle not larger than the half-power beamwidth"""


class DesignError(OamLensError):
    """Patch design produces a non-physical dimension"""


class ConfigError(OamLensError):
    """Invalid run configuration (e.g. unsupported scenario/variable pair)"""


class RangeWarning(UserWarning):
    """Divergence model evaluated outside its fitted radius range"""
