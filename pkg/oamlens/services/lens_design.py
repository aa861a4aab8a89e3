"""
单焦双曲面透镜设计服务
折射面轮廓、最大馈源角、口径与厚度、相位保持以及幅度重分布/衰减
"""
import cmath
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from ..config import get_settings
from ..core.exceptions import DomainError, LensCoverageError, OffApertureError
from ..schemas.beam import DivergenceModel
from ..schemas.lens import AttenuatedAmplitude, LensProfile, LensSpec
from . import numerics
from .beam_model import BeamModelService

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0


def _check_index(n: float) -> None:
    if not n > 1.0:
        raise DomainError("refraction index must be > 1", {"n": n})


def _check_focal(f: float) -> None:
    if not f > 0:
        raise DomainError("focal distance must be positive", {"f": f})


def _check_coverage(n: float, angle: float) -> None:
    limit = LensDesignService.max_feed_angle(n)
    if angle >= limit:
        raise LensCoverageError(math.degrees(angle), math.degrees(limit))


class LensDesignService:
    """单焦透镜设计服务"""

    @staticmethod
    def refraction_index(eps_r: float, mu_r: float = 1.0) -> float:
        """n = sqrt(ε_r·μ_r)"""
        if eps_r < 1 or mu_r < 1:
            raise DomainError("eps_r and mu_r must be ≥ 1", {"eps_r": eps_r, "mu_r": mu_r})
        return math.sqrt(eps_r * mu_r)

    @staticmethod
    def max_feed_angle(n: float) -> float:
        """
        最大馈源角 μ_max = arccos(1/n) (rad)

        Raises:
            DomainError: n ≤ 1
        """
        _check_index(n)
        return math.acos(1.0 / n)

    @staticmethod
    def profile_polar(n: float, f: float, mu: float) -> float:
        """
        极坐标透镜方程 ρ = (n−1)f / (n·cosμ − 1)

        Args:
            n: 折射率
            f: 焦距 (m)
            mu: 馈源角 (rad)

        Returns:
            焦点到折射面的距离 ρ (m)

        Raises:
            LensCoverageError: mu ≥ μ_max
        """
        _check_focal(f)
        if mu < 0:
            raise DomainError("mu must be non-negative", {"mu": mu})
        _check_coverage(n, mu)
        if mu == 0:
            return f
        return (n - 1.0) * f / (n * math.cos(mu) - 1.0)

    @staticmethod
    def profile_cartesian(n: float, f: float, y: float) -> float:
        """
        直角坐标透镜方程 (n²−1)x² + 2(n−1)f·x − y² = 0 的非负根

        Uses x = 2y² / (B + sqrt(B² + 4Ay²)) so small y loses no digits.
        """
        _check_index(n)
        _check_focal(f)
        if y < 0:
            raise DomainError("y must be non-negative", {"y": y})
        a_coef = n * n - 1.0
        b_coef = 2.0 * (n - 1.0) * f
        return 2.0 * y * y / (b_coef + math.sqrt(b_coef * b_coef + 4.0 * a_coef * y * y))

    @staticmethod
    def polar_point(n: float, f: float, mu: float) -> Tuple[float, float]:
        """Surface point (axial x, radial y) seen from the focus at angle mu; vertex at the origin"""
        rho = LensDesignService.profile_polar(n, f, mu)
        return rho * math.cos(mu) - f, rho * math.sin(mu)

    @staticmethod
    def balance_coefficient(n: float, theta_max: float) -> float:
        """
        平衡系数 m = 2(n−1)sinθ_max / (n·cosθ_max − 1)，满足 D = m·f

        Raises:
            LensCoverageError: θ_max ≥ μ_max
        """
        if theta_max <= 0:
            raise DomainError("theta_max must be positive", {"theta_max": theta_max})
        _check_coverage(n, theta_max)
        return 2.0 * (n - 1.0) * math.sin(theta_max) / (n * math.cos(theta_max) - 1.0)

    @staticmethod
    def diameter_for(n: float, f: float, theta_max: float) -> float:
        """透镜口径 D (m)，覆盖到 θ_max"""
        _check_focal(f)
        return LensDesignService.balance_coefficient(n, theta_max) * f

    @staticmethod
    def coverage_angle_for(n: float, m: float) -> float:
        """θ_max at which the balance coefficient equals m"""
        if m <= 0:
            raise DomainError("balance coefficient must be positive", {"m": m})
        limit = LensDesignService.max_feed_angle(n)
        return numerics.solve_scalar(
            lambda theta: LensDesignService.balance_coefficient(n, theta) - m,
            1e-12,
            limit * (1.0 - 1e-12),
            tol=1e-14,
        )

    @staticmethod
    def balance_coefficient_from_model(n: float, model: DivergenceModel, radius_mm: float) -> float:
        """平衡系数，θ_max 由经验模型在半径 R 处给出"""
        theta_deg = BeamModelService.divergence_from_model(model, radius_mm)
        return LensDesignService.balance_coefficient(n, math.radians(theta_deg))

    @staticmethod
    def thickness(n: float, f: float, diameter: float, theta: float) -> float:
        """
        透镜厚度 T = −f/(n+1) + sqrt((f/(n+1))² + (D/2 − f·tanθ)²/(n²−1))

        Raises:
            OffApertureError: f·tanθ > D/2（射线未落在透镜上）
        """
        _check_focal(f)
        if diameter <= 0:
            raise DomainError("diameter must be positive", {"D": diameter})
        if not 0.0 <= theta < HALF_PI:
            raise DomainError("theta must lie in [0, π/2)", {"theta": theta})
        radial = diameter / 2.0 - f * math.tan(theta)
        if radial < 0:
            if radial > -1e-12 * diameter:
                radial = 0.0
            else:
                raise OffApertureError(
                    "ray misses the lens aperture",
                    {"f_tan_theta": f * math.tan(theta), "D_half": diameter / 2.0}
                )
        # Same root as the cartesian profile evaluated at the landing radius
        return LensDesignService.profile_cartesian(n, f, radial)

    @staticmethod
    def aperture_plane(n: float, f: float, diameter: float) -> float:
        """Axial position of the rim plane x = profile_cartesian(D/2)"""
        return LensDesignService.profile_cartesian(n, f, diameter / 2.0)

    @staticmethod
    def fermat_path(n: float, f: float, diameter: float, y: float) -> float:
        """Feed-to-surface distance plus n times the axial run to the rim plane"""
        x = LensDesignService.profile_cartesian(n, f, y)
        return math.hypot(x + f, y) + n * (LensDesignService.aperture_plane(n, f, diameter) - x)

    @staticmethod
    def sample_profile(spec: LensSpec, samples: Optional[int] = None) -> LensProfile:
        """
        沿径向等间距采样折射面

        Args:
            spec: 透镜参数
            samples: 采样点数（默认 PROFILE_SAMPLES）

        Returns:
            LensProfile，y 从 0 到 D/2
        """
        count = samples or get_settings().PROFILE_SAMPLES
        if count < 2:
            raise DomainError("profile needs at least 2 samples", {"samples": count})
        n, f = spec.refraction_index, spec.focal_distance
        radii = np.linspace(0.0, spec.diameter / 2.0, count)
        points = [(LensDesignService.profile_cartesian(n, f, float(y)), float(y)) for y in radii]
        return LensProfile(samples=points, t_max=points[-1][0])

    @staticmethod
    def phase_shift(k: float, wave_path: float) -> float:
        """Δφ = k·L"""
        if wave_path < 0:
            raise DomainError("wave path must be non-negative", {"L": wave_path})
        return k * wave_path

    @staticmethod
    def transmitted_field(e_in: Union[complex, np.ndarray], k: float, delta_path: float):
        """E_out = e^{ikΔL}·E_in（对所有采样点施加同一相位，保持波前）"""
        rotation = cmath.exp(1j * k * delta_path)
        if isinstance(e_in, np.ndarray):
            return e_in * rotation
        return complex(e_in) * rotation

    @staticmethod
    def aperture_amplitude(a_in: float, n: float, f: float, mu: float, a: float) -> float:
        """
        能量重分布后的口径幅度 A_L′ = A_in·a(n·cosμ − 1)³ / [f²(n−1)²(n − cosμ)]

        Raises:
            LensCoverageError: mu ≥ μ_max
        """
        _check_focal(f)
        if mu < 0:
            raise DomainError("mu must be non-negative", {"mu": mu})
        if a < 0:
            raise DomainError("energy ratio must be non-negative", {"a": a})
        _check_coverage(n, mu)
        cos_mu = math.cos(mu)
        return a_in * a * (n * cos_mu - 1.0) ** 3 / (f * f * (n - 1.0) ** 2 * (n - cos_mu))

    @staticmethod
    def attenuated_amplitude(
        amplitude: float,
        p: float,
        thickness: float,
        mode: Optional[str] = None
    ) -> AttenuatedAmplitude:
        """
        厚度衰减

        linear: A_L = A_L′ − p·T，负值截断为 0 并标记 fully_absorbed
        exponential: A_L = A_L′·exp(−p·T)
        """
        if thickness < 0:
            raise DomainError("thickness must be non-negative", {"T": thickness})
        mode = mode or get_settings().ATTENUATION_MODE
        if mode == "exponential":
            return AttenuatedAmplitude(amplitude=max(amplitude * math.exp(-p * thickness), 0.0))
        remaining = amplitude - p * thickness
        if remaining <= 0:
            return AttenuatedAmplitude(amplitude=0.0, fully_absorbed=True)
        return AttenuatedAmplitude(amplitude=remaining)

    @staticmethod
    def lens_amplitude(spec: LensSpec, a_in: float, theta: float) -> AttenuatedAmplitude:
        """Redistribution at feed angle θ followed by attenuation through T(f, θ)"""
        n, f = spec.refraction_index, spec.focal_distance
        redistributed = LensDesignService.aperture_amplitude(a_in, n, f, theta, spec.energy_ratio)
        depth = LensDesignService.thickness(n, f, spec.diameter, theta)
        return LensDesignService.attenuated_amplitude(redistributed, spec.attenuation_factor, depth)

    @staticmethod
    def converged_gain(diameter: float, wavelength: float) -> float:
        """Circular-aperture gain 7·A/λ² used as the default converged-beam gain"""
        if diameter <= 0 or wavelength <= 0:
            raise DomainError("diameter and wavelength must be positive")
        area = math.pi * (diameter / 2.0) ** 2
        return 7.0 * area / wavelength ** 2
