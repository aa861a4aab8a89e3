"""
双焦透镜设计服务
内/外焦距、分界角、内折射面轴向偏移、残余发散角、波程匹配与分段幅度
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..core.exceptions import DomainError, GeometryError, LensCoverageError
from ..schemas.beam import UcaGeometry
from ..schemas.bifocal import (
    BifocalAmplitude,
    BifocalGeometry,
    BifocalSpec,
    FocalRatio,
    LensBranch,
    WavePathCheck,
)
from ..schemas.lens import LensProfile, LensSpec
from .beam_model import BeamModelService
from .lens_design import LensDesignService

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0


def _check_wavelength_multiple(m_int: int) -> None:
    if isinstance(m_int, bool) or int(m_int) != m_int or m_int < 1:
        raise DomainError("m_int must be an integer ≥ 1", {"m_int": m_int})


def _check_acute(name: str, angle: float) -> None:
    if not 0.0 < angle < HALF_PI:
        raise DomainError(f"{name} must lie in (0, π/2)", {name: angle})


class BifocalDesignService:
    """双焦透镜设计服务"""

    @staticmethod
    def boundary_angle(theta_lo: float, theta_hi: float) -> float:
        """
        分界角 ν：相邻模态发散角的中点

        Raises:
            DomainError: 不满足 0 < θ_lo < θ_hi < π/2
        """
        if not 0.0 < theta_lo < theta_hi < HALF_PI:
            raise DomainError(
                "boundary angle requires 0 < theta_lo < theta_hi < π/2",
                {"theta_lo": theta_lo, "theta_hi": theta_hi}
            )
        return 0.5 * (theta_lo + theta_hi)

    @staticmethod
    def internal_focal(f_e: float, theta_1: float, wavelength: float, m_int: int) -> float:
        """
        内透镜焦距 f_i = sqrt((m_int·λ + f_e/cosθ_1)·f_e·tanθ_1)

        Args:
            f_e: 外焦距 (m)
            theta_1: 内透镜覆盖的模态发散角 (rad)
            wavelength: 波长 (m)
            m_int: 波长整数倍

        Returns:
            f_i (m)
        """
        _check_wavelength_multiple(m_int)
        if f_e <= 0 or wavelength <= 0:
            raise DomainError("f_e and wavelength must be positive", {"f_e": f_e, "wavelength": wavelength})
        _check_acute("theta_1", theta_1)
        return math.sqrt((m_int * wavelength + f_e / math.cos(theta_1)) * f_e * math.tan(theta_1))

    @staticmethod
    def focal_ratio(f_e: float, theta_1: float, wavelength: float, m_int: int) -> FocalRatio:
        """焦距比 ρ = f_i/f_e，ρ ≤ 1 时 valid=False"""
        f_i = BifocalDesignService.internal_focal(f_e, theta_1, wavelength, m_int)
        rho = f_i / f_e
        valid = rho > 1.0
        if not valid:
            logger.warning(f"⚠️ focal ratio {rho:.4f} ≤ 1 for m_int={m_int}; internal lens would not be longer-focal")
        return FocalRatio(rho=rho, f_i=f_i, m_int=int(m_int), valid=valid)

    @staticmethod
    def smallest_wavelength_multiple(f_e: float, theta_1: float, wavelength: float) -> int:
        """最小的 m_int 使 ρ > 1"""
        _check_acute("theta_1", theta_1)
        needed = (f_e / math.tan(theta_1) - f_e / math.cos(theta_1)) / wavelength
        m_int = max(1, math.floor(needed) + 1)
        while not BifocalDesignService.focal_ratio(f_e, theta_1, wavelength, m_int).valid:
            m_int += 1
        return m_int

    @staticmethod
    def best_wavelength_multiple(f_e: float, theta_1: float, wavelength: float, target_rho: float) -> int:
        """m_int minimising |ρ − target_rho|; ties go to the smaller integer"""
        if target_rho <= 1:
            raise DomainError("target rho must exceed 1", {"target_rho": target_rho})
        _check_acute("theta_1", theta_1)
        exact = (target_rho ** 2 * f_e / math.tan(theta_1) - f_e / math.cos(theta_1)) / wavelength
        candidates = sorted({max(1, math.floor(exact)), max(1, math.ceil(exact))})
        return min(
            candidates,
            key=lambda m: abs(BifocalDesignService.focal_ratio(f_e, theta_1, wavelength, m).rho - target_rho)
        )

    @staticmethod
    def exact_internal_focal(f_e: float, theta_l: float, wavelength: float, m_int: int) -> float:
        """
        Focal f_i whose wave path from f_i exceeds the one from f_e by exactly m_int·λ

        Solves f_i/cosθ_{l,f_i} = m_int·λ + f_e/cosθ_l together with f_i·tanθ_{l,f_i} = f_e·tanθ_l.
        """
        _check_wavelength_multiple(m_int)
        _check_acute("theta_l", theta_l)
        reach = m_int * wavelength + f_e / math.cos(theta_l)
        return math.sqrt(reach ** 2 - (f_e * math.tan(theta_l)) ** 2)

    @staticmethod
    def internal_angle(f_e: float, f_i: float, theta_l: float) -> float:
        """θ_{l,f_i} defined by f_i·tanθ_{l,f_i} = f_e·tanθ_l"""
        if f_e <= 0 or f_i <= 0:
            raise DomainError("focal distances must be positive", {"f_e": f_e, "f_i": f_i})
        if not 0.0 <= theta_l < HALF_PI:
            raise DomainError("theta_l must lie in [0, π/2)", {"theta_l": theta_l})
        return math.atan(f_e * math.tan(theta_l) / f_i)

    @staticmethod
    def solve_bifocal(
        f_e: float,
        rho: float,
        nu: float,
        n: float,
        diameter: Optional[float] = None,
        samples: Optional[int] = None
    ) -> BifocalGeometry:
        """
        求解双焦透镜几何

        分界点位于外折射面上、且从外焦点看去的角度为 ν；偏移 C 使内折射面经过同一分界点。

        Args:
            f_e: 外焦距 (m)
            rho: 焦距比 (> 1)
            nu: 分界角 (rad)
            n: 折射率
            diameter: 口径 (m)，默认 DEFAULT_BALANCE_COEFFICIENT·f_e
            samples: 每段采样点数，默认 PROFILE_SAMPLES

        Returns:
            BifocalGeometry

        Raises:
            GeometryError: 无实数解或分界点落在口径之外
        """
        settings = get_settings()
        if not rho > 1.0:
            raise GeometryError("bifocal lens requires rho > 1", {"rho": rho})
        if f_e <= 0:
            raise DomainError("f_e must be positive", {"f_e": f_e})
        if nu <= 0:
            raise DomainError("nu must be positive", {"nu": nu})
        try:
            rho_e = LensDesignService.profile_polar(n, f_e, nu)
        except LensCoverageError as exc:
            raise GeometryError(
                "no real boundary point: nu beyond the external lens coverage",
                {"f_e": f_e, "rho": rho, "nu": nu, "n": n}
            ) from exc

        f_i = rho * f_e
        boundary_x = rho_e * math.sin(nu)
        boundary_z = rho_e * math.cos(nu) - f_e
        offset = boundary_z - LensDesignService.profile_cartesian(n, f_i, boundary_x)
        if not math.isfinite(offset):
            raise GeometryError("no real solution for the axial offset", {"f_e": f_e, "rho": rho, "nu": nu, "n": n})

        diameter = diameter or settings.DEFAULT_BALANCE_COEFFICIENT * f_e
        rim = diameter / 2.0
        if boundary_x >= rim:
            raise GeometryError(
                "boundary point lies outside the aperture",
                {"boundary_x": boundary_x, "D_half": rim, "nu": nu}
            )

        count = samples or settings.PROFILE_SAMPLES
        aperture = LensDesignService.aperture_plane(n, f_e, diameter)

        internal_radii = np.linspace(0.0, boundary_x, count)
        internal = [(offset + LensDesignService.profile_cartesian(n, f_i, float(y)), float(y)) for y in internal_radii]
        external_radii = np.linspace(boundary_x, rim, count)
        external = [(LensDesignService.profile_cartesian(n, f_e, float(y)), float(y)) for y in external_radii]

        geometry = BifocalGeometry(
            internal_profile=LensProfile(samples=internal, t_max=aperture - offset, axial_offset=offset),
            external_profile=LensProfile(samples=external, t_max=aperture - boundary_z),
            boundary_point=(boundary_x, boundary_z),
            axial_offset=offset,
            aperture_plane=aperture,
            diameter=diameter,
        )
        logger.info(
            f"✅ bifocal geometry: f_i={f_i * 1e3:.3f} mm, C={offset * 1e3:.4f} mm, "
            f"boundary=({boundary_x * 1e3:.3f}, {boundary_z * 1e3:.3f}) mm"
        )
        return geometry

    @staticmethod
    def residual_divergence(theta_l: float, theta_l_fi: float, n: float) -> float:
        """
        内透镜区域的残余发散角 τ

        θ_t = arctan(sinθ_{l,f_i} / (n − cosθ_{l,f_i}))，τ = arcsin(sin(θ_l + θ_t)/n) − θ_t

        Raises:
            DomainError: arcsin 参数超出 [−1, 1]
        """
        _check_acute("theta_l", theta_l)
        _check_acute("theta_l_fi", theta_l_fi)
        if n <= 0:
            raise DomainError("refraction index must be positive", {"n": n})
        theta_t = math.atan(math.sin(theta_l_fi) / (n - math.cos(theta_l_fi)))
        argument = math.sin(theta_l + theta_t) / n
        if not -1.0 <= argument <= 1.0:
            raise DomainError("arcsin argument outside [-1, 1]", {"argument": argument})
        return math.asin(argument) - theta_t

    @staticmethod
    def wave_path_external_focus(f_e: float, theta_l: float, t_max: float, tau: float, n: float) -> float:
        """L = f_e/cosθ_l + n·T_max/cosτ"""
        return f_e / math.cos(theta_l) + n * t_max / math.cos(tau)

    @staticmethod
    def wave_path_internal_focus(f_i: float, theta_l_fi: float, t_max: float, n: float) -> float:
        """L = f_i/cosθ_{l,f_i} + n·T_max"""
        return f_i / math.cos(theta_l_fi) + n * t_max

    @staticmethod
    def wave_path_check(
        f_e: float,
        f_i: float,
        theta_l: float,
        t_max: float,
        n: float,
        m_int: int,
        wavelength: float
    ) -> WavePathCheck:
        """
        比较内外焦点波程差与 m_int·λ

        The bound n·T_max·(1/cosτ − 1) is what the small-thickness approximation drops.
        """
        theta_fi = BifocalDesignService.internal_angle(f_e, f_i, theta_l)
        tau = BifocalDesignService.residual_divergence(theta_l, theta_fi, n)
        external = BifocalDesignService.wave_path_external_focus(f_e, theta_l, t_max, tau, n)
        internal = BifocalDesignService.wave_path_internal_focus(f_i, theta_fi, t_max, n)
        difference = internal - external
        target = m_int * wavelength
        bound = n * t_max * (1.0 / math.cos(tau) - 1.0)
        slack = 1e-12 * max(abs(internal), abs(external))
        return WavePathCheck(
            external_path=external,
            internal_path=internal,
            difference=difference,
            target=target,
            bound=bound,
            within_bound=abs(difference - target) <= bound + slack,
        )

    @staticmethod
    def build_spec(
        f_e: float,
        n: float,
        wavelength: float,
        theta_lo: float,
        theta_hi: float,
        m_int: Optional[int] = None,
        target_rho: Optional[float] = None,
        nu: Optional[float] = None
    ) -> BifocalSpec:
        """
        由相邻模态发散角构造 BifocalSpec

        m_int 优先使用显式值；否则给定 target_rho 时取最接近者；否则取使 ρ > 1 的最小整数。
        """
        if m_int is None:
            if target_rho is not None:
                m_int = BifocalDesignService.best_wavelength_multiple(f_e, theta_lo, wavelength, target_rho)
            else:
                m_int = BifocalDesignService.smallest_wavelength_multiple(f_e, theta_lo, wavelength)
        ratio = BifocalDesignService.focal_ratio(f_e, theta_lo, wavelength, m_int)
        if not ratio.valid:
            raise GeometryError("focal ratio must exceed 1", {"rho": ratio.rho, "m_int": m_int})
        boundary = nu if nu is not None else BifocalDesignService.boundary_angle(theta_lo, theta_hi)
        logger.info(f"✅ bifocal spec: m_int={m_int}, rho={ratio.rho:.4f}, nu={math.degrees(boundary):.3f}°")
        return BifocalSpec(
            f_e=f_e,
            f_i=ratio.rho * f_e,
            rho=ratio.rho,
            nu=boundary,
            n=n,
            m_int=m_int,
            wavelength=wavelength,
        )

    @staticmethod
    def mode_pair(thetas: Sequence[float]) -> Tuple[float, float]:
        """
        选取内外透镜分界的相邻模态对 (θ_lo, θ_hi)

        默认取最低两个正发散角；BIFOCAL_COVER_HIGHER_MODES 为真时取最高两个。

        Raises:
            GeometryError: 正发散角少于两个
        """
        positive = sorted(theta for theta in thetas if theta > 0)
        if len(positive) < 2:
            raise GeometryError("bifocal design needs two modes with positive divergence", {"thetas": list(thetas)})
        pair = positive[-2:] if get_settings().BIFOCAL_COVER_HIGHER_MODES else positive[:2]
        return pair[0], pair[1]

    @staticmethod
    def design(
        geom: UcaGeometry,
        lens: LensSpec,
        modes: Sequence[int],
        m_int: Optional[int] = None,
        target_rho: Optional[float] = None,
        nu: Optional[float] = None
    ) -> BifocalSpec:
        """Complete BifocalSpec for a UCA, an external lens and the configured modes"""
        thetas = [BeamModelService.peak_divergence_angle(geom, mode) for mode in modes]
        theta_lo, theta_hi = BifocalDesignService.mode_pair(thetas)
        return BifocalDesignService.build_spec(
            lens.focal_distance,
            lens.refraction_index,
            geom.wavelength,
            theta_lo,
            theta_hi,
            m_int=m_int,
            target_rho=target_rho,
            nu=nu,
        )

    @staticmethod
    def bifocal_amplitude(
        a_in: float,
        theta: float,
        nu: float,
        spec: BifocalSpec,
        lens: LensSpec
    ) -> BifocalAmplitude:
        """
        双焦透镜分段幅度

        θ < ν 走内透镜（厚度按 f_i 计算），θ ≥ ν 走外透镜（与单焦 f_e 透镜相同）。

        Args:
            a_in: 入射幅度（增益）
            theta: 模态发散角 (rad)
            nu: 分界角 (rad)
            spec: 双焦参数
            lens: 外透镜参数（focal_distance 应等于 f_e）

        Returns:
            BifocalAmplitude
        """
        if abs(lens.focal_distance - spec.f_e) > 1e-12 * spec.f_e:
            raise DomainError(
                "lens focal distance must equal the bifocal external focal",
                {"lens_f": lens.focal_distance, "f_e": spec.f_e}
            )
        if theta >= nu:
            result = LensDesignService.lens_amplitude(lens, a_in, theta)
            return BifocalAmplitude(
                amplitude=result.amplitude, branch=LensBranch.EXTERNAL, fully_absorbed=result.fully_absorbed
            )

        n = lens.refraction_index
        redistribution_focal = spec.f_e if get_settings().BIFOCAL_REDISTRIBUTION_FOCAL == "feed" else spec.f_i
        redistributed = LensDesignService.aperture_amplitude(a_in, n, redistribution_focal, theta, lens.energy_ratio)
        theta_fi = BifocalDesignService.internal_angle(spec.f_e, spec.f_i, theta)
        depth = LensDesignService.thickness(n, spec.f_i, lens.diameter, theta_fi)
        result = LensDesignService.attenuated_amplitude(redistributed, lens.attenuation_factor, depth)
        return BifocalAmplitude(
            amplitude=result.amplitude, branch=LensBranch.INTERNAL, fully_absorbed=result.fully_absorbed
        )
