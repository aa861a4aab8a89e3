"""
链路预算服务
发散 / 单焦汇聚 / 双焦汇聚三种 OAM 波束的 SNR 与香农容量，以及参数扫描
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..core.exceptions import BeamGeometryError, ConfigError, DomainError
from ..schemas.beam import UcaGeometry
from ..schemas.bifocal import BifocalSpec, LensBranch
from ..schemas.lens import LensSpec
from ..schemas.link import (
    BifocalSnr,
    CapacityCurve,
    CapacityPoint,
    ConvergedSnr,
    LinkConfig,
    LinkSystem,
    ModeBeam,
    ReceptionCase,
    Scenario,
    SnrCaseResult,
    SweepVariable,
)
from .beam_model import BeamModelService
from .bifocal_design import BifocalDesignService
from .lens_design import LensDesignService

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0

GainProfile = Callable[[float], float]


def _snr_scale(cfg: LinkConfig) -> float:
    """SNR per unit transmit gain: λ²G_0·P_t / ((4πd)²·N_0)"""
    a_er = LinkBudgetService.effective_aperture(cfg.wavelength, cfg.rx_gain)
    return LinkBudgetService.received_power(cfg.tx_power, 1.0, a_er, cfg.distance) / cfg.noise


def _default_sigma(cfg: LinkConfig) -> float:
    if cfg.residual_divergence is not None:
        return cfg.residual_divergence
    return math.radians(get_settings().DEFAULT_RESIDUAL_DIVERGENCE_DEG)


def _flat_profile(beam: ModeBeam) -> GainProfile:
    return lambda theta: beam.peak_gain


class LinkBudgetService:
    """链路预算服务"""

    @staticmethod
    def effective_aperture(wavelength: float, rx_gain: float) -> float:
        """有效接收面积 A_er = λ²G_0/(4π) (m²)"""
        if wavelength <= 0 or rx_gain < 0:
            raise DomainError("wavelength must be positive and rx_gain non-negative")
        return wavelength ** 2 * rx_gain / (4.0 * math.pi)

    @staticmethod
    def received_power(tx_power: float, tx_gain: float, a_er: float, distance: float) -> float:
        """
        接收功率 P_r = G_t·A_er·P_t / (4πd²)

        Raises:
            DomainError: d ≤ 0
        """
        if distance <= 0:
            raise DomainError("distance must be positive", {"d": distance})
        return tx_gain * a_er * tx_power / (4.0 * math.pi * distance ** 2)

    @staticmethod
    def max_distance(rx_radius: float, sigma: float) -> Optional[float]:
        """Maximum reception distance r_0/tanσ; None when σ = 0 (unbounded)"""
        if sigma < 0:
            raise DomainError("residual divergence must be non-negative", {"sigma": sigma})
        if sigma == 0:
            return None
        return rx_radius / math.tan(sigma)

    @staticmethod
    def shannon_capacity(bandwidth: float, snrs: Sequence[float]) -> float:
        """Σ B·log2(1 + SNR_l)"""
        return float(sum(bandwidth * math.log2(1.0 + snr) for snr in snrs))

    @staticmethod
    def mode_beam(geom: UcaGeometry, mode: int) -> ModeBeam:
        """θ_l, Δθ_l and the peak gain of one mode, all from the UCA pattern"""
        return ModeBeam(
            mode=mode,
            theta=BeamModelService.peak_divergence_angle(geom, mode),
            delta_theta=BeamModelService.half_power_beamwidth(geom, mode),
            peak_gain=BeamModelService.peak_gain(geom, mode),
        )

    @staticmethod
    def gain_profile(geom: UcaGeometry, mode: int, peak_gain: Optional[float] = None) -> GainProfile:
        """
        G_t(l, θ)：接收口径所能覆盖的最大俯仰角为 θ 时的增益

        取 peak_gain × max_{0≤θ'≤θ} pattern_gain(θ')，方向图在峰值以下单调，故峰值以外恒为 peak_gain。
        """
        theta_peak = BeamModelService.peak_divergence_angle(geom, mode)
        peak = peak_gain if peak_gain is not None else BeamModelService.peak_gain(geom, mode)

        def profile(theta: float) -> float:
            if theta >= theta_peak:
                return peak
            return peak * BeamModelService.pattern_gain(geom, mode, theta)

        return profile

    @staticmethod
    def snr_divergent(
        cfg: LinkConfig,
        beam: ModeBeam,
        gain_profile: Optional[GainProfile] = None
    ) -> SnrCaseResult:
        """
        发散 OAM 波束 SNR（三种接收情形）

        Args:
            cfg: 链路参数
            beam: 模态 l 的 θ_l、Δθ_l 与峰值增益
            gain_profile: G_t(l, θ_rx)，默认恒为峰值增益

        Returns:
            SnrCaseResult

        Raises:
            BeamGeometryError: l ≥ 1 且 θ_l ≤ Δθ_l
        """
        profile = gain_profile or _flat_profile(beam)
        r0, d = cfg.rx_radius, cfg.distance
        scale = _snr_scale(cfg)

        if beam.mode == 0:
            if beam.delta_theta <= 0:
                raise BeamGeometryError("plane-wave beamwidth must be positive", {"delta_theta": beam.delta_theta})
            d1 = r0 / math.tan(beam.delta_theta) if beam.delta_theta < HALF_PI else 0.0
            bounds: Tuple[float, Optional[float]] = (d1, None)
            if d <= d1:
                return SnrCaseResult(snr=beam.peak_gain * scale, case=ReceptionCase.FULL_MAIN_LOBE, d_bounds=bounds)
            theta_rx = math.atan(r0 / d)
            return SnrCaseResult(snr=profile(theta_rx) * scale, case=ReceptionCase.PARTIAL, d_bounds=bounds)

        if beam.theta <= beam.delta_theta:
            raise BeamGeometryError(
                "divergence angle must exceed the half-power beamwidth",
                {"l": beam.mode, "theta": beam.theta, "delta_theta": beam.delta_theta}
            )
        outer = beam.theta + beam.delta_theta
        d1 = r0 / math.tan(outer) if outer < HALF_PI else 0.0
        d2 = r0 / math.tan(beam.theta - beam.delta_theta)
        bounds = (d1, d2)
        if d <= d1:
            return SnrCaseResult(snr=beam.peak_gain * scale, case=ReceptionCase.FULL_MAIN_LOBE, d_bounds=bounds)
        if d <= d2:
            theta_rx = math.atan(r0 / d)
            return SnrCaseResult(snr=profile(theta_rx) * scale, case=ReceptionCase.PARTIAL, d_bounds=bounds)
        return SnrCaseResult(snr=0.0, case=ReceptionCase.NO_RECEPTION, d_bounds=bounds)

    @staticmethod
    def capacity_divergent(
        cfg: LinkConfig,
        beams: Sequence[ModeBeam],
        gain_profiles: Optional[Dict[int, GainProfile]] = None
    ) -> float:
        """发散波束容量 Σ B·log2(1 + SNR_l) (bit/s)"""
        profiles = gain_profiles or {}
        snrs = [LinkBudgetService.snr_divergent(cfg, beam, profiles.get(beam.mode)).snr for beam in beams]
        return LinkBudgetService.shannon_capacity(cfg.bandwidth, snrs)

    @staticmethod
    def snr_converged(
        cfg: LinkConfig,
        mode: int,
        lens: LensSpec,
        theta: float,
        converged_gain: Optional[float] = None
    ) -> ConvergedSnr:
        """
        单焦透镜汇聚波束 SNR′

        SNR′ = [G′·a(n·cosθ−1)³/(f²(n−1)²(n−cosθ)) − p·T(f, θ)]·λ²G_0·P_t/((4πd)²N_0)，括号为负时取 0。

        Args:
            cfg: 链路参数（σ 为空时取 DEFAULT_RESIDUAL_DIVERGENCE_DEG）
            mode: OAM 模态
            lens: 透镜参数
            theta: 模态发散角，即馈源角 (rad)
            converged_gain: G′，默认 7·A/λ²

        Returns:
            ConvergedSnr
        """
        gain = converged_gain or LensDesignService.converged_gain(lens.diameter, cfg.wavelength)
        d_max = LinkBudgetService.max_distance(cfg.rx_radius, _default_sigma(cfg))
        if d_max is not None and cfg.distance > d_max:
            return ConvergedSnr(snr=0.0, case=ReceptionCase.NO_RECEPTION, d_max=d_max)
        bracket = LensDesignService.lens_amplitude(lens, gain, theta)
        logger.debug(f"converged mode {mode}: bracket={bracket.amplitude:.6g}, absorbed={bracket.fully_absorbed}")
        return ConvergedSnr(
            snr=bracket.amplitude * _snr_scale(cfg),
            case=ReceptionCase.FULL_MAIN_LOBE,
            d_max=d_max,
            fully_absorbed=bracket.fully_absorbed,
        )

    @staticmethod
    def capacity_converged(
        cfg: LinkConfig,
        lens: LensSpec,
        beams: Sequence[ModeBeam],
        converged_gain: Optional[float] = None
    ) -> float:
        """单焦汇聚容量 Σ B·log2(1 + SNR′_l) (bit/s)"""
        snrs = [
            LinkBudgetService.snr_converged(cfg, beam.mode, lens, beam.theta, converged_gain).snr
            for beam in beams
        ]
        return LinkBudgetService.shannon_capacity(cfg.bandwidth, snrs)

    @staticmethod
    def snr_bifocal(
        cfg: LinkConfig,
        mode: int,
        bifocal: BifocalSpec,
        lens: LensSpec,
        theta: float,
        nu: Optional[float] = None,
        converged_gain: Optional[float] = None
    ) -> BifocalSnr:
        """
        双焦透镜汇聚波束 SNR″

        θ_l ≥ ν 时与 f = f_e 的单焦透镜完全相同；θ_l < ν 时走内透镜分支，
        σ 未配置时以该模态的残余发散角 τ 限定最大距离。

        Args:
            cfg: 链路参数
            mode: OAM 模态
            bifocal: 双焦参数
            lens: 外透镜参数（焦距 f_e）
            theta: 模态发散角 (rad)
            nu: 分界角，默认 bifocal.nu
            converged_gain: G′，默认 7·A/λ²

        Returns:
            BifocalSnr
        """
        boundary = bifocal.nu if nu is None else nu
        gain = converged_gain or LensDesignService.converged_gain(lens.diameter, cfg.wavelength)
        if theta >= boundary:
            converged = LinkBudgetService.snr_converged(cfg, mode, lens, theta, gain)
            return BifocalSnr(
                snr=converged.snr,
                case=converged.case,
                branch=LensBranch.EXTERNAL,
                d_max=converged.d_max,
                fully_absorbed=converged.fully_absorbed,
            )

        if cfg.residual_divergence is not None:
            sigma = cfg.residual_divergence
        elif theta > 0:
            theta_fi = BifocalDesignService.internal_angle(bifocal.f_e, bifocal.f_i, theta)
            sigma = BifocalDesignService.residual_divergence(theta, theta_fi, bifocal.n)
        else:
            sigma = 0.0
        d_max = LinkBudgetService.max_distance(cfg.rx_radius, sigma)
        if d_max is not None and cfg.distance > d_max:
            return BifocalSnr(snr=0.0, case=ReceptionCase.NO_RECEPTION, branch=LensBranch.INTERNAL, d_max=d_max)

        amplitude = BifocalDesignService.bifocal_amplitude(gain, theta, boundary, bifocal, lens)
        return BifocalSnr(
            snr=amplitude.amplitude * _snr_scale(cfg),
            case=ReceptionCase.FULL_MAIN_LOBE,
            branch=amplitude.branch,
            d_max=d_max,
            fully_absorbed=amplitude.fully_absorbed,
        )

    @staticmethod
    def capacity_bifocal(
        cfg: LinkConfig,
        bifocal: BifocalSpec,
        lens: LensSpec,
        beams: Sequence[ModeBeam],
        nu: Optional[float] = None,
        converged_gain: Optional[float] = None
    ) -> float:
        """双焦汇聚容量 Σ B·log2(1 + SNR″_l) (bit/s)"""
        snrs = [
            LinkBudgetService.snr_bifocal(cfg, beam.mode, bifocal, lens, beam.theta, nu, converged_gain).snr
            for beam in beams
        ]
        return LinkBudgetService.shannon_capacity(cfg.bandwidth, snrs)

    @staticmethod
    def boundary_for(thetas: Sequence[float]) -> Optional[float]:
        """
        分界角默认值：所选模态对发散角的中点，少于两个正发散角时返回 None
        """
        if sum(1 for theta in thetas if theta > 0) < 2:
            return None
        return BifocalDesignService.boundary_angle(*BifocalDesignService.mode_pair(thetas))

    @staticmethod
    def evaluate_point(system: LinkSystem, scenario: Scenario, variable: SweepVariable, x: float) -> CapacityPoint:
        """
        在扫描变量取值 x 处计算容量

        distance 只改变 d；focal 保持平衡系数 D/f 与焦距比 ρ 不变；
        uca_radius 重新计算各模态波束，透镜口径覆盖最宽模态，ν 取中点，f_i 保持不变。
        G′ 始终按基准口径计算。
        """
        cfg = system.link
        lens = system.lens
        bifocal = system.bifocal
        uca = system.uca
        gain = system.converged_gain or LensDesignService.converged_gain(lens.diameter, cfg.wavelength)
        beams = list(system.beams) if system.beams is not None else None
        nu = bifocal.nu if bifocal is not None else None

        if variable == SweepVariable.DISTANCE:
            cfg = cfg.model_copy(update={"distance": x})
        elif variable == SweepVariable.FOCAL:
            m = lens.diameter / lens.focal_distance
            lens = lens.model_copy(update={"focal_distance": x, "diameter": m * x})
            if bifocal is not None:
                bifocal = bifocal.model_copy(update={"f_e": x, "f_i": bifocal.rho * x})
        else:
            uca = uca.model_copy(update={"radius": x})
            beams = None

        if scenario == Scenario.DIVERGENT:
            if beams is None:
                beams = [LinkBudgetService.mode_beam(uca, mode) for mode in cfg.modes]
            snrs = [
                LinkBudgetService.snr_divergent(
                    cfg, beam, LinkBudgetService.gain_profile(uca, beam.mode, beam.peak_gain)
                ).snr
                for beam in beams
            ]
            return CapacityPoint(
                x=float(x),
                capacity_bps=LinkBudgetService.shannon_capacity(cfg.bandwidth, snrs),
                per_mode_snr=snrs,
            )

        # Converged beams only need the divergence angles
        if beams is not None:
            thetas = [(beam.mode, beam.theta) for beam in beams]
        else:
            thetas = [(mode, BeamModelService.peak_divergence_angle(uca, mode)) for mode in cfg.modes]

        if variable == SweepVariable.UCA_RADIUS:
            widest = max(theta for _, theta in thetas)
            diameter = LensDesignService.diameter_for(lens.refraction_index, lens.focal_distance, widest)
            lens = lens.model_copy(update={"diameter": diameter})
            nu = LinkBudgetService.boundary_for([theta for _, theta in thetas]) or nu

        if scenario == Scenario.CONVERGED:
            snrs = [LinkBudgetService.snr_converged(cfg, mode, lens, theta, gain).snr for mode, theta in thetas]
        else:
            if bifocal is None:
                raise ConfigError("bifocal scenario requires a bifocal design")
            snrs = [
                LinkBudgetService.snr_bifocal(cfg, mode, bifocal, lens, theta, nu, gain).snr for mode, theta in thetas
            ]
        return CapacityPoint(
            x=float(x),
            capacity_bps=LinkBudgetService.shannon_capacity(cfg.bandwidth, snrs),
            per_mode_snr=snrs,
        )

    @staticmethod
    def sweep(
        system: LinkSystem,
        scenario: Scenario,
        variable: SweepVariable,
        start: float,
        stop: float,
        steps: int
    ) -> CapacityCurve:
        """
        容量参数扫描

        Args:
            system: 基准链路系统
            scenario: divergent / converged / bifocal
            variable: distance / focal / uca_radius（SI 单位）
            start: 起点
            stop: 终点
            steps: 网格点数 (≥ 2)

        Returns:
            CapacityCurve，点顺序与网格一致

        Raises:
            ConfigError: 网格非法或场景与扫描变量不匹配
        """
        scenario = Scenario(scenario)
        variable = SweepVariable(variable)
        if steps < 2:
            raise ConfigError("sweep needs at least 2 steps", {"steps": steps})
        if not 0 < start < stop:
            raise ConfigError("sweep range must satisfy 0 < start < stop", {"start": start, "stop": stop})
        if scenario == Scenario.DIVERGENT and variable == SweepVariable.FOCAL:
            raise ConfigError("divergent beams have no focal distance to sweep")
        if scenario == Scenario.BIFOCAL and system.bifocal is None:
            raise ConfigError("bifocal scenario requires a bifocal design")

        grid = np.linspace(start, stop, steps)
        worker = partial(LinkBudgetService.evaluate_point, system, scenario, variable)
        with ThreadPoolExecutor(max_workers=max(1, get_settings().SWEEP_MAX_WORKERS)) as pool:
            points: List[CapacityPoint] = list(pool.map(worker, (float(x) for x in grid)))
        logger.info(f"✅ {scenario.value} sweep over {variable.value}: {steps} points")
        return CapacityCurve(sweep_variable=variable, scenario=scenario, points=points)
