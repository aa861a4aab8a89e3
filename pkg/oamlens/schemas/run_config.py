"""
Run configuration schemas for the command-line tools

Config files use SI units with angles in degrees. Unknown keys are rejected.
"""
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..config import get_settings


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class _RunModel(BaseModel):
    model_config = {"extra": "forbid", "frozen": True}


class UcaDesignRun(_RunModel):
    """uca-design 参数"""
    freq_ghz: float = Field(..., gt=0, description="谐振频率 (GHz)")
    eps_r: float = Field(..., gt=1, description="基板相对介电常数")
    h_mm: Optional[float] = Field(None, gt=0, description="基板厚度 (mm)")
    solve_h: bool = Field(False, description="由目标等效介电常数反解基板厚度")
    target_eps_re: Optional[float] = Field(None, gt=1, description="目标等效介电常数")
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON

    @model_validator(mode="after")
    def validate_height(self) -> "UcaDesignRun":
        if self.solve_h:
            if self.target_eps_re is None:
                raise ValueError("solve_h requires target_eps_re")
            if self.h_mm is not None:
                raise ValueError("h_mm and solve_h are mutually exclusive")
        elif self.h_mm is None:
            raise ValueError("h_mm is required unless solve_h is set")
        return self


class FitDivergenceRun(_RunModel):
    """fit-divergence 参数"""
    table: Optional[str] = Field(None, description="发散角 CSV 路径，为空时使用内置表")
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV


class LensDesignRun(_RunModel):
    """lens-design 参数"""
    freq_ghz: float = Field(..., gt=0, description="工作频率 (GHz)")
    eps_r: float = Field(..., gt=1, description="透镜材料相对介电常数")
    focal_mm: float = Field(..., gt=0, description="焦距（双焦时为外焦距 f_e）(mm)")
    balance: Optional[float] = Field(None, gt=0, description="平衡系数 m = D/f")
    theta_max_deg: Optional[float] = Field(None, gt=0, lt=90, description="口径覆盖的最大馈源角 (°)")
    samples: int = Field(default_factory=lambda: get_settings().PROFILE_SAMPLES, ge=2, description="每段采样点数")
    attenuation_per_mm: float = Field(
        default_factory=lambda: get_settings().DEFAULT_ATTENUATION_PER_MM, ge=0, description="幅度衰减系数 p (每 mm)"
    )
    energy_ratio: float = Field(default_factory=lambda: get_settings().DEFAULT_ENERGY_RATIO, gt=0, le=1)
    bifocal: bool = False
    m_int: Optional[int] = Field(None, ge=1, description="波长整数倍")
    target_rho: Optional[float] = Field(None, gt=1, description="目标焦距比，取最接近的 m_int")
    nu_deg: Optional[float] = Field(None, gt=0, lt=90, description="分界角 (°)，默认相邻模态中点")
    n_elements: int = Field(16, ge=4, description="UCA 阵元数")
    radius_wavelengths: float = Field(0.6, gt=0, description="UCA 半径（波长倍数）")
    modes: List[int] = Field(default_factory=lambda: [1, 2], min_length=2, description="决定分界角的模态")
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    @model_validator(mode="after")
    def validate_aperture(self) -> "LensDesignRun":
        if self.balance is not None and self.theta_max_deg is not None:
            raise ValueError("balance and theta_max_deg are mutually exclusive")
        if self.m_int is not None and self.target_rho is not None:
            raise ValueError("m_int and target_rho are mutually exclusive")
        return self


class LinkSection(_RunModel):
    tx_power: float = Field(1.0, gt=0, description="发射功率 (W)")
    bandwidth: float = Field(1.0e6, gt=0, description="带宽 (Hz)")
    noise: float = Field(1.0e-12, gt=0, description="噪声功率 (W)")
    rx_gain: float = Field(10.0, gt=0, description="接收天线增益")
    rx_radius: float = Field(0.1, gt=0, description="接收口径半径 (m)")
    distance: float = Field(1.0, gt=0, description="收发距离 (m)")
    modes: List[int] = Field(default_factory=lambda: [1, 2], min_length=1)
    residual_divergence_deg: Optional[float] = Field(None, ge=0, description="汇聚波束残余发散角 σ (°)")


class UcaSection(_RunModel):
    n_elements: int = Field(16, ge=4)
    frequency: float = Field(35.0e9, gt=0, description="工作频率 (Hz)")
    radius: Optional[float] = Field(None, gt=0, description="UCA 半径 (m)")
    radius_wavelengths: float = Field(0.6, gt=0, description="radius 为空时使用的半径（波长倍数）")


class LensSection(_RunModel):
    eps_r: float = Field(2.2, gt=1)
    focal_distance: float = Field(0.03, gt=0, description="焦距 f（双焦时为 f_e）(m)")
    diameter: Optional[float] = Field(None, gt=0, description="口径 (m)，默认 DEFAULT_BALANCE_COEFFICIENT·f")
    attenuation_per_mm: float = Field(default_factory=lambda: get_settings().DEFAULT_ATTENUATION_PER_MM, ge=0)
    energy_ratio: float = Field(default_factory=lambda: get_settings().DEFAULT_ENERGY_RATIO, gt=0, le=1)
    converged_gain: Optional[float] = Field(None, gt=0, description="汇聚波束增益 G′，默认 7·A/λ²")


class BifocalSection(_RunModel):
    m_int: Optional[int] = Field(None, ge=1)
    target_rho: Optional[float] = Field(None, gt=1)
    nu_deg: Optional[float] = Field(None, gt=0, lt=90)

    @model_validator(mode="after")
    def validate_multiple(self) -> "BifocalSection":
        if self.m_int is not None and self.target_rho is not None:
            raise ValueError("m_int and target_rho are mutually exclusive")
        return self


class SweepSection(_RunModel):
    scenario: Literal["divergent", "converged", "bifocal", "all"] = "all"
    variable: Literal["distance", "focal", "uca_radius"] = "distance"
    start: float = Field(..., gt=0, description="起点（SI 单位）")
    stop: float = Field(..., gt=0, description="终点（SI 单位）")
    steps: int = Field(200, ge=2)

    @model_validator(mode="after")
    def validate_range(self) -> "SweepSection":
        if not self.start < self.stop:
            raise ValueError("sweep start must be below stop")
        return self


class CapacityRun(_RunModel):
    """capacity 参数"""
    link: LinkSection = Field(default_factory=LinkSection)
    uca: UcaSection = Field(default_factory=UcaSection)
    lens: LensSection = Field(default_factory=LensSection)
    bifocal: BifocalSection = Field(default_factory=BifocalSection)
    sweep: SweepSection
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
