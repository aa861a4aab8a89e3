"""
Link budget schemas
"""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from .beam import UcaGeometry
from .bifocal import BifocalSpec, LensBranch
from .lens import LensSpec


class Scenario(str, Enum):
    DIVERGENT = "divergent"
    CONVERGED = "converged"
    BIFOCAL = "bifocal"


class SweepVariable(str, Enum):
    DISTANCE = "distance"
    FOCAL = "focal"
    UCA_RADIUS = "uca_radius"


class ReceptionCase(str, Enum):
    FULL_MAIN_LOBE = "FullMainLobe"
    PARTIAL = "Partial"
    NO_RECEPTION = "NoReception"


class LinkConfig(BaseModel):
    """链路预算参数（SI 单位）"""
    tx_power: float = Field(..., gt=0, description="发射功率 P_t (W)")
    bandwidth: float = Field(..., gt=0, description="带宽 B (Hz)")
    noise: float = Field(..., gt=0, description="噪声功率 N_0 (W)")
    rx_gain: float = Field(..., gt=0, description="接收天线增益 G_0")
    rx_radius: float = Field(..., gt=0, description="接收口径半径 r_0 (m)")
    distance: float = Field(..., gt=0, description="收发距离 d (m)")
    wavelength: float = Field(..., gt=0, description="波长 λ (m)")
    modes: List[int] = Field(..., min_length=1, description="OAM 模态列表（0 表示平面波）")
    residual_divergence: Optional[float] = Field(
        None, ge=0, description="汇聚波束残余发散角 σ (rad)，为空时取默认值"
    )

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "tx_power": 1.0,
                "bandwidth": 1e6,
                "noise": 1e-12,
                "rx_gain": 10.0,
                "rx_radius": 0.1,
                "distance": 1.0,
                "wavelength": 0.0085655,
                "modes": [1, 2],
                "residual_divergence": 0.0087266
            }
        }
    }

    @field_validator("modes")
    @classmethod
    def validate_modes(cls, v: List[int]) -> List[int]:
        if any(mode < 0 for mode in v):
            raise ValueError("OAM modes must be non-negative indices")
        if len(set(v)) != len(v):
            raise ValueError("OAM modes must be distinct")
        return v


class ModeBeam(BaseModel):
    """单个模态的发散角、半功率波束宽度与峰值增益"""
    mode: int = Field(..., ge=0)
    theta: float = Field(..., ge=0, description="发散角 θ_l (rad)")
    delta_theta: float = Field(..., ge=0, description="半功率波束宽度 Δθ_l (rad)")
    peak_gain: float = Field(..., gt=0, description="峰值增益 G_t(l)")

    model_config = {"frozen": True}


class SnrCaseResult(BaseModel):
    """发散波束 SNR 及接收情形"""
    snr: float = Field(..., ge=0)
    case: ReceptionCase
    d_bounds: Tuple[float, Optional[float]] = Field(..., description="情形分界距离 (d₁, d₂)，d₂ 为空表示无界")

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_case(self) -> "SnrCaseResult":
        if self.case == ReceptionCase.NO_RECEPTION and self.snr != 0:
            raise ValueError("NoReception must carry zero SNR")
        return self


class ConvergedSnr(BaseModel):
    """单焦透镜汇聚波束 SNR"""
    snr: float = Field(..., ge=0)
    case: ReceptionCase
    d_max: Optional[float] = Field(None, description="最大传输距离 r_0/tanσ (m)，为空表示无界")
    fully_absorbed: bool = False

    model_config = {"frozen": True}


class BifocalSnr(BaseModel):
    """双焦透镜汇聚波束 SNR"""
    snr: float = Field(..., ge=0)
    case: ReceptionCase
    branch: LensBranch
    d_max: Optional[float] = None
    fully_absorbed: bool = False

    model_config = {"frozen": True}


class LinkSystem(BaseModel):
    """一次链路评估所需的全部输入：链路、UCA、透镜以及可选的双焦参数"""
    link: LinkConfig
    uca: UcaGeometry
    lens: LensSpec
    bifocal: Optional[BifocalSpec] = None
    converged_gain: Optional[float] = Field(None, gt=0, description="汇聚波束增益 G′，为空时取 7·A/λ²")
    beams: Optional[List[ModeBeam]] = Field(None, description="显式给出的模态波束参数，为空时由 UCA 方向图计算")

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_beams(self) -> "LinkSystem":
        if self.beams is not None and sorted(b.mode for b in self.beams) != sorted(self.link.modes):
            raise ValueError("beams must cover exactly the configured modes")
        if self.bifocal is not None and abs(self.lens.focal_distance - self.bifocal.f_e) > 1e-12 * self.bifocal.f_e:
            raise ValueError("lens focal distance must equal the bifocal external focal f_e")
        return self


class CapacityPoint(BaseModel):
    x: float
    capacity_bps: float = Field(..., ge=0)
    per_mode_snr: List[float]


class CapacityCurve(BaseModel):
    """容量扫描结果"""
    sweep_variable: SweepVariable
    scenario: Scenario
    points: List[CapacityPoint]

    @property
    def xs(self) -> List[float]:
        return [point.x for point in self.points]

    @property
    def capacities(self) -> List[float]:
        return [point.capacity_bps for point in self.points]
