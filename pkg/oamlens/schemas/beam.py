"""
Beam model schemas: UCA geometry, OAM modes, excitation and divergence models
"""
import math
from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from ..config import get_settings

SPEED_OF_LIGHT = 299_792_458.0
MU_0 = 4.0e-7 * math.pi


class UcaGeometry(BaseModel):
    """均匀圆阵（UCA）几何参数"""
    n_elements: int = Field(..., ge=4, description="阵元数 N")
    radius: float = Field(..., gt=0, description="阵列中心到贴片中心的半径 R (m)")
    frequency: float = Field(..., gt=0, description="工作频率 (Hz)")
    bessel_argument_factor: float = Field(
        default_factory=lambda: get_settings().BESSEL_ARGUMENT_FACTOR,
        gt=0,
        description="Bessel 自变量系数：x = factor·k·R·sinθ"
    )

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "n_elements": 16,
                "radius": 0.0051393,
                "frequency": 35e9,
                "bessel_argument_factor": 2.0
            }
        }
    }

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def argument_scale(self) -> float:
        """x(θ) = argument_scale·sinθ"""
        return self.bessel_argument_factor * self.wavenumber * self.radius

    @classmethod
    def from_wavelengths(cls, n_elements: int, radius_wavelengths: float, frequency: float, **kwargs) -> "UcaGeometry":
        return cls(
            n_elements=n_elements,
            radius=radius_wavelengths * SPEED_OF_LIGHT / frequency,
            frequency=frequency,
            **kwargs
        )


class OamMode(BaseModel):
    """OAM 模态阶数 l"""
    l: int = Field(..., description="有符号模态阶数")

    model_config = {"frozen": True}

    def is_valid_for(self, geom: UcaGeometry) -> bool:
        return -geom.n_elements / 2 <= self.l < geom.n_elements / 2


class DipoleExcitation(BaseModel):
    """阵元电偶极子激励（电流密度避免与虚数单位混淆）"""
    current_density: float = Field(1.0, gt=0, description="电流密度 (A/m²)")
    dipole_length: float = Field(1.0e-3, gt=0, description="电偶极子长度 d (m)")
    permeability: float = Field(MU_0, gt=0, description="磁导率 (H/m)")

    model_config = {"frozen": True}


class DivergenceForm(str, Enum):
    POWER_LAW = "power_law"
    RATIONAL = "rational"


class DivergenceModel(BaseModel):
    """发散角经验模型 θ(R)：幂律 a·R^b 或有理式 p/(R+q)"""
    form: DivergenceForm
    mode_l: int = Field(..., description="OAM 模态阶数")
    params: Tuple[float, float] = Field(..., description="(a, b) 或 (p, q)")
    valid_R_range: Tuple[float, float] = Field(..., description="有效半径范围 (mm, mm)")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "form": "power_law",
                "mode_l": 1,
                "params": [147.0, -1.011],
                "valid_R_range": [8.8, 24.2]
            }
        }
    }

    @model_validator(mode="after")
    def validate_model(self) -> "DivergenceModel":
        lo, hi = self.valid_R_range
        if not 0 < lo < hi:
            raise ValueError("valid_R_range must satisfy 0 < lo < hi")
        first, second = self.params
        if self.form == DivergenceForm.POWER_LAW:
            if first <= 0 or second >= 0:
                raise ValueError("Power-law model requires a > 0 and b < 0")
        else:
            if first <= 0 or lo + second <= 0:
                raise ValueError("Rational model requires p > 0 and R + q > 0 on the valid range")
        # Both forms are monotone decreasing, so the range ends bound the prediction.
        for radius in (lo, hi):
            theta = self.evaluate(radius)
            if not 0.0 < theta < 90.0:
                raise ValueError(f"Predicted divergence {theta:.3f}° at R={radius} mm is outside (0°, 90°)")
        return self

    def evaluate(self, radius_mm: float) -> float:
        first, second = self.params
        if self.form == DivergenceForm.POWER_LAW:
            return first * radius_mm ** second
        return first / (radius_mm + second)

    def in_range(self, radius_mm: float) -> bool:
        lo, hi = self.valid_R_range
        return lo <= radius_mm <= hi


class DivergenceRow(BaseModel):
    """发散角表的一行"""
    R_mm: float = Field(..., gt=0, description="UCA 半径 (mm)")
    thetas_deg: Tuple[float, ...] = Field(..., min_length=1, description="各模态发散角 (度)，按模态递增")

    model_config = {"frozen": True}

    @field_validator("thetas_deg")
    @classmethod
    def validate_thetas(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not 0 < theta < 90 for theta in v):
            raise ValueError("Divergence angles must lie in (0°, 90°)")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("Divergence angles must increase with mode index within a row")
        return v


class DivergenceTable(BaseModel):
    """UCA 半径-发散角数据表"""
    rows: List[DivergenceRow] = Field(..., min_length=1)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_table(self) -> "DivergenceTable":
        widths = {len(row.thetas_deg) for row in self.rows}
        if len(widths) != 1:
            raise ValueError("Every row must list the same number of modes")
        radii = [row.R_mm for row in self.rows]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("R must be strictly increasing")
        for column in range(widths.pop()):
            values = [row.thetas_deg[column] for row in self.rows]
            if any(b >= a for a, b in zip(values, values[1:])):
                raise ValueError(f"Mode {column + 1} divergence must strictly decrease in R")
        return self

    @property
    def mode_count(self) -> int:
        return len(self.rows[0].thetas_deg)

    def samples(self, mode_l: int) -> List[Tuple[float, float]]:
        """(R_mm, θ_deg) samples for mode l (1-based column)"""
        if not 1 <= mode_l <= self.mode_count:
            raise ValueError(f"Mode {mode_l} not in table")
        return [(row.R_mm, row.thetas_deg[mode_l - 1]) for row in self.rows]


class DivergenceFitRow(BaseModel):
    """单个模态的两种模型拟合系数"""
    mode: int
    a: float
    b: float
    power_rms_deg: float
    power_iterations: int
    p: float
    q: float
    rational_rms_deg: float
    rational_iterations: int


class DivergenceFitReport(BaseModel):
    """拟合系数报告"""
    source: str = Field(..., description="builtin 或 CSV 路径")
    rows: List[DivergenceFitRow]
