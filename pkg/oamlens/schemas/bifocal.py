"""
Bifocal lens schemas
"""
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, Field, model_validator

from .lens import LensProfile


class LensBranch(str, Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


class BifocalSpec(BaseModel):
    """双焦透镜参数"""
    f_e: float = Field(..., gt=0, description="外透镜焦距 (m)")
    f_i: float = Field(..., gt=0, description="内透镜焦距 (m)")
    rho: float = Field(..., gt=1, description="焦距比 f_i/f_e")
    nu: float = Field(..., gt=0, description="分界角 ν (rad)")
    n: float = Field(..., gt=1, description="折射率")
    m_int: int = Field(..., ge=1, description="波程匹配的波长整数倍")
    wavelength: float = Field(..., gt=0, description="波长 λ (m)")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "f_e": 0.03,
                "f_i": 0.0651,
                "rho": 2.17,
                "nu": 0.3317,
                "n": 1.48324,
                "m_int": 62,
                "wavelength": 0.0085655
            }
        }
    }

    @model_validator(mode="after")
    def validate_ratio(self) -> "BifocalSpec":
        if abs(self.f_i - self.rho * self.f_e) > 1e-12 * self.f_i:
            raise ValueError("f_i must equal rho·f_e")
        return self

    def separates(self, theta_lo: float, theta_hi: float) -> bool:
        """θ_l < ν < θ_{l+1} for an adjacent mode pair"""
        return theta_lo < self.nu < theta_hi


class BifocalGeometry(BaseModel):
    """双焦透镜几何：内外两段折射面与分界点"""
    internal_profile: LensProfile
    external_profile: LensProfile
    boundary_point: Tuple[float, float] = Field(..., description="分界点 (x 径向, z 轴向) (m)")
    axial_offset: float = Field(..., description="内折射面顶点轴向偏移 C (m)")
    aperture_plane: float = Field(..., description="口径平面轴向位置 (m)")
    diameter: float = Field(..., gt=0, description="口径 D (m)")

    model_config = {"frozen": True}

    @property
    def center_thickness(self) -> float:
        return self.aperture_plane - self.axial_offset


class FocalRatio(BaseModel):
    """焦距比及其有效性"""
    rho: float
    f_i: float
    m_int: int
    valid: bool = Field(..., description="rho > 1")


class WavePathCheck(BaseModel):
    """内外焦点波程匹配检查"""
    external_path: float
    internal_path: float
    difference: float
    target: float = Field(..., description="m_int·λ")
    bound: float = Field(..., ge=0, description="小厚度近似误差上界 n·T_max·(1/cosτ − 1)")
    within_bound: bool


class BifocalAmplitude(BaseModel):
    """双焦透镜分段幅度"""
    amplitude: float = Field(..., ge=0)
    branch: LensBranch
    fully_absorbed: bool = False
