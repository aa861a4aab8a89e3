"""
Lens schemas
"""
from typing import List, Tuple

from pydantic import BaseModel, Field, field_validator


class LensSpec(BaseModel):
    """单焦双曲面介质透镜参数（SI 单位）"""
    refraction_index: float = Field(..., gt=1, description="折射率 n")
    focal_distance: float = Field(..., gt=0, description="焦距 f (m)")
    diameter: float = Field(..., gt=0, description="口径 D (m)")
    attenuation_factor: float = Field(..., ge=0, description="幅度衰减系数 p（每米厚度）")
    energy_ratio: float = Field(..., gt=0, le=1, description="进入透镜的能量比 a")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "refraction_index": 1.48324,
                "focal_distance": 0.03,
                "diameter": 0.0501,
                "attenuation_factor": 5000.0,
                "energy_ratio": 0.001
            }
        }
    }

    @classmethod
    def from_millimetres(
        cls,
        refraction_index: float,
        focal_mm: float,
        diameter_mm: float,
        attenuation_per_mm: float,
        energy_ratio: float
    ) -> "LensSpec":
        """p is given per millimetre of thickness and converted to per metre"""
        return cls(
            refraction_index=refraction_index,
            focal_distance=focal_mm * 1e-3,
            diameter=diameter_mm * 1e-3,
            attenuation_factor=attenuation_per_mm * 1e3,
            energy_ratio=energy_ratio,
        )


class LensProfile(BaseModel):
    """透镜折射面采样点 (x 轴向, y 径向)"""
    samples: List[Tuple[float, float]] = Field(..., min_length=2, description="(x, y) 采样点 (m)")
    t_max: float = Field(..., ge=0, description="最大厚度 (m)")
    axial_offset: float = Field(0.0, description="折射面顶点的轴向偏移 C (m)")

    model_config = {"frozen": True}

    @field_validator("samples")
    @classmethod
    def validate_samples(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        radii = [y for _, y in v]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("Profile radial coordinate y must be strictly increasing")
        return v


class AttenuatedAmplitude(BaseModel):
    """经过透镜厚度衰减后的幅度"""
    amplitude: float = Field(..., ge=0)
    fully_absorbed: bool = Field(False, description="衰减项超过入射幅度（截断为 0）")

    model_config = {"frozen": True}
