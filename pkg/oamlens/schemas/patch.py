"""
Patch element schemas
"""
from typing import Any, Dict

from pydantic import BaseModel, Field, model_validator


class PatchDesign(BaseModel):
    """矩形微带贴片尺寸（SI 单位）"""
    width: float = Field(..., gt=0, description="贴片宽度 W_P (m)")
    length: float = Field(..., gt=0, description="贴片长度 L_P (m)")
    edge_extension: float = Field(..., gt=0, description="辐射缝隙等效延伸 ΔL (m)")
    eps_re: float = Field(..., gt=1, description="等效相对介电常数")
    frequency: float = Field(..., gt=0, description="谐振频率 f_r (Hz)")
    eps_r: float = Field(..., gt=1, description="基板相对介电常数")
    substrate_height: float = Field(..., gt=0, description="基板厚度 h (m)")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "width": 0.0033858,
                "length": 0.0026952,
                "edge_extension": 0.000152,
                "eps_re": 2.039,
                "frequency": 35e9,
                "eps_r": 2.2,
                "substrate_height": 0.000294
            }
        }
    }

    @model_validator(mode="after")
    def validate_dimensions(self) -> "PatchDesign":
        if not self.width > self.length:
            raise ValueError("patch width must exceed patch length")
        if not self.eps_re < self.eps_r:
            raise ValueError("effective permittivity must be below the substrate permittivity")
        return self

    def to_report(self) -> Dict[str, Any]:
        """Millimetre report: W_P_mm, L_P_mm, dL_mm, eps_re, inputs"""
        return {
            "W_P_mm": self.width * 1e3,
            "L_P_mm": self.length * 1e3,
            "dL_mm": self.edge_extension * 1e3,
            "eps_re": self.eps_re,
            "inputs": {
                "freq_ghz": self.frequency / 1e9,
                "eps_r": self.eps_r,
                "h_mm": self.substrate_height * 1e3,
            },
        }
