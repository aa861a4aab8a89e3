"""
Fit result schema
"""
import math
from typing import Tuple

from pydantic import BaseModel, Field, field_validator


class FitResult(BaseModel):
    """两参数模型拟合结果"""
    params: Tuple[float, float] = Field(..., description="模型系数 (a, b) 或 (p, q)")
    residual_rms: float = Field(..., ge=0, description="残差均方根（与因变量同单位）")
    iterations: int = Field(..., ge=1, description="Levenberg-Marquardt 迭代次数")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "params": [147.0, -1.011],
                "residual_rms": 0.25,
                "iterations": 7
            }
        }
    }

    @field_validator("params")
    @classmethod
    def validate_params(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not all(math.isfinite(value) for value in v):
            raise ValueError("Fit parameters must be finite")
        return v
