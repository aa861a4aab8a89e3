"""
UCA 阵元（矩形微带贴片）尺寸设计
"""
import logging
import math

from ..core.exceptions import DesignError, DomainError
from ..schemas.beam import SPEED_OF_LIGHT
from ..schemas.patch import PatchDesign
from . import numerics

logger = logging.getLogger(__name__)


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive", {name: value})


class UcaDesignService:
    """贴片阵元设计服务"""

    @staticmethod
    def patch_width(f_r: float, eps_r: float) -> float:
        """
        贴片宽度 W_P = c/(2f_r)·sqrt(2/(ε_r+1))

        Args:
            f_r: 谐振频率 (Hz)
            eps_r: 基板相对介电常数 (≥ 1)

        Returns:
            W_P (m)
        """
        _positive(f_r=f_r)
        if eps_r < 1:
            raise DomainError("eps_r must be ≥ 1", {"eps_r": eps_r})
        return SPEED_OF_LIGHT / (2.0 * f_r) * math.sqrt(2.0 / (eps_r + 1.0))

    @staticmethod
    def effective_permittivity(eps_r: float, h: float, width: float) -> float:
        """ε_re = (ε_r+1)/2 + (ε_r−1)/2·(1 + 10h/W_P)^(−1/2)"""
        _positive(h=h, width=width)
        return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / math.sqrt(1.0 + 10.0 * h / width)

    @staticmethod
    def edge_extension(h: float, eps_re: float, width: float) -> float:
        """ΔL = 0.412h·(ε_re+0.3)(W_P/h+0.264) / [(ε_re−0.258)(W_P/h+0.8)]"""
        _positive(h=h, width=width)
        if eps_re <= 0.258:
            raise DomainError("eps_re must exceed 0.258", {"eps_re": eps_re})
        ratio = width / h
        return 0.412 * h * (eps_re + 0.3) * (ratio + 0.264) / ((eps_re - 0.258) * (ratio + 0.8))

    @staticmethod
    def patch_length(f_r: float, eps_re: float, delta_l: float) -> float:
        """
        贴片长度 L_P = c/(2f_r·sqrt(ε_re)) − 2ΔL

        Raises:
            DesignError: L_P ≤ 0
        """
        _positive(f_r=f_r, eps_re=eps_re)
        if delta_l < 0:
            raise DomainError("edge extension must be non-negative", {"delta_l": delta_l})
        length = SPEED_OF_LIGHT / (2.0 * f_r * math.sqrt(eps_re)) - 2.0 * delta_l
        if length <= 0:
            raise DesignError(
                "edge extension leaves no positive patch length",
                {"half_wavelength": length + 2.0 * delta_l, "delta_l": delta_l}
            )
        return length

    @staticmethod
    def solve_substrate_height(target_eps_re: float, eps_r: float, width: float) -> float:
        """
        Closed-form h giving the target effective permittivity

        Raises:
            DomainError: target outside ((ε_r+1)/2, ε_r)
        """
        _positive(width=width)
        low, high = (eps_r + 1.0) / 2.0, eps_r
        if not low < target_eps_re < high:
            raise DomainError(
                "target eps_re must lie strictly between (eps_r+1)/2 and eps_r",
                {"target_eps_re": target_eps_re, "low": low, "high": high}
            )
        v = (target_eps_re - low) / ((eps_r - 1.0) / 2.0)
        return width / 10.0 * (1.0 / (v * v) - 1.0)

    @staticmethod
    def solve_height_for_extension(target_delta_l: float, eps_re: float, width: float) -> float:
        """h at which the edge extension equals target_delta_l (ΔL is increasing in h)"""
        _positive(target_delta_l=target_delta_l, width=width)
        lo = width * 1e-9
        hi = width
        while UcaDesignService.edge_extension(hi, eps_re, width) < target_delta_l:
            hi *= 2.0
            if hi > 1e6 * width:
                raise DomainError("target edge extension is unreachable", {"target_delta_l": target_delta_l})
        return numerics.solve_scalar(
            lambda h: UcaDesignService.edge_extension(h, eps_re, width) - target_delta_l,
            lo,
            hi,
            tol=1e-15,
        )

    @staticmethod
    def design_patch(f_r: float, eps_r: float, h: float) -> PatchDesign:
        """
        完整贴片设计流程：W_P → ε_re → ΔL → L_P

        Args:
            f_r: 谐振频率 (Hz)
            eps_r: 基板相对介电常数 (> 1)
            h: 基板厚度 (m)

        Returns:
            PatchDesign

        Raises:
            DesignError: 尺寸不满足 W_P > L_P > 0
        """
        if not eps_r > 1:
            raise DomainError("eps_r must exceed 1 for a substrate patch", {"eps_r": eps_r})
        width = UcaDesignService.patch_width(f_r, eps_r)
        eps_re = UcaDesignService.effective_permittivity(eps_r, h, width)
        delta_l = UcaDesignService.edge_extension(h, eps_re, width)
        length = UcaDesignService.patch_length(f_r, eps_re, delta_l)
        if not width > length:
            raise DesignError("patch length exceeds patch width", {"W_P": width, "L_P": length})
        logger.info(
            f"✅ patch design: W_P={width * 1e3:.4f} mm, L_P={length * 1e3:.4f} mm, "
            f"ΔL={delta_l * 1e3:.4f} mm, eps_re={eps_re:.4f}"
        )
        return PatchDesign(
            width=width,
            length=length,
            edge_extension=delta_l,
            eps_re=eps_re,
            frequency=f_r,
            eps_r=eps_r,
            substrate_height=h,
        )
