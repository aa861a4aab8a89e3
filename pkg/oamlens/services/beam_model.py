"""
OAM 波束模型服务
UCA 远场电场、归一化方向图、发散角（方向图峰值）、半功率波束宽度，以及发散角经验模型
"""
import cmath
import logging
import math
import warnings
from functools import lru_cache
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

from ..config import get_settings
from ..core.exceptions import BeamwidthUndefinedError, DomainError, FitError, RangeWarning, SingularityError
from ..schemas.beam import (
    DipoleExcitation,
    DivergenceFitReport,
    DivergenceFitRow,
    DivergenceForm,
    DivergenceModel,
    DivergenceRow,
    DivergenceTable,
    OamMode,
    UcaGeometry,
)
from . import numerics

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0

# UCA radius (mm) vs simulated divergence angle (deg) for modes 1..4 at 35 GHz
BUILTIN_DIVERGENCE_ROWS: Tuple[Tuple[float, Tuple[float, float, float, float]], ...] = (
    (8.8, (16.4, 27.7, 38.4, 57.0)),
    (9.9, (14.7, 25.3, 34.7, 44.3)),
    (11.0, (12.9, 21.5, 29.0, 41.0)),
    (12.1, (12.1, 19.2, 26.9, 33.8)),
    (13.2, (10.9, 17.5, 25.1, 30.5)),
    (14.3, (9.6, 16.6, 22.0, 29.3)),
    (15.4, (8.7, 15.4, 20.1, 28.3)),
    (16.5, (8.3, 14.0, 19.2, 24.5)),
    (17.6, (8.1, 12.8, 18.9, 22.5)),
    (18.7, (8.0, 12.2, 18.3, 21.8)),
    (19.8, (7.6, 12.0, 17.2, 21.4)),
    (20.9, (7.1, 11.8, 16.2, 21.1)),
    (22.0, (6.6, 11.3, 15.0, 19.9)),
    (23.1, (6.1, 10.5, 14.2, 18.5)),
    (24.2, (5.8, 9.9, 13.5, 17.3)),
)

# Published coefficients: mode -> ((a, b), (p, q))
BUILTIN_MODEL_COEFFICIENTS = {
    1: ((147.0, -1.011), (140.9, -0.1902)),
    2: ((263.2, -1.039), (227.2, -0.5844)),
    3: ((354.3, -1.028), (317.1, -0.4647)),
    4: ((676.3, -1.171), (360.7, -2.135)),
}

TABLE_COLUMNS = ["R_mm", "theta1_deg", "theta2_deg", "theta3_deg", "theta4_deg"]


def _validate_mode(geom: UcaGeometry, mode: Union[OamMode, int]) -> int:
    l = mode.l if isinstance(mode, OamMode) else int(mode)
    if not OamMode(l=l).is_valid_for(geom):
        raise DomainError(
            f"OAM mode {l} outside -N/2 ≤ l < N/2",
            {"l": l, "n_elements": geom.n_elements}
        )
    return l


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= HALF_PI:
        raise DomainError("theta must lie in [0, π/2]", {"theta": theta})


def _raw_pattern(scale: float, order: int, theta) -> np.ndarray:
    return numerics.bessel_j_array(order, scale * np.sin(theta)) ** 2


@lru_cache(maxsize=128)
def _argument_extrema(order: int, grid_points: int) -> Tuple[float, float, float, float]:
    """
    (x_peak, J² at peak, lower half-power x, upper half-power x) of J_order(x)² for x ≥ 0

    The pattern is J_l(scale·sinθ)², so these points do not depend on the UCA radius.
    """
    span = order + 4.0 * order ** (1.0 / 3.0) + 8.0
    grid = np.linspace(0.0, span, grid_points + 1)
    values = numerics.bessel_j_array(order, grid) ** 2

    def power(x: float) -> float:
        return numerics.bessel_j(order, x) ** 2

    if order == 0:
        index, x_peak, peak_value = 0, 0.0, 1.0
    else:
        index = int(np.argmax(values))
        step = span / grid_points
        x_peak = numerics.golden_section_maximize(
            power, max(float(grid[index]) - step, 0.0), float(grid[index]) + step, tol=1e-13
        )
        peak_value = power(x_peak)
        if peak_value < values[index]:
            x_peak, peak_value = float(grid[index]), float(values[index])

    def excess(x: float) -> float:
        return power(x) / peak_value - 0.5

    ratio = values / peak_value - 0.5
    k = index + int(np.nonzero(ratio[index:] < 0)[0][0])
    upper = numerics.solve_scalar(excess, float(grid[k - 1]), float(grid[k]), tol=1e-14)
    if order == 0:
        return x_peak, peak_value, 0.0, upper
    k = int(np.nonzero(ratio[:index + 1] >= 0)[0][0])
    lower = numerics.solve_scalar(excess, float(grid[k - 1]), float(grid[k]), tol=1e-14)
    return x_peak, peak_value, lower, upper


def _peak(scale: float, order: int, grid_points: int) -> Tuple[float, float]:
    """(θ_peak, |J|² at peak) for |J_order(scale·sinθ)|² on (0, π/2]"""
    if order == 0:
        return 0.0, 1.0
    x_peak, peak_value, _, _ = _argument_extrema(order, grid_points)
    if x_peak < scale:
        return math.asin(x_peak / scale), peak_value
    # First maximum lies past the horizon: the pattern rises all the way to θ = π/2
    return HALF_PI, numerics.bessel_j(order, scale) ** 2


def _crossings(scale: float, order: int, grid_points: int) -> Tuple[float, float]:
    _, _, x_lower, x_upper = _argument_extrema(order, grid_points)
    if x_upper >= scale:
        raise BeamwidthUndefinedError(
            "pattern never falls to half power inside (0, π/2)", {"l": order, "scale": scale}
        )
    lower = 0.0 if order == 0 else math.asin(x_lower / scale)
    return lower, math.asin(x_upper / scale)


@lru_cache(maxsize=512)
def _directivity(scale: float, order: int, grid_points: int) -> float:
    _, peak_value = _peak(scale, order, grid_points)
    theta = np.linspace(0.0, HALF_PI, 2 * grid_points + 1)
    pattern = _raw_pattern(scale, order, theta) / peak_value
    # Forward hemisphere only: D = 4π / (2π ∫ g sinθ dθ)
    integral = float(np.trapezoid(pattern * np.sin(theta), theta))
    return 2.0 / integral


class BeamModelService:
    """OAM 波束模型服务"""

    @staticmethod
    def field_amplitude(
        geom: UcaGeometry,
        exc: DipoleExcitation,
        mode: Union[OamMode, int],
        r: float,
        theta: float,
        phi: float
    ) -> complex:
        """
        计算 UCA 产生的 OAM 远场电场

        E = A(r)·e^{ilφ}·J_l(x(θ))，A(r) = −j·μ·ω·d/(4π)·N·i^{−l}·e^{ikr}/r，j 为电流密度

        Args:
            geom: UCA 几何
            exc: 偶极子激励
            mode: OAM 模态
            r: 传播距离 (m)
            theta: 俯仰角 (rad)
            phi: 方位角 (rad)

        Returns:
            复电场值

        Raises:
            SingularityError: r = 0
        """
        l = _validate_mode(geom, mode)
        if r == 0:
            raise SingularityError("field is singular at r = 0")
        if r < 0:
            raise DomainError("r must be positive", {"r": r})
        _check_theta(theta)

        k = geom.wavenumber
        omega = 2.0 * math.pi * geom.frequency
        amplitude = (
            -exc.permeability * omega * exc.dipole_length / (4.0 * math.pi)
            * exc.current_density
            * geom.n_elements
            * cmath.exp(-1j * math.pi * l / 2.0)
            * cmath.exp(1j * k * r) / r
        )
        radial = numerics.bessel_j(l, geom.argument_scale * math.sin(theta))
        return amplitude * cmath.exp(1j * l * phi) * radial

    @staticmethod
    def pattern_gain(geom: UcaGeometry, mode: Union[OamMode, int], theta: float) -> float:
        """
        归一化方向图 |J_l(x)|² / max|J_l(x)|²，取值 [0, 1]
        """
        l = _validate_mode(geom, mode)
        _check_theta(theta)
        order = abs(l)
        _, peak_value = _peak(geom.argument_scale, order, get_settings().PATTERN_GRID_POINTS)
        value = float(_raw_pattern(geom.argument_scale, order, theta)) / peak_value
        return min(max(value, 0.0), 1.0)

    @staticmethod
    def peak_divergence_angle(geom: UcaGeometry, mode: Union[OamMode, int]) -> float:
        """
        发散角 θ_l：方向图峰值所在俯仰角 (rad)，l = 0 时为 0
        """
        l = _validate_mode(geom, mode)
        theta, _ = _peak(geom.argument_scale, abs(l), get_settings().PATTERN_GRID_POINTS)
        return theta

    @staticmethod
    def half_power_crossings(geom: UcaGeometry, mode: Union[OamMode, int]) -> Tuple[float, float]:
        """
        Half-power crossing angles (lower, upper) around the pattern peak

        For l = 0 the lower crossing is 0 (boresight peak).

        Raises:
            BeamwidthUndefinedError: 方向图在 (0, π/2) 内未降至半功率
        """
        l = _validate_mode(geom, mode)
        return _crossings(geom.argument_scale, abs(l), get_settings().PATTERN_GRID_POINTS)

    @staticmethod
    def half_power_beamwidth(geom: UcaGeometry, mode: Union[OamMode, int]) -> float:
        """
        半功率波束宽度 Δθ_l (rad)

        l ≥ 1 取两个半功率点间宽度的一半；l = 0 为半功率点角度本身。
        """
        lower, upper = BeamModelService.half_power_crossings(geom, mode)
        l = mode.l if isinstance(mode, OamMode) else int(mode)
        if l == 0:
            return upper
        return 0.5 * (upper - lower)

    @staticmethod
    def peak_gain(geom: UcaGeometry, mode: Union[OamMode, int]) -> float:
        """
        模态方向性系数（前半空间积分），作为默认绝对峰值增益 G_t(l)
        """
        l = _validate_mode(geom, mode)
        return _directivity(geom.argument_scale, abs(l), get_settings().PATTERN_GRID_POINTS)

    @staticmethod
    def divergence_from_model(model: DivergenceModel, radius_mm: float) -> float:
        """
        按经验模型计算发散角 (度)

        超出有效范围时仍返回数值，并发出 RangeWarning。
        """
        if radius_mm <= 0:
            raise DomainError("radius must be positive", {"R_mm": radius_mm})
        if not model.in_range(radius_mm):
            message = (
                f"R={radius_mm} mm outside valid range {model.valid_R_range} "
                f"for mode {model.mode_l} {model.form.value} model"
            )
            logger.warning(f"⚠️ {message}")
            warnings.warn(message, RangeWarning, stacklevel=2)
        return model.evaluate(radius_mm)

    @staticmethod
    def builtin_divergence_table() -> DivergenceTable:
        """内置 UCA 半径-发散角数据表（15 行，模态 1-4）"""
        return DivergenceTable(
            rows=[DivergenceRow(R_mm=r, thetas_deg=thetas) for r, thetas in BUILTIN_DIVERGENCE_ROWS]
        )

    @staticmethod
    def builtin_divergence_models() -> List[DivergenceModel]:
        """Published power-law and rational coefficients over the built-in table range"""
        lo = BUILTIN_DIVERGENCE_ROWS[0][0]
        hi = BUILTIN_DIVERGENCE_ROWS[-1][0]
        models = []
        for mode_l, (power, rational) in BUILTIN_MODEL_COEFFICIENTS.items():
            models.append(DivergenceModel(
                form=DivergenceForm.POWER_LAW, mode_l=mode_l, params=power, valid_R_range=(lo, hi)
            ))
            models.append(DivergenceModel(
                form=DivergenceForm.RATIONAL, mode_l=mode_l, params=rational, valid_R_range=(lo, hi)
            ))
        return models

    @staticmethod
    def load_divergence_table(path: Union[str, Path]) -> DivergenceTable:
        """
        从 CSV 读取发散角表

        Args:
            path: CSV 路径，表头 R_mm,theta1_deg,...（UTF-8，小数点为 .）

        Returns:
            DivergenceTable
        """
        frame = pd.read_csv(path, encoding="utf-8")
        frame.columns = [str(column).strip() for column in frame.columns]
        if "R_mm" not in frame.columns:
            raise DomainError("divergence CSV must have an R_mm column", {"columns": list(frame.columns)})
        theta_columns = [column for column in TABLE_COLUMNS[1:] if column in frame.columns]
        if not theta_columns:
            raise DomainError("divergence CSV has no theta columns", {"columns": list(frame.columns)})
        rows = [
            DivergenceRow(R_mm=float(record["R_mm"]), thetas_deg=tuple(float(record[c]) for c in theta_columns))
            for record in frame.to_dict(orient="records")
        ]
        logger.info(f"📥 Loaded {len(rows)} divergence rows from {path}")
        return DivergenceTable(rows=rows)

    @staticmethod
    def fit_divergence_models(table: DivergenceTable, source: str = "builtin") -> DivergenceFitReport:
        """
        对每个模态拟合幂律与有理式两种模型

        Args:
            table: 发散角表
            source: 数据来源标识

        Returns:
            DivergenceFitReport

        Raises:
            FitError: 样本不足或退化
        """
        if len(table.rows) < 3:
            raise FitError("at least 3 table rows are required", {"rows": len(table.rows)})
        rows = []
        for mode_l in range(1, table.mode_count + 1):
            samples = table.samples(mode_l)
            power = numerics.fit_power_model(samples)
            rational = numerics.fit_rational_model(samples)
            rows.append(DivergenceFitRow(
                mode=mode_l,
                a=power.params[0],
                b=power.params[1],
                power_rms_deg=power.residual_rms,
                power_iterations=power.iterations,
                p=rational.params[0],
                q=rational.params[1],
                rational_rms_deg=rational.residual_rms,
                rational_iterations=rational.iterations,
            ))
            logger.info(
                f"✅ mode {mode_l}: a={power.params[0]:.4g} b={power.params[1]:.4g} "
                f"p={rational.params[0]:.4g} q={rational.params[1]:.4g}"
            )
        return DivergenceFitReport(source=source, rows=rows)
