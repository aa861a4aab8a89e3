"""
数值内核
整数阶 Bessel 函数、两参数非线性最小二乘拟合、区间求根与黄金分割极大值搜索
"""
import logging
import math
from typing import Callable, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..core.exceptions import BracketError, DomainError, FitError
from ..schemas.fit import FitResult

logger = logging.getLogger(__name__)

MAX_ORDER = 64
MAX_ARGUMENT = 1.0e4

# Power series is used below this |x|; above it the series loses digits to cancellation
SERIES_LIMIT = 8.0
_SERIES_MAX_TERMS = 500

# Miller recurrence parameters
_MILLER_ACC = 200.0
_BIGNO = 1.0e10
_BIGNI = 1.0e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_order(order: int) -> int:
    if isinstance(order, bool) or int(order) != order:
        raise DomainError("Bessel order must be an integer", {"order": order})
    order = int(order)
    if abs(order) > MAX_ORDER:
        raise DomainError(f"Bessel order must satisfy |order| ≤ {MAX_ORDER}", {"order": order})
    return order


def _series(order: int, ax: np.ndarray) -> np.ndarray:
    half = ax / 2.0
    term = np.ones_like(half)
    for i in range(1, order + 1):
        term = term * half / i
    total = term.copy()
    quarter_sq = half * half
    for k in range(1, _SERIES_MAX_TERMS):
        term = -term * quarter_sq / (k * (k + order))
        total = total + term
        if np.max(np.abs(term)) < 1e-18:
            break
    return total


def _miller(order: int, ax: np.ndarray) -> np.ndarray:
    big = max(float(order), float(np.max(ax)))
    start = 2 * ((int(big) + int(math.sqrt(_MILLER_ACC * big))) // 2)
    if start <= order:
        start = order + 2 + (order % 2)

    two_over_x = 2.0 / ax
    bjp = np.zeros_like(ax)
    bj = np.ones_like(ax)
    ans = np.zeros_like(ax)
    total = np.zeros_like(ax)
    add_to_sum = False

    for j in range(start, 0, -1):
        bjm = j * two_over_x * bj - bjp
        bjp = bj
        bj = bjm
        overflow = np.abs(bj) > _BIGNO
        if overflow.any():
            bj[overflow] *= _BIGNI
            bjp[overflow] *= _BIGNI
            ans[overflow] *= _BIGNI
            total[overflow] *= _BIGNI
        if add_to_sum:
            total = total + bj
        add_to_sum = not add_to_sum
        if j == order:
            ans = bjp.copy()

    # J0 + 2(J2 + J4 + ...) = 1
    total = 2.0 * total - bj
    if order == 0:
        ans = bj
    return ans / total


def bessel_j_array(order: int, x) -> np.ndarray:
    """
    Vectorised J_order(x) for an integer order

    Args:
        order: 整数阶，|order| ≤ 64
        x: array-like of real arguments, |x| ≤ 1e4

    Returns:
        ndarray of J_order(x), same shape as x

    Raises:
        DomainError: order out of range, or non-finite / out-of-range x
    """
    order = _check_order(order)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(np.abs(x) > MAX_ARGUMENT):
        raise DomainError(f"Bessel argument must satisfy |x| ≤ {MAX_ARGUMENT:g}")

    # J_{-n} = (-1)^n J_n
    n = abs(order)
    sign = -1.0 if (order < 0 and n % 2 == 1) else 1.0

    flat = x.reshape(-1)
    ax = np.abs(flat)
    out = np.empty_like(ax)
    small = ax < SERIES_LIMIT
    if small.any():
        out[small] = _series(n, ax[small])
    if (~small).any():
        out[~small] = _miller(n, ax[~small])

    # J_n(-x) = (-1)^n J_n(x)
    if n % 2 == 1:
        out = np.where(flat < 0, -out, out)
    return (sign * out).reshape(x.shape)


def bessel_j(order: int, x: float) -> float:
    """
    J_order(x)，绝对误差 ≤ 1e-10（|x| ≤ 100）

    Args:
        order: 整数阶
        x: 实数自变量

    Returns:
        Bessel 函数值
    """
    return float(bessel_j_array(order, np.array([x], dtype=float))[0])


def solve_scalar(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """
    Bisection root finder on a sign-changing bracket

    Args:
        f: 连续实函数
        lo: 区间下界
        hi: 区间上界
        tol: 区间宽度容差

    Returns:
        区间中点，区间宽度 ≤ tol

    Raises:
        DomainError: lo ≥ hi or tol ≤ 0
        BracketError: f(lo)·f(hi) > 0
    """
    if not lo < hi:
        raise DomainError("solve_scalar requires lo < hi", {"lo": lo, "hi": hi})
    if tol <= 0:
        raise DomainError("solve_scalar requires tol > 0", {"tol": tol})

    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise BracketError("no sign change in bracket", {"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi})

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_maximize(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Argmax of a unimodal f on [lo, hi]"""
    if not lo < hi:
        raise DomainError("golden_section_maximize requires lo < hi", {"lo": lo, "hi": hi})
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Least squares
# ---------------------------------------------------------------------------

def _power_model(r: np.ndarray, params: np.ndarray) -> np.ndarray:
    return params[0] * np.power(r, params[1])


def _power_jacobian(r: np.ndarray, params: np.ndarray) -> np.ndarray:
    basis = np.power(r, params[1])
    return np.column_stack([basis, params[0] * basis * np.log(r)])


def _rational_model(r: np.ndarray, params: np.ndarray) -> np.ndarray:
    return params[0] / (r + params[1])


def _rational_jacobian(r: np.ndarray, params: np.ndarray) -> np.ndarray:
    shifted = r + params[1]
    return np.column_stack([1.0 / shifted, -params[0] / shifted ** 2])


def _prepare_samples(samples: Sequence[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    if len(samples) < 3:
        raise FitError("at least 3 samples are required", {"samples": len(samples)})
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise FitError("samples must be (R, theta) pairs")
    r, theta = data[:, 0], data[:, 1]
    if not (np.all(np.isfinite(r)) and np.all(np.isfinite(theta))):
        raise FitError("samples must be finite")
    if np.any(r <= 0) or np.any(theta <= 0):
        raise FitError("samples require R > 0 and theta > 0")
    if np.ptp(r) == 0:
        raise FitError("degenerate samples: all R equal", {"R": float(r[0])})
    return r, theta


def _grid_seed(
    r: np.ndarray,
    theta: np.ndarray,
    basis: Callable[[float], np.ndarray],
    grid: np.ndarray,
) -> np.ndarray:
    # The linear coefficient has a closed form for every grid value of the shape parameter.
    best_sse = math.inf
    best = None
    for shape in grid:
        g = basis(shape)
        scale = float(theta @ g) / float(g @ g)
        residual = theta - scale * g
        sse = float(residual @ residual)
        if sse < best_sse:
            best_sse = sse
            best = (scale, float(shape))
    return np.array(best, dtype=float)


def _levenberg_marquardt(
    model: Callable[[np.ndarray, np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray, np.ndarray], np.ndarray],
    admissible: Callable[[np.ndarray], bool],
    r: np.ndarray,
    theta: np.ndarray,
    seed: np.ndarray,
) -> Tuple[np.ndarray, int]:
    settings = get_settings()
    params = seed.copy()
    residual = theta - model(r, params)
    cost = float(residual @ residual)
    damping = 1e-3
    iterations = 0

    for iterations in range(1, settings.FIT_MAX_ITERATIONS + 1):
        jac = jacobian(r, params)
        normal = jac.T @ jac
        gradient = jac.T @ residual
        step = None

        while damping < 1e16:
            lhs = normal + damping * np.diag(np.diag(normal))
            try:
                candidate = np.linalg.solve(lhs, gradient)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            trial = params + candidate
            if admissible(trial):
                trial_residual = theta - model(r, trial)
                trial_cost = float(trial_residual @ trial_residual)
                if trial_cost <= cost:
                    step = candidate
                    params, residual, cost = trial, trial_residual, trial_cost
                    damping = max(damping / 10.0, 1e-15)
                    break
            damping *= 10.0

        if step is None:
            break
        if np.linalg.norm(step) <= settings.FIT_STEP_TOLERANCE * (np.linalg.norm(params) + settings.FIT_STEP_TOLERANCE):
            break

    return params, iterations


def _finish(params: np.ndarray, r: np.ndarray, theta: np.ndarray, model, iterations: int) -> FitResult:
    if not np.all(np.isfinite(params)):
        raise FitError("fit diverged", {"params": params.tolist()})
    residual = theta - model(r, params)
    rms = math.sqrt(float(residual @ residual) / len(r))
    return FitResult(params=(float(params[0]), float(params[1])), residual_rms=rms, iterations=iterations)


def fit_power_model(samples: Sequence[Tuple[float, float]]) -> FitResult:
    """
    拟合 θ = a·R^b

    Args:
        samples: (R, θ) 样本，R 单位 mm，θ 单位度

    Returns:
        FitResult，params = (a, b)

    Raises:
        FitError: 样本少于 3 个、R 全相同或存在非正值
    """
    r, theta = _prepare_samples(samples)
    seed = _grid_seed(r, theta, lambda b: np.power(r, b), np.linspace(-4.0, 1.0, 501))
    params, iterations = _levenberg_marquardt(
        _power_model, _power_jacobian, lambda p: bool(np.isfinite(p).all()), r, theta, seed
    )
    logger.debug(f"power fit: a={params[0]:.6g} b={params[1]:.6g} after {iterations} iterations")
    return _finish(params, r, theta, _power_model, iterations)


def fit_rational_model(samples: Sequence[Tuple[float, float]]) -> FitResult:
    """
    拟合 θ = p/(R+q)

    Args:
        samples: (R, θ) 样本，R 单位 mm，θ 单位度

    Returns:
        FitResult，params = (p, q)，且 R + q > 0 对所有样本成立

    Raises:
        FitError: 样本少于 3 个、R 全相同或存在非正值
    """
    r, theta = _prepare_samples(samples)
    r_min = float(np.min(r))
    q_grid = np.linspace(-0.999 * r_min, 4.0 * float(np.max(r)), 1001)
    seed = _grid_seed(r, theta, lambda q: 1.0 / (r + q), q_grid)
    params, iterations = _levenberg_marquardt(
        _rational_model,
        _rational_jacobian,
        lambda p: bool(np.isfinite(p).all()) and r_min + p[1] > 0,
        r,
        theta,
        seed,
    )
    logger.debug(f"rational fit: p={params[0]:.6g} q={params[1]:.6g} after {iterations} iterations")
    return _finish(params, r, theta, _rational_model, iterations)
