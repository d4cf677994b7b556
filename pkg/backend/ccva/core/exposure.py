"""敞口模块

平值利率互换在平坦正态（Bachelier）波动率下的解析预期敞口。
单曲线、无抵押（X(u) ≡ 0）。

时刻 t 的剩余互换价值近似为 annuity(t) × 平价利率位移，
位移 ~ Normal(0, vol²·t)，因此

    EPE(t) = notional · annuity(t) · vol · √t · φ(0),  φ(0) = 1/√(2π)
    EE(t)  = 0     （平值、无漂移）
    ENE(t) = -EPE(t)

annuity(t) 为时刻 t 的价值：Σ_{t_i ∈ (t, T]} δ·D(t_i)/D(t)。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import norm

from ..exceptions import ParameterError
from .termstructures import DiscountCurve, TimeLike, _as_times, _unwrap

logger = logging.getLogger(__name__)

# 付息日比较容差（年）
_PAY_EPS = 1e-9


class FvaMode(str, Enum):
    """FVA 所用敞口

    fca: 只为正敞口融资（EPE），默认
    signed: 按有符号敞口 EE 计算，平值互换下为零，用于敏感性分析
    """

    FCA = "fca"
    SIGNED = "signed"


@dataclass(frozen=True)
class SwapSpec:
    """互换规格

    Attributes:
        maturity: 期限（年）
        pay_frequency: 每年付息次数
        notional: 名义本金
        atm: 是否平值（固定利率等于起始平价利率），目前只支持平值
    """

    maturity: float
    pay_frequency: int = 1
    notional: float = 1.0
    atm: bool = True

    def __post_init__(self):
        if not math.isfinite(self.maturity) or self.maturity <= 0:
            raise ParameterError(f"互换期限必须为正: {self.maturity}")
        if not math.isfinite(self.notional) or self.notional <= 0:
            raise ParameterError(f"名义本金必须为正: {self.notional}")
        if int(self.pay_frequency) != self.pay_frequency or self.pay_frequency <= 0:
            raise ParameterError(f"付息频率必须为正整数: {self.pay_frequency}")
        if not self.atm:
            raise ParameterError("目前只支持平值互换")

    def payment_times(self) -> np.ndarray:
        n_periods = max(1, int(round(self.maturity * self.pay_frequency)))
        return np.linspace(self.maturity / n_periods, self.maturity, n_periods)


@dataclass(frozen=True, eq=False)
class ExposureProfile:
    """单笔交易的敞口曲线

    Attributes:
        grid: 时间网格（年），从 0 开始严格递增
        epe: 预期正敞口 E[(Π(u)-X(u))⁺]
        ene: 预期负敞口
        ee: 预期敞口 E[Π(u)-X(u)]
    """

    grid: np.ndarray
    epe: np.ndarray
    ene: np.ndarray
    ee: np.ndarray

    def __post_init__(self):
        arrays = {}
        for name in ("grid", "epe", "ene", "ee"):
            arr = np.array(getattr(self, name), dtype=float, ndmin=1)
            arr.setflags(write=False)
            arrays[name] = arr
        grid = arrays["grid"]
        if any(arr.shape != grid.shape for arr in arrays.values()):
            raise ParameterError("敞口网格与各敞口序列长度必须一致")
        if grid.size < 2 or grid[0] != 0 or np.any(np.diff(grid) <= 0):
            raise ParameterError("敞口网格必须从 0 开始且严格递增")
        if not all(np.all(np.isfinite(arr)) for arr in arrays.values()):
            raise ParameterError("敞口必须为有限值")
        if np.any(arrays["epe"] < 0):
            raise ParameterError("EPE 不能为负")
        if np.any(arrays["epe"] < arrays["ee"] - 1e-12 * (1 + np.abs(arrays["ee"]))):
            raise ParameterError("EPE 必须不小于 EE")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    @property
    def maturity(self) -> float:
        return float(self.grid[-1])

    def interpolate(self, t: TimeLike, kind: str = "epe"):
        """在网格之间线性插值指定敞口序列"""
        arr, scalar = _as_times(t)
        return _unwrap(np.interp(arr, self.grid, getattr(self, kind)), scalar)


def annuity(discount: DiscountCurve, t: TimeLike, maturity: float, frequency: int = 1):
    """剩余年金（时刻 t 的价值）

    对付息日 t_i ∈ (t, maturity] 求和 δ·D(t_i)/D(t)，t = maturity 时为 0。

    Args:
        discount: 贴现曲线
        t: 估值时刻（年），0 ≤ t ≤ maturity
        maturity: 互换期限（年）
        frequency: 每年付息次数

    Returns:
        float | np.ndarray: 年金
    """
    arr, scalar = _as_times(t)
    if np.any(arr > maturity + _PAY_EPS):
        raise ParameterError(f"估值时刻不能超过期限 {maturity}: {t}")

    pay_times = SwapSpec(maturity=maturity, pay_frequency=frequency).payment_times()
    accrual = maturity / pay_times.size
    remaining = pay_times[None, :] > arr[:, None] + _PAY_EPS
    # D(t_i)/D(t)，平坦曲线下只依赖时间差
    forward_df = np.exp(-discount.flat_rate * (pay_times[None, :] - arr[:, None]))
    values = accrual * np.sum(np.where(remaining, forward_df, 0.0), axis=1)
    return _unwrap(values, scalar)


def atm_epe(spec: SwapSpec, discount: DiscountCurve, vol: float, t: TimeLike):
    """平值互换的 Bachelier 预期正敞口

    Args:
        spec: 互换规格
        discount: 贴现曲线
        vol: 正态利率波动率（每 √年）
        t: 时间（年），0 ≤ t ≤ maturity

    Returns:
        float | np.ndarray: EPE(t)
    """
    if not math.isfinite(vol) or vol < 0:
        raise ParameterError(f"波动率必须为非负有限值: {vol}")
    arr, scalar = _as_times(t)
    level = annuity(discount, arr, spec.maturity, spec.pay_frequency)
    values = spec.notional * level * vol * np.sqrt(arr) * norm.pdf(0.0)
    return _unwrap(values, scalar)


def exposure_grid(maturity: float, grid_step: float = 0.25) -> np.ndarray:
    """0 到 maturity 的均匀网格，末点恰为 maturity"""
    if not math.isfinite(grid_step) or grid_step <= 0:
        raise ParameterError(f"网格步长必须为正: {grid_step}")
    n_steps = int(math.floor(maturity / grid_step + 1e-9))
    grid = np.arange(n_steps + 1, dtype=float) * grid_step
    if maturity - grid[-1] > 1e-9:
        grid = np.append(grid, maturity)
    else:
        grid[-1] = maturity
    return grid


def exposure_profile(spec: SwapSpec, discount: DiscountCurve, vol: float,
                     grid_step: float = 0.25) -> ExposureProfile:
    """在均匀网格上生成敞口曲线，末点 EPE 恰为零"""
    grid = exposure_grid(spec.maturity, grid_step)
    epe = np.asarray(atm_epe(spec, discount, vol, grid), dtype=float)
    epe[-1] = 0.0
    logger.debug(f"生成敞口曲线: 期限 {spec.maturity} 年, {grid.size} 个网格点, 峰值 EPE {epe.max():.6g}")
    return ExposureProfile(grid=grid, epe=epe, ene=-epe, ee=np.zeros_like(epe))
