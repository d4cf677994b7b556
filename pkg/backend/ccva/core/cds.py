"""CDS 模块

由任意强度曲线计算 CDS 平价利差，由报价自举平坦强度，
以及可交易期限之后的外推：市场惯例 Ξ（平坦外推）与气候压力 P 段。

默认采用连续付费约定（无季度付息、无 IMM 滚动），此时平坦强度
与利差满足 λ = s / (1 - R)。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ..exceptions import ComputeError, ParameterError
from .sigmoid import SigmoidParams, build_curve, slowest_uniform_curve
from .termstructures import DiscountCurve, HazardCurve

logger = logging.getLogger(__name__)

# 年金低于该值视为退化（生存概率立即趋零）
_MIN_ANNUITY = 1e-14
_QUAD_OPTIONS = {"epsabs": 0.0, "epsrel": 1e-10, "limit": 200}


@dataclass(frozen=True)
class CdsQuote:
    """单一期限 CDS 报价

    Attributes:
        maturity: 期限（年）
        spread: 年化利差，例如 0.0100 表示 100bps
        recovery: 回收率，取值 [0, 1)
    """

    maturity: float = 10.0
    spread: float = 0.0100
    recovery: float = 0.40

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.maturity, self.spread, self.recovery)):
            raise ParameterError(f"CDS 报价必须为有限值: {self}")
        if self.maturity <= 0:
            raise ParameterError(f"CDS 期限必须为正: {self.maturity}")
        if self.spread < 0:
            raise ParameterError(f"CDS 利差不能为负: {self.spread}")
        if not 0 <= self.recovery < 1:
            raise ParameterError(f"回收率必须在 [0, 1) 内: {self.recovery}")

    @property
    def lgd(self) -> float:
        return 1.0 - self.recovery

    @property
    def flat_hazard(self) -> float:
        """连续约定下的平坦强度 s / (1 - R)"""
        return self.spread / self.lgd


class ExtrapolationPolicy(str, Enum):
    """可交易期限之后的外推方式

    目前只提供平坦外推（市场惯例 Ξ 测度）。新增策略时在
    ``extend_curve`` 中加入对应分支即可。
    """

    FLAT = "flat"


def _segments(curve: HazardCurve, maturity: float) -> List[float]:
    return [0.0, *curve.breakpoints(0.0, maturity).tolist(), maturity]


def _integrate(func, edges: List[float]) -> float:
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            value, _ = quad(func, a, b, **_QUAD_OPTIONS)
            total += value
    return total


def protection_leg(curve: HazardCurve, discount: DiscountCurve, maturity: float,
                   recovery: float) -> float:
    """保护腿现值 (1-R)·∫₀ᵀ D(t)λ(t)S(t) dt"""
    lgd = 1.0 - recovery
    integrand = lambda t: discount.discount(t) * curve.default_density(t)
    return lgd * _integrate(integrand, _segments(curve, maturity))


def risky_annuity(curve: HazardCurve, discount: DiscountCurve, maturity: float,
                  premium_frequency: Optional[int] = None) -> float:
    """费用腿单位利差现值（风险年金）

    Args:
        curve: 强度曲线
        discount: 贴现曲线
        maturity: 期限（年）
        premium_frequency: None 表示连续付费；整数表示每年付费次数，
            此时包含违约时应计费用

    Returns:
        float: 风险年金
    """
    edges = _segments(curve, maturity)
    if premium_frequency is None:
        return _integrate(lambda t: discount.discount(t) * curve.survival(t), edges)

    if premium_frequency <= 0:
        raise ParameterError(f"付费频率必须为正整数: {premium_frequency}")
    n_periods = max(1, int(round(maturity * premium_frequency)))
    pay_times = np.linspace(maturity / n_periods, maturity, n_periods)
    starts = np.concatenate([[0.0], pay_times[:-1]])
    accrual = pay_times - starts

    scheduled = float(np.sum(accrual * discount.discount(pay_times) * curve.survival(pay_times)))

    accrued_on_default = 0.0
    for start, end in zip(starts, pay_times):
        period_edges = [start, *curve.breakpoints(start, end).tolist(), end]
        accrued_on_default += _integrate(
            lambda t, s=start: (t - s) * discount.discount(t) * curve.default_density(t),
            period_edges,
        )
    return scheduled + accrued_on_default


def par_spread(curve: HazardCurve, discount: DiscountCurve, maturity: float,
               recovery: float, premium_frequency: Optional[int] = None) -> float:
    """CDS 平价利差

    s = (1-R)·∫₀ᵀ D λ S dt / ∫₀ᵀ D S dt （连续约定）

    Args:
        curve: 强度曲线
        discount: 贴现曲线
        maturity: 期限（年），必须为正
        recovery: 回收率
        premium_frequency: 费用腿付费频率，None 为连续付费

    Returns:
        float: 年化平价利差

    Raises:
        ComputeError: 风险年金为零
    """
    if maturity <= 0:
        raise ParameterError(f"CDS 期限必须为正: {maturity}")
    if not 0 <= recovery < 1:
        raise ParameterError(f"回收率必须在 [0, 1) 内: {recovery}")

    annuity = risky_annuity(curve, discount, maturity, premium_frequency)
    if annuity <= _MIN_ANNUITY:
        raise ComputeError(f"风险年金为零，无法计算 {maturity} 年平价利差")
    return protection_leg(curve, discount, maturity, recovery) / annuity


def bootstrap_flat_hazard(quote: CdsQuote, discount: Optional[DiscountCurve] = None,
                          premium_frequency: Optional[int] = None) -> HazardCurve:
    """由单一报价自举平坦强度（Q 测度段）

    连续约定下为闭式解 λ = s/(1-R)，与贴现无关；离散付费约定下
    用 brentq 求根使平价利差等于报价。

    Args:
        quote: CDS 报价
        discount: 贴现曲线，仅离散约定时需要，默认零利率
        premium_frequency: 付费频率，None 为连续

    Returns:
        HazardCurve: 平坦强度曲线，[0, quote.maturity] 上有效
    """
    if premium_frequency is None or quote.spread == 0:
        return HazardCurve.flat(quote.flat_hazard)

    discount = discount or DiscountCurve(flat_rate=0.0)

    def mismatch(rate: float) -> float:
        curve = HazardCurve.flat(rate)
        return par_spread(curve, discount, quote.maturity, quote.recovery, premium_frequency) - quote.spread

    upper = max(1.0, 10 * quote.flat_hazard)
    rate = brentq(mismatch, 0.0, upper, xtol=1e-14, rtol=1e-12)
    logger.debug(f"离散付费自举强度: {rate:.10f} (连续约定 {quote.flat_hazard:.10f})")
    return HazardCurve.flat(rate)


def extend_curve(quote: CdsQuote, policy: ExtrapolationPolicy = ExtrapolationPolicy.FLAT) -> HazardCurve:
    """按外推策略把报价延伸到全部期限"""
    policy = ExtrapolationPolicy(policy)
    if policy is ExtrapolationPolicy.FLAT:
        return bootstrap_flat_hazard(quote)
    raise ParameterError(f"不支持的外推策略: {policy}")


def extend_curve_Xi(quote: CdsQuote) -> HazardCurve:
    """市场惯例曲线：CDS 平坦外推，对所有 t 取 λ = s/(1-R)"""
    return extend_curve(quote, ExtrapolationPolicy.FLAT)


def _check_switch(quote: CdsQuote, t_start: float):
    if abs(t_start - quote.maturity) > 1e-9:
        raise ParameterError(
            f"P 段起点 t_start={t_start} 必须等于最后可交易 CDS 期限 {quote.maturity}"
        )


def extend_curve_P(quote: CdsQuote, params: SigmoidParams) -> HazardCurve:
    """气候压力曲线：[0, t_start] 为自举的平坦 Q 段，之后为 Sigmoid P 段

    Args:
        quote: 最长可交易 CDS 报价
        params: Sigmoid 参数，t_start 必须等于报价期限；h_start 为 None 时取
            自举强度，给定时原样保留（与报价水平不同则切换处跳跃）

    Returns:
        HazardCurve: 拼接后的曲线
    """
    _check_switch(quote, params.t_start)
    q_curve = bootstrap_flat_hazard(quote)
    if not params.resolved:
        params = params.with_h_start(q_curve.hazard_left(params.t_start))
    p_segment = build_curve(params).curve
    return HazardCurve.concatenate(q_curve, p_segment, params.t_start)


def extend_curve_slowest_uniform(quote: CdsQuote, t_end: float, h_max: float,
                                 h_start: Optional[float] = None) -> HazardCurve:
    """Q 段之后以直线匀速升至 (t_end, h_max)，之后保持 h_max

    h_start 为 None 时直线从报价水平出发，给定时切换处跳跃到 h_start。
    """
    q_curve = bootstrap_flat_hazard(quote)
    start_level = q_curve.hazard_left(quote.maturity) if h_start is None else h_start
    p_segment = slowest_uniform_curve(quote.maturity, start_level, t_end, h_max)
    return HazardCurve.concatenate(q_curve, p_segment, quote.maturity)
