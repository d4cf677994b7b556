"""XVA 模块

在给定强度曲线下计算 CVA 与 FVA，并以 P 段外推曲线与 Ξ 平坦外推曲线
之差给出气候变化估值调整（CCVA）分解：

    CD.CVA = CVA_CC - CVA_MP
    CD.FVA = FVA_CC - FVA_MP
    CCVA   = CD.CVA + CD.FVA

积分采用复合梯形公式：敞口网格与强度曲线节点的并集把 [0, T] 切成单元，
每个单元再均分为 quadrature_substeps 份。单元内 EPE 线性插值，
λ、S、D 精确求值；单元右端点取 λ 的左极限，因此强度跳跃只落在单元边界上。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..exceptions import ComputeError, ParameterError
from .cds import CdsQuote, extend_curve_P, extend_curve_Xi
from .exposure import ExposureProfile, FvaMode, SwapSpec, exposure_profile
from .sigmoid import SigmoidParams
from .termstructures import DiscountCurve, HazardCurve

logger = logging.getLogger(__name__)

DEFAULT_SUBSTEPS = 8


@dataclass(frozen=True)
class XvaInputs:
    """CVA/FVA 积分输入

    Attributes:
        exposure: 敞口曲线，网格覆盖 [0, maturity]
        hazard: 违约强度曲线
        discount: 贴现曲线
        lgd: 违约损失率 1 - R，取值 (0, 1]
        funding_spread: 融资利差（每年）
        fva_mode: FVA 使用 EPE（fca）还是 EE（signed）
        quadrature_substeps: 每个积分单元的细分数
        extra_breakpoints: 额外插入的积分断点，用于让两条曲线共用同一套节点
    """

    exposure: ExposureProfile
    hazard: HazardCurve
    discount: DiscountCurve
    lgd: float
    funding_spread: float
    fva_mode: FvaMode = FvaMode.FCA
    quadrature_substeps: int = DEFAULT_SUBSTEPS
    extra_breakpoints: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not math.isfinite(self.lgd) or not 0 < self.lgd <= 1:
            raise ParameterError(f"LGD 必须在 (0, 1] 内: {self.lgd}")
        if not math.isfinite(self.funding_spread) or self.funding_spread < 0:
            raise ParameterError(f"融资利差必须为非负有限值: {self.funding_spread}")
        if int(self.quadrature_substeps) != self.quadrature_substeps or self.quadrature_substeps < 1:
            raise ParameterError(f"积分细分数必须为正整数: {self.quadrature_substeps}")
        object.__setattr__(self, "fva_mode", FvaMode(self.fva_mode))
        object.__setattr__(self, "extra_breakpoints", tuple(float(t) for t in self.extra_breakpoints))


def _quadrature_points(inputs: XvaInputs) -> np.ndarray:
    """返回形状为 (单元数, substeps+1) 的积分点矩阵"""
    grid = inputs.exposure.grid
    maturity = inputs.exposure.maturity
    extra = np.asarray(inputs.extra_breakpoints, dtype=float)
    extra = extra[(extra > 0) & (extra < maturity)]
    edges = np.unique(np.concatenate([grid, inputs.hazard.breakpoints(0.0, maturity), extra]))

    fractions = np.linspace(0.0, 1.0, inputs.quadrature_substeps + 1)
    starts, ends = edges[:-1], edges[1:]
    return starts[:, None] + (ends - starts)[:, None] * fractions[None, :]


def _integrate(inputs: XvaInputs, exposure_kind: str, with_hazard: bool) -> float:
    points = _quadrature_points(inputs)
    flat = points.ravel()

    weight = inputs.hazard.survival(flat) * inputs.discount.discount(flat)
    exposure = np.interp(flat, inputs.exposure.grid, getattr(inputs.exposure, exposure_kind))
    integrand = (weight * exposure).reshape(points.shape)

    if with_hazard:
        hazard = inputs.hazard.hazard_at(flat).reshape(points.shape)
        hazard[:, -1] = inputs.hazard.hazard_left(points[:, -1])
        integrand = integrand * hazard

    value = float(np.sum(trapezoid(integrand, x=points, axis=1)))
    if not math.isfinite(value):
        raise ComputeError(f"积分结果非有限值: {value}")
    return value


def cva(inputs: XvaInputs) -> float:
    """CVA = LGD · ∫₀ᵀ λ(u)·S(u)·D(u)·EPE(u) du

    Args:
        inputs: 积分输入

    Returns:
        float: CVA（与名义本金同单位）
    """
    return inputs.lgd * _integrate(inputs, "epe", with_hazard=True)


def fva(inputs: XvaInputs) -> float:
    """FVA = s_F · ∫₀ᵀ S(u)·D(u)·Exposure(u) du

    fca 模式下 Exposure 为 EPE，signed 模式下为 EE。
    """
    kind = "epe" if inputs.fva_mode is FvaMode.FCA else "ee"
    return inputs.funding_spread * _integrate(inputs, kind, with_hazard=False)


@dataclass(frozen=True)
class MarketEnvironment:
    """除信用之外的市场与数值设置

    Attributes:
        discount: 贴现曲线
        normal_vol: 正态利率波动率
        funding_spread: 融资利差
        fva_mode: FVA 敞口口径
        grid_step: 敞口网格步长（年）
        quadrature_substeps: 积分单元细分数
    """

    discount: DiscountCurve = field(default_factory=DiscountCurve)
    normal_vol: float = 0.0020
    funding_spread: float = 0.0100
    fva_mode: FvaMode = FvaMode.FCA
    grid_step: float = 0.25
    quadrature_substeps: int = DEFAULT_SUBSTEPS

    def __post_init__(self):
        if not math.isfinite(self.normal_vol) or self.normal_vol < 0:
            raise ParameterError(f"波动率必须为非负有限值: {self.normal_vol}")
        if not math.isfinite(self.grid_step) or self.grid_step <= 0:
            raise ParameterError(f"网格步长必须为正: {self.grid_step}")
        object.__setattr__(self, "fva_mode", FvaMode(self.fva_mode))

    def exposure(self, spec: SwapSpec) -> ExposureProfile:
        return exposure_profile(spec, self.discount, self.normal_vol, self.grid_step)


def _percentage(numerator: float, denominator: float) -> Optional[float]:
    if denominator == 0:
        return None
    return 100.0 * numerator / denominator


@dataclass(frozen=True)
class XvaReport:
    """CCVA 分解结果

    mp 为市场惯例（Ξ 平坦外推），cc 为气候压力（P 段外推）。
    百分比字段以 mp 值为分母，分母为零时为 None。
    """

    cva_mp: float
    fva_mp: float
    cva_cc: float
    fva_cc: float
    cd_cva: float
    cd_fva: float
    ccva: float
    cd_cva_pct: Optional[float]
    cd_fva_pct: Optional[float]
    ccva_pct: Optional[float]

    @classmethod
    def from_values(cls, cva_mp: float, fva_mp: float, cva_cc: float, fva_cc: float) -> "XvaReport":
        cd_cva = cva_cc - cva_mp
        cd_fva = fva_cc - fva_mp
        ccva = cd_cva + cd_fva
        return cls(
            cva_mp=cva_mp,
            fva_mp=fva_mp,
            cva_cc=cva_cc,
            fva_cc=fva_cc,
            cd_cva=cd_cva,
            cd_fva=cd_fva,
            ccva=ccva,
            cd_cva_pct=_percentage(cd_cva, cva_mp),
            cd_fva_pct=_percentage(cd_fva, fva_mp),
            ccva_pct=_percentage(ccva, cva_mp + fva_mp),
        )


REPORT_FIELDS = (
    "cva_mp", "fva_mp", "cva_cc", "fva_cc",
    "cd_cva", "cd_fva", "ccva",
    "cd_cva_pct", "cd_fva_pct", "ccva_pct",
)


def report_percentage_changes(report: XvaReport) -> Dict[str, Optional[float]]:
    """把报告展开成一行表格数据

    百分比按 mp 值重新计算：cd_cva/cva_mp、cd_fva/fva_mp、
    ccva/(cva_mp + fva_mp)，分母为零的字段为 None。

    Args:
        report: CCVA 报告

    Returns:
        Dict[str, Optional[float]]: 按 REPORT_FIELDS 顺序排列的字段
    """
    row = {name: getattr(report, name) for name in REPORT_FIELDS}
    row["cd_cva_pct"] = _percentage(report.cd_cva, report.cva_mp)
    row["cd_fva_pct"] = _percentage(report.cd_fva, report.fva_mp)
    row["ccva_pct"] = _percentage(report.ccva, report.cva_mp + report.fva_mp)
    return row


def _check_fva_sign(xi_curve: HazardCurve, p_curve: HazardCurve, horizon: float,
                    fva_mode: FvaMode, report: XvaReport):
    """FCA 口径下 CD.FVA 的符号由两条曲线的高低决定

    P 曲线在 [0, T] 上处处不低于 Ξ 曲线时生存概率逐点不高，CD.FVA ≤ 0；反之 CD.FVA ≥ 0。

    Raises:
        ComputeError: 积分结果与曲线高低关系矛盾
    """
    if fva_mode is not FvaMode.FCA:
        return
    tolerance = 1e-12 * abs(report.fva_mp) + 1e-15
    if p_curve.dominates(xi_curve, horizon) and report.cd_fva > tolerance:
        raise ComputeError(f"P 曲线处处不低于 Ξ 曲线，CD.FVA 却为正: {report.cd_fva:.6g}")
    if xi_curve.dominates(p_curve, horizon) and report.cd_fva < -tolerance:
        raise ComputeError(f"P 曲线处处不高于 Ξ 曲线，CD.FVA 却为负: {report.cd_fva:.6g}")


def xva_report(xi_curve: HazardCurve, p_curve: HazardCurve, exposure: ExposureProfile,
               market: MarketEnvironment, lgd: float) -> XvaReport:
    """在同一敞口与同一套积分节点上比较两条曲线下的 CVA/FVA

    Args:
        xi_curve: 市场惯例曲线
        p_curve: 气候压力曲线
        exposure: 共用的敞口曲线
        market: 市场设置
        lgd: 违约损失率

    Returns:
        XvaReport: 差值与百分比
    """
    shared = tuple(np.unique(np.concatenate([
        xi_curve.breakpoints(0.0, exposure.maturity),
        p_curve.breakpoints(0.0, exposure.maturity),
    ])).tolist())

    def inputs_for(curve: HazardCurve) -> XvaInputs:
        return XvaInputs(
            exposure=exposure,
            hazard=curve,
            discount=market.discount,
            lgd=lgd,
            funding_spread=market.funding_spread,
            fva_mode=market.fva_mode,
            quadrature_substeps=market.quadrature_substeps,
            extra_breakpoints=shared,
        )

    mp_inputs, cc_inputs = inputs_for(xi_curve), inputs_for(p_curve)
    report = XvaReport.from_values(
        cva_mp=cva(mp_inputs),
        fva_mp=fva(mp_inputs),
        cva_cc=cva(cc_inputs),
        fva_cc=fva(cc_inputs),
    )
    _check_fva_sign(xi_curve, p_curve, exposure.maturity, market.fva_mode, report)
    logger.debug(
        f"CCVA 分解: CD.CVA={report.cd_cva:.6g}, CD.FVA={report.cd_fva:.6g}, CCVA={report.ccva:.6g}"
    )
    return report


def ccva_report(quote: CdsQuote, p_segment: Union[SigmoidParams, HazardCurve], spec: SwapSpec,
                market: Optional[MarketEnvironment] = None) -> XvaReport:
    """由 CDS 报价与气候情景计算完整的 CCVA 报告

    敞口与信用独立，两条曲线共用同一条敞口曲线。

    Args:
        quote: 最长可交易 CDS 报价
        p_segment: Sigmoid 参数（与报价拼接成 P 曲线），或已拼接好的完整 P 曲线
        spec: 互换规格
        market: 市场设置，默认基准设置

    Returns:
        XvaReport: CCVA 报告
    """
    market = market or MarketEnvironment()
    xi_curve = extend_curve_Xi(quote)
    if isinstance(p_segment, SigmoidParams):
        p_curve = extend_curve_P(quote, p_segment)
    elif isinstance(p_segment, HazardCurve):
        p_curve = p_segment
    else:
        raise ParameterError(f"不支持的 P 段类型: {type(p_segment).__name__}")
    return xva_report(xi_curve, p_curve, market.exposure(spec), market, quote.lgd)
