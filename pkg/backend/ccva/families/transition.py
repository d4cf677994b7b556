"""转型冲击情景族

瞬态 Sigmoid：强度在 m 处达到峰值后回落到报价水平。固定一笔互换，
行为转型持续时间 w（年），列为转型中点 m（年）。
"""

from typing import Dict, List, Optional, Tuple

from ..core.cds import CdsQuote, extend_curve_P, extend_curve_Xi
from ..core.exposure import SwapSpec
from ..core.sigmoid import SigmoidParams
from ..core.termstructures import HazardCurve
from ..core.xva import MarketEnvironment, XvaReport, ccva_report
from ..exceptions import ParameterError
from .base_family import PCT_FIELDS, BaseScenarioFamily


def _window_survival(h: HazardCurve, t1: float, t2: float) -> Tuple[float, float]:
    if not t1 < t2:
        raise ParameterError(f"需满足 t1 < t2: {t1}, {t2}")
    return h.survival(t1), h.survival(t2)


def survival_change_over_window(h: HazardCurve, t1: float, t2: float) -> Optional[float]:
    """窗口内生存概率的相对变化 100·(S(t2)/S(t1) - 1)

    Args:
        h: 强度曲线
        t1: 窗口起点（年）
        t2: 窗口终点（年）

    Returns:
        Optional[float]: 百分比；S(t1) 为零时为 None
    """
    s1, s2 = _window_survival(h, t1, t2)
    if s1 == 0:
        return None
    return 100.0 * (s2 / s1 - 1.0)


def survival_drop_over_window(h: HazardCurve, t1: float, t2: float) -> float:
    """窗口内生存概率的绝对变化 100·(S(t2) - S(t1))，单位为百分点"""
    s1, s2 = _window_survival(h, t1, t2)
    return 100.0 * (s2 - s1)



def survival_drop_vs_flat_over_window(h: HazardCurve, xi: HazardCurve, t1: float, t2: float) -> float:
    """窗口内相对平坦外推多出的生存概率下降（百分点）

    100·[(S_h(t2) - S_h(t1)) - (S_xi(t2) - S_xi(t1))]，即转型窗口内
    因压力额外增加的违约概率，取负号。

    Args:
        h: 压力强度曲线
        xi: 平坦外推曲线
        t1: 窗口起点（年）
        t2: 窗口终点（年）

    Returns:
        float: 百分点，压力曲线处处不低于 xi 时为非正值
    """
    return survival_drop_over_window(h, t1, t2) - survival_drop_over_window(xi, t1, t2)


class TransitionFamily(BaseScenarioFamily):
    """转型冲击情景族"""

    row_label = "width"
    col_label = "midpoint"
    diagnostic_columns = ("survival_change_pct", "survival_drop_pp", "survival_drop_vs_flat_pp")
    pivot_metrics = PCT_FIELDS + diagnostic_columns

    def __init__(self, quote: CdsQuote, market: MarketEnvironment, midpoints: List[float],
                 widths: List[float], irs_maturity: float = 30.0, u: float = 0.05,
                 t_end: float = 80.0, h_max: float = 0.25, pay_frequency: int = 1,
                 notional: float = 1.0):
        self.u = u
        self.t_end = t_end
        self.h_max = h_max
        self.spec = SwapSpec(maturity=irs_maturity, pay_frequency=pay_frequency, notional=notional)
        super().__init__(quote, market, widths, midpoints)

    @classmethod
    def from_config(cls, cfg) -> "TransitionFamily":
        family = cfg.family.transition
        return cls(
            quote=cfg.quote(),
            market=cfg.market_environment(),
            midpoints=family.midpoints,
            widths=family.widths,
            irs_maturity=family.irs_maturity,
            u=family.u,
            t_end=family.t_end,
            h_max=family.h_max,
            pay_frequency=cfg.swap.pay_frequency,
            notional=cfg.swap.notional,
        )

    def get_family_name(self) -> str:
        return "transition"

    def validate_config(self):
        super().validate_config()
        # 可交易期限内的转型可以完全对冲，不在考虑范围内
        early = [m for m in self.columns if m <= self.quote.maturity]
        if early:
            raise ParameterError(f"转型中点必须晚于最后可交易 CDS 期限 {self.quote.maturity}: {early}")

    def params(self, width: float, midpoint: float) -> SigmoidParams:
        return SigmoidParams(
            transient=True,
            t_start=self.quote.maturity,
            h_start=self.quote.flat_hazard,
            m=midpoint,
            w=width,
            u=self.u,
            t_end=self.t_end,
            h_max=self.h_max,
        )

    def evaluate_cell(self, row: float, col: float) -> Tuple[XvaReport, Dict[str, Optional[float]]]:
        params = self.params(width=row, midpoint=col)
        p_curve = extend_curve_P(self.quote, params)
        report = ccva_report(self.quote, p_curve, self.spec, self.market)

        t1, t2 = col - row / 2, col + row / 2
        diagnostics = {
            "survival_change_pct": survival_change_over_window(p_curve, t1, t2),
            "survival_drop_pp": survival_drop_over_window(p_curve, t1, t2),
            "survival_drop_vs_flat_pp": survival_drop_vs_flat_over_window(
                p_curve, extend_curve_Xi(self.quote), t1, t2
            ),
        }
        return report, diagnostics
