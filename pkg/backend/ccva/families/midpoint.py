"""中点冲击情景族

终点型 Sigmoid，冲击中点位于 [t_start, t_end] 的中点（或 [0, t_end] 的中点），
行为中间段宽度（年），列为利率互换期限（年）。
"""

from typing import Dict, List, Optional, Tuple

from ..core.cds import CdsQuote
from ..core.exposure import SwapSpec
from ..core.sigmoid import SigmoidParams, build_curve
from ..core.xva import MarketEnvironment, XvaReport, ccva_report
from ..exceptions import ParameterError
from .base_family import BaseScenarioFamily

ANCHORS = ("p_segment", "origin")


class MidpointFamily(BaseScenarioFamily):
    """中点冲击情景族"""

    row_label = "width"
    col_label = "irs"
    diagnostic_columns = ("m", "point3_removed")

    def __init__(self, quote: CdsQuote, market: MarketEnvironment, widths: List[float],
                 irs_maturities: List[float], u: float = 0.05, t_end: float = 80.0,
                 h_max: float = 0.25, midpoint_anchor: str = "p_segment",
                 pay_frequency: int = 1, notional: float = 1.0):
        self.u = u
        self.t_end = t_end
        self.h_max = h_max
        self.midpoint_anchor = midpoint_anchor
        self.pay_frequency = pay_frequency
        self.notional = notional
        super().__init__(quote, market, widths, irs_maturities)

    @classmethod
    def from_config(cls, cfg) -> "MidpointFamily":
        family = cfg.family.midpoint
        return cls(
            quote=cfg.quote(),
            market=cfg.market_environment(),
            widths=family.widths,
            irs_maturities=family.irs_maturities,
            u=family.u,
            t_end=family.t_end,
            h_max=family.h_max,
            midpoint_anchor=family.midpoint_anchor,
            pay_frequency=cfg.swap.pay_frequency,
            notional=cfg.swap.notional,
        )

    def get_family_name(self) -> str:
        return "midpoint"

    def validate_config(self):
        super().validate_config()
        if self.midpoint_anchor not in ANCHORS:
            raise ParameterError(f"不支持的中点基准: {self.midpoint_anchor}")
        if not self.t_end > self.quote.maturity:
            raise ParameterError(f"t_end 必须晚于 CDS 期限 {self.quote.maturity}: {self.t_end}")

    @property
    def midpoint(self) -> float:
        start = self.quote.maturity if self.midpoint_anchor == "p_segment" else 0.0
        return 0.5 * (start + self.t_end)

    def params(self, width: float) -> SigmoidParams:
        return SigmoidParams(
            transient=False,
            t_start=self.quote.maturity,
            h_start=self.quote.flat_hazard,
            m=self.midpoint,
            w=width,
            u=self.u,
            t_end=self.t_end,
            h_max=self.h_max,
        )

    def evaluate_cell(self, row: float, col: float) -> Tuple[XvaReport, Dict[str, Optional[float]]]:
        params = self.params(row)
        spec = SwapSpec(maturity=col, pay_frequency=self.pay_frequency, notional=self.notional)
        report = ccva_report(self.quote, params, spec, self.market)
        diagnostics = {
            "m": params.m,
            "point3_removed": float(build_curve(params).removed_point_3),
        }
        return report, diagnostics
