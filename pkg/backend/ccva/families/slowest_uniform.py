"""最慢匀速逼近情景族

强度从最后可交易 CDS 期限处的报价水平沿直线升至气候终点 (t_start + width, h_max)，
之后保持 h_max。行为宽度（年），列为利率互换期限（年）。
"""

from typing import Dict, List, Optional, Tuple

from ..core.cds import CdsQuote, extend_curve_slowest_uniform
from ..core.exposure import SwapSpec
from ..core.xva import MarketEnvironment, XvaReport, ccva_report
from ..exceptions import ParameterError
from .base_family import BaseScenarioFamily

# 诊断列外推到的时间点（年）
LEVEL_HORIZON = 80.0


class SlowestUniformFamily(BaseScenarioFamily):
    """最慢匀速逼近情景族"""

    row_label = "width"
    col_label = "irs"
    diagnostic_columns = ("t_end", "cds_slope_bps", "level_after_80y_bps")

    def __init__(self, quote: CdsQuote, market: MarketEnvironment, widths: List[float],
                 irs_maturities: List[float], h_max: float = 0.25, pay_frequency: int = 1,
                 notional: float = 1.0):
        self.h_max = h_max
        self.pay_frequency = pay_frequency
        self.notional = notional
        super().__init__(quote, market, widths, irs_maturities)

    @classmethod
    def from_config(cls, cfg) -> "SlowestUniformFamily":
        family = cfg.family.slowest_uniform
        return cls(
            quote=cfg.quote(),
            market=cfg.market_environment(),
            widths=family.widths,
            irs_maturities=family.irs_maturities,
            h_max=family.h_max,
            pay_frequency=cfg.swap.pay_frequency,
            notional=cfg.swap.notional,
        )

    def get_family_name(self) -> str:
        return "slowest-uniform"

    def validate_config(self):
        super().validate_config()
        if self.h_max < self.quote.flat_hazard:
            raise ParameterError(f"h_max 不能低于报价强度 {self.quote.flat_hazard:.6f}: {self.h_max}")

    def diagnostics(self, width: float) -> Dict[str, Optional[float]]:
        """隐含 CDS 斜率与 80 年处的直线外推水平（bps）

        斜率为 h_max/width；外推水平为不封顶直线在 80 年处的取值。
        """
        h_start_bps = self.quote.flat_hazard * 1e4
        h_max_bps = self.h_max * 1e4
        return {
            "t_end": self.quote.maturity + width,
            "cds_slope_bps": h_max_bps / width,
            "level_after_80y_bps": h_start_bps + (h_max_bps - h_start_bps) * (LEVEL_HORIZON - self.quote.maturity) / width,
        }

    def evaluate_cell(self, row: float, col: float) -> Tuple[XvaReport, Dict[str, Optional[float]]]:
        p_curve = extend_curve_slowest_uniform(self.quote, self.quote.maturity + row, self.h_max)
        spec = SwapSpec(maturity=col, pay_frequency=self.pay_frequency, notional=self.notional)
        return ccva_report(self.quote, p_curve, spec, self.market), self.diagnostics(row)
