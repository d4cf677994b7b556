"""曲线、CDS、敞口与 XVA 计算核心

情景网格调度器 grid_manager 依赖 families，不在此处导入。
"""

from .cds import (
    CdsQuote,
    ExtrapolationPolicy,
    bootstrap_flat_hazard,
    extend_curve,
    extend_curve_P,
    extend_curve_slowest_uniform,
    extend_curve_Xi,
    par_spread,
    protection_leg,
    risky_annuity,
)
from .exposure import ExposureProfile, FvaMode, SwapSpec, annuity, atm_epe, exposure_grid, exposure_profile
from .sigmoid import (
    SigmoidCurve,
    SigmoidParams,
    build_curve,
    build_endpoint_curve,
    build_transient_curve,
    slowest_uniform_curve,
)
from .termstructures import DiscountCurve, HazardCurve, SurvivalFn
from .xva import (
    MarketEnvironment,
    XvaInputs,
    XvaReport,
    ccva_report,
    cva,
    fva,
    report_percentage_changes,
    xva_report,
)
