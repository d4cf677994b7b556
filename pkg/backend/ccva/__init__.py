"""气候变化估值调整（CCVA）计算库

在可交易 CDS 期限之后，用气候压力下的违约强度路径替代市场惯例的
平坦外推，比较两者下的 CVA 与 FVA：

    CCVA = (CVA_CC + FVA_CC) - (CVA_MP + FVA_MP)

主要组件：
- HazardCurve / DiscountCurve: 分段线性强度曲线与平坦贴现曲线
- SigmoidParams: 终点型与瞬态型压力路径参数
- ccva_report: 单笔平值互换的 CCVA 分解
- 情景族（slowest-uniform / midpoint / transition）与 GridManager 并行网格
- ConfigManager: YAML/JSON 运行配置

使用示例：
    from ccva import CdsQuote, SigmoidParams, SwapSpec, ccva_report

    quote = CdsQuote(maturity=10, spread=0.01, recovery=0.4)
    params = SigmoidParams(False, 10, quote.flat_hazard, 40, 20, 0.10, 80, 0.25)
    report = ccva_report(quote, params, SwapSpec(maturity=20))
"""

from .core import (
    CdsQuote,
    DiscountCurve,
    ExposureProfile,
    FvaMode,
    HazardCurve,
    MarketEnvironment,
    SigmoidParams,
    SwapSpec,
    XvaInputs,
    XvaReport,
    ccva_report,
    cva,
    fva,
    report_percentage_changes,
)
from .families import (
    FAMILY_REGISTRY,
    ResultGrid,
    run_family,
    run_midpoint,
    run_slowest_uniform,
    run_transition,
)
from .core.grid_manager import GridManager
from .exceptions import CcvaError, ComputeError, ConfigError, ParameterError
from .utils.config import DEFAULT_CONFIG, ConfigManager, RunConfig

# 版本信息
__version__ = '1.0.0'
__description__ = '气候变化估值调整计算库'

__all__ = [
    # 曲线与报价
    'CdsQuote',
    'DiscountCurve',
    'HazardCurve',
    'SigmoidParams',

    # 敞口与 XVA
    'ExposureProfile',
    'FvaMode',
    'SwapSpec',
    'MarketEnvironment',
    'XvaInputs',
    'XvaReport',
    'cva',
    'fva',
    'ccva_report',
    'report_percentage_changes',

    # 情景网格
    'GridManager',
    'ResultGrid',
    'FAMILY_REGISTRY',
    'run_family',
    'run_slowest_uniform',
    'run_midpoint',
    'run_transition',

    # 配置与错误
    'ConfigManager',
    'RunConfig',
    'DEFAULT_CONFIG',
    'CcvaError',
    'ParameterError',
    'ConfigError',
    'ComputeError',

    '__version__',
]
