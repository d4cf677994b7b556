"""配置管理模块

运行配置 RunConfig 的定义、加载（YAML/JSON）、校验与保存。
校验失败统一抛出 ConfigError，并给出出错字段路径及其在 YAML 源文件中的行号。
空配置即基准设置：估值日 2020-01-29，贴现率 2%，10 年期 CDS 100bps、
回收率 40%，正态波动率 20bps，融资利差 100bps。
"""

import json
import logging
import math
from datetime import date
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import yaml
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError

from ..core.cds import CdsQuote, extend_curve_P, extend_curve_slowest_uniform
from ..core.exposure import FvaMode, SwapSpec
from ..core.sigmoid import SigmoidParams
from ..core.termstructures import DiscountCurve, HazardCurve
from ..core.xva import DEFAULT_SUBSTEPS, MarketEnvironment
from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

# 利率类字段的合理范围 |x| < 1/年
_RATE_BOUND = 1.0


def _check_rate(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"必须为有限值: {value}")
    if abs(value) >= _RATE_BOUND:
        raise ValueError(f"超出合理范围 |x| < {_RATE_BOUND}/年: {value}")
    return value


def _check_axis(values: List[float]) -> List[float]:
    if not values:
        raise ValueError("坐标轴不能为空")
    if not all(math.isfinite(v) and v > 0 for v in values):
        raise ValueError(f"坐标轴取值必须为正的有限值: {values}")
    if any(b <= a for a, b in zip(values[:-1], values[1:])):
        raise ValueError(f"坐标轴必须严格递增: {values}")
    return values


Rate = Annotated[float, AfterValidator(_check_rate)]
Axis = Annotated[List[float], AfterValidator(_check_axis)]


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid', allow_inf_nan=False)


class MarketConfig(_Section):
    """贴现、波动率、融资与数值设置"""

    discount_rate: Rate = 0.02
    normal_vol: Rate = Field(default=0.0020, ge=0)
    funding_spread: Rate = Field(default=0.0100, ge=0)
    fva_mode: FvaMode = FvaMode.FCA
    grid_step: float = Field(default=0.25, gt=0, le=1)
    quadrature_substeps: int = Field(default=DEFAULT_SUBSTEPS, ge=1, le=256)


class CdsConfig(_Section):
    """最长可交易 CDS 报价"""

    maturity: float = Field(default=10.0, gt=0)
    spread: Rate = Field(default=0.0100, ge=0)
    recovery: float = Field(default=0.40, ge=0, lt=1)


class SwapConfig(_Section):
    """平值利率互换"""

    maturities: Axis = Field(default_factory=lambda: [20.0, 30.0, 40.0, 50.0])
    pay_frequency: int = Field(default=1, ge=1, le=12)
    notional: float = Field(default=1.0, gt=0)


class SigmoidConfig(_Section):
    """report 子命令使用的 P 段形态，curves 子命令共用其参数

    h_start 为空时取 CDS 报价自举的平坦强度。
    """

    shape: Literal['endpoint', 'transient', 'slowest_uniform'] = 'endpoint'
    m: float = 40.0
    w: float = Field(default=20.0, ge=0)
    u: float = Field(default=0.10, ge=0, lt=0.5)
    t_end: float = 80.0
    h_max: Rate = Field(default=0.25, ge=0)
    h_start: Optional[Annotated[Rate, Field(ge=0)]] = None


class SlowestUniformFamilyConfig(_Section):
    widths: Axis = Field(default_factory=lambda: [20.0, 30.0, 40.0, 50.0, 60.0, 70.0])
    irs_maturities: Axis = Field(default_factory=lambda: [20.0, 30.0, 40.0, 50.0])
    h_max: Rate = Field(default=0.25, ge=0)


class MidpointFamilyConfig(_Section):
    widths: Axis = Field(default_factory=lambda: [1.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0])
    irs_maturities: Axis = Field(default_factory=lambda: [20.0, 30.0, 40.0, 50.0])
    u: float = Field(default=0.05, ge=0, lt=0.5)
    t_end: float = 80.0
    h_max: Rate = Field(default=0.25, ge=0)
    midpoint_anchor: Literal['p_segment', 'origin'] = 'p_segment'


class TransitionFamilyConfig(_Section):
    midpoints: Axis = Field(default_factory=lambda: [15.0, 25.0, 35.0, 45.0, 55.0, 65.0, 75.0])
    widths: Axis = Field(default_factory=lambda: [1.0, 5.0, 10.0])
    irs_maturity: float = Field(default=30.0, gt=0)
    u: float = Field(default=0.05, ge=0, lt=0.5)
    t_end: float = 80.0
    h_max: Rate = Field(default=0.25, ge=0)


class FamilyConfig(_Section):
    """三组情景网格"""

    slowest_uniform: SlowestUniformFamilyConfig = Field(default_factory=SlowestUniformFamilyConfig)
    midpoint: MidpointFamilyConfig = Field(default_factory=MidpointFamilyConfig)
    transition: TransitionFamilyConfig = Field(default_factory=TransitionFamilyConfig)


class CurvesConfig(_Section):
    """curves 子命令的输出网格"""

    horizon: float = Field(default=80.0, gt=0, le=200)
    step: float = Field(default=0.5, gt=0)
    table_maturities: Axis = Field(
        default_factory=lambda: [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]
    )


class OutputConfig(_Section):
    decimal_places: Optional[Annotated[int, Field(ge=0, le=15)]] = None
    pct_decimal_places: Optional[Annotated[int, Field(ge=0, le=15)]] = None
    pivots: bool = True


class RunConfig(_Section):
    """一次运行的完整配置"""

    as_of: date = date(2020, 1, 29)
    market: MarketConfig = Field(default_factory=MarketConfig)
    cds: CdsConfig = Field(default_factory=CdsConfig)
    swap: SwapConfig = Field(default_factory=SwapConfig)
    sigmoid: SigmoidConfig = Field(default_factory=SigmoidConfig)
    family: FamilyConfig = Field(default_factory=FamilyConfig)
    curves: CurvesConfig = Field(default_factory=CurvesConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    # ------------------------------------------------------------------
    # 领域对象
    # ------------------------------------------------------------------

    def quote(self) -> CdsQuote:
        return CdsQuote(maturity=self.cds.maturity, spread=self.cds.spread, recovery=self.cds.recovery)

    def discount_curve(self) -> DiscountCurve:
        return DiscountCurve(flat_rate=self.market.discount_rate)

    def market_environment(self) -> MarketEnvironment:
        return MarketEnvironment(
            discount=self.discount_curve(),
            normal_vol=self.market.normal_vol,
            funding_spread=self.market.funding_spread,
            fva_mode=self.market.fva_mode,
            grid_step=self.market.grid_step,
            quadrature_substeps=self.market.quadrature_substeps,
        )

    def swap_specs(self) -> Tuple[SwapSpec, ...]:
        return tuple(
            SwapSpec(maturity=t, pay_frequency=self.swap.pay_frequency, notional=self.swap.notional)
            for t in self.swap.maturities
        )

    def sigmoid_params(self, transient: Optional[bool] = None) -> SigmoidParams:
        """由 sigmoid 段构造参数，t_start 取 CDS 期限

        Args:
            transient: 覆盖形态；None 时按 shape 判断
        """
        sig = self.sigmoid
        if transient is None:
            transient = sig.shape == 'transient'
        h_start = self.quote().flat_hazard if sig.h_start is None else sig.h_start
        return SigmoidParams(
            transient=transient,
            t_start=self.cds.maturity,
            h_start=h_start,
            m=sig.m,
            w=sig.w,
            u=sig.u,
            t_end=sig.t_end,
            h_max=sig.h_max,
        )

    def p_curve(self, shape: Optional[str] = None) -> HazardCurve:
        """按 sigmoid 段构造完整的 P 外推曲线

        Args:
            shape: endpoint / transient / slowest_uniform，None 时取配置

        Returns:
            HazardCurve: Q 段与 P 段拼接后的曲线
        """
        shape = shape or self.sigmoid.shape
        quote = self.quote()
        if shape == 'slowest_uniform':
            return extend_curve_slowest_uniform(quote, self.sigmoid.t_end, self.sigmoid.h_max,
                                                h_start=self.sigmoid.h_start)
        return extend_curve_P(quote, self.sigmoid_params(transient=shape == 'transient'))


# 默认配置常量
DEFAULT_CONFIG = RunConfig().model_dump(mode='json')


def _source_line(source: Optional[str], loc: Sequence[Union[str, int]]) -> Optional[int]:
    """在 YAML 节点树中沿字段路径查找行号（从 1 开始）"""
    if not source:
        return None
    try:
        node = yaml.compose(source)
    except yaml.YAMLError:
        return None

    line = None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(key):
                    line = key_node.start_mark.line + 1
                    node = value_node
                    break
            else:
                break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            break
    return line


def _field_path(loc: Sequence[Union[str, int]]) -> str:
    return '.'.join(str(part) for part in loc)


class ConfigManager:
    """配置管理器

    负责加载、校验、覆盖与保存运行配置
    """

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """初始化配置管理器

        Args:
            config_path: 配置文件路径，None 表示使用默认配置
        """
        self.logger = logging.getLogger(__name__)
        self.config_path = Path(config_path) if config_path else None
        self._source: Optional[str] = None
        self._config = RunConfig()
        if self.config_path is not None:
            self.load_config()

    def load_config(self, config_path: Optional[Union[str, Path]] = None) -> RunConfig:
        """加载并校验配置文件

        Args:
            config_path: 配置文件路径

        Returns:
            RunConfig: 校验后的配置

        Raises:
            ConfigError: 文件不可读、格式错误或字段不合法
        """
        if config_path:
            self.config_path = Path(config_path)
        if self.config_path is None:
            return self._config

        try:
            self._source = self.config_path.read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(f"无法读取配置文件 {self.config_path}: {e}") from e

        suffix = self.config_path.suffix.lower()
        if suffix in ('.yaml', '.yml'):
            config_data = self._parse_yaml(self._source)
        elif suffix == '.json':
            config_data = self._parse_json(self._source)
        else:
            raise ConfigError(f"不支持的配置文件格式: {self.config_path.suffix}")

        self._config = self.validate_config(config_data or {}, self._source)
        self.logger.info(f"成功加载配置文件: {self.config_path}")
        return self._config

    @staticmethod
    def _parse_yaml(source: str) -> Dict[str, Any]:
        try:
            data = yaml.safe_load(source)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigError(f"YAML 格式错误: {getattr(e, 'problem', e)}", line=line) from e
        if data is not None and not isinstance(data, dict):
            raise ConfigError("配置文件顶层必须为键值映射", line=1)
        return data

    @staticmethod
    def _parse_json(source: str) -> Dict[str, Any]:
        if not source.strip():
            return {}
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON 格式错误: {e.msg}", line=e.lineno) from e
        if not isinstance(data, dict):
            raise ConfigError("配置文件顶层必须为键值映射", line=1)
        return data

    @staticmethod
    def validate_config(config_data: Dict[str, Any], source: Optional[str] = None) -> RunConfig:
        """校验配置数据

        先做 pydantic 字段校验，再做跨字段检查（曲线时间顺序等）。

        Args:
            config_data: 配置数据字典
            source: YAML 源文本，用于定位行号

        Returns:
            RunConfig: 校验后的配置

        Raises:
            ConfigError: 第一个不合法的字段
        """
        try:
            run_config = RunConfig.model_validate(config_data)
        except ValidationError as e:
            first = e.errors()[0]
            loc = first['loc']
            raise ConfigError(first['msg'], field=_field_path(loc), line=_source_line(source, loc)) from e

        for loc, message in _cross_field_problems(run_config):
            raise ConfigError(message, field=_field_path(loc), line=_source_line(source, loc))
        return run_config

    def apply_overrides(self, fva_mode: Optional[str] = None, grid_step: Optional[float] = None) -> RunConfig:
        """命令行参数覆盖配置文件

        Args:
            fva_mode: fca 或 signed
            grid_step: 敞口网格步长（年）

        Returns:
            RunConfig: 覆盖后的配置
        """
        data = self._config.model_dump(mode='json')
        if fva_mode is not None:
            data['market']['fva_mode'] = fva_mode
        if grid_step is not None:
            data['market']['grid_step'] = grid_step
        self._config = self.validate_config(data)
        return self._config

    def get_config(self) -> RunConfig:
        return self._config.model_copy(deep=True)

    def save_resolved(self, path: Union[str, Path]) -> Path:
        """保存完整解析后的配置（YAML），重新加载可复现相同输出

        Args:
            path: 输出路径

        Returns:
            Path: 写入的文件路径
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(self._config.model_dump(mode='json'), f,
                           default_flow_style=False, allow_unicode=True, sort_keys=False)
        self.logger.info(f"已保存解析后的配置: {path}")
        return path


def _cross_field_problems(cfg: RunConfig) -> List[Tuple[Tuple[str, ...], str]]:
    """跨字段一致性检查，返回 (字段路径, 错误信息) 列表"""
    problems = []
    t_start = cfg.cds.maturity
    sig = cfg.sigmoid

    if not sig.t_end > t_start:
        problems.append((('sigmoid', 't_end'), f"t_end 必须大于 CDS 期限 {t_start}: {sig.t_end}"))
    elif sig.shape != 'slowest_uniform':
        if sig.m - sig.w / 2 < t_start:
            problems.append((('sigmoid', 'm'), f"m - w/2 = {sig.m - sig.w / 2} 早于 CDS 期限 {t_start}"))
        elif sig.m + sig.w / 2 > sig.t_end:
            problems.append((('sigmoid', 'm'), f"m + w/2 = {sig.m + sig.w / 2} 晚于 t_end {sig.t_end}"))
    h_start = cfg.quote().flat_hazard if sig.h_start is None else sig.h_start
    if sig.h_max < h_start:
        problems.append((('sigmoid', 'h_max'), f"h_max 不能低于起点强度 {h_start:.6f}: {sig.h_max}"))

    for name in ('slowest_uniform', 'midpoint', 'transition'):
        family = getattr(cfg.family, name)
        if family.h_max < cfg.quote().flat_hazard:
            problems.append((('family', name, 'h_max'), f"h_max 不能低于报价强度: {family.h_max}"))

    midpoint = cfg.family.midpoint
    if not midpoint.t_end > t_start:
        problems.append((('family', 'midpoint', 't_end'), f"t_end 必须大于 CDS 期限 {t_start}"))

    transition = cfg.family.transition
    if not transition.t_end > t_start:
        problems.append((('family', 'transition', 't_end'), f"t_end 必须大于 CDS 期限 {t_start}"))
    if any(m <= t_start for m in transition.midpoints):
        problems.append((('family', 'transition', 'midpoints'), f"转型中点必须晚于 CDS 期限 {t_start}"))
    return problems
