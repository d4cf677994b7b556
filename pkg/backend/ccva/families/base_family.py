"""情景族基类

定义所有情景网格族的统一接口、网格单元与结果网格。
每个单元独立计算，失败单元记录错误信息而不是被丢弃。
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.cds import CdsQuote
from ..core.xva import REPORT_FIELDS, MarketEnvironment, XvaReport, report_percentage_changes
from ..exceptions import CcvaError, ParameterError

logger = logging.getLogger(__name__)

PCT_FIELDS = ("cd_cva_pct", "cd_fva_pct", "ccva_pct")


@dataclass(frozen=True)
class ScenarioCell:
    """网格单元坐标

    Attributes:
        row_index: 行序号
        col_index: 列序号
        row: 行坐标值（年）
        col: 列坐标值（年）
    """

    row_index: int
    col_index: int
    row: float
    col: float

    @property
    def index(self) -> Tuple[int, int]:
        return self.row_index, self.col_index


@dataclass(frozen=True)
class CellResult:
    """单元计算结果，report 为空表示失败"""

    cell: ScenarioCell
    report: Optional[XvaReport] = None
    diagnostics: Dict[str, Optional[float]] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def status(self) -> str:
        return "ok" if self.report is not None else "failed"


@dataclass(frozen=True, eq=False)
class ResultGrid:
    """情景网格结果

    单元按行优先顺序存放，维度与坐标轴一致。

    Attributes:
        family: 情景族名称
        row_label: 行坐标含义
        col_label: 列坐标含义
        rows: 行坐标
        columns: 列坐标
        cells: 各单元结果
        diagnostic_columns: 该族附加的诊断列
    """

    family: str
    row_label: str
    col_label: str
    rows: Tuple[float, ...]
    columns: Tuple[float, ...]
    cells: Tuple[CellResult, ...]
    diagnostic_columns: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.cells) != len(self.rows) * len(self.columns):
            raise ParameterError(
                f"单元数 {len(self.cells)} 与网格维度 {len(self.rows)}×{len(self.columns)} 不一致"
            )
        for position, result in enumerate(self.cells):
            expected = divmod(position, len(self.columns))
            if result.cell.index != expected:
                raise ParameterError(f"单元 {result.cell.index} 位置错误，应为 {expected}")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)

    def cell(self, row_index: int, col_index: int) -> CellResult:
        return self.cells[row_index * len(self.columns) + col_index]

    def lookup(self, row: float, col: float) -> CellResult:
        """按坐标值取单元"""
        try:
            return self.cell(self.rows.index(row), self.columns.index(col))
        except ValueError:
            raise KeyError(f"网格中不存在单元 ({self.row_label}={row}, {self.col_label}={col})") from None

    @property
    def failed(self) -> List[CellResult]:
        return [c for c in self.cells if c.report is None]

    def cell_name(self, result: CellResult) -> str:
        return f"{self.family}[{self.row_label}={result.cell.row:g}, {self.col_label}={result.cell.col:g}]"

    def to_frame(self) -> pd.DataFrame:
        """长表格式：每个单元一行，列顺序固定"""
        records = []
        for result in self.cells:
            record: Dict[str, Any] = {
                "family": self.family,
                "row_label": self.row_label,
                "row": result.cell.row,
                "col_label": self.col_label,
                "col": result.cell.col,
                "status": result.status,
            }
            values = report_percentage_changes(result.report) if result.report else {}
            for name in REPORT_FIELDS:
                record[name] = values.get(name)
            for name in self.diagnostic_columns:
                record[name] = result.diagnostics.get(name)
            record["error"] = result.error or ""
            records.append(record)

        columns = ["family", "row_label", "row", "col_label", "col", "status",
                   *REPORT_FIELDS, *self.diagnostic_columns, "error"]
        return pd.DataFrame.from_records(records, columns=columns)

    def pivot(self, metric: str) -> pd.DataFrame:
        """按表格布局展开单个指标：行为 row，列为 col

        Args:
            metric: REPORT_FIELDS 或诊断列之一

        Returns:
            pd.DataFrame: 行列坐标为索引的透视表，失败单元为 NaN
        """
        if metric not in REPORT_FIELDS and metric not in self.diagnostic_columns:
            raise ParameterError(f"不支持的透视指标: {metric}")
        values = np.full(self.shape, np.nan)
        for result in self.cells:
            if metric in self.diagnostic_columns:
                value = result.diagnostics.get(metric)
            elif result.report is not None:
                value = report_percentage_changes(result.report)[metric]
            else:
                value = None
            if value is not None:
                values[result.cell.index] = value
        frame = pd.DataFrame(values, index=list(self.rows), columns=list(self.columns))
        frame.index.name = self.row_label
        frame.columns.name = self.col_label
        return frame


class BaseScenarioFamily(ABC):
    """情景族基类

    所有情景族都必须继承此基类并实现抽象方法
    """

    row_label: str = "row"
    col_label: str = "col"
    diagnostic_columns: Tuple[str, ...] = ()
    pivot_metrics: Tuple[str, ...] = PCT_FIELDS

    def __init__(self, quote: CdsQuote, market: MarketEnvironment,
                 rows: List[float], columns: List[float]):
        """初始化情景族

        Args:
            quote: 最长可交易 CDS 报价
            market: 市场设置
            rows: 行坐标
            columns: 列坐标
        """
        self.quote = quote
        self.market = market
        self.rows = tuple(float(r) for r in rows)
        self.columns = tuple(float(c) for c in columns)
        self.logger = logging.getLogger(self.__class__.__module__)
        self.validate_config()

    @abstractmethod
    def get_family_name(self) -> str:
        """返回情景族名称"""
        pass

    @abstractmethod
    def evaluate_cell(self, row: float, col: float) -> Tuple[XvaReport, Dict[str, Optional[float]]]:
        """计算单个单元

        Args:
            row: 行坐标值
            col: 列坐标值

        Returns:
            Tuple[XvaReport, Dict]: CCVA 报告与诊断列
        """
        pass

    def validate_config(self):
        """校验坐标轴：非空且严格递增

        Raises:
            ParameterError: 坐标轴不合法
        """
        for label, axis in ((self.row_label, self.rows), (self.col_label, self.columns)):
            if not axis:
                raise ParameterError(f"坐标轴 {label} 不能为空")
            if any(b <= a for a, b in zip(axis[:-1], axis[1:])):
                raise ParameterError(f"坐标轴 {label} 必须严格递增: {list(axis)}")

    def cells(self) -> List[ScenarioCell]:
        return [
            ScenarioCell(i, j, row, col)
            for i, row in enumerate(self.rows)
            for j, col in enumerate(self.columns)
        ]

    def run_cell(self, cell: ScenarioCell) -> CellResult:
        """计算单元并捕获领域错误与数值错误，失败记录在结果中"""
        try:
            report, diagnostics = self.evaluate_cell(cell.row, cell.col)
        except (CcvaError, ArithmeticError, ValueError) as e:
            message = str(e) if isinstance(e, CcvaError) else f"{type(e).__name__}: {e}"
            self.logger.warning(
                f"单元计算失败 [{self.row_label}={cell.row:g}, {self.col_label}={cell.col:g}]: {message}"
            )
            return CellResult(cell=cell, error=message)
        return CellResult(cell=cell, report=report, diagnostics=diagnostics)

    def build_grid(self, results: List[CellResult]) -> ResultGrid:
        return ResultGrid(
            family=self.get_family_name(),
            row_label=self.row_label,
            col_label=self.col_label,
            rows=self.rows,
            columns=self.columns,
            cells=tuple(results),
            diagnostic_columns=self.diagnostic_columns,
        )

    def get_family_info(self) -> Dict[str, Any]:
        return {
            "family": self.get_family_name(),
            "row_label": self.row_label,
            "rows": list(self.rows),
            "col_label": self.col_label,
            "columns": list(self.columns),
            "diagnostics": list(self.diagnostic_columns),
        }
