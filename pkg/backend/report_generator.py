# 结果表格生成与落盘：报告、情景网格、曲线数据，以及运行元数据
import json
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ccva import __version__
from ccva.core.cds import extend_curve_Xi, par_spread
from ccva.core.exposure import SwapSpec
from ccva.core.termstructures import HazardCurve
from ccva.core.xva import REPORT_FIELDS, XvaReport, report_percentage_changes
from ccva.families import ResultGrid
from ccva.utils.config import RunConfig

logger = logging.getLogger(__name__)

CURVE_KINDS = ('flat', 'endpoint', 'transient', 'slowest_uniform')

# 按列名决定格式：坐标列用最短表示，百分比变化用 pct 小数位，bps 列两位小数
AXIS_COLUMNS = {'row', 'col', 't', 'maturity', 'swap_maturity', 't_end', 'm'}
PCT_SUFFIXES = ('_pct', '_pp')
BPS_SUFFIXES = ('_bps',)


class ReportGenerator:
    """结果表格生成器

    所有数据文件为固定列顺序、固定小数位的 CSV，不含时间戳；
    运行时间、耗时等写入单独的 run_metadata.json。
    """

    def __init__(self, decimal_places: int = 6, pct_decimal_places: int = 1, na_rep: str = 'NA'):
        self.decimal_places = decimal_places
        self.pct_decimal_places = pct_decimal_places
        self.na_rep = na_rep

    # ------------------------------------------------------------------
    # 格式化
    # ------------------------------------------------------------------

    def _digits(self, column: str) -> Optional[int]:
        if column in AXIS_COLUMNS:
            return None
        if column.startswith('survival_pct_'):
            return self.decimal_places
        if column.endswith(PCT_SUFFIXES):
            return self.pct_decimal_places
        if column.endswith(BPS_SUFFIXES) or column.startswith('cds_bps_'):
            return 2
        return self.decimal_places

    def format_value(self, value, digits: Optional[int]) -> str:
        if value is None or isinstance(value, str):
            return self.na_rep if value is None else value
        value = float(value)
        if math.isnan(value):
            return self.na_rep
        if digits is None:
            return f"{value:g}"
        text = f"{value:.{digits}f}"
        # 避免输出 -0.000
        if float(text) == 0:
            text = f"{0.0:.{digits}f}"
        return text

    def format_frame(self, data: pd.DataFrame) -> pd.DataFrame:
        """把数值列转为固定格式的字符串列"""
        formatted = pd.DataFrame(index=data.index)
        for column in data.columns:
            digits = self._digits(column)
            formatted[column] = [self.format_value(v, digits) for v in data[column].tolist()]
        return formatted

    def write_csv(self, data: pd.DataFrame, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.format_frame(data).to_csv(path, index=False, lineterminator='\n')
        logger.info(f"已写出: {path}")
        return path

    # ------------------------------------------------------------------
    # report
    # ------------------------------------------------------------------

    @staticmethod
    def report_frame(cfg: RunConfig, specs: Sequence[SwapSpec], reports: Sequence[XvaReport]) -> pd.DataFrame:
        """单笔或多笔互换的 CCVA 报告表"""
        records = []
        for spec, report in zip(specs, reports):
            record = {
                'as_of': cfg.as_of.isoformat(),
                'swap_maturity': spec.maturity,
                'fva_mode': cfg.market.fva_mode.value,
            }
            record.update(report_percentage_changes(report))
            records.append(record)
        columns = ['as_of', 'swap_maturity', 'fva_mode', *REPORT_FIELDS]
        return pd.DataFrame.from_records(records, columns=columns)

    def write_report(self, cfg: RunConfig, specs: Sequence[SwapSpec], reports: Sequence[XvaReport],
                     out_dir: Path) -> List[Path]:
        return [self.write_csv(self.report_frame(cfg, specs, reports), Path(out_dir) / 'report.csv')]

    # ------------------------------------------------------------------
    # grid
    # ------------------------------------------------------------------

    def write_grid(self, grid: ResultGrid, out_dir: Path, pivots: Iterable[str] = ()) -> List[Path]:
        """写出长表及各指标的透视表

        Args:
            grid: 情景网格结果
            out_dir: 输出目录
            pivots: 需要透视的指标

        Returns:
            List[Path]: 写出的文件
        """
        out_dir = Path(out_dir)
        stem = grid.family.replace('-', '_')
        paths = [self.write_csv(grid.to_frame(), out_dir / f'grid_{stem}.csv')]
        for metric in pivots:
            frame = grid.pivot(metric)
            # 透视表的数值全部按该指标的格式输出
            frame.columns = [f'{grid.col_label}={c:g}' for c in frame.columns]
            digits = self._digits(metric)
            formatted = pd.DataFrame({
                grid.row_label: [f'{r:g}' for r in frame.index],
                **{c: [self.format_value(v, digits) for v in frame[c].tolist()] for c in frame.columns},
            })
            path = out_dir / f'grid_{stem}_{metric}.csv'
            path.parent.mkdir(parents=True, exist_ok=True)
            formatted.to_csv(path, index=False, lineterminator='\n')
            logger.info(f"已写出: {path}")
            paths.append(path)
        return paths

    # ------------------------------------------------------------------
    # curves
    # ------------------------------------------------------------------

    @staticmethod
    def curve_set(cfg: RunConfig) -> Dict[str, HazardCurve]:
        """平坦外推、终点型、瞬态型、最慢匀速四条曲线"""
        return {
            'flat': extend_curve_Xi(cfg.quote()),
            'endpoint': cfg.p_curve('endpoint'),
            'transient': cfg.p_curve('transient'),
            'slowest_uniform': cfg.p_curve('slowest_uniform'),
        }

    @staticmethod
    def curves_frame(curves: Dict[str, HazardCurve], horizon: float, step: float) -> pd.DataFrame:
        """λ(t)、S(t) 与平均强度的作图数据"""
        n_steps = int(math.floor(horizon / step + 1e-9))
        grid = np.arange(n_steps + 1, dtype=float) * step
        data = {'t': grid}
        for kind in CURVE_KINDS:
            curve = curves[kind]
            data[f'hazard_{kind}'] = curve.hazard_at(grid)
            data[f'survival_{kind}'] = curve.survival(grid)
            data[f'avg_hazard_{kind}'] = curve.average_hazard(grid)
        return pd.DataFrame(data)

    @staticmethod
    def curves_table(curves: Dict[str, HazardCurve], cfg: RunConfig) -> pd.DataFrame:
        """各期限的 CDS 平价利差（bps）与生存概率（%）"""
        discount = cfg.discount_curve()
        recovery = cfg.cds.recovery
        maturities = cfg.curves.table_maturities
        data = {'maturity': maturities}
        for kind in CURVE_KINDS:
            curve = curves[kind]
            data[f'cds_bps_{kind}'] = [1e4 * par_spread(curve, discount, t, recovery) for t in maturities]
            data[f'survival_pct_{kind}'] = [100.0 * curve.survival(t) for t in maturities]
        return pd.DataFrame(data)

    def write_curves(self, cfg: RunConfig, out_dir: Path) -> List[Path]:
        curves = self.curve_set(cfg)
        out_dir = Path(out_dir)
        return [
            self.write_csv(self.curves_frame(curves, cfg.curves.horizon, cfg.curves.step), out_dir / 'curves.csv'),
            self.write_csv(self.curves_table(curves, cfg), out_dir / 'curves_table.csv'),
        ]

    # ------------------------------------------------------------------
    # 元数据
    # ------------------------------------------------------------------

    @staticmethod
    def write_run_metadata(out_dir: Path, metadata: Dict) -> Path:
        path = Path(out_dir) / 'run_metadata.json'
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {'version': __version__, **metadata}
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, ensure_ascii=False, default=str)
        return path
