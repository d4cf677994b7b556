"""情景网格管理器

把情景族的各单元分发给线程池并行计算，按单元序号合并结果，
合并顺序与并发度无关。
"""

import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional

from tqdm import tqdm

from ..families.base_family import BaseScenarioFamily, CellResult, ResultGrid, ScenarioCell
from ..exceptions import ParameterError
from ..utils.performance import CellPerformance, PerformanceMonitor

logger = logging.getLogger(__name__)


def _default_workers() -> int:
    """CCVA_MAX_WORKERS 未设置或无法解析时取 min(8, CPU 核数)"""
    default = min(8, os.cpu_count() or 1)
    raw = os.getenv('CCVA_MAX_WORKERS', '').strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"环境变量 CCVA_MAX_WORKERS={raw!r} 不是整数，使用默认值 {default}")
        return default


class GridManager:
    """情景网格管理器

    负责单元调度、进度显示与耗时统计
    """

    def __init__(self, max_workers: Optional[int] = None, show_progress: bool = False,
                 monitor: Optional[PerformanceMonitor] = None):
        """初始化管理器

        Args:
            max_workers: 最大工作线程数，None 时取 CCVA_MAX_WORKERS
            show_progress: 是否在 stderr 显示进度条
            monitor: 性能监控器，None 时新建
        """
        if max_workers is None:
            max_workers = _default_workers()
        if int(max_workers) < 1:
            raise ParameterError(f"工作线程数必须为正整数: {max_workers}")
        self.max_workers = int(max_workers)
        self.show_progress = show_progress
        self.monitor = monitor or PerformanceMonitor()
        self.logger = logging.getLogger(__name__)

    def _run_cell(self, family: BaseScenarioFamily, grid_name: str, cell: ScenarioCell) -> CellResult:
        start_time = time.perf_counter()
        result = family.run_cell(cell)
        elapsed = (time.perf_counter() - start_time) * 1000
        self.monitor.record_cell(CellPerformance(
            cell=f"{grid_name}[{cell.row_index},{cell.col_index}]",
            elapsed_ms=elapsed,
            success=result.report is not None,
            error_message=result.error or "",
        ))
        return result

    def run(self, family: BaseScenarioFamily) -> ResultGrid:
        """计算整张网格

        Args:
            family: 情景族

        Returns:
            ResultGrid: 结果网格，失败单元带错误信息
        """
        name = family.get_family_name()
        cells = family.cells()
        results: List[Optional[CellResult]] = [None] * len(cells)
        workers = min(self.max_workers, len(cells))
        self.logger.info(f"开始计算情景网格 {name}: {len(cells)} 个单元, {workers} 个工作线程")

        progress = tqdm(total=len(cells), desc=name, file=sys.stderr,
                        disable=not self.show_progress, leave=False)
        try:
            if workers == 1:
                for position, cell in enumerate(cells):
                    results[position] = self._run_cell(family, name, cell)
                    progress.update(1)
            else:
                with ThreadPoolExecutor(max_workers=workers) as executor:
                    futures: Dict = {
                        executor.submit(self._run_cell, family, name, cell): position
                        for position, cell in enumerate(cells)
                    }
                    for future in as_completed(futures):
                        results[futures[future]] = future.result()
                        progress.update(1)
        finally:
            progress.close()

        grid = family.build_grid(results)
        if grid.failed:
            self.logger.warning(f"情景网格 {name} 有 {len(grid.failed)} 个单元失败")
        else:
            self.logger.info(f"情景网格 {name} 计算完成")
        return grid
