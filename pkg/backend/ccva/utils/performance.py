"""性能监控模块

记录情景网格各单元的耗时、成功与失败情况以及进程内存峰值，
结果写入运行元数据（run_metadata.json），不进入数据文件。
"""

import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from functools import wraps
from typing import Any, Callable, Dict, List, Optional

import psutil


@dataclass
class PerformanceMetric:
    """性能指标数据类"""

    timestamp: float
    metric_name: str
    value: float
    unit: str
    tags: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CellPerformance:
    """单个网格单元的计算耗时"""

    cell: str
    elapsed_ms: float
    success: bool = True
    error_message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class PerformanceMonitor:
    """性能监控器

    线程安全，网格各工作线程可同时写入。
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.metrics_history: List[PerformanceMetric] = []
        self.cell_history: List[CellPerformance] = []
        self.current_stats = {
            'total_cells': 0,
            'successful_cells': 0,
            'failed_cells': 0,
            'total_cell_time': 0.0,
        }
        self._peak_rss = 0
        self._lock = threading.Lock()
        self.sample_memory()

    def sample_memory(self) -> int:
        """采样当前进程 RSS，并更新峰值

        Returns:
            int: 当前 RSS（字节）
        """
        try:
            rss = psutil.Process().memory_info().rss
        except psutil.Error as e:
            self.logger.warning(f"读取进程内存失败: {e}")
            return 0
        with self._lock:
            self._peak_rss = max(self._peak_rss, rss)
        return rss

    def record_metric(self, name: str, value: float, unit: str = "", tags: Dict[str, str] = None):
        """记录性能指标

        Args:
            name: 指标名称
            value: 指标值
            unit: 单位
            tags: 标签
        """
        metric = PerformanceMetric(
            timestamp=time.time(),
            metric_name=name,
            value=value,
            unit=unit,
            tags=tags or {},
        )
        with self._lock:
            self.metrics_history.append(metric)

    def record_cell(self, performance_data: CellPerformance):
        """记录单元耗时"""
        with self._lock:
            self.cell_history.append(performance_data)
            self.current_stats['total_cells'] += 1
            if performance_data.success:
                self.current_stats['successful_cells'] += 1
                self.current_stats['total_cell_time'] += performance_data.elapsed_ms
            else:
                self.current_stats['failed_cells'] += 1
        self.sample_memory()

    @property
    def peak_rss(self) -> int:
        with self._lock:
            return self._peak_rss

    def get_current_stats(self) -> Dict[str, Any]:
        """获取当前统计信息

        Returns:
            Dict[str, Any]: 统计信息字典
        """
        with self._lock:
            stats = self.current_stats.copy()

        if stats['successful_cells'] > 0:
            stats['avg_cell_time'] = stats['total_cell_time'] / stats['successful_cells']
        else:
            stats['avg_cell_time'] = 0.0
        stats['peak_rss_bytes'] = self.peak_rss
        return stats

    def get_cell_timings(self) -> List[Dict[str, Any]]:
        """按单元名排序的耗时列表"""
        with self._lock:
            cells = list(self.cell_history)
        return [c.to_dict() for c in sorted(cells, key=lambda c: c.cell)]

    def get_performance_report(self) -> Dict[str, Any]:
        with self._lock:
            metrics = [m.to_dict() for m in self.metrics_history]
        return {
            'current_stats': self.get_current_stats(),
            'cells': self.get_cell_timings(),
            'metrics': metrics,
        }


def performance_timer(monitor: Optional[PerformanceMonitor] = None):
    """性能计时装饰器

    Args:
        monitor: 性能监控器实例，None 时只记录调试日志

    Returns:
        装饰器函数
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed = (time.perf_counter() - start_time) * 1000
                logging.getLogger(func.__module__).debug(f"{func.__name__} 耗时 {elapsed:.1f}ms")
                if monitor:
                    monitor.record_metric(
                        f"function_{func.__name__}_time",
                        elapsed,
                        "ms",
                        {'function': func.__name__},
                    )
                    monitor.sample_memory()

        return wrapper
    return decorator
