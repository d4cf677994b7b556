"""情景族注册表

名称到情景族类的映射，以及按配置运行整张网格的便捷函数。
"""

from typing import Dict, Optional, Type

from .base_family import BaseScenarioFamily, CellResult, ResultGrid, ScenarioCell
from .midpoint import MidpointFamily
from .slowest_uniform import SlowestUniformFamily
from .transition import (
    TransitionFamily,
    survival_change_over_window,
    survival_drop_over_window,
    survival_drop_vs_flat_over_window,
)
from ..core.grid_manager import GridManager
from ..exceptions import ParameterError

FAMILY_REGISTRY: Dict[str, Type[BaseScenarioFamily]] = {
    'slowest-uniform': SlowestUniformFamily,
    'midpoint': MidpointFamily,
    'transition': TransitionFamily,
}


def get_available_families():
    return list(FAMILY_REGISTRY.keys())


def create_family(name: str, cfg) -> BaseScenarioFamily:
    """按名称和运行配置创建情景族

    Args:
        name: 情景族名称
        cfg: RunConfig

    Returns:
        BaseScenarioFamily: 情景族实例
    """
    if name not in FAMILY_REGISTRY:
        raise ParameterError(f"不支持的情景族: {name}，可选: {get_available_families()}")
    return FAMILY_REGISTRY[name].from_config(cfg)


def run_family(name: str, cfg, manager: Optional[GridManager] = None) -> ResultGrid:
    manager = manager or GridManager()
    return manager.run(create_family(name, cfg))


def run_slowest_uniform(cfg, manager: Optional[GridManager] = None) -> ResultGrid:
    """最慢匀速逼近网格：宽度 × 互换期限"""
    return run_family('slowest-uniform', cfg, manager)


def run_midpoint(cfg, manager: Optional[GridManager] = None) -> ResultGrid:
    """中点冲击网格：宽度 × 互换期限"""
    return run_family('midpoint', cfg, manager)


def run_transition(cfg, manager: Optional[GridManager] = None) -> ResultGrid:
    """转型冲击网格：持续时间 × 转型中点，固定互换期限"""
    return run_family('transition', cfg, manager)


__all__ = [
    'BaseScenarioFamily',
    'CellResult',
    'ResultGrid',
    'ScenarioCell',
    'SlowestUniformFamily',
    'MidpointFamily',
    'TransitionFamily',
    'FAMILY_REGISTRY',
    'get_available_families',
    'create_family',
    'run_family',
    'run_slowest_uniform',
    'run_midpoint',
    'run_transition',
    'survival_change_over_window',
    'survival_drop_over_window',
    'survival_drop_vs_flat_over_window',
]
