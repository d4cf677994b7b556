from .config import DEFAULT_CONFIG, ConfigManager, RunConfig
from .performance import PerformanceMonitor, performance_timer
