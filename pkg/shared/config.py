# 进程级共享配置：日志、并发与输出格式
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Any, Dict

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ('1', 'true', 'yes')


def _env_int(name: str, default: int, minimum: int = 0) -> int:
    """读取整数环境变量，无法解析或低于下限时记录警告并使用默认值"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"环境变量 {name}={raw!r} 不是整数，使用默认值 {default}")
        return default
    if value < minimum:
        logger.warning(f"环境变量 {name}={value} 小于 {minimum}，使用默认值 {default}")
        return default
    return value


class Config:
    """应用配置类"""

    def __init__(self):
        self.load_config()

    def load_config(self):
        """加载配置（.env 文件中的值不会覆盖已有环境变量）"""
        load_dotenv()

        # 日志配置
        self.LOGGING_CONFIG = {
            'level': os.getenv('LOG_LEVEL', 'INFO'),
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'file': os.getenv('LOG_FILE', ''),
            'max_bytes': _env_int('LOG_MAX_BYTES', 10485760),  # 10MB
            'backup_count': _env_int('LOG_BACKUP_COUNT', 5)
        }

        # 计算配置
        self.COMPUTE_CONFIG = {
            'max_workers': _env_int('CCVA_MAX_WORKERS', min(8, os.cpu_count() or 1), minimum=1),
            'show_progress': _env_bool('CCVA_SHOW_PROGRESS', 'true')
        }

        # 输出配置
        self.OUTPUT_CONFIG = {
            'decimal_places': _env_int('CCVA_DECIMAL_PLACES', 6),
            'pct_decimal_places': _env_int('CCVA_PCT_DECIMAL_PLACES', 1),
            'na_rep': 'NA'
        }

    def get_config(self, section: str) -> Dict[str, Any]:
        """获取指定配置段"""
        config_map = {
            'logging': self.LOGGING_CONFIG,
            'compute': self.COMPUTE_CONFIG,
            'output': self.OUTPUT_CONFIG
        }
        return config_map.get(section, {})


# 全局配置实例
config = Config()


def setup_logging(level: str = None) -> logging.Logger:
    """配置根日志器：stderr 输出，设置 LOG_FILE 时追加滚动文件

    Args:
        level: 日志级别，默认取 LOG_LEVEL

    Returns:
        logging.Logger: 根日志器
    """
    log_config = config.get_config('logging')
    root = logging.getLogger()
    root.setLevel(level or log_config['level'])

    formatter = logging.Formatter(log_config['format'])
    for handler in list(root.handlers):
        if getattr(handler, '_ccva_handler', False):
            root.removeHandler(handler)
            handler.close()

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    stream_handler._ccva_handler = True
    root.addHandler(stream_handler)

    if log_config['file']:
        file_handler = RotatingFileHandler(
            log_config['file'],
            maxBytes=log_config['max_bytes'],
            backupCount=log_config['backup_count'],
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        file_handler._ccva_handler = True
        root.addHandler(file_handler)

    return root

