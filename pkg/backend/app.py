# CCVA 命令行入口
import logging
import os
import sys
import time
from pathlib import Path
from typing import Callable, Optional

import click
from dotenv import load_dotenv

# 加载环境变量 - 确保在导入其他模块前加载
load_dotenv()

# 添加项目根目录（shared 所在目录）
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from shared.config import config, setup_logging

from ccva import __version__
from ccva.core.grid_manager import GridManager
from ccva.core.xva import ccva_report
from ccva.exceptions import CcvaError, ComputeError, ConfigError
from ccva.families import create_family, get_available_families
from ccva.utils.config import ConfigManager, RunConfig
from ccva.utils.performance import PerformanceMonitor, performance_timer
from report_generator import ReportGenerator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2


class CcvaGroup(click.Group):
    """把异常映射为退出码：0 正常，1 配置或用法错误，2 计算错误"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                                  standalone_mode=False, **extra)
            code = result if isinstance(result, int) else EXIT_OK
        except click.exceptions.Abort:
            click.echo("已中止", err=True)
            code = EXIT_CONFIG
        except click.ClickException as e:
            e.show()
            code = EXIT_CONFIG
        except ConfigError as e:
            logger.error(f"配置错误: {e}")
            click.echo(f"配置错误: {e}", err=True)
            code = EXIT_CONFIG
        except CcvaError as e:
            logger.error(f"计算错误: {e}")
            click.echo(f"计算错误: {e}", err=True)
            code = EXIT_COMPUTE

        if standalone_mode:
            sys.exit(code)
        return code


def _run_options(func: Callable) -> Callable:
    """report / grid / curves 共用的选项"""
    decorators = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                     help='运行配置文件（YAML 或 JSON），缺省时使用基准设置'),
        click.option('--out', 'out_dir', type=click.Path(file_okay=False), default='out',
                     show_default=True, help='输出目录'),
        click.option('--fva-mode', type=click.Choice(['fca', 'signed']), default=None,
                     help='FVA 敞口口径，覆盖配置文件'),
        click.option('--grid-step', type=float, default=None,
                     help='敞口网格步长（年），覆盖配置文件'),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def _load_config(config_path: Optional[str], fva_mode: Optional[str], grid_step: Optional[float]) -> ConfigManager:
    if config_path is not None and not Path(config_path).exists():
        raise ConfigError(f"配置文件不存在: {config_path}")
    manager = ConfigManager(config_path)
    manager.apply_overrides(fva_mode=fva_mode, grid_step=grid_step)
    return manager


def _generator(cfg: RunConfig) -> ReportGenerator:
    output = config.get_config('output')
    return ReportGenerator(
        decimal_places=cfg.output.decimal_places if cfg.output.decimal_places is not None else output['decimal_places'],
        pct_decimal_places=(cfg.output.pct_decimal_places if cfg.output.pct_decimal_places is not None
                            else output['pct_decimal_places']),
        na_rep=output['na_rep'],
    )


def _write_sidecars(manager: ConfigManager, out_dir: Path, command: str, started: float,
                    monitor: PerformanceMonitor, **metadata):
    """写出解析后的配置与运行元数据"""
    manager.save_resolved(out_dir / 'resolved_config.yaml')
    ReportGenerator.write_run_metadata(out_dir, {
        'command': command,
        'config_path': str(manager.config_path) if manager.config_path else None,
        'generated_at': time.strftime('%Y-%m-%dT%H:%M:%S'),
        'wall_time_s': round(time.perf_counter() - started, 3),
        'performance': monitor.get_performance_report(),
        **metadata,
    })


@click.group(cls=CcvaGroup)
@click.version_option(__version__, prog_name='ccva')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='日志级别，默认取 LOG_LEVEL')
def cli(log_level: Optional[str]):
    """气候变化估值调整（CCVA）计算工具"""
    setup_logging(log_level.upper() if log_level else None)


@cli.command()
@_run_options
def report(config_path, out_dir, fva_mode, grid_step):
    """计算单个情景下各互换的 CCVA 报告"""
    started = time.perf_counter()
    manager = _load_config(config_path, fva_mode, grid_step)
    cfg = manager.get_config()
    out_dir = Path(out_dir)

    quote = cfg.quote()
    market = cfg.market_environment()
    p_curve = cfg.p_curve()
    specs = cfg.swap_specs()
    logger.info(f"计算 CCVA 报告: 形态 {cfg.sigmoid.shape}, 互换期限 {list(cfg.swap.maturities)}")

    monitor = PerformanceMonitor()
    timed_report = performance_timer(monitor)(ccva_report)
    reports = []
    for spec in specs:
        try:
            reports.append(timed_report(quote, p_curve, spec, market))
        except CcvaError as e:
            raise ComputeError(str(e), cell=f"report[swap_maturity={spec.maturity:g}]") from e

    _generator(cfg).write_report(cfg, specs, reports, out_dir)
    _write_sidecars(manager, out_dir, 'report', started, monitor, shape=cfg.sigmoid.shape)
    return EXIT_OK


@cli.command()
@click.argument('family', type=click.Choice(get_available_families()))
@_run_options
def grid(family, config_path, out_dir, fva_mode, grid_step):
    """运行一组情景网格（slowest-uniform / midpoint / transition）"""
    started = time.perf_counter()
    manager = _load_config(config_path, fva_mode, grid_step)
    cfg = manager.get_config()
    out_dir = Path(out_dir)

    compute = config.get_config('compute')
    monitor = PerformanceMonitor()
    scenario_family = create_family(family, cfg)
    runner = GridManager(
        max_workers=compute['max_workers'],
        show_progress=compute['show_progress'] and sys.stderr.isatty(),
        monitor=monitor,
    )
    result = runner.run(scenario_family)

    pivots = scenario_family.pivot_metrics if cfg.output.pivots else ()
    _generator(cfg).write_grid(result, out_dir, pivots)
    _write_sidecars(manager, out_dir, 'grid', started, monitor,
                    **scenario_family.get_family_info(), max_workers=runner.max_workers,
                    failed_cells=[result.cell_name(c) for c in result.failed])

    if result.failed:
        first = result.failed[0]
        raise ComputeError(first.error, cell=result.cell_name(first))
    return EXIT_OK


@cli.command()
@_run_options
def curves(config_path, out_dir, fva_mode, grid_step):
    """输出强度、生存概率与 CDS 平价利差作图数据"""
    started = time.perf_counter()
    manager = _load_config(config_path, fva_mode, grid_step)
    cfg = manager.get_config()
    out_dir = Path(out_dir)

    monitor = PerformanceMonitor()
    performance_timer(monitor)(_generator(cfg).write_curves)(cfg, out_dir)
    _write_sidecars(manager, out_dir, 'curves', started, monitor)
    return EXIT_OK


def main(argv=None) -> int:
    return cli.main(args=argv, prog_name='ccva', standalone_mode=False)


if __name__ == '__main__':
    sys.exit(main())
