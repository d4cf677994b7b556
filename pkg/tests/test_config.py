import json
import logging
import os
from datetime import date

import pytest

from ccva.core.exposure import FvaMode
from ccva.exceptions import ConfigError
from ccva.utils.config import DEFAULT_CONFIG, ConfigManager, RunConfig
from shared.config import Config


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


def test_defaults_are_baseline_setting():
    cfg = ConfigManager().get_config()
    assert cfg.as_of == date(2020, 1, 29)
    assert cfg.market.discount_rate == 0.02
    assert cfg.market.fva_mode is FvaMode.FCA
    assert cfg.cds.spread == 0.01
    assert cfg.quote().flat_hazard == pytest.approx(0.01 / 0.6)
    assert [s.maturity for s in cfg.swap_specs()] == [20.0, 30.0, 40.0, 50.0]
    assert DEFAULT_CONFIG['as_of'] == '2020-01-29'
    assert DEFAULT_CONFIG['family']['transition']['widths'] == [1.0, 5.0, 10.0]


def test_yaml_config_is_loaded(tmp_path):
    path = _write(tmp_path, 'run.yaml', """\
as_of: 2021-06-30
cds:
  spread: 0.02
sigmoid:
  shape: transient
  m: 30
""")
    cfg = ConfigManager(path).get_config()
    assert cfg.as_of == date(2021, 6, 30)
    assert cfg.cds.spread == 0.02
    assert cfg.cds.recovery == 0.4
    assert cfg.sigmoid_params().transient
    assert cfg.sigmoid_params().h_start == pytest.approx(0.02 / 0.6)


def test_json_config_is_loaded(tmp_path):
    path = _write(tmp_path, 'run.json', json.dumps({'market': {'fva_mode': 'signed'}}))
    assert ConfigManager(path).get_config().market.fva_mode is FvaMode.SIGNED


def test_empty_yaml_gives_defaults(tmp_path):
    path = _write(tmp_path, 'empty.yaml', '')
    assert ConfigManager(path).get_config() == RunConfig()


def test_invalid_field_reports_path_and_line(tmp_path):
    path = _write(tmp_path, 'bad.yaml', """\
market:
  discount_rate: 0.02
  normal_vol: -0.1
""")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.field == 'market.normal_vol'
    assert excinfo.value.line == 3
    assert '第3行' in str(excinfo.value)


def test_unknown_key_is_rejected(tmp_path):
    path = _write(tmp_path, 'bad.yaml', """\
cds:
  maturity: 10
  spreed: 0.01
""")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.field == 'cds.spreed'
    assert excinfo.value.line == 3


def test_rate_out_of_range_is_rejected(tmp_path):
    path = _write(tmp_path, 'bad.yaml', "market:\n  discount_rate: 1.5\n")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.field == 'market.discount_rate'


def test_unordered_axis_is_rejected(tmp_path):
    path = _write(tmp_path, 'bad.yaml', """\
family:
  midpoint:
    widths: [10, 5]
""")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.field == 'family.midpoint.widths'
    assert excinfo.value.line == 3


def test_cross_field_check_names_field(tmp_path):
    path = _write(tmp_path, 'bad.yaml', """\
sigmoid:
  w: 20
  m: 15
""")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.field == 'sigmoid.m'
    assert excinfo.value.line == 3


def test_h_max_below_quote_level_is_rejected():
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager.validate_config({'family': {'transition': {'h_max': 0.01}}})
    assert excinfo.value.field == 'family.transition.h_max'


def test_yaml_syntax_error_has_line(tmp_path):
    path = _write(tmp_path, 'bad.yaml', "market:\n  discount_rate: [0.02\n")
    with pytest.raises(ConfigError) as excinfo:
        ConfigManager(path)
    assert excinfo.value.line is not None


def test_unsupported_suffix(tmp_path):
    path = _write(tmp_path, 'run.txt', 'market: {}')
    with pytest.raises(ConfigError):
        ConfigManager(path)


def test_overrides_are_validated():
    manager = ConfigManager()
    cfg = manager.apply_overrides(fva_mode='signed', grid_step=0.5)
    assert cfg.market.fva_mode is FvaMode.SIGNED
    assert cfg.market.grid_step == 0.5
    with pytest.raises(ConfigError) as excinfo:
        manager.apply_overrides(grid_step=0.0)
    assert excinfo.value.field == 'market.grid_step'


def test_resolved_config_round_trip(tmp_path):
    path = _write(tmp_path, 'run.yaml', """\
cds:
  spread: 0.015
sigmoid:
  shape: slowest_uniform
  h_start: 0.03
""")
    manager = ConfigManager(path)
    manager.apply_overrides(grid_step=0.5)
    resolved = manager.save_resolved(tmp_path / 'out' / 'resolved_config.yaml')

    reloaded = ConfigManager(resolved).get_config()
    assert reloaded == manager.get_config()
    assert reloaded.sigmoid.h_start == 0.03
    assert reloaded.market.grid_step == 0.5


def test_p_curve_shapes():
    cfg = RunConfig()
    quote_level = cfg.quote().flat_hazard
    for shape in ('endpoint', 'transient', 'slowest_uniform'):
        curve = cfg.p_curve(shape)
        assert curve.hazard_at(5.0) == pytest.approx(quote_level)
    assert cfg.p_curve('slowest_uniform').hazard_at(80.0) == pytest.approx(0.25)
    assert cfg.p_curve('transient').hazard_at(80.0) == pytest.approx(quote_level)


def test_slowest_uniform_honours_explicit_h_start():
    cfg = ConfigManager.validate_config({'sigmoid': {'shape': 'slowest_uniform', 'h_start': 0.03}})
    curve = cfg.p_curve()
    assert curve.hazard_left(10.0) == pytest.approx(0.01 / 0.6)
    assert curve.hazard_at(10.0) == pytest.approx(0.03)
    assert curve.hazard_at(45.0) == pytest.approx(0.03 + 35 * (0.25 - 0.03) / 70)
    assert curve.hazard_at(80.0) == pytest.approx(0.25)

    default = RunConfig().p_curve('slowest_uniform')
    assert default.hazard_at(10.0) == pytest.approx(0.01 / 0.6)
    assert curve.dominates(default, 80.0)


def test_invalid_env_integer_falls_back_to_default(monkeypatch, caplog):
    monkeypatch.setenv('CCVA_MAX_WORKERS', 'abc')
    monkeypatch.setenv('CCVA_DECIMAL_PLACES', '-3')
    monkeypatch.setenv('LOG_BACKUP_COUNT', '7')
    with caplog.at_level(logging.WARNING, logger='shared.config'):
        settings = Config()
    assert settings.get_config('compute')['max_workers'] == min(8, os.cpu_count() or 1)
    assert settings.get_config('output')['decimal_places'] == 6
    assert settings.get_config('logging')['backup_count'] == 7
    assert 'CCVA_MAX_WORKERS' in caplog.text
    assert 'CCVA_DECIMAL_PLACES' in caplog.text
