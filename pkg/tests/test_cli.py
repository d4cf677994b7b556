import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli, main
from ccva import __version__
from shared.config import config


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(cli, ['--log-level', 'WARNING', *args])


def _read(path):
    return pd.read_csv(path, dtype=str, keep_default_na=False)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


def test_report_writes_outputs(runner, tmp_path):
    out = tmp_path / 'out'
    result = _invoke(runner, 'report', '--out', str(out))
    assert result.exit_code == 0, result.output

    frame = _read(out / 'report.csv')
    assert list(frame.columns) == [
        'as_of', 'swap_maturity', 'fva_mode',
        'cva_mp', 'fva_mp', 'cva_cc', 'fva_cc', 'cd_cva', 'cd_fva', 'ccva',
        'cd_cva_pct', 'cd_fva_pct', 'ccva_pct',
    ]
    assert frame['swap_maturity'].tolist() == ['20', '30', '40', '50']
    assert set(frame['as_of']) == {'2020-01-29'}
    assert (out / 'resolved_config.yaml').exists()

    metadata = json.loads((out / 'run_metadata.json').read_text(encoding='utf-8'))
    assert metadata['version'] == __version__
    assert metadata['command'] == 'report'


def test_report_output_is_byte_identical(runner, tmp_path):
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert _invoke(runner, 'report', '--out', str(first)).exit_code == 0
    assert _invoke(runner, 'report', '--out', str(second)).exit_code == 0
    assert (first / 'report.csv').read_bytes() == (second / 'report.csv').read_bytes()


def test_resolved_config_reproduces_report(runner, tmp_path):
    config_path = _write(tmp_path, 'run.yaml', """\
cds:
  spread: 0.012
sigmoid:
  shape: transient
  m: 35
  w: 10
""")
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert _invoke(runner, 'report', '--config', str(config_path), '--grid-step', '0.5',
                   '--out', str(first)).exit_code == 0
    assert _invoke(runner, 'report', '--config', str(first / 'resolved_config.yaml'),
                   '--out', str(second)).exit_code == 0
    assert (first / 'report.csv').read_bytes() == (second / 'report.csv').read_bytes()


def test_identical_curves_report_zero_ccva(runner, tmp_path):
    config_path = _write(tmp_path, 'flat.yaml', """\
cds:
  spread: 0.01
  recovery: 0.5
sigmoid:
  shape: slowest_uniform
  h_max: 0.02
""")
    out = tmp_path / 'out'
    result = _invoke(runner, 'report', '--config', str(config_path), '--out', str(out))
    assert result.exit_code == 0, result.output
    frame = _read(out / 'report.csv')
    assert set(frame['ccva']) == {'0.000000'}
    assert set(frame['ccva_pct']) == {'0.0'}


def test_signed_fva_percentages_are_na(runner, tmp_path):
    out = tmp_path / 'out'
    result = _invoke(runner, 'report', '--fva-mode', 'signed', '--out', str(out))
    assert result.exit_code == 0, result.output
    frame = _read(out / 'report.csv')
    assert set(frame['fva_mode']) == {'signed'}
    assert set(frame['fva_mp']) == {'0.000000'}
    assert set(frame['cd_fva_pct']) == {'NA'}


def test_missing_config_exits_with_config_error(runner, tmp_path):
    result = _invoke(runner, 'report', '--config', str(tmp_path / 'nope.yaml'), '--out', str(tmp_path))
    assert result.exit_code == 1
    assert '配置文件不存在' in result.output


def test_invalid_config_names_field(runner, tmp_path):
    config_path = _write(tmp_path, 'bad.yaml', "market:\n  normal_vol: -0.1\n")
    result = _invoke(runner, 'report', '--config', str(config_path), '--out', str(tmp_path / 'out'))
    assert result.exit_code == 1
    assert 'market.normal_vol' in result.output
    assert not (tmp_path / 'out' / 'report.csv').exists()


def test_invalid_override_exits_with_config_error(runner, tmp_path):
    result = _invoke(runner, 'report', '--grid-step', '0', '--out', str(tmp_path))
    assert result.exit_code == 1


def test_usage_errors_exit_with_one(runner, tmp_path):
    assert _invoke(runner, 'grid', 'parallel-shift', '--out', str(tmp_path)).exit_code == 1
    assert _invoke(runner, 'report', '--fva-mode', 'gross').exit_code == 1
    assert _invoke(runner, 'frobnicate').exit_code == 1


def test_version(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_grid_writes_long_table_and_pivots(runner, tmp_path, monkeypatch):
    config_path = _write(tmp_path, 'grid.yaml', """\
family:
  slowest_uniform:
    widths: [20, 70]
    irs_maturities: [20, 30]
""")
    monkeypatch.setitem(config.COMPUTE_CONFIG, 'max_workers', 1)
    serial = tmp_path / 'serial'
    result = _invoke(runner, 'grid', 'slowest-uniform', '--config', str(config_path), '--out', str(serial))
    assert result.exit_code == 0, result.output

    frame = _read(serial / 'grid_slowest_uniform.csv')
    assert len(frame) == 4
    assert set(frame['status']) == {'ok'}
    assert frame['cds_slope_bps'].tolist() == ['125.00', '125.00', '35.71', '35.71']

    pivot = _read(serial / 'grid_slowest_uniform_ccva_pct.csv')
    assert list(pivot.columns) == ['width', 'irs=20', 'irs=30']
    assert pivot['width'].tolist() == ['20', '70']

    monkeypatch.setitem(config.COMPUTE_CONFIG, 'max_workers', 4)
    parallel = tmp_path / 'parallel'
    assert _invoke(runner, 'grid', 'slowest-uniform', '--config', str(config_path),
                   '--out', str(parallel)).exit_code == 0
    for name in ('grid_slowest_uniform.csv', 'grid_slowest_uniform_ccva_pct.csv'):
        assert (serial / name).read_bytes() == (parallel / name).read_bytes()


def test_grid_with_failed_cells_exits_with_compute_error(runner, tmp_path):
    config_path = _write(tmp_path, 'origin.yaml', """\
family:
  midpoint:
    widths: [10, 70]
    irs_maturities: [20]
    midpoint_anchor: origin
""")
    out = tmp_path / 'out'
    result = _invoke(runner, 'grid', 'midpoint', '--config', str(config_path), '--out', str(out))
    assert result.exit_code == 2
    assert 'midpoint[width=70, irs=20]' in result.output

    frame = _read(out / 'grid_midpoint.csv')
    assert frame['status'].tolist() == ['ok', 'failed']
    assert frame['ccva'].tolist()[1] == 'NA'
    metadata = json.loads((out / 'run_metadata.json').read_text(encoding='utf-8'))
    assert metadata['failed_cells'] == ['midpoint[width=70, irs=20]']
    assert metadata["family"] == "midpoint"
    assert metadata["rows"] == [10.0, 70.0]


def test_transition_grid_pivots_survival_change(runner, tmp_path):
    config_path = _write(tmp_path, 'transition.yaml', """\
family:
  transition:
    midpoints: [25, 55]
    widths: [1, 10]
""")
    out = tmp_path / 'out'
    result = _invoke(runner, 'grid', 'transition', '--config', str(config_path), '--out', str(out))
    assert result.exit_code == 0, result.output
    pivot = _read(out / 'grid_transition_survival_change_pct.csv')
    assert list(pivot.columns) == ['width', 'midpoint=25', 'midpoint=55']


def test_curves_outputs(runner, tmp_path):
    out = tmp_path / 'out'
    result = _invoke(runner, 'curves', '--out', str(out))
    assert result.exit_code == 0, result.output

    table = pd.read_csv(out / 'curves_table.csv')
    row = table[table['maturity'] == 20].iloc[0]
    assert row['survival_pct_flat'] == pytest.approx(71.65, abs=0.01)
    assert row['survival_pct_slowest_uniform'] == pytest.approx(60.65, abs=0.01)
    assert row['cds_bps_flat'] == pytest.approx(100.0)

    curves = pd.read_csv(out / 'curves.csv')
    assert curves['t'].iloc[0] == 0.0
    assert curves['t'].iloc[-1] == 80.0
    assert (curves['survival_flat'] >= curves['survival_slowest_uniform'] - 1e-6).all()


def test_main_returns_exit_code(tmp_path):
    assert main(['--log-level', 'WARNING', 'curves', '--out', str(tmp_path / 'out')]) == 0
    assert main(['report', '--config', str(tmp_path / 'missing.yaml')]) == 1
