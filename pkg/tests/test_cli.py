import json
import logging
import math

import pytest

from clarkson_mcleod_tools.cli import EXIT_INVALID, EXIT_OK, main, validation_grid
from clarkson_mcleod_tools.config import Config, log_level_from_env
from clarkson_mcleod_tools.core.errors import ParameterError

GOLDEN_B = -math.log(4.0 * math.pi ** 2 - 4.0 * math.pi) / (2.0 * math.pi)


def run_cli(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    out, err = capsys.readouterr()
    return exc.value.code, out, err


def tsv_rows(text):
    """Data rows of the first stanza, keyed by the '#' header."""
    stanza = text.split('\n\n')[0].strip().splitlines()
    header = stanza[0].lstrip('#').split('\t')
    return [dict(zip(header, line.split('\t'))) for line in stanza[1:]]


def test_classify_singular(capsys):
    code, out, _ = run_cli(['classify', '--alpha', '0', '--kappa', '1'], capsys)
    assert code == EXIT_OK
    assert out.startswith('#alpha\tkappa\tkappa_star')
    (row,) = tsv_rows(out)
    assert row['regime'] == 'singular'
    assert float(row['b']) == pytest.approx(GOLDEN_B, abs=1e-12)
    assert float(row['kappa_star']) == pytest.approx(1.0 / math.pi, rel=1e-14)


def test_classify_bounded_json(capsys):
    code, out, _ = run_cli(['classify', '--alpha', '0', '--kappa', '0.1', '--json'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc['regime'] == 'bounded-oscillatory'
    assert 'b' not in doc and 'psi' not in doc


def test_classify_sweep(capsys):
    code, out, _ = run_cli(['classify', '--alpha', '0', '--json', '--sweep', '0.1', '1', '-0.5'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc['alpha'] == 0.0
    assert [r['kappa'] for r in doc['results']] == [0.1, 1.0, -0.5]
    assert [r['regime'] for r in doc['results']] == ['bounded-oscillatory', 'singular', 'singular']


def test_classify_rejects_half_integer_alpha(capsys):
    code, out, err = run_cli(['classify', '--alpha', '0.5', '--kappa', '1'], capsys)
    assert code == EXIT_INVALID
    assert out == ''
    assert 'hypothesis' in err


def test_solve_zero_amplitude(capsys):
    code, out, _ = run_cli(['solve', '--alpha', '0', '--kappa', '0', '--x-end', '-2'], capsys)
    assert code == EXIT_OK
    rows = tsv_rows(out)
    assert float(rows[0]['x']) == Config.X_START
    assert float(rows[-1]['x']) == -2.0
    assert all(float(r['q']) == 0.0 and float(r['qp']) == 0.0 for r in rows)
    assert out.rstrip('\n').endswith('#x_pole\tresidue_sign\tslope\tmethod\tn\tbranch')


def test_solve_json_has_poles(capsys):
    code, out, _ = run_cli(['solve', '--alpha', '0', '--kappa', '1', '--x-end', '-8', '--json'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc['x_end'] == -8.0
    assert len(doc['poles']) >= 5
    assert all(p['method'] == 'ode' for p in doc['poles'])
    signs = [p['residue_sign'] for p in doc['poles']]
    assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_poles_expansion(capsys):
    code, out, _ = run_cli(['poles', '--alpha', '0', '--kappa', '1', '--method', 'expansion'], capsys)
    assert code == EXIT_OK
    rows = tsv_rows(out)
    assert len(rows) == 16
    assert {r['method'] for r in rows} == {'expansion'}
    assert [(int(r['n']), r['branch']) for r in rows[:2]] == [(5, 'plus'), (5, 'minus')]


def test_poles_implicit_json(capsys):
    code, out, _ = run_cli(['poles', '--alpha', '0', '--kappa', '1', '--method', 'implicit', '--n', '5', '5',
                            '--json'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    plus, minus = doc['poles']
    assert plus['x_pole'] == pytest.approx(-7.5726, abs=1e-4)
    assert minus['x_pole'] == pytest.approx(-7.0859, abs=1e-4)
    assert (plus['residue_sign'], minus['residue_sign']) == (-1, 1)


def test_poles_outside_singular_regime(capsys):
    code, _, err = run_cli(['poles', '--alpha', '0', '--kappa', '0.1'], capsys)
    assert code == EXIT_INVALID
    assert '|rho|' in err


def test_poles_bad_range(capsys):
    code, _, _ = run_cli(['poles', '--alpha', '0', '--kappa', '1', '--n', '7', '5'], capsys)
    assert code == EXIT_INVALID


def test_validate_outside_singular_regime(capsys):
    code, out, _ = run_cli(['validate', '--alpha', '0', '--kappa', '0.1'], capsys)
    assert code == EXIT_INVALID
    assert out == ''


def test_validate_golden_parameters(capsys):
    code, out, _ = run_cli(['validate', '--alpha', '0', '--kappa', '1', '--json'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc['max_scaled_residual'] <= Config.RESIDUAL_BOUND
    assert len(doc['checkpoints']) == 301
    assert doc['residue_audit']['passed']


def test_validate_quarter_alpha(capsys):
    code, out, _ = run_cli(['validate', '--alpha', '0.25', '--kappa', '1'], capsys)
    assert code == EXIT_OK
    rows = tsv_rows(out)
    assert len(rows) == 301
    scaled = [float(r['scaled_residual']) for r in rows if r['excluded'] == '0']
    assert scaled and max(scaled) <= Config.RESIDUAL_BOUND


def test_validation_grid():
    grid = validation_grid(-12.0, 0.02)
    assert len(grid) == 301
    assert grid[0] == -12.0 and grid[-1] == -6.0
    with pytest.raises(ParameterError):
        validation_grid(-5.0, 0.02)
    with pytest.raises(ParameterError):
        validation_grid(-12.0, 0.0)


def test_pcf(capsys):
    code, out, _ = run_cli(['pcf', '--nu', '0', '--z', '2', '--json'], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc['d'] == pytest.approx(math.exp(-1.0), rel=1e-13)
    assert doc['d_prime'] == pytest.approx(-math.exp(-1.0), rel=1e-11)


def test_pcf_negative_argument(capsys):
    code, out, _ = run_cli(['pcf', '--nu', '0', '--z', '-1'], capsys)
    assert code == EXIT_INVALID
    assert out == ''


def test_output_file(tmp_path, capsys):
    target = tmp_path / 'nested' / 'pcf.tsv'
    code, out, _ = run_cli(['pcf', '--nu', '0', '--z', '0', '-o', str(target)], capsys)
    assert code == EXIT_OK
    assert out == ''
    lines = target.read_text(encoding='utf-8').splitlines()
    assert lines[0] == '#nu\tz\td\td_prime'
    assert float(lines[1].split('\t')[2]) == pytest.approx(1.0, rel=1e-12)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / 'run.cfg'
    cfg.write_text('# golden amplitude\nalpha = 0\nkappa = 0.1\noutput-format = json\n', encoding='utf-8')

    code, out, _ = run_cli(['--config', str(cfg), 'classify'], capsys)
    assert code == EXIT_OK
    assert json.loads(out)['regime'] == 'bounded-oscillatory'

    code, out, _ = run_cli(['--config', str(cfg), 'classify', '--kappa', '1'], capsys)
    assert code == EXIT_OK
    assert json.loads(out)['regime'] == 'singular'


def test_config_file_with_unknown_key(tmp_path, capsys):
    cfg = tmp_path / 'bad.cfg'
    cfg.write_text('kapa = 1\n', encoding='utf-8')
    code, out, err = run_cli(['--config', str(cfg), 'classify'], capsys)
    assert code == EXIT_INVALID
    assert out == ''
    assert 'kapa' in err


def test_missing_config_file(tmp_path, capsys):
    code, _, _ = run_cli(['--config', str(tmp_path / 'absent.cfg'), 'classify'], capsys)
    assert code == EXIT_INVALID


def test_log_level_from_environment(monkeypatch, capsys):
    monkeypatch.setenv(Config.LOG_ENV, 'debug')
    assert log_level_from_env() == 'DEBUG'
    monkeypatch.setenv(Config.LOG_ENV, 'nonsense')
    assert log_level_from_env() == 'WARNING'
    monkeypatch.delenv(Config.LOG_ENV)
    assert log_level_from_env() == 'WARNING'

    monkeypatch.setenv(Config.LOG_ENV, 'error')
    run_cli(['pcf', '--nu', '0', '--z', '1'], capsys)
    assert logging.getLogger().level == logging.ERROR
    run_cli(['-v', 'pcf', '--nu', '0', '--z', '1'], capsys)
    assert logging.getLogger().level == logging.INFO


def test_version(capsys):
    code, out, _ = run_cli(['--version'], capsys)
    assert code == 0
    assert Config.VERSION in out


def test_missing_subcommand(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 2
    assert 'usage' in err
