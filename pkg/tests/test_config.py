import pytest

from clarkson_mcleod_tools.config import CliConfig, Config, load_config_file


def test_defaults():
    config = CliConfig()
    assert (config.x_start, config.x_end) == (Config.X_START, Config.X_END)
    assert (config.rtol, config.atol) == (Config.RTOL, Config.ATOL)
    assert config.output_format == 'tsv'
    assert config.output_path is None


def test_flags_override_file_values():
    flags = {'alpha': None, 'kappa': 2.0, 'rtol': None, 'command': 'solve', 'verbose': False}
    config = CliConfig.merge(flags, {'alpha': '0.25', 'kappa': '1', 'rtol': '1e-9'})
    assert config.alpha == 0.25
    assert config.kappa == 2.0
    assert config.rtol == 1e-9


def test_unknown_file_key_is_rejected():
    with pytest.raises(ValueError, match='Unknown config key'):
        CliConfig.merge({}, {'kapa': '1'})


def test_unknown_flags_are_ignored():
    config = CliConfig.merge({'sweep': [0.1, 0.2], 'grid_step': 0.05})
    assert config == CliConfig()


def test_bad_output_format():
    with pytest.raises(ValueError, match='output format'):
        CliConfig.merge({'output_format': 'xml'})
    with pytest.raises(ValueError):
        CliConfig.merge({}, {'output_format': 'csv'})


def test_non_numeric_file_value():
    with pytest.raises(ValueError):
        CliConfig.merge({}, {'kappa': 'one'})


def test_load_config_file(tmp_path):
    path = tmp_path / 'params.cfg'
    path.write_text('# PIV run\n\nalpha = 0.25   # just off the hypothesis line\nx-end=-10\n'
                    'output_path = out/run.tsv\n', encoding='utf-8')
    values = load_config_file(str(path))
    assert values == {'alpha': '0.25', 'x_end': '-10', 'output_path': 'out/run.tsv'}
    config = CliConfig.merge({}, values)
    assert config.x_end == -10.0
    assert config.output_path == 'out/run.tsv'


def test_load_config_file_requires_pairs(tmp_path):
    path = tmp_path / 'broken.cfg'
    path.write_text('alpha 0.25\n', encoding='utf-8')
    with pytest.raises(ValueError, match='broken.cfg:1'):
        load_config_file(str(path))
