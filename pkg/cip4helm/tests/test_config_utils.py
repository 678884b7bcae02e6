import configparser
import math
import os

import pytest

from cip4helm.utils import config_utils
from cip4helm.utils.config_utils import (GAMMA_OPTIMAL, load_run_config, n_from_constraint, parse_constraint,
                                         parse_gamma_spec, parse_k_values)
from cip4helm.utils.errors import ConfigError

RECIPE_DIR = os.path.join(os.path.dirname(__file__), '..', '..', 'data', 'config_examples')


@pytest.mark.parametrize('text, expected', [('gamma_o', GAMMA_OPTIMAL),
                                            ('-1/12', complex(-1 / 12)),
                                            ('-0.1j', -0.1j),
                                            ('0.05-0.1i', 0.05 - 0.1j),
                                            (' 0 ', 0j)])
def test_parse_gamma_spec(text, expected):
    assert parse_gamma_spec(text) == expected


@pytest.mark.parametrize('text', ['', 'abc', '1/0', 'nan', 'inf'])
def test_parse_gamma_spec_rejects(text):
    with pytest.raises(ConfigError):
        parse_gamma_spec(text)


def test_parse_k_values():
    assert parse_k_values('100') == (100.0,)
    assert parse_k_values('10,20, 50') == (10.0, 20.0, 50.0)
    values = parse_k_values('1..1000', points=4)
    assert values == pytest.approx((1.0, 10.0, 100.0, 1000.0))
    assert parse_k_values('1..4', points=4, spacing='lin') == pytest.approx((1.0, 2.0, 3.0, 4.0))


@pytest.mark.parametrize('text', ['0', '-5', 'ten', '1..x'])
def test_parse_k_values_rejects(text):
    with pytest.raises(ConfigError):
        parse_k_values(text)


def test_constraints():
    assert parse_constraint('kh=1') == ('kh', 1.0)
    assert parse_constraint('k3h2 = 0.5') == ('k3h2', 0.5)
    assert parse_constraint('') is None
    assert n_from_constraint(('kh', 1.0), 100.0) == 100
    assert n_from_constraint(('k3h2', 1.0), 100.0) == 1000
    assert n_from_constraint(('kh', 1.0), 1.0) == 2
    with pytest.raises(ConfigError):
        parse_constraint('N=k')
    with pytest.raises(ConfigError):
        parse_constraint('kh=-1')


def test_defaults():
    run_config = load_run_config()
    assert run_config.command == 'solve'
    assert run_config.k_values == (10.0,)
    assert run_config.gamma_spec == GAMMA_OPTIMAL
    assert run_config.include_boundary_penalty
    assert run_config.out is None
    assert len(run_config.t_values) == 400
    assert run_config.t_values[-1] == pytest.approx(4.0)


def test_constraint_and_element_count_are_exclusive():
    with pytest.raises(ConfigError):
        load_run_config(overrides={'Problem': {'n': '10'}, 'Sweep': {'constraint': 'kh=1'}})


def test_dof_scan_fills_element_counts():
    run_config = load_run_config(overrides={'General': {'command': 'sweep'},
                                            'Problem': {'k': '100', 'gamma': '-1/12'},
                                            'Sweep': {'dof_scan': 'True', 'n_min': '10', 'n_max': '1000',
                                                      'points': '40'}})
    assert run_config.n_values[0] == 10
    assert run_config.n_values[-1] == 1000
    assert list(run_config.n_values) == sorted(set(run_config.n_values))


@pytest.mark.parametrize('section, key, value', [('General', 'command', 'plot'),
                                                 ('General', 'format', 'xlsx'),
                                                 ('General', 'jobs', '0'),
                                                 ('General', 'jobs', 'many'),
                                                 ('Problem', 'boundary_penalty', 'maybe'),
                                                 ('Problem', 'rhs', 'sin('),
                                                 ('Sweep', 'spacing', 'cubic'),
                                                 ('Dispersion', 't_max', '-1')])
def test_invalid_settings(section, key, value):
    overrides = {section: {key: value}}
    if key == 'spacing':
        overrides['Problem'] = {'k': '1..10'}
    with pytest.raises(ConfigError):
        load_run_config(overrides=overrides)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_run_config('does/not/exist.ini')


@pytest.mark.parametrize('recipe', sorted(os.listdir(RECIPE_DIR)))
def test_recipes_load(recipe):
    run_config = load_run_config(os.path.join(RECIPE_DIR, recipe))
    assert run_config.command in ('solve', 'dispersion', 'sweep', 'verify')


def test_resolved_config_round_trip(tmp_path):
    run_config = load_run_config(os.path.join(RECIPE_DIR, 'sweep_k3h2_imaginary_gamma.ini'),
                                 {'General': {'out': str(tmp_path / 'sweep.csv')}})
    path = str(tmp_path / 'resolved.ini')
    config_utils.write_resolved_config(run_config, path)
    reloaded = load_run_config(path)
    assert reloaded.k_values == run_config.k_values
    assert reloaded.gamma_spec == run_config.gamma_spec
    assert reloaded.constraint == run_config.constraint
    assert reloaded.t_values == pytest.approx(run_config.t_values)


def test_customize_config_creates_and_updates(tmp_path):
    path = str(tmp_path / 'nested' / 'config.ini')
    config_utils.customize_config(path, {'Problem': {'k': 20}})
    config_utils.customize_config(path, {'Problem': {'n': 40}, 'General': {'jobs': 2}})
    config = configparser.ConfigParser()
    config.read(path)
    assert config['Problem']['k'] == '20'
    assert config['Problem']['n'] == '40'
    assert config['General']['jobs'] == '2'


def test_format_gamma_spec():
    assert config_utils.format_gamma_spec(GAMMA_OPTIMAL) == GAMMA_OPTIMAL
    assert parse_gamma_spec(config_utils.format_gamma_spec(-0.1j)) == -0.1j
    assert parse_gamma_spec(config_utils.format_gamma_spec(complex(-1 / 12))) == complex(-1 / 12)
    assert math.isclose(config_utils.resolve_gamma(GAMMA_OPTIMAL, 1.0).real, -0.0859, abs_tol=1e-4)
