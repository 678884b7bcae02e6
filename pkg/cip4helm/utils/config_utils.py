from collections import namedtuple
import configparser
import math
import os

import numpy as np

from cip4helm.utils.dispersion import optimal_gamma
from cip4helm.utils.errors import ConfigError
from cip4helm.utils.model import RhsSpec

# The gamma-spec resolved per run from t = k/n
GAMMA_OPTIMAL = 'gamma_o'

CONSTRAINTS = ('kh', 'k3h2')

RunConfig = namedtuple('RunConfig', ['command', 'k_values', 'n_values', 'constraint', 'gamma_spec',
                                     'rhs', 'out', 'fmt', 'jobs', 'seed', 'include_boundary_penalty',
                                     'dof_scan', 'gamma_list', 't_values', 'gamma_o_curve',
                                     'perturbation'])

# Defaults of every key the scripts read, sections as in the INI recipes
DEFAULTS = {'General': {'command': 'solve',
                        'out': '',
                        'format': 'csv',
                        'jobs': '1',
                        'seed': '0'},
            'Problem': {'k': '10',
                        'n': '',
                        'gamma': GAMMA_OPTIMAL,
                        'rhs': 'neg-one',
                        'boundary_penalty': 'True'},
            'Sweep': {'constraint': '',
                      'points': '20',
                      'spacing': 'log',
                      'dof_scan': 'False',
                      'n_min': '2',
                      'n_max': ''},
            'Dispersion': {'gamma': 'gamma_o, -1/12, 0',
                           't_max': '4',
                           'points': '400',
                           'gamma_o_curve': 'False'}}


def customize_config(config_path, dict_custom):
    """Allows changing dictionary-specified entries of the config to custom values.
    The file is created if it does not exist.

    :param config_path: path to config file for read and write
    :type config_path: str
    :param dict_custom: dictionary of custom options.
    :type dict_custom: nested dictionary. Dictionary of sections which are dictionaries
    """
    config = configparser.ConfigParser()
    config.read(config_path)

    # dict_custom like config is a two-level nested dictionary
    for key_section, section_dict in dict_custom.items():
        for key_sub_section, value_custom in section_dict.items():
            try:
                config.set(key_section, key_sub_section, str(value_custom))
            except configparser.NoSectionError:
                config.add_section(key_section)
                config.set(key_section, key_sub_section, str(value_custom))

    directory = os.path.dirname(config_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(config_path, 'w') as configfile:
        config.write(configfile)


def read_config(config_path=None):
    """Defaults overlaid with the INI file, if given"""
    config = configparser.ConfigParser(inline_comment_prefixes=('#',))
    config.read_dict(DEFAULTS)
    if config_path is not None:
        if not os.path.exists(config_path):
            raise ConfigError(f"Configuration file not found: {config_path}")
        config.read(config_path)
    return config


def parse_gamma_spec(spec):
    """Parse a penalty parameter: 'gamma_o', a fraction '-1/12', a real or complex literal '-0.1j'

    :return: GAMMA_OPTIMAL or a complex number
    """
    text = str(spec).strip().replace(' ', '')
    if text == GAMMA_OPTIMAL:
        return GAMMA_OPTIMAL
    try:
        if '/' in text:
            numerator, denominator = text.split('/')
            value = complex(float(numerator) / float(denominator))
        else:
            value = complex(text.replace('i', 'j'))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Cannot parse penalty parameter '{spec}'") from e
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ConfigError(f"Penalty parameter must be finite, got '{spec}'")
    return value


def resolve_gamma(gamma_spec, t):
    """The number behind a gamma-spec for mesh wave number t"""
    if gamma_spec == GAMMA_OPTIMAL:
        return complex(optimal_gamma(t))
    return complex(gamma_spec)


def format_gamma_spec(gamma_spec):
    if gamma_spec == GAMMA_OPTIMAL:
        return GAMMA_OPTIMAL
    value = complex(gamma_spec)
    return repr(value.real) if value.imag == 0 else repr(value).strip('()')


def parse_k_values(text, points=20, spacing='log'):
    """Wave numbers from '100', '10,20,50' or a range '1..1000' sampled with points and spacing"""
    text = str(text).strip()
    if spacing not in ('log', 'lin'):
        raise ConfigError(f"Unknown spacing '{spacing}', use log or lin")
    try:
        if '..' in text:
            low, high = (float(v) for v in text.split('..'))
            space = np.geomspace if spacing == 'log' else np.linspace
            values = space(low, high, int(points))
        else:
            values = np.array([float(v) for v in text.split(',') if v.strip()])
    except ValueError as e:
        raise ConfigError(f"Cannot parse wave numbers '{text}'") from e
    if values.size == 0 or np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise ConfigError(f"Wave numbers must be positive, got '{text}'")
    return tuple(float(v) for v in values)


def parse_int_list(text):
    text = str(text).strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(',') if v.strip())
    except ValueError as e:
        raise ConfigError(f"Cannot parse element counts '{text}'") from e


def parse_constraint(text):
    """'kh=c' or 'k3h2=c' to (kind, c), empty text to None"""
    text = str(text).strip().replace(' ', '')
    if not text:
        return None
    kind, _, value = text.partition('=')
    if kind not in CONSTRAINTS:
        raise ConfigError(f"Unknown constraint '{text}', use kh=c or k3h2=c")
    try:
        c = float(value)
    except ValueError as e:
        raise ConfigError(f"Cannot parse constraint value in '{text}'") from e
    if not (math.isfinite(c) and c > 0):
        raise ConfigError(f"Constraint value must be positive, got '{text}'")
    return kind, c


def n_from_constraint(constraint, k):
    """Smallest element count with kh <= c or k^3 h^2 <= c (at least 2)"""
    kind, c = constraint
    if kind == 'kh':
        n = math.ceil(k / c - 1e-9)
    else:
        n = math.ceil(math.sqrt(k ** 3 / c) - 1e-9)
    return max(2, int(n))


def _getboolean(config, section, key):
    try:
        return config.getboolean(section, key)
    except ValueError as e:
        raise ConfigError(f"[{section}] {key} must be a boolean") from e


def _getint(config, section, key):
    try:
        return config.getint(section, key)
    except ValueError as e:
        raise ConfigError(f"[{section}] {key} must be an integer") from e


def load_run_config(config_path=None, overrides=None):
    """Read the INI recipe, apply overrides and validate.

    :param config_path: INI file, defaults to the built-in defaults only
    :type config_path: str, optional
    :param overrides: Nested dictionary {section: {key: value}}, None values are ignored
    :type overrides: dict, optional
    :raises ConfigError: invalid or contradicting settings
    :rtype: RunConfig
    """
    config = read_config(config_path)
    for section, values in (overrides or {}).items():
        for key, value in values.items():
            if value is not None:
                config.set(section, key, str(value))

    general, problem, sweep, dispersion = (config['General'], config['Problem'],
                                           config['Sweep'], config['Dispersion'])

    command = general['command'].strip()
    if command not in ('solve', 'dispersion', 'sweep', 'verify'):
        raise ConfigError(f"Unknown command '{command}'")
    fmt = general['format'].strip()
    if fmt not in ('csv', 'tsv'):
        raise ConfigError(f"Unknown format '{fmt}', use csv or tsv")
    jobs = _getint(config, 'General', 'jobs')
    if jobs < 1:
        raise ConfigError(f"jobs must be at least 1, got {jobs}")

    constraint = parse_constraint(sweep['constraint'])
    n_values = parse_int_list(problem['n'])
    if constraint is not None and n_values:
        raise ConfigError("A constraint and an explicit element count are mutually exclusive")

    dof_scan = _getboolean(config, 'Sweep', 'dof_scan')
    if dof_scan:
        n_min = _getint(config, 'Sweep', 'n_min')
        n_max_text = sweep['n_max'].strip()
        k_first = parse_k_values(problem['k'])[0]
        n_max = int(n_max_text) if n_max_text else max(4 * n_min, int(math.ceil(2.0 * k_first)))
        if n_min < 2 or n_max < n_min:
            raise ConfigError(f"Invalid DOF scan range {n_min}..{n_max}")
        if constraint is not None:
            raise ConfigError("A DOF scan and a constraint are mutually exclusive")
        if not n_values:
            n_values = tuple(int(v) for v in np.unique(np.round(
                np.geomspace(n_min, n_max, _getint(config, 'Sweep', 'points')))))

    k_values = parse_k_values(problem['k'], _getint(config, 'Sweep', 'points'), sweep['spacing'].strip())

    gamma_list = tuple(parse_gamma_spec(g) for g in dispersion['gamma'].split(',') if g.strip())
    t_max = float(dispersion['t_max'])
    if not t_max > 0:
        raise ConfigError(f"t_max must be positive, got {t_max}")
    n_points = _getint(config, 'Dispersion', 'points')
    t_values = tuple(float(t) for t in np.linspace(t_max / n_points, t_max, n_points))

    rhs_text = problem['rhs'].strip()
    RhsSpec.from_expression(rhs_text)

    perturbation = float(general.get('perturbation', '0') or 0)

    return RunConfig(command=command,
                     k_values=k_values,
                     n_values=n_values,
                     constraint=constraint,
                     gamma_spec=parse_gamma_spec(problem['gamma']),
                     rhs=rhs_text,
                     out=general['out'].strip() or None,
                     fmt=fmt,
                     jobs=jobs,
                     seed=_getint(config, 'General', 'seed'),
                     include_boundary_penalty=_getboolean(config, 'Problem', 'boundary_penalty'),
                     dof_scan=dof_scan,
                     gamma_list=gamma_list,
                     t_values=t_values,
                     gamma_o_curve=_getboolean(config, 'Dispersion', 'gamma_o_curve'),
                     perturbation=perturbation)


def config_as_dict(run_config):
    """Nested dictionary of a RunConfig, in the layout read by load_run_config"""
    constraint = '' if run_config.constraint is None else f"{run_config.constraint[0]}={run_config.constraint[1]!r}"
    return {'General': {'command': run_config.command,
                        'out': run_config.out or '',
                        'format': run_config.fmt,
                        'jobs': run_config.jobs,
                        'seed': run_config.seed},
            'Problem': {'k': ','.join(repr(k) for k in run_config.k_values),
                        'n': ','.join(str(n) for n in run_config.n_values),
                        'gamma': format_gamma_spec(run_config.gamma_spec),
                        'rhs': run_config.rhs,
                        'boundary_penalty': run_config.include_boundary_penalty},
            'Sweep': {'constraint': constraint,
                      'dof_scan': run_config.dof_scan},
            'Dispersion': {'gamma': ', '.join(format_gamma_spec(g) for g in run_config.gamma_list),
                           't_max': repr(run_config.t_values[-1]),
                           'points': len(run_config.t_values),
                           'gamma_o_curve': run_config.gamma_o_curve}}


def write_resolved_config(run_config, config_path):
    """Store the resolved settings next to the outputs, so they can be regenerated"""
    if os.path.exists(config_path):
        os.remove(config_path)
    customize_config(config_path, config_as_dict(run_config))
