"""End to end sweeps over large wave numbers. Run with -m slow, or deselect with -m 'not slow'."""
import pathlib

import numpy as np
import pytest

from cip4helm.scripts import sweep
from cip4helm.utils.config_utils import load_run_config, n_from_constraint
from cip4helm.utils.dispersion import critical_dof, optimal_gamma

pytestmark = pytest.mark.slow

RECIPE_DIR = pathlib.Path(__file__).resolve().parents[2] / 'data' / 'config_examples'


def kh_one_ratio(k, gamma):
    n = n_from_constraint(('kh', 1.0), k)
    gamma = optimal_gamma(k / n) if gamma == 'gamma_o' else gamma
    return sweep.sweep_point(k, n, gamma, 'neg-one', True)['ratio']


def test_optimal_penalty_has_no_pollution():
    ratios = np.array([kh_one_ratio(k, 'gamma_o') for k in (50, 100, 200, 500, 1000)])
    assert np.all((ratios >= 1.0) & (ratios <= 3.0))
    assert ratios.max() / ratios.min() < 1.5


# Growth of the error ratio between k = 10 and k = 1000 under kh = 1 with gamma = -0.08
POLLUTION_GROWTH = 4.0

# k ||u_h||_{1,h} / ||f|| for f = -1, whose exact solution has |u|_1 = O(1/k)
STABILITY_CONSTANT = 5.0


def test_fixed_penalty_pollutes():
    recipe = RECIPE_DIR / 'sweep_kh_pollution.ini'
    run_config = load_run_config(str(recipe), {'General': {'jobs': '1', 'out': ''}})
    pairs = sweep.sweep_points(run_config)
    k_values = np.array([k for k, _ in pairs])
    ratios = np.array([sweep.sweep_point(k, n, -0.08, 'neg-one', True)['ratio'] for k, n in pairs])

    # Steady growth over the resolved part of the grid
    tail = ratios[k_values >= 50.0]
    assert np.all(tail >= 0.85 * np.maximum.accumulate(tail))
    assert tail[-1] > 2.0 * tail[0]

    assert kh_one_ratio(1000.0, -0.08) >= POLLUTION_GROWTH * kh_one_ratio(10.0, -0.08)


def test_imaginary_penalty_error_is_bounded():
    k_values = np.geomspace(1.0, 1000.0, 20)
    errors = []
    for k in k_values:
        row = sweep.sweep_point(float(k), n_from_constraint(('k3h2', 1.0), k), -0.1j, 'neg-one', True)
        errors.append(row['h1_semi_error'] / row['norm_f'])
    errors = np.array(errors)

    assert np.all(errors <= 10.0)
    large = errors[k_values >= 100.0]
    assert large[-1] <= large[0]


def test_dof_scan_knee_near_critical_dof():
    run_config = load_run_config(overrides={'General': {'command': 'sweep'},
                                            'Problem': {'k': '100', 'gamma': '-1/12'},
                                            'Sweep': {'dof_scan': 'True', 'n_min': '10', 'n_max': '1000',
                                                      'points': '40'}})
    table, knee = sweep.run(run_config)

    predicted = critical_dof(100.0, -1.0 / 12.0)
    assert predicted == pytest.approx((100.0 ** 5 / 720.0) ** 0.25)
    assert knee is not None
    assert predicted / 2.0 <= knee <= 2.0 * predicted
    assert table['e_c'].iloc[-1] < sweep.KNEE_THRESHOLD


def _seminorm_of_exact(row):
    """|u|_1 recovered from the absolute and relative H1 errors"""
    return row['h1_semi_error'] / row['e_c']


@pytest.mark.parametrize('t', [0.5, 1.0])
@pytest.mark.parametrize('gamma', [-1.0 / 12.0, -0.05, 0.0, 0.05, 1.0 / 12.0])
def test_discrete_solution_is_stable(t, gamma):
    for k in (10.0, 100.0, 1000.0):
        n = int(round(k / t))
        row = sweep.sweep_point(k, n, gamma, 'neg-one', True)
        stability = row['norm_1h_solution'] / row['norm_f']
        assert stability <= 1.0
        assert k * stability <= STABILITY_CONSTANT


@pytest.mark.parametrize('t', [0.5, 1.0])
def test_optimal_penalty_solution_tracks_exact_seminorm(t):
    relative = []
    for k in (10.0, 100.0, 1000.0):
        n = int(round(k / t))
        row = sweep.sweep_point(k, n, optimal_gamma(k / n), 'neg-one', True)
        relative.append(row['norm_1h_solution'] / _seminorm_of_exact(row))
    relative = np.array(relative)
    assert np.all((relative >= 0.7) & (relative <= 1.3))


@pytest.mark.parametrize('t', [0.5, 1.0])
def test_optimal_penalty_error_is_first_order_in_kh(t):
    rates = []
    for k in (50.0, 100.0, 200.0, 500.0, 1000.0):
        n = int(round(k / t))
        row = sweep.sweep_point(k, n, optimal_gamma(k / n), 'neg-one', True)
        rates.append(row['norm_1h_error'] / (t * _seminorm_of_exact(row)))
    rates = np.array(rates)
    assert np.all(rates <= 2.0)
    assert rates.max() / rates.min() < 1.5
