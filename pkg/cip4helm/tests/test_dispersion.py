import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cip4helm.utils import dispersion
from cip4helm.utils.errors import ConfigError, DispersionError, UnsupportedRegimeError

T_GRID = np.round(np.arange(1, 11) / 10.0, 1)
GAMMA_GRID = [1 / 6, -1 / 6, 1 / 12, -1 / 12, 0.05, -0.05]

gammas = st.floats(min_value=-1 / 6, max_value=1 / 6)
mesh_wave_numbers = st.floats(min_value=1e-3, max_value=1.0)


def test_standard_fem_root():
    roots = dispersion.dispersion_roots(1.0, 0.0)
    assert roots.cos_minus == pytest.approx(4 / 7, abs=1e-15)
    assert roots.cos_plus is None
    assert roots.propagating


def test_evanescent_root_for_small_t():
    roots = dispersion.dispersion_roots(1e-6, -1 / 12)
    assert roots.cos_plus == pytest.approx(-5.0, rel=1e-9)


@pytest.mark.parametrize('t', T_GRID)
@pytest.mark.parametrize('gamma', GAMMA_GRID)
def test_vieta_relations(t, gamma):
    roots = dispersion.dispersion_roots(t, gamma)
    total, product = dispersion.root_sum_and_product(t, gamma)
    assert roots.cos_minus + roots.cos_plus == pytest.approx(total, rel=1e-12)
    assert roots.cos_minus * roots.cos_plus == pytest.approx(product, rel=1e-12)
    assert abs(roots.cos_minus) <= 1.0 <= abs(roots.cos_plus)


@given(mesh_wave_numbers, gammas)
def test_cos_minus_is_close_to_cos_t(t, gamma):
    roots = dispersion.dispersion_roots(t, gamma)
    assert abs(roots.cos_minus - 1.0 + t ** 2 / 2.0) <= t ** 4 / 6.0 + 1e-15
    assert 0.0 < roots.t_h_minus < math.pi / 2


def test_taylor_expansion_is_sixth_order():
    worst = 0.0
    for t in T_GRID:
        for gamma in GAMMA_GRID + [0.0]:
            cos_minus = dispersion.dispersion_roots(t, gamma).cos_minus
            worst = max(worst, abs(cos_minus - dispersion.taylor_cos_minus(t, gamma)) / t ** 6)
    assert worst < 1.0


def test_no_real_roots():
    with pytest.raises(DispersionError):
        dispersion.dispersion_roots(1.0, -1.0)


def test_complex_gamma_is_rejected():
    with pytest.raises(UnsupportedRegimeError):
        dispersion.dispersion_roots(0.5, -0.1j)


@pytest.mark.parametrize('t', [0.0, -1.0, math.nan])
def test_t_must_be_positive(t):
    with pytest.raises(ConfigError):
        dispersion.dispersion_roots(t, 0.0)
    with pytest.raises(ConfigError):
        dispersion.optimal_gamma(t)


def test_optimal_gamma_limit():
    assert dispersion.optimal_gamma(1e-3) == pytest.approx(-1 / 12, abs=1e-8)


def test_optimal_gamma_removes_phase_error():
    gamma_o = dispersion.optimal_gamma(1.0)
    assert dispersion.dispersion_roots(1.0, gamma_o).cos_minus == pytest.approx(math.cos(1.0), abs=1e-14)


def test_optimal_gamma_matches_printed_formula():
    t = np.linspace(0.2, 1.0, 9)
    printed = (6 * np.cos(t) - 6 + t ** 2 * np.cos(t) + 2 * t ** 2) / (12 * (1 - np.cos(t)) ** 2)
    np.testing.assert_allclose(dispersion.optimal_gamma(t), printed, rtol=1e-8)


def test_optimal_gamma_stays_in_analysis_range():
    gamma_o = dispersion.optimal_gamma(np.linspace(1e-3, 1.0, 1000))
    assert np.all(np.abs(gamma_o) <= 1 / 6)


@pytest.mark.parametrize('gamma, expected', [(-1 / 12, math.sqrt(8.0)),
                                             (0.0, math.sqrt(12.0)),
                                             (-1 / 4, 0.0)])
def test_cutoff_frequency(gamma, expected):
    assert abs(dispersion.cutoff_frequency(gamma) - expected) <= 1e-14


def test_no_cutoff_below_minus_quarter():
    with pytest.raises(UnsupportedRegimeError):
        dispersion.cutoff_frequency(-0.3)


def test_past_the_cutoff():
    roots = dispersion.dispersion_roots(3.0, -1 / 12)
    assert not roots.propagating
    assert math.isnan(roots.t_h_minus)
    with pytest.raises(DispersionError):
        dispersion.discrete_wavenumber(30.0, 0.1, -1 / 12)


def test_phase_error_vanishes_for_optimal_gamma():
    for k in (10.0, 100.0, 1000.0):
        for n in (k, 2 * k, 7 * k):
            h = 1.0 / n
            assert dispersion.phase_error(k, h, dispersion.optimal_gamma(k * h)) <= 1e-12 * k


def _orders(gamma, k=10.0, levels=6):
    errors = np.array([dispersion.phase_error(k, 1.0 / (k * 2 ** level), gamma) for level in range(levels)])
    return np.log2(errors[:-1] / errors[1:])


def test_phase_error_is_second_order_for_standard_fem():
    assert _orders(0.0)[-1] == pytest.approx(2.0, abs=0.05)


def test_phase_error_is_fourth_order_for_minus_one_twelfth():
    assert _orders(-1 / 12)[-1] == pytest.approx(4.0, abs=0.1)


def test_phase_error_near_optimal_gamma():
    constants = []
    for k in (10.0, 100.0, 1000.0):
        h = 1.0 / k
        gamma = dispersion.optimal_gamma(k * h) + 1.0 / (k ** 2 * h)
        constants.append(dispersion.phase_error(k, h, gamma) / (k * h))
    assert max(constants) < 1.0


@pytest.mark.parametrize('k, gamma, expected', [(100.0, 0.0, math.sqrt(1e6 / 24)),
                                                (100.0, -1 / 12, (1e10 / 720) ** 0.25)])
def test_critical_dof(k, gamma, expected):
    assert dispersion.critical_dof(k, gamma) == pytest.approx(expected)


def test_critical_dof_values():
    assert dispersion.critical_dof(100.0, 0.0) == pytest.approx(204.12, abs=0.01)
    assert dispersion.critical_dof(100.0, -1 / 12) == pytest.approx(61.04, abs=0.01)
    assert dispersion.resolution_dof(10.0) == 3


def test_phase_error_curve():
    table = dispersion.phase_error_curve(np.linspace(0.05, 4.0, 80), -1 / 12)
    assert list(table.columns) == ['t', 'gamma', 'cos_t', 'cos_minus', 'cos_plus', 't_h_minus',
                                   'propagating', 'cutoff']
    np.testing.assert_array_equal(table['propagating'], table['t'] < math.sqrt(8.0))
    assert table['cutoff'].iloc[0] == pytest.approx(math.sqrt(8.0))


def test_phase_error_curve_for_optimal_gamma():
    t = np.linspace(0.01, 1.0, 50)
    table = dispersion.phase_error_curve(t, 'gamma_o')
    np.testing.assert_allclose(table['cos_minus'], np.cos(t), atol=1e-12)
    assert table['cutoff'].isna().all()


def test_phase_error_curve_keeps_rows_without_real_roots():
    table = dispersion.phase_error_curve([0.5, 2.5], -0.2)
    assert len(table) == 2
    assert np.isnan(table['cos_minus'].iloc[1])
