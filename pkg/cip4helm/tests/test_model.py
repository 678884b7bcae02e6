import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cip4helm.utils.dispersion import optimal_gamma
from cip4helm.utils.errors import ConfigError, UnsupportedRegimeError
from cip4helm.utils.model import RhsSpec, UniformMesh, make_problem, mesh_nodes, require_real_gamma


def test_make_problem_records_mesh_wave_number():
    problem = make_problem(10.0, 10, optimal_gamma(1.0))
    assert problem.t == 1.0
    assert problem.h == 0.1
    assert problem.rhs.is_constant_neg_one
    assert problem.include_boundary_penalty


def test_make_problem_standard_fem():
    problem = make_problem(1.0, 2, 0.0)
    assert problem.t == 0.5
    assert problem.gamma == 0j
    assert problem.gamma_is_real


@pytest.mark.parametrize('k, n, gamma', [(0.0, 10, 0.0),
                                         (-1.0, 10, 0.0),
                                         (math.inf, 10, 0.0),
                                         (1.0, 1, 0.0),
                                         (1.0, 2.5, 0.0),
                                         (1.0, True, 0.0),
                                         (1.0, 10, complex(math.nan, 0.0)),
                                         (1.0, 10, complex(0.0, math.inf)),
                                         (1.0, 10, 'gamma')])
def test_make_problem_rejects_invalid_input(k, n, gamma):
    with pytest.raises(ConfigError):
        make_problem(k, n, gamma)


@given(st.integers(min_value=1, max_value=2000))
def test_mesh_nodes_span_unit_interval(n):
    nodes = mesh_nodes(n)
    assert len(nodes) == n + 1
    assert nodes[0] == 0.0
    assert nodes[-1] == 1.0
    assert np.all(np.diff(nodes) > 0)
    np.testing.assert_allclose(np.diff(nodes), 1.0 / n, rtol=1e-12)


@settings(max_examples=50)
@given(st.floats(min_value=0.1, max_value=1000.0), st.integers(min_value=2, max_value=5000))
def test_t_is_computed_once(k, n):
    problem = make_problem(k, n, -0.1j)
    assert problem.t == k / n
    assert problem.with_gamma(0.0).t == problem.t


def test_mesh_is_immutable():
    mesh = UniformMesh(4)
    with pytest.raises(ValueError):
        mesh.nodes[0] = 1.0
    assert mesh.element(1) == (0.0, 0.25)
    with pytest.raises(IndexError):
        mesh.element(5)


def test_without_boundary_penalty_keeps_the_rest():
    problem = make_problem(3.0, 6, 0.05)
    stripped = problem.without_boundary_penalty()
    assert not stripped.include_boundary_penalty
    assert (stripped.k, stripped.n, stripped.gamma, stripped.t) == (problem.k, problem.n, problem.gamma, problem.t)


def test_real_gamma_is_enforced():
    assert require_real_gamma(complex(-0.08, 1e-15)) == -0.08
    with pytest.raises(UnsupportedRegimeError):
        require_real_gamma(-0.1j)
    with pytest.raises(UnsupportedRegimeError):
        make_problem(10.0, 10, -0.1j).real_gamma


def test_rhs_from_expression():
    rhs = RhsSpec.from_expression('sin(3*x) + 2j*x')
    x = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(rhs(x), np.sin(3 * x) + 2j * x)
    assert RhsSpec.from_expression('-1').is_constant_neg_one
    assert RhsSpec.from_expression('neg-one').is_constant_neg_one
    np.testing.assert_array_equal(RhsSpec.constant_neg_one()(x), -np.ones(5))
    # Constant expressions broadcast to the shape of x
    assert RhsSpec.from_expression('2.0')(x).shape == x.shape


@pytest.mark.parametrize('expression', ['sin(', 'unknown(x)', '__import__("os")'])
def test_rhs_rejects_bad_expressions(expression):
    with pytest.raises(ConfigError):
        RhsSpec.from_expression(expression)
