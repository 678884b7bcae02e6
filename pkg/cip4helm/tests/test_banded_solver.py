import numpy as np
import pytest

from cip4helm.scripts.verify import random_pentadiagonal
from cip4helm.utils import banded_solver
from cip4helm.utils.assembly import BandedMatrix, assemble_load, assemble_matrix
from cip4helm.utils.errors import SingularMatrixError
from cip4helm.utils.model import make_problem


def test_identity():
    fact = banded_solver.factor(BandedMatrix.from_dense(np.eye(5)))
    rhs = np.arange(5) + 1j
    np.testing.assert_array_equal(banded_solver.solve(fact, rhs), rhs)


def test_order_one():
    fact = banded_solver.factor(BandedMatrix.from_dense(np.array([[4.0 - 2.0j]])))
    np.testing.assert_allclose(banded_solver.inverse_column(fact, 1), [1.0 / (4.0 - 2.0j)])


def test_zero_rhs():
    fact = banded_solver.factor(assemble_matrix(make_problem(10.0, 10, -0.1j)))
    np.testing.assert_array_equal(banded_solver.solve(fact, np.zeros(10)), 0)


@pytest.mark.parametrize('k', [1.0, 5.0, 10.0, 20.0, 31.4])
def test_imaginary_penalty_is_always_solvable(k):
    problem = make_problem(k, 10, -0.1j)
    matrix = assemble_matrix(problem)
    rhs = assemble_load(problem).scaled
    x = banded_solver.solve_system(matrix, rhs)
    assert banded_solver.residual_bound_holds(matrix, x, rhs)


@pytest.mark.parametrize('n', [5, 50, 400])
def test_matches_dense_oracle(rng, n):
    matrix = random_pentadiagonal(rng, n)
    rhs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = banded_solver.solve_system(matrix, rhs)
    reference = np.linalg.solve(matrix.to_dense(), rhs)
    assert np.max(np.abs(x - reference)) <= 1e-11 * np.max(np.abs(reference))


def test_residual_bound_on_random_systems(rng):
    for _ in range(200):
        n = int(rng.integers(1, 60))
        matrix = random_pentadiagonal(rng, n)
        rhs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert banded_solver.residual_bound_holds(matrix, banded_solver.solve_system(matrix, rhs), rhs)


def test_pivoting_on_indefinite_matrix(rng):
    # Zero leading entry forces a row interchange
    dense = np.array([[0.0, 1.0, 2.0, 0.0],
                      [3.0, 1.0, 0.0, 1.0],
                      [1.0, 0.0, 1.0, 1.0],
                      [0.0, 2.0, 1.0, 0.0]], dtype=complex)
    fact = banded_solver.factor(BandedMatrix.from_dense(dense))
    np.testing.assert_allclose(fact.reconstruct(), dense, atol=1e-14)
    rhs = rng.standard_normal(4)
    np.testing.assert_allclose(banded_solver.solve(fact, rhs), np.linalg.solve(dense, rhs), atol=1e-13)


def test_factors_reconstruct_the_matrix():
    matrix = assemble_matrix(make_problem(40.0, 30, -0.08))
    fact = banded_solver.factor(matrix)
    dense = matrix.to_dense()
    assert np.max(np.abs(fact.reconstruct() - dense)) <= 1e-12 * np.max(np.abs(dense))


def test_unit_columns_come_back():
    matrix = assemble_matrix(make_problem(10.0, 12, -0.08))
    fact = banded_solver.factor(matrix)
    for m in range(1, 13):
        unit = np.zeros(12)
        unit[m - 1] = 1.0
        np.testing.assert_allclose(banded_solver.solve(fact, matrix @ unit), unit, atol=1e-11)


def test_inverse_is_complex_symmetric():
    problem = make_problem(20.0, 40, -1 / 12, include_boundary_penalty=False)
    matrix = assemble_matrix(problem)
    fact = banded_solver.factor(matrix)
    G = np.column_stack([banded_solver.inverse_column(fact, m) for m in range(1, 41)])
    np.testing.assert_allclose(matrix.to_dense() @ G, np.eye(40), atol=1e-10)
    assert np.max(np.abs(G - G.T)) <= 1e-10 * np.max(np.abs(G))


def test_singular_matrix():
    dense = np.diag([1.0, 2.0, 0.0, 4.0, 5.0])
    with pytest.raises(SingularMatrixError) as info:
        banded_solver.factor(BandedMatrix.from_dense(dense))
    assert info.value.pivot_index == 2


def test_dimension_mismatch():
    fact = banded_solver.factor(BandedMatrix.from_dense(np.eye(5)))
    with pytest.raises(ValueError):
        banded_solver.solve(fact, np.ones(4))
    with pytest.raises(IndexError):
        banded_solver.inverse_column(fact, 6)
