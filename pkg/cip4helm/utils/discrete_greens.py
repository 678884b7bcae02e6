"""Analytic discrete Green's function G_h = L_h^{-1} for real penalty parameters.

Every column m of G_h is a combination of the four fundamental solutions eta_i^j of the interior
stencil, with coefficients A_m below the diagonal (j < m) and B_m on and above it (j >= m):
    G_h[j, m] = sum_i A_{m,i} eta_i^j   (j < m),      sum_i B_{m,i} eta_i^j   (j >= m).
eta_1 = e^{-i t_h^-}, eta_2 = e^{i t_h^-} are the propagating modes, eta_3 = 1/eta_4 with |eta_4| > 3
the evanescent ones. The analysis is built on L_h without the boundary least squares term.

Coefficients are kept as mantissa * eta_i^(-anchor). The anchors are 0 for the bounded modes and m or
n for the growing ones, so every stored number stays O(1) however large eta_4^n gets.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import linalg

from cip4helm.utils import banded_solver
from cip4helm.utils.assembly import assemble_matrix, stencil_coeffs
from cip4helm.utils.dispersion import dispersion_roots
from cip4helm.utils.errors import OverflowRegimeError, SingularMatrixError, UnsupportedRegimeError
from cip4helm.utils.model import GAMMA_ANALYSIS_BOUND, REAL_GAMMA_TOL, require_real_gamma

logger = logging.getLogger(__name__)

# Smallest element count for which the 8x8 column system is valid for every m
MIN_ELEMENTS = 5

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class FundamentalSystem:
    """Roots eta_1..eta_4 of gamma eta^-2 + R eta^-1 + 2S + R eta + gamma eta^2 = 0"""
    t: float
    gamma: float
    t_h: float
    cos_minus: float
    cos_plus: float
    eta: np.ndarray
    R: float
    S: float

    def powers(self, exponents):
        """eta_i^e for an integer exponent per root, broadcast over leading axes of exponents"""
        exponents = np.asarray(exponents)
        logs = np.array([-1j * self.t_h, 1j * self.t_h,
                         np.log(complex(self.eta[2])), np.log(complex(self.eta[3]))])
        return np.exp(exponents * logs)

    def characteristic_residual(self):
        """Relative residual of the characteristic equation for each root"""
        eta = self.eta
        terms = np.array([self.gamma * eta ** -2, self.R * eta ** -1, 2 * self.S * np.ones(4),
                          self.R * eta, self.gamma * eta ** 2])
        return np.abs(np.sum(terms, axis=0)) / np.sum(np.abs(terms), axis=0)


def fundamental_roots(t, gamma):
    """Compute the fundamental system of the stencil.

    :param t: Mesh wave number, 0 < t <= 1
    :type t: float
    :param gamma: Real penalty parameter, 0 < |gamma| <= 1/6
    :type gamma: float
    :raises UnsupportedRegimeError: outside 0 < |gamma| <= 1/6, t <= 1
    :rtype: FundamentalSystem
    """
    gamma = require_real_gamma(gamma)
    if gamma == 0.0 or abs(gamma) > GAMMA_ANALYSIS_BOUND + REAL_GAMMA_TOL:
        raise UnsupportedRegimeError(f"The fundamental system needs 0 < |gamma| <= 1/6, got {gamma}")
    if not 0.0 < t <= 1.0:
        raise UnsupportedRegimeError(f"The fundamental system needs 0 < t <= 1, got {t}")

    roots = dispersion_roots(t, gamma)
    c = roots.cos_plus
    # Larger root of mu^2 - 2 c mu + 1 = 0, the smaller one is its reciprocal
    eta_4 = c + math.copysign(math.sqrt(c * c - 1.0), c)
    eta = np.array([np.exp(-1j * roots.t_h_minus), np.exp(1j * roots.t_h_minus),
                    1.0 / eta_4, eta_4], dtype=complex)

    coeffs = stencil_coeffs(t, gamma)
    return FundamentalSystem(t=float(t), gamma=gamma, t_h=roots.t_h_minus,
                             cos_minus=roots.cos_minus, cos_plus=c, eta=eta,
                             R=coeffs.R.real, S=coeffs.S.real)


def fundamental_system_for(problem):
    """Fundamental system of a problem assembled without the boundary penalty"""
    if problem.include_boundary_penalty:
        raise UnsupportedRegimeError("The discrete Green's function is built for L_h without "
                                     "the boundary least squares term")
    return fundamental_roots(problem.t, problem.real_gamma)


def _boundary_factors(fs):
    """Prefactors of eta_i^n in a_i and b_i"""
    eta, t, gamma = fs.eta, fs.t, fs.gamma
    inv = 1.0 / eta
    a = inv - 2.0 + eta
    b = 1.0 - t ** 2 / 3.0 - (1.0 + t ** 2 / 6.0) * inv + gamma * (1.0 - inv) ** 2 - 1j * t
    return a, b


def _check_representable(fs, exponents, mantissa=1.0):
    log_size = np.log(np.abs(mantissa) + 1e-300) + np.asarray(exponents) * np.log(np.abs(fs.eta))
    if np.any(log_size > _LOG_FLOAT_MAX):
        raise OverflowRegimeError("Unscaled fundamental-system coefficient exceeds double precision, "
                                  "use the anchored representation")


def boundary_coefficients(fs, n):
    """a_i = (eta_i^-1 - 2 + eta_i) eta_i^n and b_i = (1 - t^2/3 - (1 + t^2/6) eta_i^-1
    + gamma (1 - eta_i^-1)^2 - i t) eta_i^n

    :raises OverflowRegimeError: eta_4^n is not representable
    :return: (a, b), four complex values each
    """
    exponents = np.full(4, n)
    _check_representable(fs, exponents)
    a, b = _boundary_factors(fs)
    scale = fs.powers(exponents)
    return a * scale, b * scale


@dataclass(frozen=True)
class GreensColumn:
    """Coefficients of column m, stored as mantissa * eta_i^(-anchor)"""
    m: int
    n: int
    A_mantissa: np.ndarray
    B_mantissa: np.ndarray
    A_anchor: np.ndarray
    B_anchor: np.ndarray

    def coefficients(self, fs):
        """Unscaled (A_m, B_m)

        :raises OverflowRegimeError: a coefficient is not representable
        """
        _check_representable(fs, -self.A_anchor, self.A_mantissa)
        _check_representable(fs, -self.B_anchor, self.B_mantissa)
        return (self.A_mantissa * fs.powers(-self.A_anchor),
                self.B_mantissa * fs.powers(-self.B_anchor))


def _anchors(m, n):
    return np.array([0, 0, 0, m]), np.array([0, 0, m, n])


def greens_column(fs, m, n):
    """Solve for the coefficients of column m.

    For m >= 2: the four conditions around the diagonal, U_m (B - A) = (-1/gamma, 0, 0, 0), the two
    left boundary conditions on A and the two right boundary conditions (a, b) on B. For m = 1 there
    is no lower part, A = 0 and (V_1 + V_2) B = (-1/gamma, 0, 0, 0).

    :param fs: Fundamental system
    :type fs: FundamentalSystem
    :param m: Column index, 1 <= m <= n
    :type m: int
    :param n: Number of elements, n >= 5
    :type n: int
    :raises SingularMatrixError: the column system is singular
    :rtype: GreensColumn
    """
    if n < MIN_ELEMENTS:
        raise UnsupportedRegimeError(f"The analytic Green's function needs n >= {MIN_ELEMENTS}, got {n}")
    if not 1 <= m <= n:
        raise IndexError(f"Column {m} outside 1..{n}")

    A_anchor, B_anchor = _anchors(m, n)
    a_factor, b_factor = _boundary_factors(fs)
    eta = fs.eta

    # Left boundary rows on the lower part: g_{-1} + g_1 = 0 and g_0 = 0
    left = np.vstack(((1.0 / eta + eta) * fs.powers(-A_anchor), fs.powers(-A_anchor)))
    # Right boundary rows on the upper part
    right = np.vstack((a_factor * fs.powers(n - B_anchor), b_factor * fs.powers(n - B_anchor)))
    z = np.array([-1.0 / fs.gamma, 0.0, 0.0, 0.0], dtype=complex)

    if m == 1:
        # Rows g_{-1} + g_1 and g_0 of the upper part carry the unit load
        upper_left = np.vstack(((1.0 / eta + eta) * fs.powers(-B_anchor), fs.powers(-B_anchor)))
        system = np.vstack((upper_left, right))
        B = _equilibrated_solve(system, z)
        return GreensColumn(m=m, n=n, A_mantissa=np.zeros(4, dtype=complex), B_mantissa=B,
                            A_anchor=A_anchor, B_anchor=B_anchor)

    # Rows j = m-2, m-1, m, m+1 of the jump across the diagonal
    offsets = np.arange(m - 2, m + 2)[:, None]
    U_A = fs.powers(offsets - A_anchor)
    U_B = fs.powers(offsets - B_anchor)

    system = np.zeros((8, 8), dtype=complex)
    system[:4, :4] = -U_A
    system[:4, 4:] = U_B
    system[4:6, :4] = left
    system[6:, 4:] = right
    rhs = np.concatenate((z, np.zeros(4, dtype=complex)))

    solution = _equilibrated_solve(system, rhs)
    return GreensColumn(m=m, n=n, A_mantissa=solution[:4], B_mantissa=solution[4:],
                        A_anchor=A_anchor, B_anchor=B_anchor)


def _equilibrated_solve(system, rhs):
    """Row and column scaling to unit max-norm, then LU with partial pivoting"""
    row_scale = 1.0 / np.max(np.abs(system), axis=1)
    scaled = system * row_scale[:, None]
    col_scale = 1.0 / np.max(np.abs(scaled), axis=0)
    scaled = scaled * col_scale[None, :]

    lu, piv = linalg.lu_factor(scaled, check_finite=True)
    diag = np.abs(np.diag(lu))
    if np.min(diag) <= 1e-14 * np.max(diag):
        raise SingularMatrixError("Green's function column system is singular",
                                  pivot_index=int(np.argmin(diag)))
    y = linalg.lu_solve((lu, piv), rhs * row_scale)
    return y * col_scale


def greens_entry(col, fs, j):
    """G_h[j, m] for 0 <= j <= n, G_h[0, m] = 0"""
    j_arr = np.asarray(j)
    if np.any((j_arr < 0) | (j_arr > col.n)):
        raise IndexError(f"Row index outside 0..{col.n}")
    flat = j_arr.reshape(-1)
    value = np.zeros(flat.shape, dtype=complex)

    # Each part is only evaluated on its own side of the diagonal, where all powers stay bounded
    below = (flat < col.m) & (flat > 0)
    above = flat >= col.m
    if np.any(below):
        jj = flat[below][:, None]
        value[below] = np.sum(col.A_mantissa * fs.powers(jj - col.A_anchor), axis=-1)
    if np.any(above):
        jj = flat[above][:, None]
        value[above] = np.sum(col.B_mantissa * fs.powers(jj - col.B_anchor), axis=-1)

    value = value.reshape(j_arr.shape)
    return complex(value) if value.ndim == 0 else value


def greens_matrix(fs, n):
    """G_h as an (n+1) x n array, row j = 0..n, column m = 1..n (row 0 is zero)"""
    rows = np.arange(n + 1)
    G = np.zeros((n + 1, n), dtype=complex)
    for m in range(1, n + 1):
        G[:, m - 1] = greens_entry(greens_column(fs, m, n), fs, rows)
    logger.debug("Analytic Green's function for n=%d, t=%g, gamma=%g", n, fs.t, fs.gamma)
    return G


def derivative_kernel_entry(fs, n, j, m, column=None):
    """H_h[j, m] = G_h[j, m] - G_h[j-1, m] for 1 <= j, m <= n"""
    if not (1 <= j <= n and 1 <= m <= n):
        raise IndexError(f"Entry ({j}, {m}) outside 1..{n}")
    if column is None:
        column = greens_column(fs, m, n)
    values = greens_entry(column, fs, np.array([j - 1, j]))
    return complex(values[1] - values[0])


def derivative_kernel_matrix(fs, n, G=None):
    """H_h as an n x n array, rows j = 1..n"""
    if G is None:
        G = greens_matrix(fs, n)
    return G[1:, :] - G[:-1, :]


def leading_term(j, m, t_h):
    """cos(j t_h) e^{i m t_h} for j < m and i sin(m t_h) e^{i j t_h} for j >= m"""
    j = np.asarray(j)
    m = np.asarray(m)
    return np.where(j < m,
                    np.cos(j * t_h) * np.exp(1j * m * t_h),
                    1j * np.sin(m * t_h) * np.exp(1j * j * t_h))


def boundary_matrix(fs, n):
    """V = V_1 + V_2 with rows (eta^-1 + eta, 1, a, b)"""
    a, b = boundary_coefficients(fs, n)
    return np.vstack((1.0 / fs.eta + fs.eta, np.ones(4, dtype=complex), a, b))


def determinant_structure(fs, n):
    """det V computed directly and from the factorized form
    [(eta_3 + eta_4) - (eta_1 + eta_2)] [(a_2 - a_1)(b_4 - b_3) - (b_2 - b_1)(a_4 - a_3)]

    :return: (direct, factorized)
    """
    eta = fs.eta
    a, b = boundary_coefficients(fs, n)
    direct = complex(np.linalg.det(boundary_matrix(fs, n)))
    factorized = complex(((eta[2] + eta[3]) - (eta[0] + eta[1]))
                         * ((a[1] - a[0]) * (b[3] - b[2]) - (b[1] - b[0]) * (a[3] - a[2])))
    return direct, factorized


def greens_matrix_for(problem):
    """G_h of a problem. gamma = 0 has no fundamental system, the columns then come from the banded inverse."""
    if problem.gamma == 0:
        n = problem.n
        fact = banded_solver.factor(assemble_matrix(problem))
        G = np.zeros((n + 1, n), dtype=complex)
        for m in range(1, n + 1):
            G[1:, m - 1] = banded_solver.inverse_column(fact, m)
        logger.debug("gamma=0, Green's function from %d banded solves", n)
        return G
    return greens_matrix(fundamental_system_for(problem), problem.n)


def solve_via_greens(problem, load, fs=None, G=None):
    """Nodal values u_{h,j} = h sum_m G_h[j, m] F_m for j = 1..n. gamma = 0 is solved with the banded solver."""
    if G is None and fs is None and problem.gamma == 0:
        return banded_solver.solve_system(assemble_matrix(problem), load.scaled)
    if G is None:
        if fs is None:
            fs = fundamental_system_for(problem)
        G = greens_matrix(fs, problem.n)
    return problem.h * G[1:, :] @ load.values
