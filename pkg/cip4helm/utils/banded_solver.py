"""Direct solver for the complex pentadiagonal system L_h U = h F.

LU with partial pivoting from LAPACK (zgbtrf/zgbtrs through scipy). Row interchanges create fill-in,
so the factor band holds kl = 2 sub diagonals and kl + ku = 4 super diagonals.
"""
from dataclasses import dataclass
import logging

import numpy as np
from scipy.linalg import get_lapack_funcs

from cip4helm.utils.assembly import BANDWIDTH
from cip4helm.utils.errors import SingularMatrixError

logger = logging.getLogger(__name__)

# Pivots below this modulus count as exact zeros
PIVOT_TOL = 1e-300


@dataclass(frozen=True)
class BandedFactorization:
    """LAPACK band LU: U in rows 0..kl+ku of lu, multipliers of L below, ipiv 0-based"""
    lu: np.ndarray
    ipiv: np.ndarray
    n: int
    kl: int = BANDWIDTH
    ku: int = BANDWIDTH

    def reconstruct(self):
        """Multiply the factors back together, A = P_1 L_1 ... P_n L_n U, as a dense matrix"""
        n, kl, ku = self.n, self.kl, self.ku
        upper = np.zeros((n, n), dtype=complex)
        for offset in range(0, kl + ku + 1):
            idx = np.arange(0, n - offset)
            upper[idx, idx + offset] = self.lu[kl + ku - offset, idx + offset]

        matrix = upper
        for j in range(n - 1, -1, -1):
            for i in range(j + 1, min(n, j + kl + 1)):
                matrix[i, :] += self.lu[kl + ku + i - j, j] * matrix[j, :]
            p = self.ipiv[j]
            if p != j:
                matrix[[j, p], :] = matrix[[p, j], :]
        return matrix


def factor(matrix):
    """Banded LU factorization with row partial pivoting.

    :param matrix: Pentadiagonal matrix
    :type matrix: BandedMatrix
    :raises SingularMatrixError: a pivot is (numerically) zero
    :rtype: BandedFactorization
    """
    if matrix.n < 1:
        raise ValueError("Cannot factor an empty matrix")
    kl = ku = BANDWIDTH

    # Room for kl extra super diagonals of fill
    ab = np.zeros((2 * kl + ku + 1, matrix.n), dtype=complex)
    ab[kl:, :] = matrix.band

    gbtrf, = get_lapack_funcs(('gbtrf',), (ab,))
    lu, ipiv, info = gbtrf(ab, kl, ku)
    if info < 0:
        raise ValueError(f"Illegal value in argument {-info} of gbtrf")
    if info > 0:
        raise SingularMatrixError(f"Matrix is singular at row index {info - 1}", pivot_index=info - 1)

    small = np.flatnonzero(np.abs(lu[kl + ku, :]) < PIVOT_TOL)
    if small.size:
        raise SingularMatrixError(f"Zero pivot at row index {small[0]}", pivot_index=int(small[0]))

    logger.debug("Factored banded matrix of order %d", matrix.n)
    return BandedFactorization(lu=lu, ipiv=np.asarray(ipiv), n=matrix.n, kl=kl, ku=ku)


def solve(fact, rhs):
    """Solve with a factorization, rhs may be a vector or a matrix of columns.

    :raises ValueError: length of rhs does not match the order
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape[0] != fact.n:
        raise ValueError(f"Right hand side of length {rhs.shape[0]} does not match order {fact.n}")

    gbtrs, = get_lapack_funcs(('gbtrs',), (fact.lu,))
    x, info = gbtrs(fact.lu, fact.kl, fact.ku, rhs, fact.ipiv)
    if info != 0:
        raise ValueError(f"Illegal value in argument {-info} of gbtrs")
    return x


def inverse_column(fact, m):
    """Column m (1-based) of the inverse matrix"""
    if not 1 <= m <= fact.n:
        raise IndexError(f"Column {m} outside 1..{fact.n}")
    unit = np.zeros(fact.n, dtype=complex)
    unit[m - 1] = 1.0
    return solve(fact, unit)


def solve_system(matrix, rhs):
    """Factor and solve in one go"""
    return solve(factor(matrix), rhs)


def residual_bound_holds(matrix, x, rhs, rtol=1e-10):
    """||A x - b||_inf <= rtol (||A||_inf ||x||_inf + ||b||_inf)"""
    residual = np.max(np.abs(matrix.matvec(x) - rhs))
    scale = matrix.norm_inf() * np.max(np.abs(x)) + np.max(np.abs(rhs))
    return residual <= rtol * scale
