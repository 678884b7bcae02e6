"""Assembly of the scaled CIP-FEM system L_h U = h F.

Trial space: continuous piecewise linears on the uniform mesh with u(0) = 0, spanned by the hat
functions phi_1..phi_n. With a_h the CIP sesquilinear form, L_h[i, j] = h * a_h(phi_j, phi_i) and
F_m = (f, phi_m). Indices in docstrings are 1-based like the nodes, numpy arrays are 0-based.
"""
from dataclasses import dataclass
import logging

import numpy as np

from cip4helm.utils.quadrature import DEFAULT_ORDER, element_rule

logger = logging.getLogger(__name__)

# Lower and upper bandwidth of L_h
BANDWIDTH = 2


@dataclass(frozen=True)
class StencilCoeffs:
    """Scalars of the interior stencil (gamma, R, 2S, R, gamma)"""
    t: float
    gamma: complex
    R: complex
    S: complex

    @property
    def interior_row(self):
        return np.array([self.gamma, self.R, 2 * self.S, self.R, self.gamma], dtype=complex)


def stencil_coeffs(t, gamma):
    """R = -1 - 4 gamma - t^2/6 and S = 1 + 3 gamma - t^2/3

    :param t: Mesh wave number t = k h
    :type t: float
    :param gamma: Penalty parameter
    :type gamma: complex
    :rtype: StencilCoeffs
    """
    gamma = complex(gamma)
    R = -1.0 - 4.0 * gamma - t ** 2 / 6.0
    S = 1.0 + 3.0 * gamma - t ** 2 / 3.0
    return StencilCoeffs(t=float(t), gamma=gamma, R=R, S=S)


class BandedMatrix:
    """Square complex matrix with lower and upper bandwidth 2.

    Stored in LAPACK band layout: band[2 + i - j, j] = A[i, j] (0-based), so row 2 of the band is the
    main diagonal, rows 0 and 1 the super diagonals and rows 3 and 4 the sub diagonals.
    """

    def __init__(self, band):
        band = np.asarray(band, dtype=complex)
        if band.ndim != 2 or band.shape[0] != 2 * BANDWIDTH + 1:
            raise ValueError(f"Band storage must have shape (5, n), got {band.shape}")
        self.band = band
        self.n = band.shape[1]

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros((2 * BANDWIDTH + 1, n), dtype=complex))

    @classmethod
    def from_dense(cls, dense, tol=0.0):
        """Compress a dense matrix, entries outside the band must not exceed tol in modulus"""
        dense = np.asarray(dense, dtype=complex)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise ValueError(f"Expected a square matrix, got shape {dense.shape}")
        i, j = np.indices(dense.shape)
        outside = np.abs(i - j) > BANDWIDTH
        if np.any(np.abs(dense[outside]) > tol):
            raise ValueError("Matrix has entries outside the pentadiagonal band")

        matrix = cls.zeros(n)
        for offset in range(-BANDWIDTH, BANDWIDTH + 1):
            if abs(offset) < n:
                matrix.set_diagonal(offset, np.diagonal(dense, offset))
        return matrix

    def _band_slice(self, offset):
        if abs(offset) > BANDWIDTH:
            raise ValueError(f"Offset {offset} outside the band")
        row = BANDWIDTH - offset
        if offset >= 0:
            return row, slice(offset, self.n)
        return row, slice(0, self.n + offset)

    def diagonal(self, offset=0):
        """Copy of the diagonal A[i, i + offset]"""
        row, cols = self._band_slice(offset)
        return self.band[row, cols].copy()

    def set_diagonal(self, offset, values):
        row, cols = self._band_slice(offset)
        self.band[row, cols] = values

    def entry(self, i, j):
        """Entry (i, j) with 1-based indices, zero outside the band"""
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"Entry ({i}, {j}) outside a matrix of order {self.n}")
        if abs(i - j) > BANDWIDTH:
            return 0j
        return complex(self.band[BANDWIDTH + i - j, j - 1])

    def to_dense(self):
        dense = np.zeros((self.n, self.n), dtype=complex)
        for offset in range(-BANDWIDTH, BANDWIDTH + 1):
            if abs(offset) < self.n:
                idx = np.arange(max(0, -offset), min(self.n, self.n - offset))
                dense[idx, idx + offset] = self.diagonal(offset)
        return dense

    def matvec(self, x):
        x = np.asarray(x)
        if x.shape[0] != self.n:
            raise ValueError(f"Vector of length {x.shape[0]} does not match order {self.n}")
        y = np.zeros(x.shape, dtype=complex)
        for offset in range(-BANDWIDTH, BANDWIDTH + 1):
            if abs(offset) >= self.n:
                continue
            d = self.diagonal(offset)
            if offset >= 0:
                y[:self.n - offset] += d * x[offset:]
            else:
                y[-offset:] += d * x[:self.n + offset]
        return y

    def __matmul__(self, x):
        return self.matvec(x)

    def transpose(self):
        transposed = BandedMatrix.zeros(self.n)
        for offset in range(-BANDWIDTH, BANDWIDTH + 1):
            if abs(offset) < self.n:
                transposed.set_diagonal(-offset, self.diagonal(offset))
        return transposed

    @property
    def T(self):
        return self.transpose()

    def norm_inf(self):
        """Maximum absolute row sum"""
        sums = np.zeros(self.n)
        for offset in range(-BANDWIDTH, BANDWIDTH + 1):
            if abs(offset) >= self.n:
                continue
            d = np.abs(self.diagonal(offset))
            if offset >= 0:
                sums[:self.n - offset] += d
            else:
                sums[-offset:] += d
        return float(np.max(sums))

    def __repr__(self):
        return f"BandedMatrix(n={self.n})"


def _boundary_penalty_block(t, gamma):
    """Scaled least squares block of the Robin condition on rows/columns n-1 and n"""
    return np.array([[gamma, -gamma * (1.0 - 1j * t)],
                     [-gamma * (1.0 + 1j * t), gamma * (1.0 + t ** 2)]], dtype=complex)


def assemble_matrix(problem):
    """Assemble L_h in band storage.

    Interior rows carry (gamma, R, 2S, R, gamma). The first and the (n-1)-th diagonal entries are
    2S - gamma, L[n-1, n] = L[n, n-1] = R + 2 gamma and L[n, n] = S - 2 gamma - i t. With the boundary
    penalty switched on, the least squares term of the Robin condition is added to the last 2x2 block.
    For n < 5 these rows overlap and the matrix comes from the element-wise assembly instead.

    :param problem: Problem to discretize
    :type problem: Problem
    :rtype: BandedMatrix
    """
    n, t, gamma = problem.n, problem.t, problem.gamma
    if n < 5:
        logger.debug("n=%d < 5, compressing the element-wise assembly", n)
        return BandedMatrix.from_dense(assemble_dense_by_quadrature(problem))

    c = stencil_coeffs(t, gamma)
    matrix = BandedMatrix.zeros(n)

    main = np.full(n, 2.0 * c.S, dtype=complex)
    main[0] = 2.0 * c.S - gamma
    main[n - 2] = 2.0 * c.S - gamma
    main[n - 1] = c.S - 2.0 * gamma - 1j * t

    first = np.full(n - 1, c.R, dtype=complex)
    first[n - 2] = c.R + 2.0 * gamma

    second = np.full(n - 2, gamma, dtype=complex)

    if problem.include_boundary_penalty:
        block = _boundary_penalty_block(t, gamma)
        main[n - 2] += block[0, 0]
        main[n - 1] += block[1, 1]

    matrix.set_diagonal(0, main)
    matrix.set_diagonal(1, first)
    matrix.set_diagonal(-1, first)
    matrix.set_diagonal(2, second)
    matrix.set_diagonal(-2, second)

    if problem.include_boundary_penalty:
        # Only the corner block breaks complex symmetry
        matrix.band[BANDWIDTH - 1, n - 1] += block[0, 1]
        matrix.band[BANDWIDTH + 1, n - 2] += block[1, 0]

    return matrix


def _element_pieces(problem):
    """Node-indexed (0..n) matrices of every term of a_h(phi_j, phi_i), integrated element by element"""
    n, h, k = problem.n, problem.h, problem.k
    size = n + 1

    stiffness = np.zeros((size, size))
    mass = np.zeros((size, size))
    local_stiffness = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h

    # Linear shape functions are integrated exactly by the 2-point rule
    x_q, w_q = element_rule(problem.mesh.nodes, order=2)
    for e in range(n):
        left, right = problem.mesh.nodes[e], problem.mesh.nodes[e + 1]
        shape = np.vstack(((right - x_q[e]) / h, (x_q[e] - left) / h))
        local_mass = (shape * w_q[e]) @ shape.T
        dofs = [e, e + 1]
        stiffness[np.ix_(dofs, dofs)] += local_stiffness
        mass[np.ix_(dofs, dofs)] += local_mass

    # slopes[e, m] = phi_m' on element e+1
    slopes = np.zeros((n, size))
    slopes[np.arange(n), np.arange(n)] = -1.0 / h
    slopes[np.arange(n), np.arange(1, size)] = 1.0 / h

    # [v']_j = v'(x_j^-) - v'(x_j^+) at the interior nodes j = 1..n-1
    jumps = slopes[:-1] - slopes[1:]
    jump = problem.gamma * h * jumps.T @ jumps

    robin = np.zeros((size, size), dtype=complex)
    robin[n, n] = -1j * k

    # v'(1) - i k v(1) for every basis function
    trace = slopes[-1].astype(complex)
    trace[n] -= 1j * k
    boundary = problem.gamma * h * np.outer(np.conj(trace), trace)

    return {'stiffness': stiffness, 'mass': mass, 'robin': robin, 'jump': jump, 'boundary': boundary}


def _scaled(problem, node_matrix):
    # Drop phi_0 (Dirichlet node) and scale by h
    return problem.h * node_matrix[1:, 1:]


def penalty_matrix(problem):
    """h * J(phi_j, phi_i) as a dense n x n matrix, boundary term included if the problem asks for it"""
    pieces = _element_pieces(problem)
    penalty = pieces['jump'].astype(complex)
    if problem.include_boundary_penalty:
        penalty = penalty + pieces['boundary']
    return _scaled(problem, penalty)


def assemble_dense_by_quadrature(problem):
    """Dense L_h built entry by entry from the sesquilinear form.

    Element mass and stiffness integrals of the hat functions, explicit derivative jumps at the
    interior nodes and the boundary traces at x = 1. Used as the reference for assemble_matrix.

    :rtype: numpy.ndarray
    """
    pieces = _element_pieces(problem)
    form = (pieces['stiffness'] - problem.k ** 2 * pieces['mass'] + pieces['robin'] + pieces['jump'])
    if problem.include_boundary_penalty:
        form = form + pieces['boundary']
    return _scaled(problem, form)


def sesquilinear_form(problem, u, v, dense=None):
    """a_h(u_h, v_h) for coefficient vectors u, v of length n (nodes 1..n)"""
    if dense is None:
        dense = assemble_dense_by_quadrature(problem)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return complex(np.conj(v) @ (dense / problem.h) @ u)


def penalty_form(problem, u, v, dense=None):
    """J(u_h, v_h) for coefficient vectors u, v of length n"""
    if dense is None:
        dense = penalty_matrix(problem)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return complex(np.conj(v) @ (dense / problem.h) @ u)


@dataclass(frozen=True)
class LoadVector:
    """F_m = (f, phi_m) for m = 1..n"""
    values: np.ndarray
    h: float

    @property
    def scaled(self):
        """Right hand side h F of the scaled system"""
        return self.h * self.values


def assemble_load(problem, order=DEFAULT_ORDER):
    """Load vector of the right hand side.

    Exact for f = -1 (F_m = -h, F_n = -h/2), otherwise Gauss-Legendre of the given order per element.

    :rtype: LoadVector
    """
    n, h = problem.n, problem.h
    if problem.rhs.is_constant_neg_one:
        values = np.full(n, -h, dtype=complex)
        values[-1] = -h / 2.0
        return LoadVector(values=values, h=h)

    nodes = problem.mesh.nodes
    x_q, w_q = element_rule(nodes, order)
    f_q = problem.rhs(x_q)
    # Decreasing hat (node e) and increasing hat (node e+1) on element e+1
    falling = np.sum(w_q * f_q * (nodes[1:, None] - x_q) / h, axis=1)
    rising = np.sum(w_q * f_q * (x_q - nodes[:-1, None]) / h, axis=1)

    node_values = np.zeros(n + 1, dtype=complex)
    node_values[:-1] += falling
    node_values[1:] += rising
    return LoadVector(values=node_values[1:], h=h)
