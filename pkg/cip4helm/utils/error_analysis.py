"""Norms, error functionals and the stability identity of the CIP-FEM solution."""
from dataclasses import asdict, dataclass
import logging
import math
from typing import Optional

import numpy as np

from cip4helm.utils import assembly, banded_solver
from cip4helm.utils.errors import UnsupportedRegimeError
from cip4helm.utils.exact_reference import exact_solution
from cip4helm.utils.model import REAL_GAMMA_TOL, UniformMesh
from cip4helm.utils.quadrature import DEFAULT_ORDER, element_rule

logger = logging.getLogger(__name__)

# Below this e_ba the ratio e_c/e_ba is not reported
RATIO_FLOOR = 1e-15


@dataclass(frozen=True)
class DiscreteSolution:
    """Piecewise linear u_h = sum_j U_j phi_j, u_h(0) = 0"""
    values: np.ndarray
    mesh: UniformMesh

    @property
    def nodal(self):
        """u_h(x_j) for j = 0..n"""
        return np.concatenate(([0.0 + 0.0j], np.asarray(self.values, dtype=complex)))

    @property
    def slopes(self):
        """u_h' on K_1..K_n"""
        return np.diff(self.nodal) / self.mesh.h

    @property
    def jumps(self):
        """[u_h']_j = u_h'(x_j^-) - u_h'(x_j^+) at the interior nodes"""
        s = self.slopes
        return s[:-1] - s[1:]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        nodal = self.nodal
        return np.interp(x, self.mesh.nodes, nodal.real) + 1j * np.interp(x, self.mesh.nodes, nodal.imag)


def solve_problem(problem):
    """Assemble and solve L_h U = h F

    :rtype: DiscreteSolution
    """
    matrix = assembly.assemble_matrix(problem)
    load = assembly.assemble_load(problem)
    values = banded_solver.solve(banded_solver.factor(matrix), load.scaled)
    return DiscreteSolution(values=values, mesh=problem.mesh)


def nodal_interpolant(exact, mesh):
    """u_I with u_I(x_j) = u(x_j); its element slopes are the element means of u'"""
    return DiscreteSolution(values=exact.u(mesh.nodes[1:]), mesh=mesh)


def _element_values(exact, mesh, order):
    x, w = element_rule(mesh.nodes, order)
    u, du = exact.evaluate(x)
    return x, w, u, du


def h1_semi_error(exact, uh, order=DEFAULT_ORDER):
    """|u - u_h|_1 by Gauss-Legendre per element"""
    _, w, _, du = _element_values(exact, uh.mesh, order)
    return math.sqrt(float(np.sum(w * np.abs(du - uh.slopes[:, None]) ** 2)))


def l2_error(exact, uh, order=DEFAULT_ORDER):
    """||u - u_h||"""
    x, w, u, _ = _element_values(exact, uh.mesh, order)
    return math.sqrt(float(np.sum(w * np.abs(u - uh(x)) ** 2)))


def h1_seminorm(exact, mesh, order=DEFAULT_ORDER):
    """|u|_1 with the same rule as the errors"""
    _, w, _, du = _element_values(exact, mesh, order)
    return math.sqrt(float(np.sum(w * np.abs(du) ** 2)))


def relative_h1_error(exact, uh, order=DEFAULT_ORDER):
    return h1_semi_error(exact, uh, order) / h1_seminorm(exact, uh.mesh, order)


def rhs_norm(problem, order=DEFAULT_ORDER):
    """||f||, exactly 1 for f = -1"""
    if problem.rhs.is_constant_neg_one:
        return 1.0
    x, w = element_rule(problem.mesh.nodes, order)
    return math.sqrt(float(np.sum(w * np.abs(problem.rhs(x)) ** 2)))


def jump_term(slopes, gamma, h):
    """(sum_j |gamma| h |[v']_j|^2)^(1/2) over the interior nodes"""
    slopes = np.asarray(slopes)
    jumps = slopes[:-1] - slopes[1:]
    return math.sqrt(abs(gamma) * h * float(np.sum(np.abs(jumps) ** 2)))


def norm_1h(slopes, gamma, h=None):
    """||v||_{1,h} of a piecewise linear v from its element slopes.

    :param slopes: v' on K_1..K_n
    :type slopes: numpy.ndarray
    :param gamma: Penalty parameter, only |gamma| enters
    :type gamma: complex
    :param h: Mesh size, defaults to 1/len(slopes)
    :type h: float, optional
    """
    slopes = np.asarray(slopes)
    if h is None:
        h = 1.0 / len(slopes)
    semi = h * float(np.sum(np.abs(slopes) ** 2))
    return math.sqrt(semi + jump_term(slopes, gamma, h) ** 2)


def _require_negative_imaginary(gamma):
    gamma = complex(gamma)
    if abs(gamma.real) > REAL_GAMMA_TOL or not gamma.imag < 0:
        raise UnsupportedRegimeError(f"The stability identity needs gamma = i gamma_Im with gamma_Im < 0, "
                                     f"got {gamma}")


def jstab_identity_residual(problem, v):
    """| |J(v, v)| + k |v(1)|^2 + Im a_h(v, v) | for a coefficient vector v (nodes 1..n).

    Both forms come from the element-wise assembly.
    """
    _require_negative_imaginary(problem.gamma)
    v = np.asarray(v, dtype=complex)
    form = assembly.sesquilinear_form(problem, v, v)
    penalty = assembly.penalty_form(problem, v, v)
    return abs(abs(penalty) + problem.k * abs(v[-1]) ** 2 + form.imag)


def jstab_solution_residual(problem, uh, load=None):
    """| |J(u_h, u_h)| + k |u_h(1)|^2 + Im (f, u_h) | for the discrete solution"""
    _require_negative_imaginary(problem.gamma)
    if load is None:
        load = assembly.assemble_load(problem)
    U = np.asarray(uh.values, dtype=complex)
    penalty = assembly.penalty_form(problem, U, U)
    source = complex(np.conj(U) @ load.values)
    return abs(abs(penalty) + problem.k * abs(U[-1]) ** 2 + source.imag)


def jump_functional(exact, problem, order=DEFAULT_ORDER):
    """J(u, u) of the exact solution, zero for u in H^2.

    The one-sided traces of u' at x_j are carried in from the neighbouring nodes by integrating u''
    over K_j and K_{j+1}.
    """
    mesh = problem.mesh
    h, gamma = problem.h, problem.gamma

    _, du = exact.evaluate(mesh.nodes)
    x, w = element_rule(mesh.nodes, order)
    increments = np.sum(w * exact.d2u(x), axis=1)

    left = du[:-2] + increments[:-1]
    right = du[2:] - increments[1:]
    value = gamma * h * np.sum(np.abs(left - right) ** 2)
    if problem.include_boundary_penalty:
        value += gamma * h * abs(exact.robin_residual()) ** 2
    return complex(value)


@dataclass(frozen=True)
class ErrorReport:
    """Errors of one run; e_ba and e_c are relative H^1 seminorm errors"""
    k: float
    n: int
    gamma: complex
    l2_error: float
    h1_semi_error: float
    jump_term: float
    norm_1h_error: float
    e_ba: float
    e_c: float
    ratio: Optional[float]
    norm_f: float
    norm_1h_solution: float

    def as_dict(self):
        record = asdict(self)
        record['gamma_re'] = self.gamma.real
        record['gamma_im'] = self.gamma.imag
        del record['gamma']
        return record


def full_report(problem, order=DEFAULT_ORDER, solution=None):
    """Solve, interpolate and fill every field of the ErrorReport.

    :param problem: Problem to run
    :type problem: Problem
    :param order: Gauss points per element for the error integrals, defaults to 10
    :type order: int, optional
    :param solution: Already computed discrete solution, defaults to solving here
    :type solution: DiscreteSolution, optional
    :rtype: ErrorReport
    """
    exact = exact_solution(problem)
    uh = solve_problem(problem) if solution is None else solution
    u_interp = nodal_interpolant(exact, problem.mesh)

    err_c = h1_semi_error(exact, uh, order)
    jumps = jump_term(uh.slopes, problem.gamma, problem.h)

    e_ba = relative_h1_error(exact, u_interp, order)
    e_c = relative_h1_error(exact, uh, order)
    ratio = e_c / e_ba if e_ba >= RATIO_FLOOR else None

    report = ErrorReport(k=problem.k, n=problem.n, gamma=problem.gamma,
                         l2_error=l2_error(exact, uh, order),
                         h1_semi_error=err_c,
                         jump_term=jumps,
                         norm_1h_error=math.sqrt(err_c ** 2 + jumps ** 2),
                         e_ba=e_ba, e_c=e_c, ratio=ratio,
                         norm_f=rhs_norm(problem, order),
                         norm_1h_solution=norm_1h(uh.slopes, problem.gamma, problem.h))
    logger.debug("k=%g n=%d: e_ba=%.3e e_c=%.3e", problem.k, problem.n, e_ba, e_c)
    return report
