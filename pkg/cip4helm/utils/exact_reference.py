"""Exact solution of the Helmholtz boundary value problem.

u(x) = int_0^1 G(x, s) f(s) ds with the Green's function
    G(x, s) = sin(kx) e^{iks} / k  for x <= s,   sin(ks) e^{ikx} / k  for s <= x,
and u'(x) = int_0^1 H(x, s) f(s) ds with the derivative kernel
    H(x, s) = cos(kx) e^{iks}      for x < s,    i sin(ks) e^{ikx}    for s < x.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from cip4helm.utils.errors import QuadratureError
from cip4helm.utils.quadrature import DEFAULT_ORDER, composite_rule, element_rule

logger = logging.getLogger(__name__)

# Composite rule: max(MIN_PANELS, ceil(PANELS_PER_K * k)) panels per side of the split at s = x
MIN_PANELS = 64
PANELS_PER_K = 8
# Refinement doubles the panel count at most this many times
MAX_REFINEMENTS = 4
QUADRATURE_TOL = 1e-12


def greens_kernel(x, s, k):
    """Green's function G(x, s) of the boundary value problem, vectorized over x and s"""
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    lower = np.minimum(x, s)
    upper = np.maximum(x, s)
    # Symmetric in (x, s): sin of the smaller argument times the outgoing wave of the larger one
    return np.sin(k * lower) * np.exp(1j * k * upper) / k


def derivative_kernel(x, s, k, side=None):
    """Derivative kernel H(x, s) = dG/dx.

    H jumps by -1 across x = s. Points with x == s need side='left' (x -> s-) or side='right' (x -> s+).

    :raises ValueError: x == s somewhere and no side given
    """
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    on_diagonal = x == s
    if np.any(on_diagonal) and side not in ('left', 'right'):
        raise ValueError("H(x, s) is discontinuous at x = s; choose side='left' or side='right'")

    before = x < s
    if side == 'left':
        before = before | on_diagonal
    value = np.where(before,
                     np.cos(k * x) * np.exp(1j * k * s),
                     1j * np.sin(k * s) * np.exp(1j * k * x))
    return value


def _panel_count(k):
    return max(MIN_PANELS, int(math.ceil(PANELS_PER_K * k)))


def _integrate_kernels(x, k, rhs, n_panels, order):
    """u(x) and u'(x) by composite Gauss-Legendre on (0, x) and (x, 1)"""
    x = np.atleast_1d(np.asarray(x, dtype=float))

    s_left, w_left = composite_rule(np.zeros_like(x), x, n_panels, order)
    s_right, w_right = composite_rule(x, np.ones_like(x), n_panels, order)
    xx = x[:, None]

    # On (0, x) s < x, on (x, 1) s > x
    f_left = rhs(s_left)
    f_right = rhs(s_right)
    u = (np.sum(w_left * np.sin(k * s_left) * np.exp(1j * k * xx) * f_left, axis=1)
         + np.sum(w_right * np.sin(k * xx) * np.exp(1j * k * s_right) * f_right, axis=1)) / k
    du = (np.sum(w_left * 1j * np.sin(k * s_left) * np.exp(1j * k * xx) * f_left, axis=1)
          + np.sum(w_right * np.cos(k * xx) * np.exp(1j * k * s_right) * f_right, axis=1))
    return u, du


def exact_by_quadrature(problem, x, n_panels=None, order=DEFAULT_ORDER, tol=QUADRATURE_TOL):
    """Evaluate u(x) and u'(x) from the Green's function representation.

    The integral is split at s = x where the kernel has a kink (G) or a jump (H). The panel count is
    doubled until two successive results agree to tol (relative), at most MAX_REFINEMENTS times.

    :param problem: Problem providing k and the right hand side
    :type problem: Problem
    :param x: Evaluation point(s) in [0, 1]
    :type x: float or numpy.ndarray
    :raises QuadratureError: no agreement within the refinement cap
    :return: (u, du), same shape as x
    """
    k = problem.k
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0.0) | (x_arr > 1.0)):
        raise ValueError("Evaluation points must lie in [0, 1]")

    panels = _panel_count(k) if n_panels is None else int(n_panels)
    u, du = _integrate_kernels(x_arr.ravel(), k, problem.rhs, panels, order)

    for _ in range(MAX_REFINEMENTS):
        u_fine, du_fine = _integrate_kernels(x_arr.ravel(), k, problem.rhs, 2 * panels, order)
        scale = 1.0 + np.max(np.abs(u_fine)) + np.max(np.abs(du_fine))
        change = max(np.max(np.abs(u_fine - u)), np.max(np.abs(du_fine - du)))
        u, du, panels = u_fine, du_fine, 2 * panels
        if change <= tol * scale:
            break
    else:
        raise QuadratureError(f"Green's function quadrature did not settle for k={k} "
                              f"(last change {change:.3e} with {panels} panels)")

    logger.debug("Quadrature reference at %d points used %d panels per side", x_arr.size, panels)
    return u.reshape(x_arr.shape), du.reshape(x_arr.shape)


def _constant_f_coefficient(k):
    # u = (1 - cos kx)/k^2 + A sin kx, with A fixed by u'(1) - i k u(1) = 0
    return 1j * (np.exp(1j * k) - 1.0) / k ** 2


def exact_constant_f(k, x):
    """Closed form solution for f = -1, i.e. u'' + k^2 u = 1.

    :return: (u, du) at x
    """
    x = np.asarray(x, dtype=float)
    A = _constant_f_coefficient(k)
    u = (1.0 - np.cos(k * x)) / k ** 2 + A * np.sin(k * x)
    du = np.sin(k * x) / k + A * k * np.cos(k * x)
    return u.astype(complex), du.astype(complex)


class ExactSolution:
    """Evaluator for u, u' and u'' on [0, 1].

    source is 'closed-form' (f = -1) or 'quadrature' (Green's function representation).
    u'' is taken from the differential equation, u'' = -f - k^2 u.
    """

    def __init__(self, problem, source):
        if source not in ('closed-form', 'quadrature'):
            raise ValueError(f"Unknown exact solution source: {source}")
        if source == 'closed-form' and not problem.rhs.is_constant_neg_one:
            raise ValueError("The closed form is only available for f = -1")
        self.problem = problem
        self.k = problem.k
        self.source = source

    def evaluate(self, x):
        """(u(x), u'(x))"""
        if self.source == 'closed-form':
            return exact_constant_f(self.k, x)
        return exact_by_quadrature(self.problem, x)

    def u(self, x):
        return self.evaluate(x)[0]

    def du(self, x):
        return self.evaluate(x)[1]

    def d2u(self, x):
        u, _ = self.evaluate(x)
        return -self.problem.rhs(x) - self.k ** 2 * u

    def robin_residual(self):
        """u'(1) - i k u(1)"""
        u1, du1 = self.evaluate(1.0)
        return complex(du1 - 1j * self.k * u1)

    def __repr__(self):
        return f"ExactSolution(k={self.k}, source={self.source!r})"


def exact_solution(problem):
    """Closed form for f = -1, Green's function quadrature otherwise"""
    source = 'closed-form' if problem.rhs.is_constant_neg_one else 'quadrature'
    return ExactSolution(problem, source)


def _l2_norm_squared(values, weights):
    return float(np.sum(weights * np.abs(values) ** 2))


@dataclass(frozen=True)
class RegularityReport:
    """Regularity ratios, each bounded by one for the exact solution"""
    k: float
    norm_f: float
    norm_u: float
    semi_u1: float
    semi_u2: float
    ratio_l2: float
    ratio_h1: float
    ratio_h2: float

    def holds(self, tol=1e-8):
        return max(self.ratio_l2, self.ratio_h1, self.ratio_h2) <= 1.0 + tol


def check_regularity_bounds(problem, order=DEFAULT_ORDER, n_panels=None):
    """Evaluate ||u||, |u|_1 and |u|_2 and compare with k^-1 ||f||, ||f|| and (1+k) ||f||.

    :rtype: RegularityReport
    """
    exact = exact_solution(problem)
    k = problem.k

    panels = _panel_count(k) if n_panels is None else int(n_panels)
    x, w = element_rule(np.linspace(0.0, 1.0, panels + 1), order)
    x, w = x.ravel(), w.ravel()

    u, du = exact.evaluate(x)
    d2u = -problem.rhs(x) - k ** 2 * u

    norm_f = math.sqrt(_l2_norm_squared(problem.rhs(x), w))
    norm_u = math.sqrt(_l2_norm_squared(u, w))
    semi_u1 = math.sqrt(_l2_norm_squared(du, w))
    semi_u2 = math.sqrt(_l2_norm_squared(d2u, w))

    report = RegularityReport(k=k, norm_f=norm_f, norm_u=norm_u, semi_u1=semi_u1, semi_u2=semi_u2,
                              ratio_l2=norm_u * k / norm_f,
                              ratio_h1=semi_u1 / norm_f,
                              ratio_h2=semi_u2 / ((1.0 + k) * norm_f))
    logger.debug("Regularity ratios for k=%g: %.3e %.3e %.3e", k,
                 report.ratio_l2, report.ratio_h1, report.ratio_h2)
    return report
