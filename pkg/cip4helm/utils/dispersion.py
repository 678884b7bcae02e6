"""Dispersion analysis of the CIP stencil for real penalty parameters.

Plane waves e^{i j t_h} solve the interior stencil (gamma, R, 2S, R, gamma) iff
    2 gamma cos^2 t_h - (4 gamma + 1 + t^2/6) cos t_h + 2 gamma + 1 - t^2/3 = 0.
The root with |cos| <= 1 is the propagating one (t_h^-), the other one (t_h^+) gives the evanescent
modes. t = kh is the mesh wave number.
"""
from dataclasses import dataclass
import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from cip4helm.utils.errors import ConfigError, DispersionError, UnsupportedRegimeError
from cip4helm.utils.model import GAMMA_ANALYSIS_BOUND, REAL_GAMMA_TOL, require_real_gamma

logger = logging.getLogger(__name__)

# Branch switch of the critical DOF formula
CRITICAL_GAMMA = -1.0 / 12.0
CRITICAL_GAMMA_TOL = 1e-14


@dataclass(frozen=True)
class DispersionResult:
    """Both roots of the dispersion relation for one (t, gamma).

    cos_plus is None for gamma = 0 where the relation is linear. Past the cutoff the propagating
    mode does not exist, t_h_minus and k_h_minus are NaN and propagating is False.
    """
    t: float
    gamma: float
    cos_minus: float
    cos_plus: Optional[float]
    t_h_minus: float
    k_h_minus: float
    propagating: bool
    discriminant: float


def _check_t(t):
    if not (math.isfinite(t) and t > 0):
        raise ConfigError(f"Mesh wave number t = kh must be positive, got {t}")


def dispersion_roots(t, gamma, k=1.0):
    """Solve the dispersion relation.

    :param t: Mesh wave number kh
    :type t: float
    :param gamma: Real penalty parameter
    :type gamma: float
    :param k: Wave number used to report k_h^- = t_h^- k / t, defaults to 1 (k_h^-/k)
    :type k: float, optional
    :raises DispersionError: (1 + t^2/6)^2 + 4 gamma t^2 < 0
    :raises UnsupportedRegimeError: complex gamma
    :rtype: DispersionResult
    """
    t = float(t)
    _check_t(t)
    gamma = require_real_gamma(gamma)
    if abs(gamma) > GAMMA_ANALYSIS_BOUND + REAL_GAMMA_TOL:
        logger.debug("gamma=%g outside [-1/6, 1/6], dispersion results carry no accuracy claim", gamma)

    p = 1.0 + t ** 2 / 6.0
    discriminant = p ** 2 + 4.0 * gamma * t ** 2
    if discriminant < 0:
        raise DispersionError(f"No real dispersion roots for t={t}, gamma={gamma} "
                              f"(discriminant {discriminant:.3e})")
    root = math.sqrt(discriminant)

    # 1 - cos t_h^- without cancellation, valid for gamma = 0 as well
    one_minus = t ** 2 / (p + root)
    cos_minus = 1.0 - one_minus
    if gamma == 0.0:
        cos_plus = None
    else:
        cos_plus = (4.0 * gamma + p + root) / (4.0 * gamma)
        if abs(cos_minus) > 1.0 and abs(cos_plus) < abs(cos_minus):
            cos_minus, cos_plus = cos_plus, cos_minus
            one_minus = 1.0 - cos_minus

    propagating = abs(cos_minus) < 1.0
    if propagating:
        t_h = 2.0 * math.asin(math.sqrt(one_minus / 2.0))
        k_h = t_h * k / t
    else:
        t_h = k_h = math.nan

    return DispersionResult(t=t, gamma=gamma, cos_minus=cos_minus, cos_plus=cos_plus,
                            t_h_minus=t_h, k_h_minus=k_h, propagating=propagating,
                            discriminant=discriminant)


def root_sum_and_product(t, gamma):
    """Sum and product of the two roots from the coefficients of the quadratic (gamma != 0)"""
    gamma = require_real_gamma(gamma)
    if gamma == 0.0:
        raise UnsupportedRegimeError("The dispersion relation is linear for gamma = 0")
    total = (4.0 * gamma + 1.0 + t ** 2 / 6.0) / (2.0 * gamma)
    product = (2.0 * gamma + 1.0 - t ** 2 / 3.0) / (2.0 * gamma)
    return total, product


def optimal_gamma(t):
    """Penalty parameter gamma_o(t) for which cos t_h^- = cos t.

    Evaluated as w (w - 2p) / (4 t^2) with w = t^2 / (2 sin^2(t/2)) and p = 1 + t^2/6, which equals
    (6 cos t - 6 + t^2 cos t + 2 t^2) / (12 (1 - cos t)^2) without its cancellation at small t.

    :param t: Mesh wave number(s), 0 < t
    :type t: float or numpy.ndarray
    :raises ConfigError: t <= 0
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr <= 0):
        raise ConfigError(f"optimal_gamma needs t > 0, got {t}")
    w = t_arr ** 2 / (2.0 * np.sin(t_arr / 2.0) ** 2)
    p = 1.0 + t_arr ** 2 / 6.0
    gamma_o = w * (w - 2.0 * p) / (4.0 * t_arr ** 2)
    return float(gamma_o) if gamma_o.ndim == 0 else gamma_o


def cutoff_frequency(gamma):
    """t_c = sqrt(48 gamma + 12), where |cos t_h^-| reaches 1

    :raises UnsupportedRegimeError: gamma < -1/4
    """
    gamma = require_real_gamma(gamma)
    value = 48.0 * gamma + 12.0
    if value < 0:
        raise UnsupportedRegimeError(f"No real cutoff frequency for gamma={gamma} < -1/4")
    return math.sqrt(value)


def discrete_wavenumber(k, h, gamma):
    """k_h^- = t_h^- / h

    :raises DispersionError: no propagating mode at t = kh
    """
    result = dispersion_roots(k * h, gamma, k=k)
    if not result.propagating:
        raise DispersionError(f"t={k * h} is past the cutoff for gamma={gamma}")
    return result.k_h_minus


def phase_error(k, h, gamma):
    """|k_h^- - k|"""
    return abs(discrete_wavenumber(k, h, gamma) - k)


def taylor_cos_minus(t, gamma):
    """Fourth order expansion 1 - t^2/2 + (6 gamma + 1) t^4 / 12 of cos t_h^-"""
    t = np.asarray(t, dtype=float)
    return 1.0 - t ** 2 / 2.0 + (6.0 * gamma + 1.0) * t ** 4 / 12.0


def critical_dof(k, gamma):
    """Predicted number of elements where the relative error leaves its plateau.

    (|12 gamma + 1| k^3 / 24)^(1/2), or (k^5 / 720)^(1/4) for gamma = -1/12.
    """
    gamma = require_real_gamma(gamma)
    if abs(gamma - CRITICAL_GAMMA) <= CRITICAL_GAMMA_TOL:
        return (k ** 5 / 720.0) ** 0.25
    return math.sqrt(abs(12.0 * gamma + 1.0) * k ** 3 / 24.0)


def resolution_dof(k):
    """floor(k / pi), the knee of the error curve when there is no pollution"""
    return int(math.floor(k / math.pi))


def phase_error_curve(t_values, gamma):
    """Table of cos t against cos t_h^- over a t grid, for plotting dispersion curves.

    Rows past the cutoff keep cos t_h^- (|.| >= 1) and get NaN for t_h^-. gamma may be the string
    'gamma_o', then every row uses gamma_o(t) and the cutoff column is NaN.

    :return: Columns t, gamma, cos_t, cos_minus, cos_plus, t_h_minus, propagating, cutoff
    :rtype: pandas.DataFrame
    """
    per_row = isinstance(gamma, str) and gamma == 'gamma_o'
    cutoff = math.nan
    if not per_row:
        gamma = require_real_gamma(gamma)
        try:
            cutoff = cutoff_frequency(gamma)
        except UnsupportedRegimeError:
            pass

    rows = []
    for t in np.asarray(t_values, dtype=float):
        gamma_t = optimal_gamma(t) if per_row else gamma
        try:
            result = dispersion_roots(t, gamma_t)
        except DispersionError:
            logger.debug("No real dispersion roots at t=%g, gamma=%g", t, gamma_t)
            result = DispersionResult(t=t, gamma=gamma_t, cos_minus=math.nan, cos_plus=math.nan,
                                      t_h_minus=math.nan, k_h_minus=math.nan, propagating=False,
                                      discriminant=math.nan)
        rows.append({'t': t,
                     'gamma': gamma_t,
                     'cos_t': math.cos(t),
                     'cos_minus': result.cos_minus,
                     'cos_plus': math.nan if result.cos_plus is None else result.cos_plus,
                     't_h_minus': result.t_h_minus,
                     'propagating': result.propagating,
                     'cutoff': cutoff})
    return pd.DataFrame(rows, columns=['t', 'gamma', 'cos_t', 'cos_minus', 'cos_plus',
                                       't_h_minus', 'propagating', 'cutoff'])


def optimal_gamma_curve(t_values):
    """Table of gamma_o(t)"""
    t_values = np.asarray(t_values, dtype=float)
    return pd.DataFrame({'t': t_values, 'gamma_o': optimal_gamma(t_values)})
