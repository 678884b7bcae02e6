"""Gauss-Legendre rules shared by the exact reference, the load vector and the error norms."""
from functools import lru_cache

import numpy as np
from scipy import special

# Points per panel/element used everywhere unless a refinement is requested
DEFAULT_ORDER = 10


@lru_cache(maxsize=32)
def _reference_rule(order):
    nodes, weights = special.roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order=DEFAULT_ORDER):
    """Nodes and weights of the Gauss-Legendre rule on [-1, 1]

    :param order: Number of points, exact for polynomials up to degree 2*order-1
    :type order: int
    :return: (nodes, weights)
    :rtype: tuple of numpy.ndarray
    """
    if order < 1:
        raise ValueError(f"Quadrature order must be positive, got {order}")
    return _reference_rule(int(order))


def composite_rule(a, b, n_panels, order=DEFAULT_ORDER):
    """Composite Gauss-Legendre rule on [a, b] with equal panels.

    a and b may be arrays of the same shape, in which case the rule is built for every
    interval at once and the panel/point axes are appended.

    :return: (points, weights) with shape a.shape + (n_panels*order,)
    """
    xi, wi = gauss_legendre(order)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    width = (b - a) / n_panels

    # Left end of each panel
    starts = a[..., None] + width[..., None] * np.arange(n_panels)
    half = 0.5 * width[..., None, None]
    points = starts[..., None] + half * (xi + 1.0)
    weights = half * wi * np.ones_like(points)

    new_shape = a.shape + (n_panels * order,)
    return points.reshape(new_shape), weights.reshape(new_shape)


def element_rule(nodes, order=DEFAULT_ORDER):
    """Gauss points and weights on every element of a 1D mesh.

    :param nodes: Mesh nodes x_0 < ... < x_n
    :type nodes: numpy.ndarray
    :return: (points, weights), each of shape (n, order)
    """
    xi, wi = gauss_legendre(order)
    left = nodes[:-1, None]
    width = np.diff(nodes)[:, None]
    points = left + 0.5 * width * (xi + 1.0)
    weights = 0.5 * width * wi
    return points, weights
