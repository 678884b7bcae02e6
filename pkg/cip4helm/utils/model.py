"""Problem description shared by every module: wave number, uniform mesh, penalty parameter and load.

The boundary value problem is u'' + k^2 u = -f on (0, 1), u(0) = 0, u'(1) - i k u(1) = 0.
"""
from dataclasses import dataclass, field, replace
import math
import numbers

import numpy as np

from cip4helm.utils.errors import ConfigError, UnsupportedRegimeError

# Imaginary parts below this are treated as a real penalty parameter
REAL_GAMMA_TOL = 1e-14

# Largest |gamma| covered by the dispersion and discrete Green's function analysis
GAMMA_ANALYSIS_BOUND = 1.0 / 6.0

# Names made available to right hand side expressions from the command line
_EXPRESSION_NAMESPACE = {name: getattr(np, name) for name in
                         ('sin', 'cos', 'tan', 'exp', 'log', 'sqrt', 'sinh', 'cosh', 'tanh',
                          'arctan', 'abs', 'pi')}
_EXPRESSION_NAMESPACE['j'] = 1j


class RhsSpec:
    """Right hand side f of the Helmholtz problem.

    Either the constant f = -1 used in all the experiments, or a user supplied smooth function
    f: [0, 1] -> C which must accept numpy arrays.
    """
    CONSTANT_NEG_ONE = 'neg-one'
    FUNCTION = 'function'

    def __init__(self, kind, func=None, label=None):
        if kind not in (self.CONSTANT_NEG_ONE, self.FUNCTION):
            raise ConfigError(f"Unknown right hand side kind: {kind}")
        if kind == self.FUNCTION and not callable(func):
            raise ConfigError("A function right hand side needs a callable")
        self._kind = kind
        self._func = func
        self._label = label if label is not None else kind

    @classmethod
    def constant_neg_one(cls):
        return cls(cls.CONSTANT_NEG_ONE)

    @classmethod
    def from_function(cls, func, label='function'):
        return cls(cls.FUNCTION, func=func, label=label)

    @classmethod
    def from_expression(cls, expression):
        """Build f from an expression in x, e.g. 'sin(3*x) + 2j*x'"""
        expression = expression.strip()
        if expression in ('neg-one', '-1'):
            return cls.constant_neg_one()
        try:
            code = compile(expression, '<rhs>', 'eval')
        except SyntaxError as e:
            raise ConfigError(f"Cannot parse right hand side expression '{expression}': {e}") from e

        def func(x):
            x = np.asarray(x, dtype=float)
            value = eval(code, {'__builtins__': {}}, dict(_EXPRESSION_NAMESPACE, x=x))
            return np.broadcast_to(np.asarray(value, dtype=complex), x.shape).copy()

        # Probe once so that typos surface as configuration errors
        try:
            func(np.linspace(0.0, 1.0, 3))
        except Exception as e:
            raise ConfigError(f"Cannot evaluate right hand side expression '{expression}': {e}") from e
        return cls(cls.FUNCTION, func=func, label=expression)

    @property
    def kind(self):
        return self._kind

    @property
    def label(self):
        return self._label

    @property
    def is_constant_neg_one(self):
        return self._kind == self.CONSTANT_NEG_ONE

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_constant_neg_one:
            return -np.ones(x.shape, dtype=complex)
        return np.asarray(self._func(x), dtype=complex)

    def __repr__(self):
        return f"RhsSpec({self._label!r})"


@dataclass(frozen=True)
class UniformMesh:
    """Uniform mesh of (0, 1) with elements K_j = (x_{j-1}, x_j), j = 1..n"""
    n: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    h: float = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"Element count must be positive, got {self.n}")
        nodes = np.arange(self.n + 1, dtype=float) / self.n
        nodes.setflags(write=False)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'h', 1.0 / self.n)

    def element(self, j):
        """End points of K_j for 1 <= j <= n"""
        if not 1 <= j <= self.n:
            raise IndexError(f"Element index {j} outside 1..{self.n}")
        return self.nodes[j - 1], self.nodes[j]


def mesh_nodes(n):
    """The n+1 nodes x_j = j/n of the uniform mesh"""
    return UniformMesh(n).nodes


@dataclass(frozen=True)
class Problem:
    """Validated problem: wave number k, n elements, complex penalty gamma and load f.

    h = 1/n and t = k*h are computed once here, every other module reads these values.
    """
    k: float
    n: int
    gamma: complex
    rhs: RhsSpec = field(default_factory=RhsSpec.constant_neg_one, compare=False)
    include_boundary_penalty: bool = True
    h: float = field(init=False)
    t: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'h', 1.0 / self.n)
        object.__setattr__(self, 't', self.k / self.n)

    @property
    def mesh(self):
        return UniformMesh(self.n)

    @property
    def gamma_is_real(self):
        return abs(self.gamma.imag) <= REAL_GAMMA_TOL

    @property
    def real_gamma(self):
        """gamma as a float, for the analysis tools that are only defined for real gamma"""
        return require_real_gamma(self.gamma)

    def with_n(self, n):
        return make_problem(self.k, n, self.gamma, self.rhs, self.include_boundary_penalty)

    def with_gamma(self, gamma):
        return make_problem(self.k, self.n, gamma, self.rhs, self.include_boundary_penalty)

    def without_boundary_penalty(self):
        return replace(self, include_boundary_penalty=False)


def make_problem(k, n, gamma, rhs=None, include_boundary_penalty=True):
    """Validate the inputs and build a Problem.

    :param k: Wave number, k > 0
    :type k: float
    :param n: Number of elements, n >= 2
    :type n: int
    :param gamma: Penalty parameter gamma_Re + i gamma_Im
    :type gamma: complex
    :param rhs: Right hand side, defaults to f = -1
    :type rhs: RhsSpec, optional
    :param include_boundary_penalty: Keep the least squares penalty on the Robin condition, defaults to True
    :type include_boundary_penalty: bool, optional
    :raises ConfigError: k <= 0, n < 2 or non-finite gamma
    :rtype: Problem
    """
    if isinstance(k, bool) or not isinstance(k, numbers.Real) or not math.isfinite(k) or k <= 0:
        raise ConfigError(f"Wave number must be a finite positive number, got {k!r}")
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise ConfigError(f"Element count must be an integer, got {n!r}")
    if n < 2:
        raise ConfigError(f"Element count must be at least 2, got {n}")
    if not isinstance(gamma, numbers.Number):
        raise ConfigError(f"Penalty parameter must be a number, got {gamma!r}")
    gamma = complex(gamma)
    if not (math.isfinite(gamma.real) and math.isfinite(gamma.imag)):
        raise ConfigError(f"Penalty parameter must be finite, got {gamma!r}")
    if rhs is None:
        rhs = RhsSpec.constant_neg_one()

    return Problem(k=float(k), n=int(n), gamma=gamma, rhs=rhs,
                   include_boundary_penalty=bool(include_boundary_penalty))


def require_real_gamma(gamma, tol=REAL_GAMMA_TOL):
    """Return gamma as a float or raise when the imaginary part exceeds tol"""
    gamma = complex(gamma)
    if abs(gamma.imag) > tol:
        raise UnsupportedRegimeError(f"A real penalty parameter is required, got {gamma}")
    return gamma.real
