import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParamError
from .reaction import ReactionFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    sigma: float
    rho:   float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParamError(f'sigma must be positive, got {self.sigma!r}')
        if not self.rho >= 0:
            raise ParamError(f'rho must be non-negative, got {self.rho!r}')

    @property
    def sigma2(self) -> float:
        return self.sigma ** 2


@dataclass(frozen=True)
class UtilitySpec:
    """Utility function U dual to g through U(1/g(alpha)) = 1 - alpha."""
    g:         ReactionFunction
    family:    str = ''
    formula:   str = ''
    constants: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.g.utility(x)

    def derivative(self, x):
        return self.g.utility_derivative(x)


def utility_spec(g: ReactionFunction) -> UtilitySpec:
    return UtilitySpec(g=g, family=g.name(), formula=g.utility_formula(), constants=g.params())


def eval_g(g: ReactionFunction, alpha):
    return g.eval(alpha)


def log_derivative_g(g: ReactionFunction, alpha):
    return g.log_derivative(alpha)


def utility_value(u: UtilitySpec, x):
    return u(x)


def utility_derivative(u: UtilitySpec, x):
    return u.derivative(x)


def check_admissibility(g: ReactionFunction) -> list:
    return g.admissibility()


def duality_table(g: ReactionFunction, alphas) -> np.ndarray:
    """Rows (alpha, g(alpha), U(1/g(alpha)), |U(1/g) - (1 - alpha)|)."""
    alphas = np.asarray(alphas, dtype=float)
    values = np.asarray(g.eval(alphas), dtype=float)
    u = np.asarray(g.utility(1.0 / values), dtype=float)
    return np.column_stack([alphas, values, u, np.abs(u - (1.0 - alphas))])


def sample_domain(g: ReactionFunction, n: int = 200) -> np.ndarray:
    """n alpha values inside g's domain, used by the duality and monotonicity checks."""
    name = g.name()
    if name == 'exp':
        return np.linspace(-2.0, 2.0, n)
    if name == 'power':
        return np.linspace(0.05, 5.0, n)
    if name == 'fracpow':
        lo = -g.rho / g.k
        span = 5.0 / abs(g.k)
        a, b = (lo, lo + span) if g.k > 0 else (lo - span, lo)
        return np.linspace(a, b, n + 2)[1:-1]
    return np.linspace(g.alpha[0], g.alpha[-1], n)
