import math

import numpy as np

from .base import ReactionFunction


class Exponential(ReactionFunction):
    """g(alpha) = c2 exp(c1 alpha); the Frey model."""

    def __init__(self, c1: float, c2: float, checked: bool = True):
        self.c1 = float(c1)
        self.c2 = float(c2)
        super().__init__(checked)

    def name(self) -> str:
        return 'exp'

    def params(self) -> dict:
        return {'c1': self.c1, 'c2': self.c2}

    def admissibility(self) -> list:
        violations = []
        if not self.c1 > 0:
            violations.append('c1 > 0 required')
        if not self.c2 > 0:
            violations.append('c2 > 0 required')
        return violations

    def domain(self) -> str:
        return 'alpha in R'

    def _in_domain(self, alpha):
        return np.isfinite(alpha)

    def _value(self, alpha):
        return self.c2 * np.exp(self.c1 * alpha)

    def _log_derivative(self, alpha):
        return np.full_like(alpha, self.c1, dtype=float)

    def utility(self, x):
        x = self._check_wealth(x)
        return np.log(x) / self.c1 + (self.c1 + math.log(self.c2)) / self.c1

    def utility_derivative(self, x):
        x = self._check_wealth(x)
        return 1.0 / (self.c1 * x)

    def utility_formula(self) -> str:
        return 'U(x) = ln(x)/c1 + (c1 + ln c2)/c1'
