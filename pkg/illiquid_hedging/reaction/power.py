import numpy as np

from .base import ReactionFunction


class Power(ReactionFunction):
    """g(alpha) = c2 alpha^c1; leads to the rho-free special model."""

    def __init__(self, c1: float, c2: float, checked: bool = True):
        self.c1 = float(c1)
        self.c2 = float(c2)
        super().__init__(checked)

    def name(self) -> str:
        return 'power'

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
        return 'alpha > 0'

    def _in_domain(self, alpha):
        return alpha > 0

    def _value(self, alpha):
        return self.c2 * alpha ** self.c1

    def _log_derivative(self, alpha):
        return self.c1 / alpha

    def utility(self, x):
        x = self._check_wealth(x)
        return 1.0 - (self.c2 * x) ** (-1.0 / self.c1)

    def utility_derivative(self, x):
        x = self._check_wealth(x)
        return (self.c2 * x) ** (-1.0 / self.c1) / (self.c1 * x)

    def utility_formula(self) -> str:
        return 'U(x) = 1 - (c2 x)^(-1/c1)'
