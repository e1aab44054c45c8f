import numpy as np

from .base import ReactionFunction


class FractionalPower(ReactionFunction):
    """g(alpha) = c2 (rho + k alpha)^(-1/c1); the Sircar-Papanicolaou model.

    With k*c1 > 0 both g and U decrease, so `direction` follows the sign of -k/c1.
    """

    def __init__(self, c1: float, c2: float, k: float, rho: float, checked: bool = True):
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.k = float(k)
        self.rho = float(rho)
        super().__init__(checked)

    @property
    def direction(self) -> int:
        return -1 if self.k * self.c1 > 0 else 1

    def name(self) -> str:
        return 'fracpow'

    def params(self) -> dict:
        return {'c1': self.c1, 'c2': self.c2, 'k': self.k, 'rho': self.rho}

    def admissibility(self) -> list:
        violations = []
        if not self.c2 > 0:
            violations.append('c2 > 0 required')
        if not (self.c1 < 0 or 0 < self.c1 < 1):
            violations.append('c1 in (-inf, 0) U (0, 1) required')
        if not self.k * self.c1 > 0:
            violations.append('k·c1 > 0 required')
        if not self.rho >= 0:
            violations.append('rho >= 0 required')
        return violations

    def domain(self) -> str:
        return 'rho + k alpha > 0'

    def _in_domain(self, alpha):
        return self.rho + self.k * alpha > 0

    def _value(self, alpha):
        return self.c2 * (self.rho + self.k * alpha) ** (-1.0 / self.c1)

    def _log_derivative(self, alpha):
        return -self.k / (self.c1 * (self.rho + self.k * alpha))

    def utility(self, x):
        x = self._check_wealth(x)
        return -(self.c2 * x) ** self.c1 / self.k + (1.0 + self.rho / self.k)

    def utility_derivative(self, x):
        x = self._check_wealth(x)
        return -(self.c1 / self.k) * (self.c2 * x) ** self.c1 / x

    def utility_formula(self) -> str:
        return 'U(x) = -(c2 x)^c1 / k + (1 + rho/k)'
