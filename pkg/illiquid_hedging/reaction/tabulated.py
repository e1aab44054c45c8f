import csv
import logging
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ConfigError, DomainError
from ..numerics import ToleranceSpec, find_root_bracketed
from .base import ReactionFunction

logger = logging.getLogger(__name__)

_INVERSE_TOL = ToleranceSpec(atol=1e-14, rtol=1e-14)


class Tabulated(ReactionFunction):
    """g given by (alpha, g) samples, interpolated with a monotone cubic (PCHIP)."""

    interpolation = 'pchip'

    def __init__(self, alpha, g, checked: bool = True):
        self.alpha = np.array(alpha, dtype=float)
        self.values = np.array(g, dtype=float)
        self.alpha.flags.writeable = False
        self.values.flags.writeable = False
        super().__init__(checked)
        self._interp = None
        if len(self.alpha) >= 2 and np.all(np.diff(self.alpha) > 0):
            self._interp = PchipInterpolator(self.alpha, self.values, extrapolate=False)
            self._slope = self._interp.derivative()

    @classmethod
    def from_csv(cls, path, checked: bool = True) -> 'Tabulated':
        p = Path(path)
        with p.open(newline='') as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ['alpha', 'g']:
                raise ConfigError(f'{path}: header must be "alpha,g", got {reader.fieldnames!r}')
            rows = [(float(r['alpha']), float(r['g'])) for r in reader]
        logger.info(f'Loaded {len(rows)} g samples from {path}')
        alpha, g = zip(*rows) if rows else ((), ())
        return cls(alpha, g, checked=checked)

    def name(self) -> str:
        return 'tabulated'

    def params(self) -> dict:
        return {'n_samples': len(self.alpha), 'interpolation': self.interpolation}

    def admissibility(self) -> list:
        violations = []
        if len(self.alpha) < 2 or len(self.alpha) != len(self.values):
            violations.append('at least two (alpha, g) samples required')
            return violations
        if not np.all(np.diff(self.alpha) > 0):
            violations.append('alpha samples strictly increasing required')
        if not np.all(self.values > 0):
            violations.append('g > 0 required')
        if not np.all(np.diff(self.values) > 0):
            violations.append('g samples strictly increasing required')
        return violations

    def domain(self) -> str:
        return f'alpha in [{self.alpha[0]!r}, {self.alpha[-1]!r}]'

    def _in_domain(self, alpha):
        return (alpha >= self.alpha[0]) & (alpha <= self.alpha[-1])

    def _curve(self):
        if self._interp is None:
            raise DomainError('tabulated g needs at least two strictly increasing alpha samples')
        return self._interp

    def _value(self, alpha):
        return self._curve()(alpha)

    def _log_derivative(self, alpha):
        curve = self._curve()
        return self._slope(alpha) / curve(alpha)

    def _inverse(self, level: float) -> float:
        curve = self._curve()
        if not self.values[0] <= level <= self.values[-1]:
            raise DomainError(f'tabulated g does not reach {level!r} on {self.domain()}')
        return find_root_bracketed(lambda a: float(curve(a)) - level,
                                   self.alpha[0], self.alpha[-1], _INVERSE_TOL)

    def utility(self, x):
        x = self._check_wealth(x)
        alpha = np.vectorize(lambda xi: self._inverse(1.0 / xi), otypes=[float])(x)
        out = 1.0 - alpha
        return float(out) if out.ndim == 0 else out

    def utility_derivative(self, x):
        x = self._check_wealth(x)
        alpha = np.vectorize(lambda xi: self._inverse(1.0 / xi), otypes=[float])(x)
        out = 1.0 / (x ** 2 * self._slope(alpha))
        return float(out) if out.ndim == 0 else out

    def utility_formula(self) -> str:
        return 'U(x) = 1 - g^-1(1/x)  (numerical inverse)'
