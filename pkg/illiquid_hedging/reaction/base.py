import logging
from abc import ABC, abstractmethod

import numpy as np

from ..errors import AdmissibilityError, DomainError

logger = logging.getLogger(__name__)


class ReactionFunction(ABC):
    """Positive factor g(alpha) of the reaction function psi(f, alpha) = f g(alpha).

    Instances are immutable. Admissibility is enforced at construction;
    `unchecked` builds an instance anyway so violations can be reported.
    """

    # +1 if g (and U) increase in their argument, -1 if they decrease
    direction = 1

    def __init__(self, checked: bool = True):
        if checked:
            violations = self.admissibility()
            if violations:
                raise AdmissibilityError(violations)

    @classmethod
    def unchecked(cls, *args, **kwargs) -> 'ReactionFunction':
        return cls(*args, checked=False, **kwargs)

    @abstractmethod
    def name(self) -> str:
        ...

    @abstractmethod
    def params(self) -> dict:
        ...

    @abstractmethod
    def admissibility(self) -> list:
        ...

    @abstractmethod
    def domain(self) -> str:
        ...

    @abstractmethod
    def _in_domain(self, alpha: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _value(self, alpha: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _log_derivative(self, alpha: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def utility(self, x):
        ...

    @abstractmethod
    def utility_derivative(self, x):
        ...

    @abstractmethod
    def utility_formula(self) -> str:
        ...

    def _check_domain(self, alpha) -> np.ndarray:
        a = np.asarray(alpha, dtype=float)
        ok = self._in_domain(a)
        if not np.all(ok):
            bad = a[~ok] if a.ndim else a
            first = float(np.ravel(bad)[0])
            raise DomainError(f'{self.name()}: alpha={first!r} outside domain {self.domain()}')
        return a

    def __call__(self, alpha):
        return self.eval(alpha)

    def eval(self, alpha):
        a = self._check_domain(alpha)
        return _scalar_or_array(self._value(a))

    def log_derivative(self, alpha):
        a = self._check_domain(alpha)
        return _scalar_or_array(self._log_derivative(a))

    def _check_wealth(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError(f'utility argument must be positive (no negative wealth), got {x.min()!r}')
        return x

    def __repr__(self):
        args = ', '.join(f'{k}={v!r}' for k, v in self.params().items())
        return f'{type(self).__name__}({args})'


def _scalar_or_array(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value
