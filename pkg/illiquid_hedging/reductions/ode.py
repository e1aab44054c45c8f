import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..errors import DomainError, GuardError, NoRealBranchError, ParamError
from .cases import DerivedParams, ReductionCase, derived_params

logger = logging.getLogger(__name__)

LABELS = ('plus', 'minus')
GUARD_TOL = 1e-10
# relative discriminant below which the two slope branches count as meeting
BRANCH_BAND = 1e-6


@dataclass(frozen=True)
class Quadratic:
    """a p^2 + b p + c = 0 with its discriminant supplied in closed form."""
    a:    float
    b:    float
    c:    float
    disc: float

    def roots(self) -> Dict[str, float]:
        return stable_roots(self.a, self.b, self.c, self.disc)

    def __call__(self, p):
        return (self.a * p + self.b) * p + self.c


def stable_roots(a: float, b: float, c: float, disc: float) -> Dict[str, float]:
    """plus = (-b + sqrt(disc)) / 2a, minus = (-b - sqrt(disc)) / 2a, without cancellation."""
    scale = b * b + abs(4 * a * c)
    if disc < 0:
        if disc < -1e-13 * scale:
            raise NoRealBranchError(f'negative discriminant {disc:.6g}')
        disc = 0.0
    if a == 0:
        if b == 0:
            raise NoRealBranchError('degenerate slope equation')
        p = -c / b
        return {'plus': p, 'minus': p}
    root = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(root, b))
    if q == 0:
        return {'plus': 0.0, 'minus': 0.0}
    big, small = q / a, c / q
    if b >= 0:
        return {'plus': small, 'minus': big}
    return {'plus': big, 'minus': small}


class ReducedODE(ABC):
    """Implicit first-order ODE F(z, state, Y') = 0 obtained from one reduction.

    state[0] is Y = W'; general-model cases whose denominator sees u_S carry W
    as state[1].
    """

    state_size = 1
    # slopes are found by bracketed root finding instead of the quadratic formula
    implicit = False

    def __init__(self, case: ReductionCase, params: DerivedParams = None,
                 guard_tol: float = GUARD_TOL):
        self.case = case
        self.params = params or derived_params(case)
        self.guard_tol = guard_tol

    @abstractmethod
    def quadratic(self, z: float, state) -> Quadratic:
        ...

    @abstractmethod
    def margin(self, z: float, state, p: float) -> float:
        """Reduced image of the PDE denominator at slope p."""
        ...

    def residual(self, z: float, state, p: float) -> float:
        return self.quadratic(z, state)(p)

    def roots(self, z: float, state) -> Dict[str, float]:
        return self._solve(z, self.quadratic(z, state))

    def _solve(self, z: float, quad: Quadratic) -> Dict[str, float]:
        try:
            return quad.roots()
        except NoRealBranchError as e:
            raise NoRealBranchError(f'{self.case.case}: {e} at z={z:.6g}', z=z) from None

    def check_guard(self, z: float, state, p: float) -> None:
        m = self.margin(z, state, p)
        if abs(m) <= self.guard_tol * (1.0 + abs(p) + abs(float(state[0]))):
            raise GuardError(f'{self.case.case}: reduced denominator vanishes at z={z:.6g}')

    def resolve(self, z: float, state, label: str) -> float:
        if label not in LABELS:
            raise ParamError(f'branch must be plus or minus, got {label!r}')
        p = self.roots(z, state)[label]
        self.check_guard(z, state, p)
        return p

    def follow(self, z: float, state, label: str, previous: float,
               band: float = BRANCH_BAND):
        """(label, slope) continuing `label` from the previous slope.

        The labels are continuous wherever the discriminant is nonzero, so the
        branch only changes where both roots nearly meet; there the root
        closest to `previous` wins.
        """
        quad = self.quadratic(z, state)
        roots = self._solve(z, quad)
        if abs(quad.disc) <= band * (quad.b * quad.b + abs(4 * quad.a * quad.c)):
            label = min(LABELS, key=lambda k: (abs(roots[k] - previous), k != label))
        return label, roots[label]


class ScalingODE(ReducedODE):
    """S_H2: Y'^2 - Y' Y (2 beta + kappa) + Y^2 (beta^2 + kappa) = 0."""

    def quadratic(self, z, state):
        Y = float(state[0])
        b, k = self.params.beta, self.params.kappa
        return Quadratic(1.0, -Y * (2 * b + k), Y * Y * (b * b + k),
                         Y * Y * k * (k + 4 * (b - 1)))

    def margin(self, z, state, p):
        return p - self.params.beta * float(state[0])


class LogScalingODE(ReducedODE):
    """S_H3, the reduction with W = ln u - delta t."""

    def quadratic(self, z, state):
        Y = float(state[0])
        P = self.params
        lin = P.delta - P.gamma * Y
        return Quadratic(lin,
                         Y * (2 * lin * (Y - P.beta) + P.kappa * Y),
                         Y * Y * (lin * (Y - P.beta) ** 2 + P.kappa * Y * (Y - 1)),
                         Y ** 3 * (P.theta * Y - P.a1))

    def margin(self, z, state, p):
        Y = float(state[0])
        return p + Y * Y - self.params.beta * Y


class DriftScalingODE(ReducedODE):
    """S_H4, the reduction with W = u - eta t."""

    def quadratic(self, z, state):
        Y = float(state[0])
        P = self.params
        return Quadratic(P.eta - P.gamma * Y,
                         Y * (Y * (2 * P.beta * P.gamma + P.kappa) - 2 * P.beta * P.eta),
                         -Y * Y * (Y * (P.beta ** 2 * P.gamma + P.kappa) - P.beta ** 2 * P.eta),
                         Y ** 3 * (P.theta * Y - P.a1))

    def margin(self, z, state, p):
        return p - self.params.beta * float(state[0])

    def constant_solution(self) -> float:
        P = self.params
        return P.beta ** 2 * P.eta / (P.beta ** 2 * P.gamma + P.kappa)


def _feedback(case: ReductionCase, alpha: float) -> float:
    """rho * g'/g(alpha), zero when the large trader has no weight."""
    if case.rho == 0:
        return 0.0
    try:
        return case.rho * float(case.g.log_derivative(alpha))
    except DomainError as e:
        raise NoRealBranchError(f'g left its domain: {e}') from None


class StationaryODE(ReducedODE):
    """G_H2: 2 eps + sigma^2 z^2 Y' / (1 - rho z g'/g(rho Y) Y')^2 = 0."""

    implicit = True

    def _m(self, z, Y):
        return _feedback(self.case, self.case.rho * Y) * z

    def quadratic(self, z, state):
        Y = float(state[0])
        eps = self.case.eps
        s2 = self.case.sigma2
        m = self._m(z, Y)
        return Quadratic(2 * eps * m * m, s2 * z * z - 4 * eps * m, 2.0 * eps,
                         s2 * z * z * (s2 * z * z - 8 * eps * m))

    def residual(self, z, state, p):
        Y = float(np.atleast_1d(state)[0])
        d = 1.0 - self._m(z, Y) * p
        return 2 * self.case.eps * d * d + self.case.sigma2 * z * z * p

    def margin(self, z, state, p):
        return 1.0 - self._m(z, float(np.atleast_1d(state)[0])) * p


class HomotheticODE(ReducedODE):
    """G_H3: 2 gamma Y - sigma^2 (Y + Y') / (1 - rho g'/g(rho (W + Y)) (Y + Y'))^2 = 0."""

    state_size = 2
    implicit = True

    def _m(self, state):
        Y, W = float(state[0]), float(state[1])
        return _feedback(self.case, self.case.rho * (W + Y))

    def quadratic(self, z, state):
        Y = float(state[0])
        gamma = self.params.gamma
        s2 = self.case.sigma2
        m = self._m(state)
        # quadratic in v = Y + Y', shifted back to Y'
        av, bv, cv = 2 * gamma * Y * m * m, -(4 * gamma * Y * m + s2), 2 * gamma * Y
        return Quadratic(av, 2 * av * Y + bv, (av * Y + bv) * Y + cv,
                         s2 * (8 * gamma * Y * m + s2))

    def residual(self, z, state, p):
        Y = float(state[0])
        v = Y + p
        d = 1.0 - self._m(state) * v
        return 2 * self.params.gamma * Y * d * d - self.case.sigma2 * v

    def margin(self, z, state, p):
        return 1.0 - self._m(state) * (float(state[0]) + p)


ODES = {
    'S_H2': ScalingODE,
    'S_H3': LogScalingODE,
    'S_H4': DriftScalingODE,
    'G_H2': StationaryODE,
    'G_H3': HomotheticODE,
}


def reduced_ode(case: ReductionCase, guard_tol: float = GUARD_TOL) -> ReducedODE:
    return ODES[case.case](case, guard_tol=guard_tol)
