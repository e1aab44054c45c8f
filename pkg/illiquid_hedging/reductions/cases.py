import logging
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from ..errors import DomainError, ParamError, TrivialCaseError
from ..lie import flow, subalgebra
from ..reaction import ReactionFunction

logger = logging.getLogger(__name__)

CASES = ('G_H2', 'G_H3', 'S_H2', 'S_H3', 'S_H4')
GENERAL_CASES = ('G_H2', 'G_H3')
SPECIAL_CASES = ('S_H2', 'S_H3', 'S_H4')

# (algebra, optimal-system entry) each reduction comes from
SUBALGEBRAS = {
    'G_H2': ('L3', 'h3'),
    'G_H3': ('L3', 'h2'),
    'S_H2': ('L4', 'h2'),
    'S_H3': ('L4', 'h3'),
    'S_H4': ('L4', 'h4'),
}

_TRIG_EPS = 1e-12


def normalize_case(name: str) -> str:
    key = str(name).upper()
    if key not in CASES:
        raise ParamError(f'Unknown case: {name!r} (available: {list(CASES)})')
    return key


@dataclass(frozen=True)
class ReductionCase:
    """A one-dimensional subalgebra together with the model it reduces.

    General-model cases use (g, rho, sigma); special-model cases use
    (c1, sigma). phi, x and eps are the subalgebra parameters.
    """
    case:  str
    sigma: float
    phi:   Optional[float] = None
    x:     Optional[float] = None
    eps:   Optional[int] = None
    c1:    Optional[float] = None
    rho:   float = 0.0
    g:     Optional[ReactionFunction] = None

    def __post_init__(self):
        object.__setattr__(self, 'case', normalize_case(self.case))
        if not self.sigma > 0:
            raise ParamError(f'sigma must be positive, got {self.sigma!r}')
        if self.case in GENERAL_CASES and self.g is None:
            raise ParamError(f'{self.case} needs a reaction function g')
        if self.case in GENERAL_CASES and not self.rho >= 0:
            raise ParamError(f'rho must be non-negative, got {self.rho!r}')

    @property
    def sigma2(self) -> float:
        return self.sigma ** 2

    @property
    def model(self) -> str:
        return 'general' if self.case in GENERAL_CASES else 'haupt'

    @property
    def subalgebra(self):
        return SUBALGEBRAS[self.case]

    def describe(self) -> dict:
        out = {'case': self.case, 'sigma': self.sigma, 'model': self.model,
               'subalgebra': list(self.subalgebra)}
        for key in ('phi', 'x', 'eps', 'c1'):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.g is not None:
            out['rho'] = self.rho
            out['g'] = {'family': self.g.name(), **self.g.params()}
        return out


@dataclass(frozen=True)
class DerivedParams:
    gamma: Optional[float] = None
    beta:  Optional[float] = None
    kappa: Optional[float] = None
    delta: Optional[float] = None
    eta:   Optional[float] = None
    theta: Optional[float] = None
    zeta:  Optional[float] = None
    a1:    Optional[float] = None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}


def _trig(case: ReductionCase):
    if case.phi is None:
        raise ParamError(f'{case.case} needs phi')
    s, c = math.sin(case.phi), math.cos(case.phi)
    if abs(s) < _TRIG_EPS or abs(c) < _TRIG_EPS:
        raise TrivialCaseError(f'phi={case.phi!r}: sin(phi) and cos(phi) must both be nonzero')
    return s, c


def _eps(case: ReductionCase) -> int:
    if case.eps not in (1, -1):
        raise ParamError(f'eps must be +1 or -1, got {case.eps!r}')
    return int(case.eps)


def derived_params(case: ReductionCase) -> DerivedParams:
    if case.case == 'G_H2':
        _eps(case)
        return DerivedParams()

    s, c = _trig(case)
    gamma = c / s
    if case.case == 'G_H3':
        return DerivedParams(gamma=gamma)

    if case.c1 is None or case.c1 == 0:
        raise ParamError(f'c1 must be nonzero, got {case.c1!r}')
    c1 = case.c1
    beta = (c1 + 1) / c1

    if case.case == 'S_H2':
        kappa = case.sigma2 / (2 * gamma * c1 ** 2)
        return DerivedParams(gamma=gamma, beta=beta, kappa=kappa)

    kappa = case.sigma2 / (2 * c1 ** 2)
    spread = 4 * (beta - 1) * gamma + kappa
    theta = kappa * spread
    if case.case == 'S_H3':
        if case.x is None or case.x == 0:
            raise ParamError(f'x must be nonzero, got {case.x!r}')
        shift = 1.0 / (case.x * s)
        out = {'delta': shift}
    else:
        shift = _eps(case) / s
        out = {'eta': shift}
    zeta = 4 * (beta - 1) * shift / spread if spread != 0 else math.inf
    return DerivedParams(gamma=gamma, beta=beta, kappa=kappa, theta=theta, zeta=zeta,
                         a1=4 * kappa * (beta - 1) * shift, **out)


@dataclass(frozen=True)
class Chart:
    """Invariant coordinates of one case: z(S, t), W(S, t, u) and the way back to u."""
    case:   str
    params: DerivedParams
    eps:    Optional[int] = None

    def z(self, S, t):
        S = np.asarray(S, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(S <= 0):
            raise DomainError('invariant coordinates need S > 0')
        if self.case == 'G_H2':
            return S + 0.0 * t
        return np.log(S) - self.params.gamma * t

    def w(self, S, t, u):
        S = np.asarray(S, dtype=float)
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        if np.any(S <= 0):
            raise DomainError('invariant coordinates need S > 0')
        if self.case == 'G_H2':
            return u - self.eps * t
        if self.case == 'G_H3':
            return u / S
        if self.case == 'S_H2':
            return u + 0.0 * t
        if self.case == 'S_H3':
            if np.any(u <= 0):
                raise DomainError('the S_H3 chart needs u > 0')
            return np.log(u) - self.params.delta * t
        return u - self.params.eta * t

    def u(self, S, t, W):
        S = np.asarray(S, dtype=float)
        t = np.asarray(t, dtype=float)
        W = np.asarray(W, dtype=float)
        if self.case == 'G_H2':
            return W + self.eps * t
        if self.case == 'G_H3':
            return S * W
        if self.case == 'S_H2':
            return W + 0.0 * t
        if self.case == 'S_H3':
            return np.exp(W + self.params.delta * t)
        return W + self.params.eta * t

    def derivatives(self, S, t, W, Y, p):
        """(u, u_t, u_S, u_SS) from W, Y = W' and p = Y' at z(S, t)."""
        S = np.asarray(S, dtype=float)
        u = self.u(S, t, W)
        if self.case == 'G_H2':
            return u, np.full_like(u, float(self.eps)), Y + 0.0 * u, p + 0.0 * u
        gamma = self.params.gamma
        if self.case == 'G_H3':
            return u, -gamma * S * Y, W + Y, (Y + p) / S
        if self.case == 'S_H3':
            return (u, u * (self.params.delta - gamma * Y), u * Y / S,
                    u * (p + Y ** 2 - Y) / S ** 2)
        drift = self.params.eta if self.case == 'S_H4' else 0.0
        return u, drift - gamma * Y, Y / S, (p - Y) / S ** 2


def chart(case: ReductionCase, params: Optional[DerivedParams] = None) -> Chart:
    return Chart(case.case, params or derived_params(case), case.eps)


def invariant_coords(case: ReductionCase, S, t, u=None):
    """z at (S, t), plus W when u is given, and the chart that produced them."""
    ch = chart(case)
    z = ch.z(S, t)
    w = ch.w(S, t, u) if u is not None else None
    return z, w, ch


def generator(case: ReductionCase):
    """The single field spanning the case's subalgebra."""
    algebra, name = SUBALGEBRAS[case.case]
    (field_,) = subalgebra(algebra, name, phi=case.phi or 0.0, x=case.x or 0.0,
                           eps=case.eps or 1)
    return field_


def check_chart_invariance(case: ReductionCase, points=None, eps_values=(-1.0, -0.3, 0.5, 1.0)) -> float:
    """Largest change of (z, W) when sampled points move along the case's group orbits."""
    ch = chart(case)
    V = generator(case)
    if points is None:
        points = [(S, t, u) for S in (0.5, 1.0, 3.0) for t in (0.0, 0.4) for u in (0.7, 2.5)]
    worst = 0.0
    for S, t, u in points:
        z0, w0 = float(ch.z(S, t)), float(ch.w(S, t, u))
        for e in eps_values:
            S1, t1, u1 = flow(V, e, (S, t, u))
            z1, w1 = float(ch.z(S1, t1)), float(ch.w(S1, t1, u1))
            worst = max(worst, abs(z1 - z0) / (1 + abs(z0)), abs(w1 - w0) / (1 + abs(w0)))
    logger.debug(f'{case.case}: chart invariance defect {worst:.3g}')
    return worst
