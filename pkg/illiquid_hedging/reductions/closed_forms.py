import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..errors import ComplexRootsError, ParamError
from ..surfaces import ClosedFormSurface, PowerExpSurface
from .cases import DerivedParams, ReductionCase, derived_params

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosedFormSolution:
    family:  str
    surface: ClosedFormSurface
    case:    ReductionCase
    params:  DerivedParams
    d1:      float
    d2:      float
    k:       Optional[float] = None
    branch:  Optional[str] = None
    extra:   dict = field(default_factory=dict)

    def __call__(self, S, t):
        return self.surface(S, t)

    def describe(self) -> dict:
        out = {'family': self.family, 'case': self.case.case, 'd1': self.d1, 'd2': self.d2,
               'params': self.params.to_dict(), 'surface': self.surface.describe()}
        if self.k is not None:
            out['k'] = self.k
            out['branch'] = self.branch
        out.update(self.extra)
        return out


def quadratic_value(k: float, beta: float, kappa: float) -> float:
    return k * k - k * (2 * beta + kappa) + (beta * beta + kappa)


def power_roots(beta: float, kappa: float) -> Tuple[float, float]:
    disc = kappa * (kappa + 4 * (beta - 1))
    if disc < 0:
        raise ComplexRootsError(disc)
    half = 0.5 * math.sqrt(disc)
    mid = beta + 0.5 * kappa
    # k1 * k2 = beta^2 + kappa; take the larger-magnitude root directly
    big = mid + half if mid >= 0 else mid - half
    other = (beta * beta + kappa) / big if big != 0 else mid
    k1, k2 = sorted((big, other))
    return k1, k2


def _select_root(beta: float, kappa: float, branch) -> Tuple[float, str]:
    k1, k2 = power_roots(beta, kappa)
    if branch in ('k1', 'minus', 1):
        return k1, 'k1'
    if branch in ('k2', 'plus', 2):
        return k2, 'k2'
    raise ParamError(f'branch must be k1/minus or k2/plus, got {branch!r}')


def build_power_option(case: ReductionCase, branch='k1', d1: float = 1.0,
                       d2: float = 0.0) -> ClosedFormSolution:
    """u = d1 S^k exp(-gamma k t) + d2 with k a root of the S_H2 quadratic."""
    if case.case != 'S_H2':
        raise ParamError(f'power-option solutions come from S_H2, not {case.case}')
    params = derived_params(case)
    k, label = _select_root(params.beta, params.kappa, branch)
    surface = PowerExpSurface(((d1, k, -params.gamma * k), (d2, 0.0, 0.0)),
                              family='power_option')
    logger.debug(f'power option: k={k:.12g} ({label}), gamma={params.gamma:.12g}')
    return ClosedFormSolution('power_option', surface, case, params, d1, d2, k=k, branch=label)


def linear_limit(gamma: float, d1: float = 1.0, d2: float = 0.0) -> PowerExpSurface:
    """k = 1 member of the power-option family, u = d1 S exp(-gamma t) + d2."""
    return PowerExpSurface(((d1, 1.0, -gamma), (d2, 0.0, 0.0)), family='power_option')


def excluded_family(case: ReductionCase, d1: float = 1.0, d2: float = 0.0) -> ClosedFormSolution:
    """Surfaces on which the reduced denominator vanishes identically."""
    params = derived_params(case)
    beta, gamma = params.beta, params.gamma
    if case.case == 'S_H2':
        surface = PowerExpSurface(((d1, beta, -gamma * beta), (d2, 0.0, 0.0)),
                                  family='excluded_s_h2')
    elif case.case == 'S_H3':
        delta = params.delta
        surface = PowerExpSurface(((d1, beta, delta - beta * gamma), (d2, 0.0, delta)),
                                  family='excluded_s_h3')
    elif case.case == 'S_H4':
        surface = PowerExpSurface(((d1, beta, -beta * gamma),), drift=params.eta * d2,
                                  family='excluded_s_h4')
    else:
        raise ParamError(f'no excluded family for {case.case}')
    return ClosedFormSolution(surface.family, surface, case, params, d1, d2)


def power_payoff(S, k: float, strike: float, kind: str = 'call'):
    """Expiry payoff of a power option: max(0, S^k - B) or max(0, B - S^k)."""
    S = np.asarray(S, dtype=float)
    powered = S ** k
    if kind == 'call':
        return np.maximum(0.0, powered - strike)
    if kind == 'put':
        return np.maximum(0.0, strike - powered)
    raise ParamError(f'kind must be call or put, got {kind!r}')


# reference power-option surface; sigma is chosen so that kappa = 0.11
FIG1 = {'c1': 2.1, 'phi': 1.17, 'kappa': 0.11, 'd1': 1.0, 'd2': 0.0,
        's_window': (0.1, 100.0), 't_window': (0.1, 1.0)}


def fig1_case() -> ReductionCase:
    gamma = math.cos(FIG1['phi']) / math.sin(FIG1['phi'])
    sigma2 = FIG1['kappa'] * 2 * gamma * FIG1['c1'] ** 2
    return ReductionCase('S_H2', sigma=math.sqrt(sigma2), phi=FIG1['phi'], c1=FIG1['c1'])


def fig1_solution(branch='k1') -> ClosedFormSolution:
    return build_power_option(fig1_case(), branch, FIG1['d1'], FIG1['d2'])
