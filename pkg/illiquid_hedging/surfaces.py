import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError, GridError

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 5


class ClosedFormSurface(ABC):
    """Candidate solution u(S, t) with analytic u_t, u_S, u_SS."""

    kind = 'closed_form'
    family = 'closed_form'

    @abstractmethod
    def derivatives(self, S, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(u, u_t, u_S, u_SS) broadcast over S and t."""
        ...

    def __call__(self, S, t):
        return self.derivatives(S, t)[0]

    def sample(self, S_axis, t_axis) -> 'GridSurface':
        S, t = np.meshgrid(np.asarray(S_axis, float), np.asarray(t_axis, float))
        return GridSurface(S_axis, t_axis, self(S, t))

    def describe(self) -> dict:
        return {'family': self.family}


@dataclass(frozen=True)
class PowerExpSurface(ClosedFormSurface):
    """u = sum_i c_i S^p_i exp(q_i t) + drift t.

    Covers the power-option solutions, the excluded families and the
    Black-Scholes test surfaces.
    """
    terms:  Tuple[Tuple[float, float, float], ...]
    drift:  float = 0.0
    family: str = 'power_exp'

    def derivatives(self, S, t):
        S = np.asarray(S, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(S <= 0):
            raise DomainError('closed-form surfaces need S > 0')
        shape = np.broadcast(S, t).shape
        u = np.full(shape, 0.0) + self.drift * t
        u_t = np.full(shape, self.drift)
        u_S = np.zeros(shape)
        u_SS = np.zeros(shape)
        for c, p, q in self.terms:
            if c == 0:
                continue
            e = c * S ** p * np.exp(q * t)
            u = u + e
            u_t = u_t + q * e
            if p != 0:
                u_S = u_S + p * e / S
                u_SS = u_SS + p * (p - 1) * e / S ** 2
        return u, u_t, u_S, u_SS

    def describe(self) -> dict:
        return {'family': self.family, 'terms': [list(term) for term in self.terms],
                'drift': self.drift}


@dataclass(frozen=True)
class AffineMap:
    """x -> scale * x + shift, scale > 0."""
    scale: float = 1.0
    shift: float = 0.0

    def __call__(self, x):
        return self.scale * np.asarray(x, dtype=float) + self.shift

    def inverse(self, y):
        return (np.asarray(y, dtype=float) - self.shift) / self.scale


@dataclass(frozen=True)
class TransformedSurface(ClosedFormSurface):
    """Graph of `base` pushed forward by independent affine maps of S, t and u."""
    base:   ClosedFormSurface
    s_map:  AffineMap
    t_map:  AffineMap
    u_map:  AffineMap
    family: str = 'transformed'

    def derivatives(self, S, t):
        S0 = self.s_map.inverse(S)
        t0 = self.t_map.inverse(t)
        if np.any(S0 <= 0):
            raise DomainError('pre-image of S under the flow is not positive')
        u, u_t, u_S, u_SS = self.base.derivatives(S0, t0)
        m = self.u_map.scale
        return (self.u_map(u), m * u_t / self.t_map.scale, m * u_S / self.s_map.scale,
                m * u_SS / self.s_map.scale ** 2)

    def describe(self) -> dict:
        return {'family': self.family, 'base': self.base.describe(),
                's_map': [self.s_map.scale, self.s_map.shift],
                't_map': [self.t_map.scale, self.t_map.shift],
                'u_map': [self.u_map.scale, self.u_map.shift]}


class GridSurface:
    """u sampled on a rectangular (S, t) lattice; u has shape (len(t), len(S))."""

    kind = 'grid'
    family = 'grid'

    def __init__(self, S: Sequence[float], t: Sequence[float], u):
        self.S = np.array(S, dtype=float)
        self.t = np.array(t, dtype=float)
        self.u = np.array(u, dtype=float)
        if self.S.ndim != 1 or self.t.ndim != 1:
            raise GridError('grid axes must be one-dimensional')
        if self.u.shape != (len(self.t), len(self.S)):
            raise GridError(f'u has shape {self.u.shape}, expected {(len(self.t), len(self.S))}')
        if np.any(np.diff(self.S) <= 0) or np.any(np.diff(self.t) <= 0):
            raise GridError('grid axes must be strictly increasing')
        if np.any(self.S <= 0):
            raise GridError('S axis must be strictly positive')
        for arr in (self.S, self.t, self.u):
            arr.flags.writeable = False

    @property
    def shape(self):
        return self.u.shape

    def describe(self) -> dict:
        return {'family': self.family, 'n_S': len(self.S), 'n_t': len(self.t)}


def linear_axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n < MIN_GRID_POINTS:
        raise GridError(f'need at least {MIN_GRID_POINTS} points per axis, got {n}')
    if not hi > lo:
        raise GridError(f'axis range must be increasing, got [{lo!r}, {hi!r}]')
    return np.linspace(lo, hi, n)
