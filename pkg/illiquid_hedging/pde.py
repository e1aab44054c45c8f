import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridError, GuardError, ParamError
from .model import ModelParams
from .reaction import ReactionFunction
from .surfaces import MIN_GRID_POINTS, ClosedFormSurface, GridSurface

logger = logging.getLogger(__name__)

GUARD_TOL = 1e-10


@dataclass(frozen=True)
class FreyParams:
    sigma: float
    rho:   float
    c1:    float

    def __post_init__(self):
        _check_sigma(self.sigma)
        if not self.rho >= 0:
            raise ParamError(f'rho must be non-negative, got {self.rho!r}')


@dataclass(frozen=True)
class HauptParams:
    sigma: float
    c1:    float

    def __post_init__(self):
        _check_sigma(self.sigma)
        if self.c1 == 0:
            raise ParamError('c1 must be nonzero')


@dataclass(frozen=True)
class SipaParams:
    sigma: float
    c1:    float
    k:     float

    def __post_init__(self):
        _check_sigma(self.sigma)
        if self.c1 == 0:
            raise ParamError('c1 must be nonzero')


def _check_sigma(sigma):
    if not sigma > 0:
        raise ParamError(f'sigma must be positive, got {sigma!r}')


@dataclass(frozen=True)
class Derivatives:
    S:    np.ndarray
    t:    np.ndarray
    u:    np.ndarray
    u_t:  np.ndarray
    u_S:  np.ndarray
    u_SS: np.ndarray


@dataclass
class ResidualReport:
    model:            str
    S:                np.ndarray
    t:                np.ndarray
    residual:         np.ndarray
    margin:           np.ndarray
    flagged:          np.ndarray
    max_residual:     float
    rms_residual:     float
    guard_violations: int
    n_interior:       int

    @property
    def violation_fraction(self) -> float:
        return self.guard_violations / self.n_interior

    def to_dict(self) -> dict:
        return {
            'model':            self.model,
            'max_residual':     _json_float(self.max_residual),
            'rms_residual':     _json_float(self.rms_residual),
            'guard_violations': int(self.guard_violations),
            'n_interior':       int(self.n_interior),
        }


def _json_float(x: float):
    return float(x) if np.isfinite(x) else None


def _second_difference(u: np.ndarray, x: np.ndarray, axis: int) -> np.ndarray:
    """Three-point second derivative at interior nodes of a possibly nonuniform axis."""
    u = np.moveaxis(u, axis, -1)
    hm = np.diff(x)[:-1]
    hp = np.diff(x)[1:]
    d2 = 2.0 * ((u[..., 2:] - u[..., 1:-1]) / hp - (u[..., 1:-1] - u[..., :-2]) / hm) / (hp + hm)
    return np.moveaxis(d2, -1, axis)


def grid_derivatives(surface: GridSurface) -> Derivatives:
    n_t, n_S = surface.shape
    if n_t < MIN_GRID_POINTS or n_S < MIN_GRID_POINTS:
        raise GridError(f'need at least {MIN_GRID_POINTS} points per axis, got {n_S} x {n_t} (S x t)')

    u = surface.u
    # np.gradient uses the second-order nonuniform central stencil at interior nodes
    u_t = np.gradient(u, surface.t, axis=0)[1:-1, 1:-1]
    u_S = np.gradient(u, surface.S, axis=1)[1:-1, 1:-1]
    u_SS = _second_difference(u, surface.S, axis=1)[1:-1, :]

    S, t = np.meshgrid(surface.S[1:-1], surface.t[1:-1])
    return Derivatives(S, t, u[1:-1, 1:-1], u_t, u_S, u_SS)


def surface_derivatives(u, S=None, t=None) -> Derivatives:
    if isinstance(u, GridSurface):
        return grid_derivatives(u)
    if not isinstance(u, ClosedFormSurface):
        raise TypeError(f'unsupported surface type {type(u).__name__}')
    if S is None or t is None:
        raise GridError('closed-form surfaces need S and t sample axes')
    S, t = np.meshgrid(np.asarray(S, dtype=float), np.asarray(t, dtype=float))
    return Derivatives(S, t, *u.derivatives(S, t))


def _report(model: str, d: Derivatives, numerator: np.ndarray, margin: np.ndarray,
            sigma2: float, guard_tol: float, strict: bool) -> ResidualReport:
    scale = 1.0 + np.abs(sigma2 * d.S ** 2 * d.u_SS)
    flagged = (np.abs(margin) < guard_tol * scale) & (numerator != 0)

    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        term = np.where(numerator == 0, 0.0, numerator / margin ** 2)
    residual = d.u_t + term
    residual = np.where(flagged, np.nan, residual)

    n_interior = residual.size
    violations = int(flagged.sum())
    good = residual[~flagged]
    if good.size:
        max_res = float(np.max(np.abs(good)))
        rms_res = float(np.sqrt(np.mean(good ** 2)))
    else:
        max_res = rms_res = float('nan')

    report = ResidualReport(model, d.S[0, :], d.t[:, 0], residual, margin, flagged,
                            max_res, rms_res, violations, n_interior)
    if violations:
        logger.warning(f'{model}: {violations}/{n_interior} points violate the denominator guard')
    if strict and violations == n_interior:
        raise GuardError(f'{model}: all {n_interior} interior points violate the denominator guard',
                         report=report)
    return report


def residual_black_scholes(p: ModelParams, u, S=None, t=None) -> ResidualReport:
    d = surface_derivatives(u, S, t)
    numerator = 0.5 * p.sigma2 * d.S ** 2 * d.u_SS
    return _report('black_scholes', d, numerator, np.ones_like(d.u), p.sigma2, GUARD_TOL, False)


def residual_general(g: ReactionFunction, p: ModelParams, u, S=None, t=None,
                     guard_tol: float = GUARD_TOL, strict: bool = True) -> ResidualReport:
    """u_t + sigma^2 S^2 u_SS / (2 (1 - rho g'/g(rho u_S) S u_SS)^2)."""
    d = surface_derivatives(u, S, t)
    margin = np.ones_like(d.u)
    # g only enters where the feedback term is switched on
    active = (d.u_SS != 0) & (p.rho != 0)
    if np.any(active):
        lg = np.asarray(g.log_derivative(p.rho * d.u_S[active]))
        margin[active] = 1.0 - p.rho * lg * d.S[active] * d.u_SS[active]
    numerator = 0.5 * p.sigma2 * d.S ** 2 * d.u_SS
    return _report('general', d, numerator, margin, p.sigma2, guard_tol, strict)


def residual_special(model: str, params, u, S=None, t=None,
                     guard_tol: float = GUARD_TOL, strict: bool = True) -> ResidualReport:
    d = surface_derivatives(u, S, t)
    sigma2 = params.sigma ** 2
    if model == 'frey':
        margin = 1.0 - params.rho * params.c1 * d.S * d.u_SS
        numerator = 0.5 * sigma2 * d.S ** 2 * d.u_SS
    elif model == 'haupt':
        margin = d.u_S - params.c1 * d.S * d.u_SS
        numerator = 0.5 * sigma2 * d.S ** 2 * d.u_SS * d.u_S ** 2
    elif model == 'sipa':
        base = 1.0 + params.k * d.u_S
        margin = base + (params.k / params.c1) * d.S * d.u_SS
        numerator = 0.5 * sigma2 * base ** 2 * d.S ** 2 * d.u_SS / params.c1 ** 2
    else:
        raise ParamError(f'Unknown model: {model!r} (available: frey, haupt, sipa)')
    return _report(model, d, numerator, margin, sigma2, guard_tol, strict)


def special_params(model: str, sigma: float, c1: float, rho: Optional[float] = None,
                   k: Optional[float] = None):
    if model == 'frey':
        return FreyParams(sigma, rho or 0.0, c1)
    if model == 'haupt':
        return HauptParams(sigma, c1)
    if model == 'sipa':
        if k is None:
            raise ParamError('sipa model needs k')
        return SipaParams(sigma, c1, k)
    raise ParamError(f'Unknown model: {model!r} (available: frey, haupt, sipa)')
