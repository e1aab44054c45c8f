"""Implicit solution of the S_H4 reduction and its numerical inversion.

Along a slope branch s of the S_H4 first-order ODE

    dz/dY = 2 (eta - gamma Y) / (Y (A + s sqrt(B)))
          = (A - s sqrt(B)) / (2 Y (Q - P Y))

with A = 2 beta (eta - gamma Y) - kappa Y, B = Y (theta Y - a1),
P = beta^2 gamma + kappa and Q = beta^2 eta. Integrating the second form gives
a closed-form z(Y) made of four logarithms; it is checked against the
integrand before use and replaced by quadrature when the check fails.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import BracketError, DomainError, ParamError
from ..numerics import (
    DEFAULT_TOL, ToleranceSpec, adaptive_quadrature, cumulative_quadrature, find_root_bracketed,
)
from .cases import DerivedParams, ReductionCase, chart, derived_params
from .solve import InvariantSurface

logger = logging.getLogger(__name__)

# finite-difference check of the closed form against the integrand
_VALIDATION_POINTS = 24
_VALIDATION_RTOL = 1e-6

# inversion searches Y up to this multiple of the lower end of the real domain
DEFAULT_Y_SPAN = 1e4

INVERSION_TOL = ToleranceSpec(atol=1e-13, rtol=1e-13, max_iter=500)

# reference H4 curve
FIG2 = {'c1': 10.0, 'eps': 1, 'phi': math.pi / 4, 'sigma2': 0.02, 'd1': 0.0,
        'z_window': (0.4, 3.4), 'y_window': (0.1, 30.0)}


def fig2_case() -> ReductionCase:
    return ReductionCase('S_H4', sigma=math.sqrt(FIG2['sigma2']), phi=FIG2['phi'],
                         eps=FIG2['eps'], c1=FIG2['c1'])


def _check(params: DerivedParams):
    if params.eta is None or params.theta is None:
        raise ParamError('the H4 solution needs S_H4 parameters (eta, theta)')


def real_domain_start(params: DerivedParams) -> float:
    """Smallest Y > 0 with B(Y) >= 0, or 0 when B >= 0 on all of Y > 0."""
    _check(params)
    if params.theta > 0 and params.a1 > 0:
        return params.zeta
    if params.theta >= 0 and params.a1 <= 0:
        return 0.0
    raise DomainError(f'no unbounded real branch: theta={params.theta!r}, a1={params.a1!r}')


def _sqrt_b(params: DerivedParams, Y: float) -> float:
    if not Y > 0:
        raise DomainError(f'the H4 solution needs Y > 0, got {Y!r}')
    lin = params.theta * Y - params.a1
    if lin < 0:
        # rounding at the branch point Y = zeta
        if lin < -1e-13 * (abs(params.theta * Y) + abs(params.a1)):
            raise DomainError(f'Y={Y!r} lies outside the real branch (Y >= {params.zeta!r})')
        lin = 0.0
    return math.sqrt(Y * lin)


def integrand_h4(params: DerivedParams, Y: float, sign: int = 1) -> float:
    """dz/dY on slope branch `sign`, in whichever of the two equal forms is better conditioned."""
    _check(params)
    b, g, k, eta = params.beta, params.gamma, params.kappa, params.eta
    r = _sqrt_b(params, Y)
    A = 2 * b * (eta - g * Y) - k * Y
    near, far = A + sign * r, A - sign * r
    if abs(near) >= abs(far):
        return 2 * (eta - g * Y) / (Y * near)
    P, Q = b * b * g + k, b * b * eta
    return far / (2 * Y * (Q - P * Y))


def _log_coefficients(params: DerivedParams, sign: int):
    b, g, k, eta = params.beta, params.gamma, params.kappa, params.eta
    P = b * b * g + k
    Y0 = b * b * eta / P
    root_rd = abs(k * b * eta * (2 - b) / P)
    c_rat = k * (2 - b) / (2 * b * P)
    c_irr = root_rd / (2 * P * Y0)
    c_pole = sign * c_irr - c_rat
    if abs(c_pole) <= 1e-12 * (abs(c_irr) + abs(c_rat)):
        c_pole = 0.0
    return P, Y0, root_rd, c_irr, c_pole


def closed_form_h4(params: DerivedParams, Y: float, sign: int = 1) -> float:
    """Antiderivative of `integrand_h4`, up to an additive constant."""
    _check(params)
    b, k, theta, a1 = params.beta, params.kappa, params.theta, params.a1
    P, Y0, root_rd, c_irr, c_pole = _log_coefficients(params, sign)
    r = _sqrt_b(params, Y)
    t = Y - Y0
    N = 2 * root_rd ** 2 + (2 * theta * Y0 - a1) * t + 2 * root_rd * r
    z = math.log(Y) / b - sign * c_irr * math.log(abs(N))
    z += sign * math.sqrt(theta) / (2 * P) * math.log(theta * Y - 0.5 * a1 + math.sqrt(theta) * r)
    if c_pole:
        z += c_pole * math.log(abs(t))
    return z


def closed_form_available(params: DerivedParams) -> bool:
    b, g, k, eta = params.beta, params.gamma, params.kappa, params.eta
    P = b * b * g + k
    return (eta > 0 and params.theta > 0 and k != 0 and P != 0 and b != 2)


class ImplicitH4Solution:
    """z(Y) on one slope branch, anchored so that z(anchor_y) = anchor_z."""

    def __init__(self, params: DerivedParams, sign: int = 1,
                 anchor: Optional[Tuple[float, float]] = None, y_span: float = DEFAULT_Y_SPAN,
                 tol: ToleranceSpec = DEFAULT_TOL):
        _check(params)
        if sign not in (1, -1):
            raise ParamError(f'sign must be +1 or -1, got {sign!r}')
        self.params = params
        self.sign = sign
        self.tol = tol
        lo = real_domain_start(params)
        self.y_lo = lo if lo > 0 else 1.0 / y_span
        self.y_hi = max(lo, 1.0) * y_span
        self.anchor_y, self.anchor_z = anchor if anchor is not None else (self.y_lo, 0.0)
        self.method = 'quadrature'
        if closed_form_available(params) and self._validate():
            self.method = 'closed_form'
            self._offset = self.anchor_z - closed_form_h4(params, self.anchor_y, sign)
        else:
            logger.warning(f'H4 closed form unavailable or inconsistent (eta={params.eta:.6g}, '
                           f'sign={sign:+d}), using quadrature')
        self.y_hi = self._monotone_end()

    def _validate(self) -> bool:
        ys = np.geomspace(self.y_lo * 1.05, min(self.y_hi, 1e3 * self.y_lo), _VALIDATION_POINTS)
        for Y in ys:
            h = 1e-6 * Y
            try:
                fd = (closed_form_h4(self.params, Y + h, self.sign)
                      - closed_form_h4(self.params, Y - h, self.sign)) / (2 * h)
                exact = self.integrand(Y)
            except (ValueError, ZeroDivisionError):
                return False
            if not math.isfinite(fd) or abs(fd - exact) > _VALIDATION_RTOL * (1 + abs(exact)):
                return False
        return True

    def _monotone_end(self) -> float:
        """Largest Y such that dz/dY keeps one sign on [y_lo, Y]."""
        ys = np.geomspace(self.y_lo * (1 + 1e-9), self.y_hi, 400)
        signs = np.sign([self.integrand(Y) for Y in ys])
        self.direction = int(signs[0]) or 1
        flips = np.nonzero(signs != signs[0])[0]
        if flips.size:
            end = float(ys[flips[0] - 1])
            logger.warning(f'dz/dY changes sign near Y={ys[flips[0]]:.6g}; '
                           f'monotone segment ends at {end:.6g}')
            return end
        return self.y_hi

    def integrand(self, Y: float) -> float:
        return integrand_h4(self.params, Y, self.sign)

    def __call__(self, Y: float) -> float:
        if self.method == 'closed_form':
            return closed_form_h4(self.params, Y, self.sign) + self._offset
        return self.anchor_z + adaptive_quadrature(self.integrand, self.anchor_y, Y, self.tol)

    @property
    def z_range(self) -> Tuple[float, float]:
        ends = (self(self.y_lo), self(self.y_hi))
        return min(ends), max(ends)

    def invert(self, z: float) -> float:
        lo, hi = self.z_range
        span = 1e-12 * max(1.0, abs(lo), abs(hi))
        if not lo - span <= z <= hi + span:
            raise BracketError(f'z={z!r} is outside the monotone segment [{lo:.6g}, {hi:.6g}]')
        z = min(max(z, lo), hi)
        return find_root_bracketed(lambda Y: self(Y) - z, self.y_lo, self.y_hi, INVERSION_TOL)


def implicit_solution_h4(params: DerivedParams, Y: float, sign: int = 1,
                         anchor: Optional[Tuple[float, float]] = None) -> float:
    return ImplicitH4Solution(params, sign, anchor)(Y)


@dataclass
class H4Reconstruction:
    solution: ImplicitH4Solution
    z:        np.ndarray
    Y:        np.ndarray
    W:        np.ndarray
    surface:  InvariantSurface


def invert_and_reconstruct(case: ReductionCase, z_range, sign: int = 1, w0: float = 0.0,
                           n: int = 200, anchor: Optional[Tuple[float, float]] = None,
                           tol: ToleranceSpec = DEFAULT_TOL) -> H4Reconstruction:
    """Y(z) by inverting z(Y), W = w0 + int Y dz, and u(S, t) = W(ln S - gamma t) + eta t."""
    if case.case != 'S_H4':
        raise ParamError(f'inversion is defined for S_H4, not {case.case}')
    params = derived_params(case)
    sol = ImplicitH4Solution(params, sign, anchor, tol=tol)
    z = np.linspace(float(z_range[0]), float(z_range[1]), n)
    Y = np.array([sol.invert(v) for v in z])
    W = cumulative_quadrature(sol.invert, z, start=w0, tol=tol)

    def W_at(v):
        i = int(np.clip(np.searchsorted(z, v, side='right') - 1, 0, n - 2))
        return float(W[i] + adaptive_quadrature(sol.invert, z[i], v, tol))

    def slope_at(v):
        return 1.0 / sol.integrand(sol.invert(v))

    surface = InvariantSurface(chart(case, params), (z[0], z[-1]), sol.invert, W_at, slope_at)
    logger.info(f'S_H4 reconstruction over z in [{z[0]:.6g}, {z[-1]:.6g}] ({sol.method})')
    return H4Reconstruction(sol, z, Y, W, surface)


def fig2_table(n: int = 200):
    """(z, Y) of the plotted H4 solution: monotone branch with z(zeta) = 0.4, clipped to the window."""
    params = derived_params(fig2_case())
    z_lo, z_hi = FIG2['z_window']
    sol = ImplicitH4Solution(params, 1, anchor=(params.zeta, z_lo))
    z_hi = min(z_hi, sol(FIG2['y_window'][1]))
    z = np.linspace(z_lo, z_hi, n)
    return z, np.array([sol.invert(v) for v in z])


def euler_substitution_check(params: DerivedParams, taus=None, sign: int = 1,
                             variant: str = 'H4') -> float:
    """Largest relative gap between the substituted integrand and its rational form.

    Y = theta zeta / (theta - tau^2) turns sqrt(B) into the signed
    theta zeta tau / (theta - tau^2), so both sides are rational in tau.
    """
    theta, zeta = params.theta, params.zeta
    if theta is None or zeta is None:
        raise ParamError('the Euler substitution needs theta and zeta')
    if zeta == 0:
        raise ParamError('zeta = 0: the Euler substitution degenerates')
    if not theta > 0:
        raise ParamError(f'the Euler substitution needs theta > 0, got {theta!r}')
    if taus is None:
        taus = np.linspace(0.1, 0.9, 100) * math.sqrt(theta)
    taus = np.asarray(taus, dtype=float)
    gap = theta - taus ** 2
    if np.any(np.abs(gap) <= 1e-15 * theta):
        raise DomainError('tau^2 = theta is a pole of the substitution')

    b, g, k = params.beta, params.gamma, params.kappa
    Y = theta * zeta / gap
    r = theta * zeta * taus / gap
    dY = 2 * theta * zeta * taus / gap ** 2

    if variant == 'H4':
        eta = params.eta
        A = 2 * b * (eta - g * Y) - k * Y
        lhs = 2 * (eta - g * Y) / (Y * (A + sign * r)) * dY
        b2 = 2 * b * eta / (theta * zeta)
        b0 = k + 2 * b * g - 2 * b * eta / zeta
        den = b2 * taus ** 2 - sign * taus + b0
        first = -4 * eta / (theta * zeta) * taus / den
        second = 4 * g * taus / (gap * den)
        rhs = first + second
        scale = 1 + np.abs(first) + np.abs(second)
    elif variant == 'H3':
        delta = params.delta
        lin = delta - g * Y
        lhs = -2 * lin / (Y * (2 * lin * (Y - b) + k * Y - sign * r)) * dY
        n_ = delta * gap - g * theta * zeta
        m_ = theta * zeta - b * gap
        rhs = -4 * taus * n_ / (2 * n_ * m_ + gap * theta * zeta * (k - sign * taus))
        scale = 1 + np.abs(rhs)
    else:
        raise ParamError(f'variant must be H3 or H4, got {variant!r}')
    return float(np.max(np.abs(lhs - rhs) / np.maximum(scale, np.abs(lhs))))
