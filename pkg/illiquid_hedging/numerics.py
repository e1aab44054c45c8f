import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, interpolate, optimize

from .errors import (
    BracketError, ConfigError, ConvergenceError, NoRealBranchError, StepUnderflowError,
)

logger = logging.getLogger(__name__)

_METHODS = {
    'RK45':   integrate.RK45,
    'DOP853': integrate.DOP853,
}

# implicit-mode slope search: half-width doubles this many times before giving up
_BRACKET_EXPANSIONS = 8

_ROOT_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceSpec:
    atol:       float = 1e-10
    rtol:       float = 1e-8
    max_iter:   int   = 200
    max_levels: int   = 50

    def __post_init__(self):
        for key in ('atol', 'rtol'):
            val = getattr(self, key)
            if not val > 0:
                raise ConfigError(f'tolerances.{key} must be positive, got {val!r}')
        if self.max_iter < 10:
            raise ConfigError(f'tolerances.max_iter must be >= 10, got {self.max_iter!r}')
        if self.max_levels < 1:
            raise ConfigError(f'tolerances.max_levels must be positive, got {self.max_levels!r}')

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> 'ToleranceSpec':
        data = data or {}
        known = {k: data[k] for k in ('atol', 'rtol', 'max_iter', 'max_levels') if k in data}
        return cls(**known)

    def to_dict(self) -> dict:
        return {'atol': self.atol, 'rtol': self.rtol,
                'max_iter': self.max_iter, 'max_levels': self.max_levels}


DEFAULT_TOL = ToleranceSpec()


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float,
                        tol: ToleranceSpec = DEFAULT_TOL) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not np.isfinite(flo) or not np.isfinite(fhi) or np.sign(flo) == np.sign(fhi):
        raise BracketError(f'root not bracketed on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}')

    # |root - x*| <= atol + 4 eps |x*|; tol.rtol governs integration, not roots
    root, info = optimize.brentq(f, lo, hi, xtol=tol.atol, rtol=_ROOT_RTOL,
                                 maxiter=tol.max_iter, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(f'brentq did not converge after {info.iterations} iterations',
                               estimate=root)
    return float(root)


def adaptive_quadrature(f: Callable[[float], float], a: float, b: float,
                        tol: ToleranceSpec = DEFAULT_TOL) -> float:
    result = integrate.quad(f, a, b, epsabs=tol.atol, epsrel=tol.rtol,
                            limit=tol.max_levels, full_output=1)
    value = float(result[0])
    if len(result) > 3:
        raise ConvergenceError(f'quadrature on [{a!r}, {b!r}]: {result[3]}', estimate=value)
    return value


def cumulative_quadrature(f: Callable[[float], float], nodes, start: float = 0.0,
                          tol: ToleranceSpec = DEFAULT_TOL) -> np.ndarray:
    """Running integral of f from nodes[0], one quadrature per node interval."""
    nodes = np.asarray(nodes, dtype=float)
    out = np.empty_like(nodes)
    acc = start
    out[0] = acc
    for i in range(1, len(nodes)):
        acc += adaptive_quadrature(f, nodes[i - 1], nodes[i], tol)
        out[i] = acc
    return out


def resolve_slope(F: Callable, z: float, y, guess: float,
                  tol: ToleranceSpec = DEFAULT_TOL) -> float:
    """Root of p -> F(z, y, p) nearest to guess, searched in a growing bracket."""
    def f(p):
        return F(z, y, p)

    f0 = f(guess)
    if f0 == 0:
        return guess
    half = (4 * abs(guess) + 1) / 2 ** _BRACKET_EXPANSIONS
    for _ in range(_BRACKET_EXPANSIONS + 1):
        candidates = []
        for lo, hi in ((guess - half, guess), (guess, guess + half)):
            try:
                candidates.append(find_root_bracketed(f, lo, hi, tol))
            except BracketError:
                pass
        if candidates:
            return min(candidates, key=lambda p: abs(p - guess))
        half *= 2
    raise NoRealBranchError(f'no real slope near {guess!r} at z={z!r}', z=z)


@dataclass
class Trajectory:
    z:       np.ndarray
    y:       np.ndarray
    dense:   Callable
    status:  str = 'ok'
    message: str = ''

    def __call__(self, z):
        return self.dense(z)

    @property
    def z_end(self) -> float:
        return float(self.z[-1])


def _fixed_steps(cls, rhs: Callable, z0: float, y0: np.ndarray, z1: float, h: float,
                 on_step: Callable):
    """Steps of exactly h (the last one trimmed to land on z1) with cls's Butcher tableau."""
    n_stages = cls.n_stages
    A, B, C = cls.A[:n_stages, :n_stages], cls.B, cls.C[:n_stages]
    n = max(1, int(np.ceil(abs(z1 - z0) / h - 1e-9)))
    nodes = np.append(z0 + np.sign(z1 - z0) * h * np.arange(n), z1)
    zs, ys, fs = [z0], [y0], [rhs(z0, y0)]
    status, message = 'ok', ''
    for z, z_next in zip(nodes[:-1], nodes[1:]):
        dz = z_next - z
        y = ys[-1]
        K = np.empty((n_stages, len(y)))
        K[0] = fs[-1]
        try:
            for s in range(1, n_stages):
                K[s] = rhs(z + C[s] * dz, y + dz * (A[s, :s] @ K[:s]))
            y_next = y + dz * (B @ K)
            f_next = rhs(z_next, y_next)
        except NoRealBranchError as e:
            status, message = 'no_real_branch', str(e)
            break
        zs.append(float(z_next))
        ys.append(y_next)
        fs.append(f_next)
        if on_step is not None:
            try:
                on_step(float(z_next), y_next)
            except NoRealBranchError as e:
                status, message = 'no_real_branch', str(e)
                break
    return zs, ys, fs, status, message


def solve_ivp(f: Optional[Callable], y0, z_span, tol: ToleranceSpec = DEFAULT_TOL,
              implicit: Optional[Callable] = None, yp0: Optional[float] = None,
              method: str = 'DOP853', step: Optional[float] = None,
              max_step: float = np.inf,
              on_step: Optional[Callable[[float, np.ndarray], None]] = None) -> Trajectory:
    """Integrate y' = f(z, y), or F(z, y, y') = 0 when `implicit` is given.

    Implicit mode is scalar: each stage solves for y' with `resolve_slope`,
    seeded by the slope at the last accepted step. `step` switches to fixed
    steps of that size. `on_step(z, y)` sees every accepted step and nothing
    else, so callers can keep state that trial stages must not touch.
    """
    cls = _METHODS.get(method)
    if cls is None:
        raise ConfigError(f'Unknown integration method: {method!r} (available: {list(_METHODS)})')
    if step is not None and not step > 0:
        raise ConfigError(f'step must be positive, got {step!r}')

    accepted = on_step
    if implicit is not None:
        if yp0 is None:
            raise ConfigError('implicit mode needs an initial slope yp0')
        last = {'slope': float(yp0)}

        def rhs(z, y):
            return np.array([resolve_slope(implicit, z, float(y[0]), last['slope'], tol)])

        def accepted(z, y):
            last['slope'] = resolve_slope(implicit, z, float(y[0]), last['slope'], tol)
            if on_step is not None:
                on_step(z, y)
    else:
        def rhs(z, y):
            return np.atleast_1d(np.asarray(f(z, y), dtype=float))

    z0, z1 = float(z_span[0]), float(z_span[1])
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))

    if step is not None:
        zs, ys, fs, status, message = _fixed_steps(cls, rhs, z0, y0, z1, float(step), accepted)
        n_steps = len(zs) - 1
        dense = None
        if n_steps:
            # the spline needs increasing nodes
            order = slice(None) if z1 >= z0 else slice(None, None, -1)
            dense = interpolate.CubicHermiteSpline(np.array(zs)[order], np.array(ys)[order],
                                                   np.array(fs)[order], axis=0)
    else:
        solver = cls(rhs, z0, y0, z1, rtol=tol.rtol, atol=tol.atol, max_step=max_step)
        zs, ys, pieces = [z0], [y0.copy()], []
        status, message = 'ok', ''
        while solver.status == 'running':
            try:
                msg = solver.step()
            except NoRealBranchError as e:
                status, message = 'no_real_branch', str(e)
                break
            if solver.status == 'failed':
                raise StepUnderflowError(f'integration failed at z={solver.t!r}: {msg}')
            pieces.append(solver.dense_output())
            zs.append(solver.t)
            ys.append(solver.y.copy())
            if accepted is not None:
                try:
                    accepted(solver.t, solver.y)
                except NoRealBranchError as e:
                    status, message = 'no_real_branch', str(e)
                    break
        n_steps = len(pieces)
        dense = integrate.OdeSolution(zs, pieces) if n_steps else None

    if not n_steps:
        raise NoRealBranchError(message or f'no step taken from z={z0!r}', z=z0)
    traj = Trajectory(z=np.array(zs), y=np.array(ys), dense=dense,
                      status=status, message=message)
    if status != 'ok':
        logger.warning(f'integration stopped at z={traj.z_end:.6g}: {message}')
        raise NoRealBranchError(message, z=traj.z_end, partial=traj)
    logger.debug(f'{method}: {n_steps} steps over [{z0}, {z1}]')
    return traj
