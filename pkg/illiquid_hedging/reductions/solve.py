import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..errors import DomainError, NoRealBranchError
from ..numerics import (
    DEFAULT_TOL, ToleranceSpec, Trajectory, adaptive_quadrature, cumulative_quadrature,
    resolve_slope, solve_ivp,
)
from ..surfaces import ClosedFormSurface
from .cases import Chart, DerivedParams, ReductionCase, chart
from .ode import GUARD_TOL, ReducedODE, reduced_ode

logger = logging.getLogger(__name__)

# slack when a query point sits on the end of a tabulated z range
_Z_SLACK = 1e-12


class InvariantSurface(ClosedFormSurface):
    """u(S, t) rebuilt from a tabulated invariant solution through its chart.

    Derivatives are exact given Y, W and the resolved slope Y', so residuals
    measure the reduction rather than a finite-difference stencil.
    """

    family = 'invariant'

    def __init__(self, chart: Chart, z_bounds: Tuple[float, float],
                 Y_at: Callable[[float], float], W_at: Callable[[float], float],
                 slope_at: Callable[[float], float]):
        self.chart = chart
        self.z_bounds = (min(z_bounds), max(z_bounds))
        self._Y_at = Y_at
        self._W_at = W_at
        self._slope_at = slope_at

    def derivatives(self, S, t):
        S, t = np.broadcast_arrays(np.asarray(S, dtype=float), np.asarray(t, dtype=float))
        z = self.chart.z(S, t)
        lo, hi = self.z_bounds
        span = _Z_SLACK * max(1.0, abs(lo), abs(hi))
        if np.any(z < lo - span) or np.any(z > hi + span):
            raise DomainError(f'z in [{z.min():.6g}, {z.max():.6g}] leaves the solved range '
                              f'[{lo:.6g}, {hi:.6g}]')
        zu, inverse = np.unique(np.clip(z, lo, hi), return_inverse=True)
        Y = np.array([self._Y_at(v) for v in zu])
        W = np.array([self._W_at(v) for v in zu])
        p = np.array([self._slope_at(v) for v in zu])
        shape = z.shape
        Y, W, p = (a[inverse].reshape(shape) for a in (Y, W, p))
        return self.chart.derivatives(S, t, W, Y, p)

    def describe(self) -> dict:
        return {'family': self.family, 'case': self.chart.case,
                'z_range': list(self.z_bounds)}


@dataclass
class ReductionResult:
    case:       ReductionCase
    params:     DerivedParams
    ode:        ReducedODE
    trajectory: Trajectory
    labels:     List[str]
    w_nodes:    np.ndarray
    branch_log: List[dict]
    tol:        ToleranceSpec = DEFAULT_TOL
    status:     str = 'ok'
    message:    str = ''
    extra:      dict = field(default_factory=dict)

    @property
    def z(self) -> np.ndarray:
        return self.trajectory.z

    @property
    def Y(self) -> np.ndarray:
        return self.trajectory.y[:, 0]

    @property
    def W(self) -> np.ndarray:
        return self.w_nodes

    @property
    def ok(self) -> bool:
        return self.status == 'ok'

    @property
    def z_bounds(self) -> Tuple[float, float]:
        return float(self.z.min()), float(self.z.max())

    def _interval(self, z: float) -> int:
        zs = self.z
        direction = 1.0 if zs[-1] >= zs[0] else -1.0
        i = np.searchsorted(direction * zs, direction * z, side='right') - 1
        return int(np.clip(i, 0, len(zs) - 2))

    def state_at(self, z: float) -> np.ndarray:
        return np.atleast_1d(self.trajectory(z))

    def Y_at(self, z: float) -> float:
        return float(self.state_at(z)[0])

    def W_at(self, z: float) -> float:
        if self.ode.state_size == 2:
            return float(self.state_at(z)[1])
        i = self._interval(z)
        return float(self.w_nodes[i] + adaptive_quadrature(self.Y_at, self.z[i], z, self.tol))

    def slope_at(self, z: float) -> float:
        label = self.labels[self._interval(z)]
        return self.ode.roots(z, self.state_at(z))[label]

    def surface(self) -> InvariantSurface:
        return InvariantSurface(chart(self.case, self.params), self.z_bounds,
                                self.Y_at, self.W_at, self.slope_at)

    def sidecar(self) -> dict:
        return {
            'case':       self.case.case,
            'params':     self.params.to_dict(),
            'branch_log': self.branch_log,
            'tolerances': self.tol.to_dict(),
            'status':     self.status,
            'z_end':      float(self.z[-1]),
        }


def _label_intervals(ode: ReducedODE, branch: str, traj: Trajectory) -> List[str]:
    """Branch on each accepted step, followed from the start and judged by the secant slope."""
    labels, current = [], branch
    for i in range(len(traj.z) - 1):
        z0, z1 = traj.z[i], traj.z[i + 1]
        mid = 0.5 * (z0 + z1)
        secant = (traj.y[i + 1, 0] - traj.y[i, 0]) / (z1 - z0)
        current, _ = ode.follow(mid, np.atleast_1d(traj(mid)), current, secant)
        labels.append(current)
    return labels


def _branch_log(z0: float, branch: str, traj: Trajectory, labels: List[str]) -> List[dict]:
    log = [{'z': float(z0), 'event': 'start', 'branch': branch}]
    current = branch
    for i, label in enumerate(labels):
        if label != current:
            log.append({'z': float(traj.z[i]), 'event': 'switch', 'from': current, 'to': label})
            logger.warning(f'branch switch {current} -> {label} at z={traj.z[i]:.6g}')
            current = label
    return log


def solve_reduction(case: ReductionCase, z_range, y0: float, branch: str = 'plus',
                    w0: float = 0.0, tol: ToleranceSpec = DEFAULT_TOL,
                    guard_tol: float = GUARD_TOL, max_step: float = np.inf) -> ReductionResult:
    """Integrate the chosen slope branch of the reduced ODE and recover W = w0 + int Y dz.

    A trajectory that loses its real branch is returned with status
    'no_real_branch' and everything computed up to the last accepted step.
    """
    ode = reduced_ode(case, guard_tol)
    z0, z1 = float(z_range[0]), float(z_range[1])
    state0 = np.array([y0, w0][:ode.state_size], dtype=float)
    p0 = ode.resolve(z0, state0, branch)
    logger.info(f'{case.case}: Y({z0:g})={y0:g}, {branch} branch slope {p0:.6g}')

    # branch and slope at the last accepted step; trial stages only read it
    track = {'label': branch, 'p': p0}

    def explicit_rhs(z, y):
        p = ode.roots(z, y)[track['label']]
        ode.check_guard(z, y, p)
        return np.array([p])

    def explicit_step(z, y):
        track['label'], track['p'] = ode.follow(z, y, track['label'], track['p'])

    def coupled_rhs(z, y):
        p = resolve_slope(ode.residual, z, y, track['p'], tol)
        ode.check_guard(z, y, p)
        return np.array([p, y[0]])

    def coupled_step(z, y):
        track['p'] = resolve_slope(ode.residual, z, y, track['p'], tol)

    status, message = 'ok', ''
    try:
        if ode.state_size == 2:
            traj = solve_ivp(coupled_rhs, state0, (z0, z1), tol, max_step=max_step,
                             on_step=coupled_step)
        elif ode.implicit:
            traj = solve_ivp(None, state0, (z0, z1), tol, implicit=ode.residual, yp0=p0,
                             max_step=max_step)
        else:
            traj = solve_ivp(explicit_rhs, state0, (z0, z1), tol, max_step=max_step,
                             on_step=explicit_step)
    except NoRealBranchError as e:
        if e.partial is None:
            raise
        traj, status, message = e.partial, 'no_real_branch', str(e)

    labels = _label_intervals(ode, branch, traj)
    log = _branch_log(z0, branch, traj, labels)
    if status != 'ok':
        log.append({'z': traj.z_end, 'event': 'stop', 'reason': message})

    if ode.state_size == 2:
        w_nodes = traj.y[:, 1].copy()
    else:
        w_nodes = cumulative_quadrature(lambda z: float(np.atleast_1d(traj(z))[0]),
                                        traj.z, start=w0, tol=tol)

    logger.info(f'{case.case}: {len(traj.z)} nodes over [{traj.z[0]:.6g}, {traj.z_end:.6g}], '
                f'status {status}')
    return ReductionResult(case, ode.params, ode, traj, labels, w_nodes, log, tol,
                           status, message)


def solution_table(result: ReductionResult, n: Optional[int] = None):
    """(z, Y, W) on the accepted steps, or on n evenly spaced points of the solved range."""
    if n is None:
        return result.z.copy(), result.Y.copy(), result.W.copy()
    z = np.linspace(result.z[0], result.z[-1], n)
    return (z, np.array([result.Y_at(v) for v in z]),
            np.array([result.W_at(v) for v in z]))
