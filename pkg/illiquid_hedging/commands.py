import logging
from typing import Callable, Dict

import numpy as np

from . import io
from .config import RunConfig
from .errors import AdmissibilityError, ConfigError, GuardError, HedgingError, NoRealBranchError
from .lie import OPTIMAL_SYSTEMS, structure_constants, subalgebra_dimension
from .model import (
    ModelParams, check_admissibility, duality_table, sample_domain, utility_spec,
)
from .pde import residual_general, residual_special, special_params
from .reaction import create_reaction_function
from .reductions import (
    FIG1, FIG2, ReductionCase, build_power_option, derived_params, excluded_family,
    fig1_solution, fig2_case, fig2_table, solution_table, solve_reduction,
)
from .reductions.cases import GENERAL_CASES
from .surfaces import linear_axis

logger = logging.getLogger(__name__)

FIGURES = ('fig1-left', 'fig1-right', 'fig2')


def _emit(data: dict) -> None:
    print(io.dumps(data))


def build_reaction(rc: RunConfig, checked: bool = True):
    return create_reaction_function(rc.g_config(), checked=checked)


def build_case(rc: RunConfig) -> ReductionCase:
    if rc.case is None:
        raise ConfigError('case is required')
    g = build_reaction(rc) if rc.case.upper() in GENERAL_CASES else None
    return ReductionCase(rc.case, sigma=rc.sigma_value, phi=rc.phi_value, x=rc.x, eps=rc.eps,
                         c1=rc.c1, rho=rc.rho, g=g)


def _slope_branch(branch: str) -> str:
    return {'k1': 'minus', 'k2': 'plus'}.get(branch, branch)


def _root_branch(branch: str) -> str:
    return {'minus': 'k1', 'plus': 'k2'}.get(branch, branch)


def _out(rc: RunConfig, default: str) -> str:
    return rc.out or default


def cmd_model(rc: RunConfig) -> int:
    g = build_reaction(rc, checked=False)
    violations = check_admissibility(g)
    if violations:
        raise AdmissibilityError(violations)

    spec = utility_spec(g)
    table = duality_table(g, sample_domain(g))
    values = table[:, 1]
    steps = np.diff(values)
    direction = 'increasing' if np.all(steps > 0) else 'decreasing' if np.all(steps < 0) else 'mixed'
    report = {
        'g':              {'family': g.name(), **g.params()},
        'domain':         g.domain(),
        'utility':        spec.formula,
        'admissible':     True,
        'monotone':       direction,
        'duality_max_error': float(table[:, 3].max()),
        'samples':        [{'alpha': a, 'g': v, 'U(1/g)': u}
                           for a, v, u, _ in table[:: max(1, len(table) // 10)]],
    }
    logger.info(f'{g.name()}: duality max error {report["duality_max_error"]:.3g}')
    _emit(report)
    if rc.out:
        io.write_json(rc.out, report)
    return 0


def cmd_reduce(rc: RunConfig) -> int:
    case = build_case(rc)
    y0 = 1.0 if rc.y0 is None else rc.y0
    result = solve_reduction(case, (rc.z_min, rc.z_max), y0, _slope_branch(rc.branch), rc.w0,
                             tol=rc.tolerances, guard_tol=rc.guard_tol)
    path = _out(rc, f'{case.case.lower()}_trajectory.csv')
    io.write_trajectory_csv(path, *solution_table(result))
    sidecar = result.sidecar()
    io.write_json(io.sidecar_path(path), sidecar)
    _emit(sidecar)
    if not result.ok:
        logger.error(f'{case.case}: real branch lost, last valid z={result.z[-1]:.12g}')
        return NoRealBranchError.exit_code
    return 0


def _closed_form(rc: RunConfig):
    case = build_case(rc)
    if rc.family == 'power':
        return build_power_option(case, _root_branch(rc.branch), rc.d1, rc.d2)
    if rc.family == 'excluded':
        return excluded_family(case, rc.d1, rc.d2)
    raise ConfigError(f'family must be power or excluded, got {rc.family!r}')


def cmd_closed_form(rc: RunConfig) -> int:
    sol = _closed_form(rc)
    S = linear_axis(rc.s_min, rc.s_max, rc.n_s)
    t = linear_axis(rc.t_min, rc.t_max, rc.n_t)
    St, tt = np.meshgrid(S, t)
    path = _out(rc, f'{sol.family}.csv')
    io.write_surface_csv(path, S, t, sol(St, tt))
    info = sol.describe()
    io.write_json(io.sidecar_path(path), info)
    _emit(info)
    return 0


def _verify_surface(rc: RunConfig):
    """Surface to check, the sample axes for closed forms, and a description."""
    if rc.surface:
        grid = io.read_surface_csv(rc.surface)
        return grid, None, None, {'surface': rc.surface}
    S = linear_axis(rc.s_min, rc.s_max, rc.n_s)
    t = linear_axis(rc.t_min, rc.t_max, rc.n_t)
    if rc.family == 'invariant':
        case = build_case(rc)
        y0 = 1.0 if rc.y0 is None else rc.y0
        result = solve_reduction(case, (rc.z_min, rc.z_max), y0, _slope_branch(rc.branch), rc.w0,
                                 tol=rc.tolerances, guard_tol=rc.guard_tol)
        if not result.ok:
            raise NoRealBranchError(result.message, z=float(result.z[-1]))
        return result.surface(), S, t, {'case': case.case, 'family': 'invariant',
                                        'params': result.params.to_dict()}
    sol = _closed_form(rc)
    return sol.surface, S, t, sol.describe()


def _residual(rc: RunConfig, surface, S, t):
    if rc.case is not None:
        model = 'general' if rc.case.upper() in GENERAL_CASES else 'haupt'
    else:
        model = rc.model or 'general'
    if model == 'general':
        return residual_general(build_reaction(rc), ModelParams(rc.sigma_value, rc.rho), surface,
                                S, t, guard_tol=rc.guard_tol, strict=False)
    if rc.c1 is None:
        raise ConfigError(f'model {model} needs c1')
    params = special_params(model, rc.sigma_value, rc.c1, rc.rho, rc.k)
    return residual_special(model, params, surface, S, t, guard_tol=rc.guard_tol, strict=False)


def cmd_verify(rc: RunConfig) -> int:
    surface, S, t, info = _verify_surface(rc)
    report = _residual(rc, surface, S, t)
    out = {**report.to_dict(), 'threshold': rc.threshold, 'source': info}
    _emit(out)
    if rc.out:
        io.write_json(rc.out, out)
    if report.guard_violations:
        logger.error(f'{report.guard_violations}/{report.n_interior} points violate the guard')
        return GuardError.exit_code
    if not report.max_residual < rc.threshold:
        logger.error(f'max residual {report.max_residual:.3g} exceeds {rc.threshold:.3g}')
        return 1
    return 0


def cmd_symmetry(rc: RunConfig) -> int:
    table = structure_constants(rc.algebra)
    data = table.to_dict()
    data['antisymmetric'] = table.is_antisymmetric()
    data['jacobi_defects'] = [list(t) for t in table.jacobi_defects()]
    data['optimal_system'] = {name: subalgebra_dimension(rc.algebra, name)
                              for name in OPTIMAL_SYSTEMS[rc.algebra]}
    if rc.table:
        print(table.format_table())
    _emit(data)
    if rc.out:
        io.write_json(rc.out, data)
    return 0


def cmd_figures(rc: RunConfig) -> int:
    figure = rc.figure
    if figure not in FIGURES:
        raise ConfigError(f'figure must be one of {list(FIGURES)}, got {figure!r}')
    path = _out(rc, f'{figure}.csv')

    if figure == 'fig2':
        z, Y = fig2_table()
        io.write_curve_csv(path, z, Y)
        info = {'figure': figure, 'case': 'S_H4',
                'params': derived_params(fig2_case()).to_dict(),
                'z_range': [z[0], z[-1]], 'y_range': [Y.min(), Y.max()],
                'inputs': {k: v for k, v in FIG2.items() if not k.endswith('_window')}}
    else:
        sol = fig1_solution('k1' if figure == 'fig1-left' else 'k2')
        S = linear_axis(*FIG1['s_window'], rc.n_s)
        t = linear_axis(*FIG1['t_window'], rc.n_t)
        St, tt = np.meshgrid(S, t)
        io.write_surface_csv(path, S, t, sol(St, tt))
        info = {'figure': figure, **sol.describe()}

    io.write_json(io.sidecar_path(path), info)
    _emit(info)
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'model':       cmd_model,
    'reduce':      cmd_reduce,
    'closed-form': cmd_closed_form,
    'verify':      cmd_verify,
    'symmetry':    cmd_symmetry,
    'figures':     cmd_figures,
}


def run(rc: RunConfig) -> int:
    try:
        return COMMANDS[rc.command](rc)
    except HedgingError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return e.exit_code
