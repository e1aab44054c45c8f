import math

import numpy as np
import pytest

from illiquid_hedging.errors import GridError, GuardError, ParamError
from illiquid_hedging.model import ModelParams
from illiquid_hedging.pde import (
    FreyParams, HauptParams, SipaParams, grid_derivatives, residual_black_scholes,
    residual_general, residual_special, special_params,
)
from illiquid_hedging.reaction import Exponential, FractionalPower, Power
from illiquid_hedging.reductions import excluded_family, fig1_case, fig1_solution, fig2_case
from illiquid_hedging.surfaces import GridSurface, PowerExpSurface, linear_axis

S_AXIS = np.linspace(0.5, 3.0, 26)
T_AXIS = np.linspace(0.0, 1.0, 11)

# smooth surfaces with u_S > 0 on S_AXIS x T_AXIS
SMOOTH = [
    PowerExpSurface(((1.0, 1.5, -0.3), (0.5, 1.0, 0.0))),
    PowerExpSurface(((0.2, 2.0, 0.1), (1.0, 1.0, -0.2), (3.0, 0.0, 0.0))),
    PowerExpSurface(((2.0, 0.5, 0.4),), drift=-0.7),
]


def test_linear_payoff_is_solution_without_feedback():
    u = PowerExpSurface(((1.0, 1.0, 0.0),))
    report = residual_general(Power(2, 1), ModelParams(0.3, 0.0), u, S_AXIS, T_AXIS)
    assert report.max_residual == 0.0
    assert report.guard_violations == 0


def test_heat_kernel_like_surface_without_feedback():
    u = PowerExpSurface(((1.0, 2.0, -1.0),))
    report = residual_general(Exponential(1, 1), ModelParams(1.0, 0.0), u, S_AXIS, T_AXIS)
    assert report.max_residual < 1e-12


@pytest.mark.parametrize('g', [Exponential(2, 1), Power(1.5, 2), FractionalPower(0.5, 1, 2, 1)],
                         ids=repr)
@pytest.mark.parametrize('u', SMOOTH, ids=['a', 'b', 'c'])
def test_zero_rho_matches_linear_operator(g, u):
    general = residual_general(g, ModelParams(0.4, 0.0), u, S_AXIS, T_AXIS)
    linear = residual_black_scholes(ModelParams(0.4), u, S_AXIS, T_AXIS)
    np.testing.assert_allclose(general.residual, linear.residual, atol=1e-12, rtol=0)


@pytest.mark.parametrize('u', SMOOTH, ids=['a', 'b', 'c'])
def test_haupt_equals_general_power(u):
    c1, sigma = 0.7, 0.35
    for rho in (0.1, 1.0, 5.0):
        general = residual_general(Power(c1, 2.0), ModelParams(sigma, rho), u, S_AXIS, T_AXIS)
        haupt = residual_special('haupt', HauptParams(sigma, c1), u, S_AXIS, T_AXIS)
        np.testing.assert_allclose(general.residual, haupt.residual, atol=1e-12, rtol=0)


@pytest.mark.parametrize('u', SMOOTH, ids=['a', 'b', 'c'])
def test_frey_equals_general_exponential(u):
    general = residual_general(Exponential(0.3, 1.0), ModelParams(0.25, 0.2), u, S_AXIS, T_AXIS)
    frey = residual_special('frey', FreyParams(0.25, 0.2, 0.3), u, S_AXIS, T_AXIS)
    np.testing.assert_allclose(general.residual, frey.residual, atol=1e-12, rtol=0)


def test_special_model_trivial_solutions():
    const = PowerExpSurface(((7.0, 0.0, 0.0),))
    linear = PowerExpSurface(((1.0, 1.0, 0.0),))
    assert residual_special('haupt', HauptParams(0.3, 2.0), const, S_AXIS, T_AXIS).max_residual == 0
    assert residual_special('frey', FreyParams(0.3, 1.0, 2.0), linear, S_AXIS, T_AXIS).max_residual == 0
    assert residual_special('sipa', SipaParams(0.3, 0.5, 2.0), linear, S_AXIS, T_AXIS).max_residual == 0


def test_power_option_analytic_residual():
    case = fig1_case()
    u = fig1_solution('k1').surface
    S = np.linspace(0.1, 100.0, 100)
    t = np.linspace(0.1, 1.0, 50)
    report = residual_special('haupt', HauptParams(case.sigma, case.c1), u, S, t)
    assert report.n_interior == 5000
    assert report.guard_violations == 0
    assert report.max_residual < 1e-8


@pytest.mark.parametrize('name', ['S_H2', 'S_H4'])
def test_excluded_family_violates_guard_everywhere(name):
    case = fig1_case() if name == 'S_H2' else fig2_case()
    sol = excluded_family(case, d1=1.0, d2=0.0)
    params = HauptParams(case.sigma, case.c1)
    S = np.linspace(0.5, 5.0, 50)
    t = np.linspace(0.1, 1.0, 50)
    report = residual_special('haupt', params, sol.surface, S, t, strict=False)
    assert report.violation_fraction == 1.0
    with pytest.raises(GuardError) as err:
        residual_special('haupt', params, sol.surface, S, t)
    assert err.value.report.guard_violations == 2500


def test_excluded_family_without_power_term_is_ordinary():
    case = fig1_case()
    sol = excluded_family(case, d1=0.0, d2=3.0)
    report = residual_special('haupt', HauptParams(case.sigma, case.c1), sol.surface,
                              S_AXIS, T_AXIS)
    assert report.guard_violations == 0
    assert report.max_residual == 0.0


def test_report_json_fields():
    u = PowerExpSurface(((1.0, 1.0, 0.0),))
    data = residual_general(Power(1, 1), ModelParams(0.2, 1.0), u, S_AXIS, T_AXIS).to_dict()
    assert set(data) == {'model', 'max_residual', 'rms_residual', 'guard_violations', 'n_interior'}


def _grid(S, t, fn):
    SS, tt = np.meshgrid(S, t)
    return GridSurface(S, t, fn(SS, tt))


def test_grid_derivatives_exact_for_quadratics():
    S = linear_axis(1.0, 2.0, 11)
    t = linear_axis(0.0, 1.0, 6)
    d = grid_derivatives(_grid(S, t, lambda s, tt: s ** 2))
    np.testing.assert_allclose(d.u_SS, 2.0, atol=1e-9)
    assert d.u.shape == (4, 9)


def test_grid_derivatives_in_time():
    S = np.array([0.5, 0.7, 1.0, 1.6, 2.0, 3.5])
    t = np.array([0.0, 0.1, 0.35, 0.4, 0.9])
    d = grid_derivatives(_grid(S, t, lambda s, tt: tt))
    np.testing.assert_allclose(d.u_t, 1.0, atol=1e-12)
    np.testing.assert_allclose(d.u_S, 0.0, atol=1e-12)


def test_nonuniform_stencil_exact_for_quadratics():
    S = np.array([0.5, 0.7, 1.0, 1.6, 2.0, 3.5])
    t = linear_axis(0.0, 1.0, 5)
    d = grid_derivatives(_grid(S, t, lambda s, tt: 3 * s ** 2 - s))
    np.testing.assert_allclose(d.u_SS, 6.0, atol=1e-9)
    np.testing.assert_allclose(d.u_S, 6 * d.S - 1, atol=1e-9)


def test_second_difference_order():
    errors = []
    for n in (21, 41):
        S = linear_axis(1.0, 2.0, n)
        t = linear_axis(0.0, 1.0, 5)
        d = grid_derivatives(_grid(S, t, lambda s, tt: s ** 4))
        errors.append(np.max(np.abs(d.u_SS - 12 * d.S ** 2)))
    assert math.log2(errors[0] / errors[1]) >= 1.9


def test_grid_residual_converges_to_analytic():
    case = fig1_case()
    u = fig1_solution('k2').surface
    params = HauptParams(case.sigma, case.c1)
    errors = []
    for n in (21, 41):
        grid = u.sample(linear_axis(1.0, 2.0, n), linear_axis(0.1, 0.5, n))
        errors.append(residual_special('haupt', params, grid).max_residual)
    assert math.log2(errors[0] / errors[1]) >= 1.9


def test_grid_too_small():
    S = linear_axis(1.0, 2.0, 5)
    t = np.linspace(0.0, 1.0, 4)
    with pytest.raises(GridError):
        grid_derivatives(_grid(S, t, lambda s, tt: s))
    with pytest.raises(GridError):
        linear_axis(0.0, 1.0, 3)


def test_special_params_dispatch():
    assert special_params('haupt', 0.2, 2.0) == HauptParams(0.2, 2.0)
    assert special_params('frey', 0.2, 2.0, rho=0.5) == FreyParams(0.2, 0.5, 2.0)
    with pytest.raises(ParamError):
        special_params('sipa', 0.2, 2.0)
    with pytest.raises(ParamError):
        residual_special('bogus', HauptParams(0.2, 2.0), PowerExpSurface(((1.0, 1.0, 0.0),)),
                         S_AXIS, T_AXIS)
