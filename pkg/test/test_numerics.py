import math

import numpy as np
import pytest

from illiquid_hedging.errors import BracketError, ConfigError, ConvergenceError, NoRealBranchError
from illiquid_hedging.numerics import (
    DEFAULT_TOL, ToleranceSpec, adaptive_quadrature, cumulative_quadrature, find_root_bracketed,
    resolve_slope, solve_ivp,
)

# brentq stops once the bracket is below atol + 4 eps |x|
ROOT_ABS = 2 * DEFAULT_TOL.atol


def test_tolerance_defaults_and_validation():
    assert DEFAULT_TOL.to_dict() == {'atol': 1e-10, 'rtol': 1e-8, 'max_iter': 200, 'max_levels': 50}
    assert ToleranceSpec.from_dict({'rtol': 1e-6}).rtol == 1e-6
    with pytest.raises(ConfigError):
        ToleranceSpec(atol=0.0)
    with pytest.raises(ConfigError):
        ToleranceSpec(max_iter=5)


def test_find_root_examples():
    assert find_root_bracketed(lambda x: x * x - 2, 1.0, 2.0) == pytest.approx(math.sqrt(2), abs=ROOT_ABS)
    assert find_root_bracketed(math.sin, 3.0, 4.0) == pytest.approx(math.pi, abs=ROOT_ABS)


def test_find_root_stays_in_bracket():
    x = find_root_bracketed(lambda v: v ** 3 - 1e-3, 0.0, 5.0)
    assert 0.0 <= x <= 5.0
    assert x == pytest.approx(0.1, abs=ROOT_ABS)


def test_find_root_accuracy_follows_atol():
    tol = ToleranceSpec(atol=1e-14)
    assert find_root_bracketed(math.sin, 3.0, 4.0, tol) == pytest.approx(math.pi, abs=2e-14)


def test_find_root_endpoint_is_root():
    assert find_root_bracketed(lambda v: v - 1.0, 1.0, 3.0) == 1.0


def test_find_root_needs_sign_change():
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: x * x + 1, -1.0, 1.0)


def test_quadrature_examples():
    assert adaptive_quadrature(lambda x: x * x, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert adaptive_quadrature(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)


def test_quadrature_exact_for_cubics():
    value = adaptive_quadrature(lambda x: 4 * x ** 3 - 3 * x ** 2 + 2 * x - 1, -1.0, 2.0)
    assert value == pytest.approx(6.0, rel=1e-13)


def test_quadrature_reports_subdivision_limit():
    with pytest.raises(ConvergenceError) as err:
        adaptive_quadrature(lambda x: math.sin(1 / x), 1e-6, 1.0, ToleranceSpec(max_levels=2))
    assert err.value.estimate is not None


def test_cumulative_quadrature():
    nodes = np.linspace(0.0, 2.0, 5)
    out = cumulative_quadrature(lambda x: 2 * x, nodes, start=1.0)
    np.testing.assert_allclose(out, 1.0 + nodes ** 2, atol=1e-12)


def test_exponential_growth():
    traj = solve_ivp(lambda z, y: y, [1.0], (0.0, 1.0))
    assert traj.y[-1, 0] == pytest.approx(math.e, rel=1e-8)
    assert float(traj(0.5)[0]) == pytest.approx(math.exp(0.5), rel=1e-7)


def test_gaussian():
    traj = solve_ivp(lambda z, y: -2 * z * y, [1.0], (0.0, 1.0))
    assert traj.y[-1, 0] == pytest.approx(math.exp(-1), rel=1e-8)


def test_fixed_step_order():
    errors = []
    for h in (0.2, 0.1):
        traj = solve_ivp(lambda z, y: y, [1.0], (0.0, 1.0), method='RK45', step=h)
        errors.append(abs(traj.y[-1, 0] - math.e))
    assert math.log2(errors[0] / errors[1]) >= 3.8


def test_implicit_plus_branch():
    traj = solve_ivp(None, [1.0], (0.0, 1.0), implicit=lambda z, y, p: p * p - y * y, yp0=1.0)
    assert traj.y[-1, 0] == pytest.approx(math.e, rel=1e-8)
    assert np.all(np.diff(traj.y[:, 0]) > 0)


def test_implicit_needs_initial_slope():
    with pytest.raises(ConfigError):
        solve_ivp(None, [1.0], (0.0, 1.0), implicit=lambda z, y, p: p - y)


def test_unknown_method():
    with pytest.raises(ConfigError):
        solve_ivp(lambda z, y: y, [1.0], (0.0, 1.0), method='Euler')


def test_resolve_slope_picks_nearest_root():
    F = lambda z, y, p: (p - 1.0) * (p + 3.0)
    assert resolve_slope(F, 0.0, 1.0, 0.8) == pytest.approx(1.0, abs=ROOT_ABS)
    assert resolve_slope(F, 0.0, 1.0, -2.5) == pytest.approx(-3.0, abs=ROOT_ABS)


def test_resolve_slope_without_real_root():
    with pytest.raises(NoRealBranchError):
        resolve_slope(lambda z, y, p: p * p + 1.0, 0.3, 1.0, 0.0)


def test_branch_loss_returns_partial_trajectory():
    # p^2 = 1 below z = 0.5, p^2 = -1 above
    F = lambda z, y, p: p * p - (1.0 if z < 0.5 else -1.0)
    with pytest.raises(NoRealBranchError) as err:
        solve_ivp(None, [0.0], (0.0, 2.0), implicit=F, yp0=1.0)
    partial = err.value.partial
    assert partial is not None
    assert 0.0 < partial.z_end < 0.5
    assert err.value.z == partial.z_end
    np.testing.assert_allclose(partial.y[:, 0], partial.z, atol=1e-10)


def test_fixed_step_lands_on_grid():
    seen = []
    traj = solve_ivp(lambda z, y: y, [1.0], (0.0, 1.0), method='RK45', step=0.3,
                     on_step=lambda z, y: seen.append(z))
    np.testing.assert_allclose(traj.z, [0.0, 0.3, 0.6, 0.9, 1.0], atol=1e-15)
    assert seen == list(traj.z[1:])
    assert float(traj(0.45)[0]) == pytest.approx(math.exp(0.45), rel=1e-4)


def test_fixed_step_backwards():
    traj = solve_ivp(lambda z, y: y, [math.e], (1.0, 0.0), method='DOP853', step=0.25)
    assert len(traj.z) == 5
    assert traj.y[-1, 0] == pytest.approx(1.0, rel=1e-9)


def test_fixed_step_rejects_bad_step():
    with pytest.raises(ConfigError):
        solve_ivp(lambda z, y: y, [1.0], (0.0, 1.0), step=0.0)


def test_on_step_sees_accepted_steps_only():
    calls = {'rhs': 0}
    seen = []

    def rhs(z, y):
        calls['rhs'] += 1
        return y

    traj = solve_ivp(rhs, [1.0], (0.0, 1.0), on_step=lambda z, y: seen.append((z, y[0])))
    assert [z for z, _ in seen] == list(traj.z[1:])
    np.testing.assert_array_equal([y for _, y in seen], traj.y[1:, 0])
    assert calls['rhs'] > len(seen)
