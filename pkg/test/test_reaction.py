import math

import numpy as np
import pytest

from illiquid_hedging.errors import AdmissibilityError, ConfigError, DomainError
from illiquid_hedging.model import (
    check_admissibility, duality_table, eval_g, log_derivative_g, sample_domain, utility_spec,
    utility_value,
)
from illiquid_hedging.reaction import (
    Exponential, FractionalPower, Power, Tabulated, create_reaction_function,
)

ADMISSIBLE = [
    Exponential(1.0, 1.0),
    Exponential(0.3, 2.5),
    Exponential(4.0, 0.2),
    Power(1.0, 1.0),
    Power(2.0, 3.0),
    Power(0.5, 0.7),
    FractionalPower(0.5, 1.0, 2.0, 1.0),
    FractionalPower(-0.5, 2.0, -1.0, 0.5),
    FractionalPower(0.25, 3.0, 1.0, 0.0),
]


def test_eval_g_examples():
    assert eval_g(Exponential(1, 1), 0.0) == pytest.approx(1.0)
    assert eval_g(Power(2, 3), 2.0) == pytest.approx(12.0)
    assert eval_g(FractionalPower(0.5, 1, 2, 1), 1.5) == pytest.approx(0.0625)


def test_log_derivative_examples():
    assert log_derivative_g(Exponential(3, 5), 0.7) == pytest.approx(3.0)
    assert log_derivative_g(Power(2, 1), 4.0) == pytest.approx(0.5)
    assert log_derivative_g(FractionalPower(0.5, 1, 2, 1), 1.5) == pytest.approx(-1.0)


def test_utility_examples():
    assert utility_value(utility_spec(Power(1, 1)), 1.0 / eval_g(Power(1, 1), 0.5)) == pytest.approx(0.5)
    assert utility_value(utility_spec(Exponential(1, 1)), 1.0) == pytest.approx(1.0)
    assert utility_value(utility_spec(FractionalPower(0.5, 1, 2, 1)), 1.0) == pytest.approx(1.0)


def test_admissibility_lists_violations():
    assert check_admissibility(Exponential(1, 1)) == []
    assert check_admissibility(Power.unchecked(-1, 1)) == ['c1 > 0 required']
    assert check_admissibility(FractionalPower.unchecked(0.5, 1, -2, 1)) == ['k·c1 > 0 required']


def test_checked_constructor_rejects_inadmissible():
    with pytest.raises(AdmissibilityError) as err:
        Power(-1, 1)
    assert err.value.violations == ['c1 > 0 required']
    assert err.value.exit_code == 2


@pytest.mark.parametrize('g', ADMISSIBLE, ids=repr)
def test_duality(g):
    table = duality_table(g, sample_domain(g, 200))
    assert len(table) == 200
    assert table[:, 3].max() < 1e-12


@pytest.mark.parametrize('g', ADMISSIBLE, ids=repr)
def test_g_positive_and_monotone(g):
    values = np.asarray(g(sample_domain(g)))
    assert np.all(values > 0)
    assert np.all(g.direction * np.diff(values) > 0)


@pytest.mark.parametrize('g', ADMISSIBLE, ids=repr)
def test_log_derivative_matches_finite_differences(g):
    for alpha in sample_domain(g, 7):
        h = 1e-6 * max(1.0, abs(alpha))
        fd = (math.log(g(alpha + h)) - math.log(g(alpha - h))) / (2 * h)
        assert g.log_derivative(alpha) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize('g', ADMISSIBLE[:6], ids=repr)
def test_utility_increasing_and_concave(g):
    x = np.linspace(0.2, 5.0, 60)
    U = np.asarray(g.utility(x))
    assert np.all(np.diff(U) > 0)
    mid = np.asarray(g.utility(0.5 * (x[:-1] + x[1:])))
    assert np.all(mid >= 0.5 * (U[:-1] + U[1:]))
    assert np.all(np.asarray(g.utility_derivative(x)) > 0)


def test_domain_errors():
    with pytest.raises(DomainError):
        Power(2, 1)(-1.0)
    with pytest.raises(DomainError):
        FractionalPower(0.5, 1, 2, 1)(-1.0)
    with pytest.raises(DomainError):
        Exponential(1, 1).utility(0.0)


def _write_table(path, rows):
    path.write_text('alpha,g\n' + ''.join(f'{a},{v}\n' for a, v in rows))
    return path


def test_tabulated_from_csv(tmp_path):
    alpha = np.linspace(0.0, 2.0, 21)
    path = _write_table(tmp_path / 'g.csv', zip(alpha, np.exp(alpha)))
    g = create_reaction_function({'g': 'tabulated', 'g_table': str(path)})
    assert isinstance(g, Tabulated)
    assert g(1.0) == pytest.approx(math.e, rel=1e-3)
    assert g.log_derivative(1.0) == pytest.approx(1.0, rel=1e-2)
    with pytest.raises(DomainError):
        g(2.5)
    table = duality_table(g, sample_domain(g, 50)[1:-1])
    assert table[:, 3].max() < 1e-10


def test_tabulated_rejects_decreasing_samples(tmp_path):
    path = _write_table(tmp_path / 'g.csv', [(0.0, 2.0), (1.0, 1.0), (2.0, 0.5)])
    with pytest.raises(AdmissibilityError):
        Tabulated.from_csv(path)


def test_unchecked_tabulated_with_repeated_alpha():
    g = Tabulated([0.0, 1.0, 1.0], [1.0, 2.0, 3.0], checked=False)
    assert g.admissibility() == ['alpha samples strictly increasing required']
    with pytest.raises(DomainError):
        g(0.5)
    with pytest.raises(DomainError):
        g.log_derivative(0.5)
    with pytest.raises(DomainError):
        g.utility(0.6)


def test_tabulated_header_checked(tmp_path):
    path = tmp_path / 'g.csv'
    path.write_text('a,b\n0,1\n1,2\n')
    with pytest.raises(ConfigError):
        Tabulated.from_csv(path)


def test_factory_unknown_family():
    with pytest.raises(ConfigError):
        create_reaction_function({'g': 'cubic'})
