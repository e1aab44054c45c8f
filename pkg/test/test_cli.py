import json

import numpy as np
import pytest

from illiquid_hedging import io
from illiquid_hedging.config import RunConfig, load_config
from illiquid_hedging.errors import ConfigError, GridError
from illiquid_hedging.numerics import ToleranceSpec
from main import main

S_H2_ARGS = ['--case', 's_h2', '--c1', '2.1', '--phi', '1.17', '--sigma2', '0.41036']


def _run(tmp_path, *argv):
    return main([*argv, '--config', str(tmp_path / 'missing.yaml')])


def _header(path):
    return path.read_text().splitlines()[0]


def test_model_admissible(tmp_path, capsys):
    assert _run(tmp_path, 'model', '--g', 'exp', '--c1', '1', '--c2', '1') == 0
    report = json.loads(capsys.readouterr().out)
    assert report['admissible'] is True
    assert report['monotone'] == 'increasing'
    assert report['duality_max_error'] < 1e-12


def test_model_inadmissible(tmp_path):
    assert _run(tmp_path, 'model', '--g', 'power', '--c1', '-1', '--c2', '1') == 2


def test_model_fractional_power(tmp_path, capsys):
    argv = ['model', '--g', 'fracpow', '--c1', '0.5', '--c2', '1', '--k', '2', '--g-rho', '1']
    assert _run(tmp_path, *argv) == 0
    assert json.loads(capsys.readouterr().out)['monotone'] == 'decreasing'


def test_reduce_writes_trajectory_and_sidecar(tmp_path):
    out = tmp_path / 'traj.csv'
    assert _run(tmp_path, 'reduce', *S_H2_ARGS, '--y0', '1', '--branch', 'plus',
                '--out', str(out)) == 0
    assert _header(out) == 'z,Y,W'
    sidecar = json.loads(io.sidecar_path(out).read_text())
    assert sidecar['status'] == 'ok'
    assert sidecar['branch_log'][0]['branch'] == 'plus'


def test_reduce_rejects_bad_parameters(tmp_path):
    argv = ['reduce', '--case', 's_h3', '--c1', '2', '--phi', '1', '--sigma', '0.3', '--x', '0',
            '--out', str(tmp_path / 'traj.csv')]
    assert _run(tmp_path, *argv) == 2


def test_reduce_needs_case(tmp_path):
    assert _run(tmp_path, 'reduce', '--sigma', '0.3') == 2


def test_closed_form_surface(tmp_path, capsys):
    out = tmp_path / 'power.csv'
    assert _run(tmp_path, 'closed-form', *S_H2_ARGS, '--branch', 'k1', '--n-s', '10',
                '--n-t', '6', '--out', str(out)) == 0
    assert _header(out) == 'S,t,u'
    assert len(out.read_text().splitlines()) == 61
    info = json.loads(capsys.readouterr().out)
    assert info['branch'] == 'k1'
    grid = io.read_surface_csv(out)
    assert grid.u.shape == (6, 10)


def test_verify_power_option(tmp_path, capsys):
    assert _run(tmp_path, 'verify', *S_H2_ARGS, '--family', 'power', '--branch', 'k1') == 0
    report = json.loads(capsys.readouterr().out)
    assert report['guard_violations'] == 0
    assert report['max_residual'] < 1e-8


def test_verify_excluded_family_violates_guard(tmp_path):
    assert _run(tmp_path, 'verify', *S_H2_ARGS, '--family', 'excluded') == 4


def test_verify_invariant_solution(tmp_path):
    argv = ['verify', *S_H2_ARGS, '--family', 'invariant', '--branch', 'plus', '--y0', '1',
            '--s-min', '1.6', '--s-max', '2.5', '--t-min', '0', '--t-max', '1',
            '--n-s', '6', '--n-t', '5']
    assert _run(tmp_path, *argv) == 0


def test_verify_surface_file(tmp_path):
    S = np.linspace(0.5, 2.0, 8)
    t = np.linspace(0.0, 1.0, 6)
    path = io.write_surface_csv(tmp_path / 'const.csv', S, t, np.full((6, 8), 5.0))
    argv = ['verify', '--surface', str(path), '--model', 'haupt', '--c1', '2', '--sigma', '0.3']
    assert _run(tmp_path, *argv) == 0


def test_verify_threshold_failure(tmp_path):
    S = np.linspace(0.5, 2.0, 8)
    t = np.linspace(0.0, 1.0, 6)
    SS, tt = np.meshgrid(S, t)
    path = io.write_surface_csv(tmp_path / 'drift.csv', S, t, SS + tt)
    argv = ['verify', '--surface', str(path), '--model', 'haupt', '--c1', '2', '--sigma', '0.3']
    assert _run(tmp_path, *argv) == 1


def test_symmetry(tmp_path, capsys):
    out = tmp_path / 'l4.json'
    assert _run(tmp_path, 'symmetry', '--algebra', 'L4', '--table', '--out', str(out)) == 0
    data = json.loads(out.read_text())
    assert data['antisymmetric'] is True
    assert data['jacobi_defects'] == []
    assert len(data['optimal_system']) == 12
    printed = capsys.readouterr().out
    assert not printed.startswith('{')
    assert printed.splitlines()[0].split() == ['V1', 'V2', 'V3', 'V4']


def test_symmetry_without_table_prints_only_json(tmp_path, capsys):
    assert _run(tmp_path, 'symmetry', '--algebra', 'L3') == 0
    data = json.loads(capsys.readouterr().out)
    assert data['antisymmetric'] is True


def test_figures_are_deterministic(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    for out in (first, second):
        assert _run(tmp_path, 'figures', 'fig1-left', '--n-s', '20', '--n-t', '10',
                    '--out', str(out)) == 0
    assert first.read_bytes() == second.read_bytes()
    assert _header(first) == 'S,t,u'


def test_figure_curve(tmp_path):
    out = tmp_path / 'fig2.csv'
    assert _run(tmp_path, 'figures', 'fig2', '--out', str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == 'z,Y'
    assert len(lines) == 201
    assert io.sidecar_path(out).exists()


@pytest.mark.parametrize('argv', [
    ['closed-form', *S_H2_ARGS, '--n-s', '3'],
    ['reduce', *S_H2_ARGS, '--eps', '2'],
    ['reduce', *S_H2_ARGS, '--model', 'general'],
    ['reduce', *S_H2_ARGS, '--z-min', '1', '--z-max', '0'],
    ['verify', '--model', 'haupt', '--sigma', '-0.3'],
])
def test_invalid_configuration(tmp_path, argv):
    assert _run(tmp_path, *argv) == 2


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'g': 'exp', 'c1': 1.0, 'tolerances': {'rtol': 1e-6}}))
    cfg = load_config(str(path), {'c2': 2.0, 'tolerances': {'atol': 1e-9}})
    rc = RunConfig.from_dict({**cfg, 'command': 'model'})
    assert rc.g == 'exp'
    assert rc.c2 == 2.0
    assert rc.tolerances == ToleranceSpec(atol=1e-9, rtol=1e-6)


def test_yaml_exponent_floats(tmp_path):
    path = tmp_path / 'run.yaml'
    path.write_text('threshold: 5e-5\ntolerances:\n  rtol: 1e-6\n  atol: 1.0e-9\n')
    cfg = load_config(str(path), {})
    assert cfg['threshold'] == 5e-5
    assert RunConfig.from_dict(cfg).tolerances == ToleranceSpec(atol=1e-9, rtol=1e-6)


def test_config_table_must_be_boolean(tmp_path):
    path = tmp_path / 'run.yaml'
    path.write_text('table: yes please\n')
    with pytest.raises(ConfigError):
        load_config(str(path), {})


def test_config_rejects_malformed_json(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text('{"c1": 1.0,')
    with pytest.raises(ConfigError):
        load_config(str(path), {})


def test_config_rejects_non_mapping(tmp_path):
    path = tmp_path / 'run.yaml'
    path.write_text('- 1\n- 2\n')
    with pytest.raises(ConfigError):
        load_config(str(path), {})


def test_sigma_from_variance():
    rc = RunConfig(sigma2=0.09)
    assert rc.sigma_value == pytest.approx(0.3)
    with pytest.raises(ConfigError):
        RunConfig().sigma_value


def test_surface_csv_checks_header(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('x,y,z\n1,2,3\n')
    with pytest.raises(GridError):
        io.read_surface_csv(path)


def test_surface_csv_reads_back(tmp_path):
    S = np.linspace(0.5, 2.0, 6)
    t = np.linspace(0.0, 1.0, 5)
    SS, tt = np.meshgrid(S, t)
    path = io.write_surface_csv(tmp_path / 'u.csv', S, t, SS * np.exp(-tt))
    grid = io.read_surface_csv(path)
    np.testing.assert_array_equal(grid.S, S)
    np.testing.assert_array_equal(grid.t, t)
    np.testing.assert_array_equal(grid.u, SS * np.exp(-tt))


def test_json_nan_becomes_null():
    assert json.loads(io.dumps({'x': float('nan'), 'y': np.float64(1.5)})) == {'x': None, 'y': 1.5}
