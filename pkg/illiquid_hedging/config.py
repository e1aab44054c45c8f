import json
import logging
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError
from .numerics import DEFAULT_TOL, ToleranceSpec
from .reductions.cases import CASES, SPECIAL_CASES

logger = logging.getLogger(__name__)

MODELS = ('general', 'frey', 'haupt', 'sipa')
BRANCHES = ('plus', 'minus', 'k1', 'k2')
MIN_GRID = 5


def _validate_config(cfg: dict) -> None:
    for key in ('sigma', 'sigma2', 'threshold', 'guard_tol'):
        val = cfg.get(key)
        if val is not None:
            if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
                raise ConfigError(f'{key} must be a positive number, got {val!r}')

    for key in ('rho', 'g_rho'):
        val = cfg.get(key)
        if val is not None:
            if not isinstance(val, (int, float)) or isinstance(val, bool) or val < 0:
                raise ConfigError(f'{key} must be a non-negative number, got {val!r}')

    for key in ('c1', 'c2', 'k', 'phi', 'phi_deg', 'x', 'y0', 'w0', 'd1', 'd2',
                'z_min', 'z_max', 's_min', 's_max', 't_min', 't_max'):
        val = cfg.get(key)
        if val is not None:
            if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
                raise ConfigError(f'{key} must be a finite number, got {val!r}')

    for key in ('n_s', 'n_t'):
        val = cfg.get(key)
        if val is not None:
            if not isinstance(val, int) or isinstance(val, bool) or val < MIN_GRID:
                raise ConfigError(f'{key} must be an integer >= {MIN_GRID}, got {val!r}')

    val = cfg.get('eps')
    if val is not None and val not in (1, -1):
        raise ConfigError(f'eps must be +1 or -1, got {val!r}')

    val = cfg.get('table')
    if val is not None and not isinstance(val, bool):
        raise ConfigError(f'table must be true or false, got {val!r}')

    val = cfg.get('model')
    if val is not None and val not in MODELS:
        raise ConfigError(f'model must be one of {list(MODELS)}, got {val!r}')

    val = cfg.get('branch')
    if val is not None and val not in BRANCHES:
        raise ConfigError(f'branch must be one of {list(BRANCHES)}, got {val!r}')

    case = cfg.get('case')
    if case is not None:
        if str(case).upper() not in CASES:
            raise ConfigError(f'case must be one of {list(CASES)}, got {case!r}')
        model = cfg.get('model')
        if str(case).upper() in SPECIAL_CASES and model not in (None, 'haupt'):
            raise ConfigError(f'case {case} requires model haupt, got {model!r}')
        if str(case).upper() not in SPECIAL_CASES and model not in (None, 'general'):
            raise ConfigError(f'case {case} requires model general, got {model!r}')

    for lo, hi in (('z_min', 'z_max'), ('s_min', 's_max'), ('t_min', 't_max')):
        a, b = cfg.get(lo), cfg.get(hi)
        if a is not None and b is not None and not b > a:
            raise ConfigError(f'{hi} must be greater than {lo}, got {a!r} and {b!r}')
    val = cfg.get('s_min')
    if val is not None and val <= 0:
        raise ConfigError(f's_min must be positive, got {val!r}')

    tol = cfg.get('tolerances', {})
    if tol is None:
        tol = {}
    if not isinstance(tol, dict):
        raise ConfigError(f'tolerances must be a mapping, got {tol!r}')
    for key in ('atol', 'rtol'):
        val = tol.get(key)
        if val is not None:
            if not isinstance(val, (int, float)) or val <= 0:
                raise ConfigError(f'tolerances.{key} must be a positive number, got {val!r}')
    for key, least in (('max_iter', 10), ('max_levels', 1)):
        val = tol.get(key)
        if val is not None:
            if not isinstance(val, int) or val < least:
                raise ConfigError(f'tolerances.{key} must be an integer >= {least}, got {val!r}')


class _ConfigLoader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot, such as 1e-6."""


_ConfigLoader.add_implicit_resolver(
    'tag:yaml.org,2002:float',
    re.compile(r'^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$'),
    list('-+0123456789'))


def _read_file(p: Path):
    text = p.read_text()
    try:
        if p.suffix.lower() == '.json':
            return json.loads(text)
        return yaml.load(text, Loader=_ConfigLoader)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f'{p}: {e}') from None


def load_config(path: Optional[str], overrides: dict) -> dict:
    cfg = {}
    if path:
        p = Path(path)
        if p.exists():
            cfg = _read_file(p) or {}
            if not isinstance(cfg, dict):
                raise ConfigError(f'{path}: top level must be a mapping')
        else:
            logger.warning(f'Config file not found: {path}')
    for k, v in overrides.items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict):
            cfg[k] = {**cfg[k], **v}
        elif v is not None:
            cfg[k] = v
    _validate_config(cfg)
    return cfg


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a validated configuration dict."""
    command:   str = ''
    model:     Optional[str] = None
    g:         str = 'power'
    c1:        Optional[float] = None
    c2:        float = 1.0
    k:         Optional[float] = None
    g_rho:     float = 0.0
    g_table:   Optional[str] = None
    sigma:     Optional[float] = None
    sigma2:    Optional[float] = None
    rho:       float = 0.0
    case:      Optional[str] = None
    phi:       Optional[float] = None
    phi_deg:   Optional[float] = None
    x:         Optional[float] = None
    eps:       Optional[int] = None
    branch:    str = 'plus'
    y0:        Optional[float] = None
    w0:        float = 0.0
    d1:        float = 1.0
    d2:        float = 0.0
    family:    str = 'power'
    z_min:     float = 0.0
    z_max:     float = 1.0
    s_min:     float = 0.1
    s_max:     float = 100.0
    t_min:     float = 0.1
    t_max:     float = 1.0
    n_s:       int = 100
    n_t:       int = 50
    threshold: float = 1e-4
    guard_tol: float = 1e-10
    surface:   Optional[str] = None
    algebra:   str = 'L3'
    table:     bool = False
    figure:    Optional[str] = None
    out:       Optional[str] = None
    tolerances: ToleranceSpec = field(default=DEFAULT_TOL)

    @classmethod
    def from_dict(cls, cfg: dict) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(cfg) - known)
        if unknown:
            logger.warning(f'Ignoring unknown config keys: {unknown}')
        kwargs = {k: v for k, v in cfg.items() if k in known and k != 'tolerances'}
        kwargs['tolerances'] = ToleranceSpec.from_dict(cfg.get('tolerances') or {})
        return cls(**kwargs)

    @property
    def sigma_value(self) -> float:
        if self.sigma is not None:
            return float(self.sigma)
        if self.sigma2 is not None:
            return math.sqrt(self.sigma2)
        raise ConfigError('sigma or sigma2 is required')

    @property
    def phi_value(self) -> Optional[float]:
        if self.phi is not None:
            return float(self.phi)
        if self.phi_deg is not None:
            return math.radians(self.phi_deg)
        return None

    def g_config(self) -> dict:
        out = {'g': self.g, 'c2': self.c2, 'g_rho': self.g_rho}
        for key in ('c1', 'k', 'g_table'):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out
