from ..errors import ConfigError
from .base import ReactionFunction
from .exponential import Exponential
from .fractional import FractionalPower
from .power import Power
from .tabulated import Tabulated

FAMILIES = {
    'exp':       Exponential,
    'power':     Power,
    'fracpow':   FractionalPower,
    'tabulated': Tabulated,
}

__all__ = ['ReactionFunction', 'Exponential', 'Power', 'FractionalPower', 'Tabulated',
           'FAMILIES', 'create_reaction_function']


def create_reaction_function(cfg: dict, checked: bool = True) -> ReactionFunction:
    name = cfg.get('g', 'power')
    cls = FAMILIES.get(name)
    if cls is None:
        raise ConfigError(f'Unknown g family: {name!r} (available: {list(FAMILIES)})')
    if cls is Tabulated:
        return Tabulated.from_csv(cfg['g_table'], checked=checked)
    if cls is FractionalPower:
        return FractionalPower(cfg.get('c1', 0.5), cfg.get('c2', 1.0), cfg.get('k', 1.0),
                               cfg.get('g_rho', 0.0), checked=checked)
    return cls(cfg.get('c1', 1.0), cfg.get('c2', 1.0), checked=checked)
