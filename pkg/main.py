#!/usr/bin/env python3
import argparse
import logging
import sys

from illiquid_hedging.commands import COMMANDS, FIGURES, run
from illiquid_hedging.config import BRANCHES, MODELS, RunConfig, load_config
from illiquid_hedging.errors import HedgingError
from illiquid_hedging.reaction import FAMILIES

logger = logging.getLogger('main')

# flag -> config key; every flag mirrors a key of config.yaml
_FLOAT_FLAGS = ('c1', 'c2', 'k', 'g_rho', 'sigma', 'sigma2', 'rho', 'phi', 'phi_deg', 'x',
                'y0', 'w0', 'd1', 'd2', 'z_min', 'z_max', 's_min', 's_max', 't_min', 't_max',
                'threshold', 'guard_tol', 'atol', 'rtol')
_INT_FLAGS = ('eps', 'n_s', 'n_t', 'max_iter', 'max_levels')
_TOL_KEYS = ('atol', 'rtol', 'max_iter', 'max_levels')


def _options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default='config.yaml')
    common.add_argument('--verbose', action='store_true')
    common.add_argument('--out', default=None)
    common.add_argument('--model', choices=MODELS, default=None)
    common.add_argument('--g', choices=list(FAMILIES), default=None)
    common.add_argument('--g-table', dest='g_table', default=None)
    common.add_argument('--case', type=str.upper, default=None)
    common.add_argument('--branch', choices=BRANCHES, default=None)
    common.add_argument('--family', choices=('power', 'excluded', 'invariant'), default=None)
    common.add_argument('--surface', default=None)
    for key in _FLOAT_FLAGS:
        common.add_argument(f'--{key.replace("_", "-")}', dest=key, type=float, default=None)
    for key in _INT_FLAGS:
        common.add_argument(f'--{key.replace("_", "-")}', dest=key, type=int, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _options()
    parser = argparse.ArgumentParser(description='Hedging PDEs for illiquid markets')
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == 'symmetry':
            p.add_argument('--algebra', choices=('L3', 'L4'), default=None)
            p.add_argument('--table', action='store_true', default=None)
        if name == 'figures':
            p.add_argument('figure', choices=FIGURES)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    skip = {'config', 'verbose', *_TOL_KEYS}
    out = {k: v for k, v in vars(args).items() if k not in skip}
    tol = {k: getattr(args, k) for k in _TOL_KEYS if getattr(args, k) is not None}
    if tol:
        out['tolerances'] = tol
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s  %(levelname)-7s  %(name)s: %(message)s',
        datefmt='%H:%M:%S',
    )

    try:
        cfg = load_config(args.config, _overrides(args))
        rc = RunConfig.from_dict(cfg)
    except HedgingError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return e.exit_code

    try:
        return run(rc)
    except Exception:
        logger.exception(f'{rc.command} failed')
        return 1


if __name__ == '__main__':
    sys.exit(main())
