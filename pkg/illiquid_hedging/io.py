import csv
import json
import logging
from pathlib import Path

import numpy as np

from .errors import GridError
from .surfaces import GridSurface

logger = logging.getLogger(__name__)

SURFACE_HEADER = ('S', 't', 'u')
TRAJECTORY_HEADER = ('z', 'Y', 'W')
CURVE_HEADER = ('z', 'Y')


def fmt(x) -> str:
    return '{:.17g}'.format(float(x))


def _write_rows(path, header, rows) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open('w', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.info(f'wrote {p}')
    return p


def write_surface_csv(path, S, t, u) -> Path:
    """Long format, sorted by (t, S); u has shape (len(t), len(S))."""
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    rows = ((S_i, t_j, u[j, i]) for j, t_j in enumerate(t) for i, S_i in enumerate(S))
    return _write_rows(path, SURFACE_HEADER, rows)


def write_grid_csv(path, surface: GridSurface) -> Path:
    return write_surface_csv(path, surface.S, surface.t, surface.u)


def read_surface_csv(path) -> GridSurface:
    p = Path(path)
    with p.open(newline='') as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != SURFACE_HEADER:
            raise GridError(f'{path}: header must be "S,t,u", got {header!r}')
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if data.size == 0:
        raise GridError(f'{path}: no rows')

    S = np.unique(data[:, 0])
    t = np.unique(data[:, 1])
    if len(data) != len(S) * len(t):
        raise GridError(f'{path}: {len(data)} rows do not form a {len(S)} x {len(t)} lattice')
    u = np.full((len(t), len(S)), np.nan)
    u[np.searchsorted(t, data[:, 1]), np.searchsorted(S, data[:, 0])] = data[:, 2]
    if np.isnan(u).any():
        raise GridError(f'{path}: lattice has missing points')
    logger.debug(f'read {len(S)} x {len(t)} surface from {p}')
    return GridSurface(S, t, u)


def write_trajectory_csv(path, z, Y, W) -> Path:
    return _write_rows(path, TRAJECTORY_HEADER, zip(z, Y, W))


def write_curve_csv(path, z, Y) -> Path:
    return _write_rows(path, CURVE_HEADER, zip(z, Y))


def _to_json(obj):
    if isinstance(obj, dict):
        return {str(k): _to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_json(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    return obj


def dumps(data: dict) -> str:
    return json.dumps(_to_json(data), indent=2, sort_keys=True)


def write_json(path, data: dict) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(data) + '\n')
    logger.info(f'wrote {p}')
    return p


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix('.json')
