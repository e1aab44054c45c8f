import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import sympy as sp

from .errors import BasisError, DomainError, UnsupportedFieldError
from .surfaces import AffineMap, ClosedFormSurface, GridSurface, TransformedSurface

logger = logging.getLogger(__name__)

COORDS = ('S', 't', 'u')
_SYMBOLS = sp.symbols('S t u')


@dataclass(frozen=True)
class AffineVectorField:
    """xi d/dS + tau d/dt + phi d/du with each coefficient affine in (S, t, u).

    `coeffs` is a 3x4 sympy matrix; row i holds (a0, a_S, a_t, a_u) of the i-th
    component.
    """
    coeffs: sp.ImmutableMatrix
    name:   str = ''

    @classmethod
    def from_rows(cls, xi, tau, phi, name: str = '') -> 'AffineVectorField':
        rows = [[sp.sympify(c) for c in row] for row in (xi, tau, phi)]
        return cls(sp.ImmutableMatrix(rows), name)

    @property
    def linear(self) -> sp.ImmutableMatrix:
        return self.coeffs[:, 1:]

    @property
    def offset(self) -> sp.ImmutableMatrix:
        return self.coeffs[:, 0]

    def __add__(self, other: 'AffineVectorField') -> 'AffineVectorField':
        return AffineVectorField(self.coeffs + other.coeffs)

    def __sub__(self, other: 'AffineVectorField') -> 'AffineVectorField':
        return AffineVectorField(self.coeffs - other.coeffs)

    def scaled(self, scalar) -> 'AffineVectorField':
        return AffineVectorField(sp.ImmutableMatrix(sp.sympify(scalar) * self.coeffs))

    __rmul__ = scaled

    def __neg__(self) -> 'AffineVectorField':
        return AffineVectorField(-self.coeffs)

    def is_zero(self) -> bool:
        return all(sp.simplify(c) == 0 for c in self.coeffs)

    def components(self) -> List[sp.Expr]:
        x = sp.Matrix([1, *_SYMBOLS])
        return list(self.coeffs * x)

    def __str__(self):
        parts = []
        for expr, var in zip(self.components(), COORDS):
            expr = sp.simplify(expr)
            if expr != 0:
                parts.append(f'({expr})*d/d{var}')
        return ' + '.join(parts) or '0'


def commutator(A: AffineVectorField, B: AffineVectorField) -> AffineVectorField:
    """[A, B] = A(B) - B(A); for A = Mx + a, B = Nx + b this is (NM - MN)x + (Na - Mb)."""
    M, a = A.linear, A.offset
    N, b = B.linear, B.offset
    linear = N * M - M * N
    offset = N * a - M * b
    return AffineVectorField(sp.ImmutableMatrix(sp.Matrix.hstack(offset, linear)))


def _field(xi=(0, 0, 0, 0), tau=(0, 0, 0, 0), phi=(0, 0, 0, 0), name=''):
    return AffineVectorField.from_rows(xi, tau, phi, name)


# generators of the general model and of the rho-free special model
BASES: Dict[str, Tuple[AffineVectorField, ...]] = {
    'L3': (
        _field(xi=(0, 1, 0, 0), phi=(0, 0, 0, 1), name='V1'),
        _field(phi=(1, 0, 0, 0), name='V2'),
        _field(tau=(1, 0, 0, 0), name='V3'),
    ),
    'L4': (
        _field(xi=(0, 1, 0, 0), name='V1'),
        _field(phi=(0, 0, 0, 1), name='V2'),
        _field(phi=(1, 0, 0, 0), name='V3'),
        _field(tau=(1, 0, 0, 0), name='V4'),
    ),
}

DECOMPOSITIONS = {
    'L3': 'L3 = <V1, V2> (+) <V3>',
    'L4': 'L4 = <V2, V3> (+) <V1> (+) <V4>',
}


def basis(name: str) -> Tuple[AffineVectorField, ...]:
    try:
        return BASES[name]
    except KeyError:
        raise BasisError(f'Unknown algebra: {name!r} (available: {list(BASES)})') from None


def expand_in_basis(V: AffineVectorField, fields) -> List[sp.Expr]:
    columns = [sp.Matrix(f.coeffs).reshape(12, 1) for f in fields]
    M = sp.Matrix.hstack(*columns)
    v = sp.Matrix(V.coeffs).reshape(12, 1)
    try:
        sol, params = M.gauss_jordan_solve(v)
    except ValueError:
        raise BasisError(f'{V} is not in the span of the basis') from None
    if params.shape[0]:
        raise BasisError('basis fields are linearly dependent')
    return list(sol)


@dataclass(frozen=True)
class StructureTable:
    """constants[i][j][k] = c such that [V_i, V_j] = sum_k c V_k."""
    basis_name: str
    names:      Tuple[str, ...]
    constants:  Tuple[Tuple[Tuple[sp.Expr, ...], ...], ...]

    def bracket(self, i: int, j: int) -> Tuple[sp.Expr, ...]:
        return self.constants[i][j]

    def nonzero(self) -> List[Tuple[int, int, int, sp.Expr]]:
        """(i, j, k, c) for i < j, 1-based like the generator names."""
        out = []
        n = len(self.names)
        for i, j in itertools.combinations(range(n), 2):
            for k, c in enumerate(self.constants[i][j]):
                if c != 0:
                    out.append((i + 1, j + 1, k + 1, c))
        return out

    def is_antisymmetric(self) -> bool:
        n = len(self.names)
        return all(self.constants[i][j][k] == -self.constants[j][i][k]
                   for i in range(n) for j in range(n) for k in range(n))

    def jacobi_defects(self) -> List[Tuple[int, int, int]]:
        fields = basis(self.basis_name)
        bad = []
        for i, j, k in itertools.combinations(range(len(fields)), 3):
            A, B, C = fields[i], fields[j], fields[k]
            total = (commutator(A, commutator(B, C)) + commutator(B, commutator(C, A))
                     + commutator(C, commutator(A, B)))
            if not total.is_zero():
                bad.append((i + 1, j + 1, k + 1))
        return bad

    def to_dict(self) -> dict:
        n = len(self.names)
        table = {}
        for i in range(n):
            for j in range(n):
                terms = [f'{c}*{self.names[k]}' for k, c in enumerate(self.constants[i][j]) if c != 0]
                table[f'[{self.names[i]},{self.names[j]}]'] = ' + '.join(terms) or '0'
        return {'algebra': self.basis_name,
                'decomposition': DECOMPOSITIONS.get(self.basis_name, ''),
                'generators': {f.name: str(f) for f in basis(self.basis_name)},
                'brackets': table,
                'nonzero': [[i, j, k, str(c)] for i, j, k, c in self.nonzero()]}

    def format_table(self) -> str:
        n = len(self.names)
        cells = [[''] + list(self.names)]
        for i in range(n):
            row = [self.names[i]]
            for j in range(n):
                terms = [f'{c}*{self.names[k]}' for k, c in enumerate(self.constants[i][j]) if c != 0]
                row.append(' + '.join(terms) or '0')
            cells.append(row)
        width = max(len(c) for row in cells for c in row)
        return '\n'.join('  '.join(c.rjust(width) for c in row) for row in cells)


def structure_constants(name: str) -> StructureTable:
    fields = basis(name)
    n = len(fields)
    constants = [[tuple(expand_in_basis(commutator(fields[i], fields[j]), fields))
                  for j in range(n)] for i in range(n)]
    return StructureTable(name, tuple(f.name for f in fields),
                          tuple(tuple(row) for row in constants))


def flow_maps(V: AffineVectorField, eps: float) -> Tuple[AffineMap, AffineMap, AffineMap]:
    """Exact one-parameter flow of a diagonal-plus-translation field, per coordinate."""
    A = V.linear
    for i in range(3):
        for j in range(3):
            if i != j and A[i, j] != 0:
                raise UnsupportedFieldError(f'{V} couples {COORDS[i]} to {COORDS[j]}; '
                                            f'only diagonal-plus-translation fields have a closed-form flow')
    maps = []
    for i in range(3):
        a = float(A[i, i])
        b = float(V.offset[i])
        if a == 0:
            maps.append(AffineMap(1.0, b * eps))
        else:
            scale = math.exp(a * eps)
            maps.append(AffineMap(scale, b * math.expm1(a * eps) / a))
    return tuple(maps)


def flow(V: AffineVectorField, eps: float, point) -> Tuple[float, float, float]:
    S, t, u = point
    s_map, t_map, u_map = flow_maps(V, eps)
    S1 = float(s_map(S))
    if S > 0 and S1 <= 0:
        raise DomainError(f'flow leaves S > 0: S={S!r} -> {S1!r}')
    return S1, float(t_map(t)), float(u_map(u))


def transform_solution(V: AffineVectorField, eps: float, u):
    s_map, t_map, u_map = flow_maps(V, eps)
    if isinstance(u, ClosedFormSurface):
        return TransformedSurface(u, s_map, t_map, u_map)
    if isinstance(u, GridSurface):
        S = s_map(u.S)
        if np.any(S <= 0):
            raise DomainError('flow moves part of the S axis to S <= 0')
        return GridSurface(S, t_map(u.t), u_map(u.u))
    raise TypeError(f'unsupported surface type {type(u).__name__}')


def combine(algebra: str, coeffs: Dict[str, float], name: str = '') -> AffineVectorField:
    """sum of coeffs[Vi] * Vi over the named basis."""
    fields = {f.name: f for f in basis(algebra)}
    total = AffineVectorField(sp.ImmutableMatrix.zeros(3, 4), name)
    for key, c in coeffs.items():
        if key not in fields:
            raise BasisError(f'{algebra} has no generator {key!r}')
        total = total + fields[key].scaled(c)
    return AffineVectorField(total.coeffs, name)


# Optimal systems of subalgebras. Each entry lists its spanning fields as
# coefficient maps in (phi, x, eps).
def _rot(phi, a, b, w=1.0):
    return {a: w * math.cos(phi), b: w * math.sin(phi)}


def _dual(phi, a, b):
    return {a: math.sin(phi), b: -math.cos(phi)}


def _plus(*parts):
    out: Dict[str, float] = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0.0) + v
    return out


OPTIMAL_SYSTEMS = {
    'L3': {
        'h1': (1, lambda phi, x, eps: [{'V2': 1}]),
        'h2': (1, lambda phi, x, eps: [_rot(phi, 'V1', 'V3')]),
        'h3': (1, lambda phi, x, eps: [{'V2': 1, 'V3': eps}]),
        'h4': (2, lambda phi, x, eps: [{'V2': 1}, {'V3': 1}]),
        'h5': (2, lambda phi, x, eps: [{'V1': 1}, {'V3': 1}]),
        'h6': (2, lambda phi, x, eps: [{'V1': 1, 'V3': x}, {'V2': 1}]),
    },
    'L4': {
        'h1': (1, lambda phi, x, eps: [{'V3': 1}]),
        'h2': (1, lambda phi, x, eps: [_rot(phi, 'V1', 'V4')]),
        'h3': (1, lambda phi, x, eps: [_plus({'V2': 1}, _rot(phi, 'V1', 'V4', x))]),
        'h4': (1, lambda phi, x, eps: [_plus({'V3': 1}, _rot(phi, 'V1', 'V4', eps))]),
        'h5': (2, lambda phi, x, eps: [_plus({'V2': 1}, _rot(phi, 'V1', 'V4', x)), {'V3': 1}]),
        'h6': (2, lambda phi, x, eps: [_plus({'V2': 1}, _rot(phi, 'V1', 'V4', x)),
                                       _dual(phi, 'V1', 'V4')]),
        'h7': (2, lambda phi, x, eps: [{'V1': 1}, {'V4': 1}]),
        'h8': (2, lambda phi, x, eps: [_plus({'V3': 1}, _rot(phi, 'V1', 'V4', eps)),
                                       _dual(phi, 'V1', 'V4')]),
        'h9': (2, lambda phi, x, eps: [{'V3': 1}, _dual(phi, 'V1', 'V4')]),
        'h10': (3, lambda phi, x, eps: [{'V2': 1}, {'V1': 1}, {'V4': 1}]),
        'h11': (3, lambda phi, x, eps: [{'V3': 1}, {'V1': 1}, {'V4': 1}]),
        'h12': (3, lambda phi, x, eps: [_plus({'V2': 1}, _rot(phi, 'V1', 'V4', x)),
                                        _dual(phi, 'V1', 'V4'), {'V3': 1}]),
    },
}


def subalgebra(algebra: str, name: str, phi: float = 0.0, x: float = 0.0,
               eps: int = 1) -> Tuple[AffineVectorField, ...]:
    try:
        _, build = OPTIMAL_SYSTEMS[algebra][name]
    except KeyError:
        raise BasisError(f'no subalgebra {name!r} in the optimal system of {algebra!r}') from None
    return tuple(combine(algebra, coeffs, f'{name}[{i}]')
                 for i, coeffs in enumerate(build(phi, x, eps), 1))


def subalgebra_dimension(algebra: str, name: str) -> int:
    return OPTIMAL_SYSTEMS[algebra][name][0]


def is_subalgebra(fields) -> bool:
    """Closed under the bracket: every commutator lies in the span of `fields`."""
    fields = tuple(fields)
    for A, B in itertools.combinations(fields, 2):
        try:
            expand_in_basis(commutator(A, B), fields)
        except BasisError:
            return False
    return True
