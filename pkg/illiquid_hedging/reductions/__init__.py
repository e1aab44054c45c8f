from .cases import (
    CASES, Chart, DerivedParams, ReductionCase, chart, check_chart_invariance, derived_params,
    generator, invariant_coords, normalize_case,
)
from .closed_forms import (
    FIG1, ClosedFormSolution, build_power_option, excluded_family, fig1_case, fig1_solution,
    linear_limit, power_payoff, power_roots, quadratic_value,
)
from .h4 import (
    FIG2, H4Reconstruction, ImplicitH4Solution, euler_substitution_check, fig2_case, fig2_table,
    implicit_solution_h4, integrand_h4, invert_and_reconstruct,
)
from .ode import ODES, Quadratic, ReducedODE, reduced_ode, stable_roots
from .solve import InvariantSurface, ReductionResult, solution_table, solve_reduction

__all__ = [
    'CASES', 'Chart', 'DerivedParams', 'ReductionCase', 'chart', 'derived_params',
    'check_chart_invariance', 'generator', 'invariant_coords', 'normalize_case',
    'FIG1', 'ClosedFormSolution', 'build_power_option', 'excluded_family', 'fig1_case',
    'fig1_solution', 'linear_limit', 'power_payoff', 'power_roots', 'quadratic_value',
    'FIG2', 'H4Reconstruction', 'ImplicitH4Solution', 'euler_substitution_check', 'fig2_case',
    'fig2_table', 'implicit_solution_h4', 'integrand_h4', 'invert_and_reconstruct',
    'ODES', 'Quadratic', 'ReducedODE', 'reduced_ode', 'stable_roots',
    'InvariantSurface', 'ReductionResult', 'solution_table', 'solve_reduction',
]
