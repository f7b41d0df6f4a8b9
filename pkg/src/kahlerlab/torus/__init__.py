from .checks import (DiscSurrogate, EpsSweepRecord, elementary_trace_check, eps_sweep,
                     integral_chain_check, integral_inequality_check, sup_bound_constant,
                     sup_lower_bound,
                     surrogate_integral_check, verify_ke_relation, verify_sup_bound,
                     volume_form_integral, volume_slope_check)
from .io import dump_solution, load_solution
from .solver import MASolveState, TorusMAProblem, assemble_problem, default_initial_guess, solve
from .spectral import SpectralGrid

__all__ = [
    "DiscSurrogate", "EpsSweepRecord", "elementary_trace_check", "eps_sweep",
    "integral_chain_check", "sup_bound_constant", "sup_lower_bound", "surrogate_integral_check",
    "verify_ke_relation", "verify_sup_bound", "volume_form_integral", "volume_slope_check",
    "dump_solution", "load_solution", "MASolveState", "TorusMAProblem", "assemble_problem",
    "default_initial_guess", "solve", "SpectralGrid",
]
