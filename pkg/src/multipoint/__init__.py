"""Optimal multipoint root-finding schemes with arbitrary-precision experiments."""

from .bigreal import PrecisionContext, format_sci
from .problems import builtin_polynomials, builtin_suite, get_problem
from .schemes import check_weight_conditions, get_method, proposed_weight_sets, run, step

__version__ = "0.1.0"
