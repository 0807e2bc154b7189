"""Exact symbolic Lie symmetry analysis for variational PDEs.

The engine covers polynomial expressions over rational functions of
symbolic parameters, jet-space calculus (total derivatives, prolongation,
Euler operators), Noether's variational criterion with divergence
certificates, and a catalog of Kohn-Laplace equations on Heisenberg groups.
"""

from .coefficients import AffineExponent, ParamRational, parameter_field
from .conditions import ParameterConditions, solve_zero_conditions
from .errors import (
    CannotSolveError,
    ContextMismatchError,
    HomotopyDegeneracyError,
    JetOrderError,
    NoetheraError,
    NotADivergenceError,
    OutOfScopeError,
    ParseError,
    ProblemSchemaError,
    UndeclaredNameError,
    UnsupportedPowerError,
)
from .expr import Context, Expr, JetVar, Parameter, SpaceVar, pdiff, pow_expr, substitute
from .jet import (
    ProlongedField,
    VectorField,
    apply_prolonged,
    divergence,
    euler_operator,
    higher_euler_first,
    prolong,
    total_derivative,
    total_derivative_multi,
)
from .noether import (
    CONDITIONAL,
    DIVERGENCE,
    NEITHER,
    VARIATIONAL,
    DivergenceCertificate,
    SymmetryVerdict,
    check_pde_symmetry,
    check_symmetry,
    homotopy_potentials,
    is_total_divergence,
    pde_symmetry_residual,
    variational_residual,
)
from .parser import ProblemSpec, dump_problem, load_problem, parse_expr, print_expr, problem_from_dict

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
