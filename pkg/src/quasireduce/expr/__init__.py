"""Exact symbolic kernel: symbols, trees, rational normal forms, linear solving."""

from .field import RationalFunction, RationalNormalForm, as_rf, normalize
from .linear import Elimination, determinant, eliminate, matrix_rank, solve_linear
from .ops import diff, equal, has_jets, is_zero, substitute, total_derivative
from .symbols import Dependent, Independent, Jet, Opaque, Parameter, Signature, Symbol
from .tree import Add, Const, Expr, Mul, Pow, Sym, as_expr, evaluate

__all__ = [
    "Add", "Const", "Dependent", "Elimination", "Expr", "Independent", "Jet", "Mul",
    "Opaque", "Parameter", "Pow", "RationalFunction", "RationalNormalForm", "Signature",
    "Sym", "Symbol", "as_expr", "as_rf", "determinant", "diff", "eliminate", "equal",
    "evaluate", "has_jets", "is_zero", "matrix_rank", "normalize", "solve_linear",
    "substitute", "total_derivative",
]
