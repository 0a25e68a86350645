"""Expression-level operations shared by the geometric modules."""

from __future__ import annotations

from typing import Mapping

from ..errors import InputContainsJets
from .field import RationalFunction, as_rf
from .symbols import Jet, Signature, Symbol
from .tree import Expr, Sym, add, as_expr, mul, tree_diff, tree_substitute


def diff(e, s: Symbol):
    """Formal partial derivative; keeps the representation of ``e``."""
    if isinstance(e, RationalFunction):
        return e.diff(s)
    return tree_diff(as_expr(e), s)


def has_jets(e) -> bool:
    if isinstance(e, RationalFunction):
        return e.depends_on(lambda s: isinstance(s, Jet))
    return any(isinstance(s, Jet) for s in as_expr(e).free_symbols())


def total_derivative(e, i: int, signature: Signature):
    """``D_i e`` for a jet-free ``e``: ``d e/d x_i + sum_A u_{A,i} d e/d u_A``."""
    if has_jets(e):
        raise InputContainsJets("total derivative of an expression that already contains jets")
    x = signature.independents()[i - 1]
    if isinstance(e, RationalFunction):
        out = e.diff(x)
        for a, u in enumerate(signature.dependents(), 1):
            d = e.diff(u)
            if not d.is_zero():
                out = out + as_rf(signature.jet(a, i)) * d
        return out
    e = as_expr(e)
    parts = [tree_diff(e, x)]
    for a, u in enumerate(signature.dependents(), 1):
        parts.append(mul(Sym(signature.jet(a, i)), tree_diff(e, u)))
    return add(*parts)


def substitute(e, bindings: Mapping[Symbol, object]):
    """Simultaneous substitution; jets change only when bound explicitly."""
    if isinstance(e, RationalFunction):
        return e.subs({k: as_rf(v) for k, v in bindings.items()})
    return tree_substitute(as_expr(e), {k: as_expr(v) for k, v in bindings.items()})


def is_zero(e) -> bool:
    return as_rf(e).is_zero()


def equal(a, b) -> bool:
    return (as_rf(a) - as_rf(b)).is_zero()
