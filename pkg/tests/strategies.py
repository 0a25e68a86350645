"""Hypothesis strategies for random expressions and fields over signature (2, 2)."""

from fractions import Fraction

from hypothesis import strategies as st

from quasireduce.expr import Dependent, Independent, Jet, Opaque, Parameter, Signature
from quasireduce.expr.tree import Sym, add, const, mul, power

SIG = Signature(2, 2)
U = (Dependent(1), Dependent(2))
POINT_SYMBOLS = [Independent(1), Independent(2), Dependent(1), Dependent(2)]
SYMBOLS = POINT_SYMBOLS + SIG.jets() + [Parameter("a1"), Parameter("a2"), Opaque("f", (1,), U), Opaque("f", (1, 2), U), Opaque("g", (), U)]

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)
nonzero = rationals.filter(lambda q: q != 0)


def _leaf(symbols):
    return st.one_of(rationals.map(const), st.sampled_from(symbols).map(Sym))


def expressions(symbols=SYMBOLS, max_leaves=12, division=True):
    def extend(children):
        ops = [
            st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
            st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
            st.tuples(children, st.integers(0, 3)).map(lambda t: power(t[0], t[1])),
        ]
        if division:
            # divide by a symbol-shifted square so the denominator never vanishes identically
            ops.append(st.tuples(children, st.sampled_from(symbols)).map(lambda t: mul(t[0], power(add(mul(Sym(t[1]), Sym(t[1])), const(1)), -1))))
        return st.one_of(*ops)

    return st.recursive(_leaf(symbols), extend, max_leaves=max_leaves)


def polynomials(symbols, degree=2, max_terms=4):
    """Random polynomials of bounded total degree in ``symbols``."""
    mono = st.lists(st.sampled_from(symbols), min_size=0, max_size=degree)
    term = st.tuples(nonzero, mono).map(lambda t: mul(const(t[0]), *[Sym(s) for s in t[1]]) if t[1] else const(t[0]))
    return st.lists(term, min_size=0, max_size=max_terms).map(lambda ts: add(*ts) if ts else const(0))


def points(symbols):
    return st.fixed_dictionaries({s: st.fractions(min_value=-7, max_value=7, max_denominator=5) for s in symbols})
