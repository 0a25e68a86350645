"""Immutable expression trees.

Nodes are built through the smart constructors :func:`add`, :func:`mul` and
:func:`power`, which flatten nested sums/products and fold rational
constants, so no ``Add``/``Mul`` ever holds fewer than two children.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from ..errors import DivisionByZeroPolynomial
from .symbols import SYMBOL_TYPES, Opaque, Symbol


class Expr:
    __slots__ = ()

    # arithmetic sugar; every operand is coerced through as_expr
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        return power(self, k)

    def __str__(self) -> str:
        from ..io.printer import format_expr

        return format_expr(self)

    def free_symbols(self) -> frozenset:
        out: set = set()
        _collect(self, out)
        return frozenset(out)


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: Fraction

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, repr=False)
class Sym(Expr):
    symbol: Symbol

    def __repr__(self):
        return f"Sym({self.symbol!r})"


@dataclass(frozen=True, repr=False)
class Add(Expr):
    terms: tuple

    def __repr__(self):
        return f"Add{self.terms!r}"


@dataclass(frozen=True, repr=False)
class Mul(Expr):
    factors: tuple

    def __repr__(self):
        return f"Mul{self.factors!r}"


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    base: Expr
    exp: int

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exp})"


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def const(v) -> Const:
    return Const(Fraction(v))


def sym(s: Symbol) -> Sym:
    return Sym(s)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    if isinstance(v, SYMBOL_TYPES):
        return Sym(v)
    to_expr = getattr(v, "to_expr", None)
    if to_expr is not None:
        return to_expr()
    raise TypeError(f"cannot interpret {v!r} as an expression")


def add(*terms) -> Expr:
    flat = []
    c = Fraction(0)
    for t in terms:
        t = as_expr(t)
        parts = t.terms if isinstance(t, Add) else (t,)
        for p in parts:
            if isinstance(p, Const):
                c += p.value
            else:
                flat.append(p)
    if c != 0:
        flat.append(Const(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors) -> Expr:
    flat = []
    c = Fraction(1)
    for f in factors:
        f = as_expr(f)
        parts = f.factors if isinstance(f, Mul) else (f,)
        for p in parts:
            if isinstance(p, Const):
                c *= p.value
            else:
                flat.append(p)
    if c == 0:
        return ZERO
    if c != 1:
        flat.insert(0, Const(c))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def power(base, k: int) -> Expr:
    base = as_expr(base)
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0:
            if k < 0:
                raise DivisionByZeroPolynomial("zero raised to a negative power")
            return ZERO
        return Const(base.value**k)
    if isinstance(base, Pow):
        return power(base.base, base.exp * k)
    return Pow(base, k)


def neg(e: Expr) -> Expr:
    return mul(Const(Fraction(-1)), e)


def _collect(e: Expr, out: set) -> None:
    if isinstance(e, Sym):
        out.add(e.symbol)
    elif isinstance(e, Add):
        for t in e.terms:
            _collect(t, out)
    elif isinstance(e, Mul):
        for t in e.factors:
            _collect(t, out)
    elif isinstance(e, Pow):
        _collect(e.base, out)


def contains(e: Expr, pred: Callable[[Symbol], bool]) -> bool:
    return any(pred(s) for s in e.free_symbols())


def tree_diff(e: Expr, s: Symbol) -> Expr:
    """Formal partial derivative on the tree (product, power, opaque chain rules)."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Sym):
        t = e.symbol
        if t == s:
            return ONE
        if isinstance(t, Opaque):
            return add(*(Sym(t.derivative(p)) for p, a in enumerate(t.args, 1) if a == s))
        return ZERO
    if isinstance(e, Add):
        return add(*(tree_diff(t, s) for t in e.terms))
    if isinstance(e, Mul):
        out = []
        fs = e.factors
        for i, f in enumerate(fs):
            d = tree_diff(f, s)
            if d != ZERO:
                out.append(mul(*fs[:i], d, *fs[i + 1:]))
        return add(*out)
    if isinstance(e, Pow):
        d = tree_diff(e.base, s)
        if d == ZERO:
            return ZERO
        return mul(Const(Fraction(e.exp)), power(e.base, e.exp - 1), d)
    raise TypeError(type(e))


def tree_substitute(e: Expr, bindings: Mapping[Symbol, Expr]) -> Expr:
    """Simultaneous replacement.

    Opaque symbols whose arguments are bound to bare symbols get their
    arguments renamed (``f;1(u1,u2)`` with ``u -> w`` becomes ``f;1(w1,w2)``).
    """
    if not bindings:
        return e
    renames = {k: v.symbol for k, v in bindings.items() if isinstance(v, Sym) and not isinstance(v.symbol, Opaque)}
    memo: dict = {}

    def go(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = node
        elif isinstance(node, Sym):
            t = node.symbol
            if t in bindings:
                out = as_expr(bindings[t])
            elif isinstance(t, Opaque) and any(a in renames for a in t.args):
                out = Sym(t.with_args(renames.get(a, a) for a in t.args))
            else:
                out = node
        elif isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(t) for t in node.factors))
        else:
            out = power(go(node.base), node.exp)
        memo[node] = out
        return out

    return go(e)


def evaluate(e: Expr, point: Mapping[Symbol, Fraction]) -> Fraction:
    """Exact rational evaluation; every free symbol must be assigned."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Sym):
        return Fraction(point[e.symbol])
    if isinstance(e, Add):
        return sum((evaluate(t, point) for t in e.terms), Fraction(0))
    if isinstance(e, Mul):
        out = Fraction(1)
        for f in e.factors:
            out *= evaluate(f, point)
        return out
    b = evaluate(e.base, point)
    if b == 0 and e.exp < 0:
        raise DivisionByZeroPolynomial("evaluation hit a zero denominator")
    return b**e.exp


def node_count(e: Expr) -> int:
    if isinstance(e, (Const, Sym)):
        return 1
    if isinstance(e, Add):
        return 1 + sum(node_count(t) for t in e.terms)
    if isinstance(e, Mul):
        return 1 + sum(node_count(t) for t in e.factors)
    return 1 + node_count(e.base)
