"""Plain-text rendering of expressions in the session grammar."""

from __future__ import annotations

from fractions import Fraction

from ..expr.symbols import Dependent, Independent, Jet, Opaque, Parameter, Symbol
from ..expr.tree import Add, Const, Expr, Mul, Pow, Sym, as_expr

PREC_ADD = 1
PREC_MUL = 2
PREC_NEG = 3
PREC_POW = 4
PREC_ATOM = 5


def format_symbol(s: Symbol) -> str:
    if isinstance(s, Opaque):
        head = s.name
        if s.index:
            sep = "" if all(i < 10 for i in s.index) else "."
            head += ";" + sep.join(str(i) for i in s.index)
        if s.args and not _default_args(s.args):
            head += "(" + ",".join(format_symbol(a) for a in s.args) + ")"
        return head
    if isinstance(s, Jet):
        return f"{s.family}[{s.dep},{s.var}]"
    if isinstance(s, (Independent, Dependent)):
        return f"{s.family}{s.index}"
    if isinstance(s, Parameter):
        return s.name
    raise TypeError(s)


def _default_args(args) -> bool:
    return all(isinstance(a, Dependent) and a.family == "u" and a.index == k for k, a in enumerate(args, 1))


def format_expr(e) -> str:
    return _fmt(as_expr(e))[0]


def _const(v: Fraction):
    if v.denominator == 1:
        return (str(v), PREC_ATOM if v >= 0 else PREC_NEG)
    if v < 0:
        return (f"-{-v.numerator}/{v.denominator}", PREC_NEG)
    return (f"{v.numerator}/{v.denominator}", PREC_MUL)


def _wrap(part, prec: int) -> str:
    text, p = part
    return f"({text})" if p < prec else text


def _fmt(e: Expr):
    if isinstance(e, Const):
        return _const(e.value)
    if isinstance(e, Sym):
        return (format_symbol(e.symbol), PREC_ATOM)
    if isinstance(e, Add):
        out = ""
        for k, t in enumerate(e.terms):
            neg, body = _split_sign(t)
            text = _wrap(_fmt(body), PREC_ADD + (1 if k and neg else 0))
            if k == 0:
                out = f"-{_wrap(_fmt(body), PREC_MUL)}" if neg else text
            else:
                out += (" - " if neg else " + ") + text
        return (out, PREC_ADD)
    if isinstance(e, Mul):
        neg, body = _split_sign(e)
        if neg:
            return (f"-{_wrap(_fmt(body), PREC_MUL)}", PREC_NEG)
        return (_fmt_product(e), PREC_MUL)
    if isinstance(e, Pow):
        if e.exp < 0:
            den = e.base if e.exp == -1 else Pow(e.base, -e.exp)
            return (f"1/{_wrap(_fmt(den), PREC_POW)}", PREC_MUL)
        return (f"{_wrap(_fmt(e.base), PREC_ATOM)}^{e.exp}", PREC_POW)
    raise TypeError(type(e))


def _fmt_product(e: Mul) -> str:
    num, den = [], []
    for f in e.factors:
        if isinstance(f, Pow) and f.exp < 0:
            den.append(f.base if f.exp == -1 else Pow(f.base, -f.exp))
        elif isinstance(f, Const) and f.value.denominator != 1:
            if f.value.numerator != 1:
                num.append(Const(Fraction(f.value.numerator)))
            den.append(Const(Fraction(f.value.denominator)))
        else:
            num.append(f)
    text = "*".join(_wrap(_fmt(f), PREC_POW) for f in num) if num else "1"
    if den:
        if len(den) == 1:
            text += "/" + _wrap(_fmt(den[0]), PREC_POW)
        else:
            text += "/(" + "*".join(_wrap(_fmt(f), PREC_POW) for f in den) + ")"
    return text


def _split_sign(t: Expr):
    """Return (negative?, |t|) for display of a leading minus sign."""
    if isinstance(t, Const) and t.value < 0:
        return True, Const(-t.value)
    if isinstance(t, Mul) and isinstance(t.factors[0], Const) and t.factors[0].value < 0:
        c = -t.factors[0].value
        rest = t.factors[1:]
        if c == 1:
            body = rest[0] if len(rest) == 1 else Mul(rest)
        else:
            body = Mul((Const(c),) + rest)
        return True, body
    return False, t
