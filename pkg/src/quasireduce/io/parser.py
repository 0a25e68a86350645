"""Recursive-descent parser for the session expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom (('^' | '**') exponent)?
    exponent:= ['-'] INT | '(' ['-'] INT ')'
    atom    := NUMBER | '(' expr ')' | NAME '[' INT ',' INT ']'
             | NAME [';' INDEX] ['(' args ')'] | 'D' '(' expr (',' NAME)* ')'

``u[A,i]`` is a jet, ``f;12`` a formal derivative of a declared function
(indices are sorted; use dots, ``f;1.12``, once an index exceeds 9), and
``D(e, s1, s2)`` differentiates ``e`` with respect to the listed symbols
(``D(e)`` is ``e`` itself).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ExprSyntaxError, UndeclaredSymbol
from ..expr.symbols import Dependent, Independent, Jet, Opaque, Parameter, Signature, Symbol
from ..expr.tree import Expr, Sym, add, const, mul, neg, power, tree_diff

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()\[\],;.]))"
)


@dataclass
class SymbolTable:
    """Declared names: coordinate families, parameters, functions (with arity) and macros."""

    signatures: list = field(default_factory=list)
    parameters: set = field(default_factory=set)
    functions: dict = field(default_factory=dict)
    macros: dict = field(default_factory=dict)
    permissive: bool = False

    @classmethod
    def for_signature(cls, *sigs: Signature, parameters=(), functions=None, permissive: bool = False) -> "SymbolTable":
        return cls(list(sigs), set(parameters), dict(functions or {}), {}, permissive)

    def coordinate(self, name: str):
        m = re.fullmatch(r"([A-Za-z]+)(\d+)", name)
        if not m:
            return None
        fam, idx = m.group(1), int(m.group(2))
        for sig in self.signatures:
            if fam == sig.x and 1 <= idx <= sig.n:
                return Independent(idx, fam)
            if fam == sig.u and 1 <= idx <= sig.m:
                return Dependent(idx, fam)
        return None

    def jet_family(self, fam: str):
        for sig in self.signatures:
            if fam == sig.u:
                return sig
        return None

    def default_args(self, arity: int) -> tuple:
        fam = self.signatures[0].u if self.signatures else "u"
        return tuple(Dependent(i, fam) for i in range(1, arity + 1))

    def all_names(self) -> set:
        return set(self.parameters) | set(self.functions) | set(self.macros)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                j = pos
                while j < len(text) and text[j].isspace():
                    j += 1
                raise ExprSyntaxError(f"unexpected character {text[j]!r}", *self.position(j))
            kind = m.lastgroup
            start = m.start(kind)
            self.items.append((kind, m.group(kind), start))
            pos = m.end()
        self.items.append(("end", "", len(text)))
        self.i = 0

    def position(self, offset: int):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def peek(self):
        return self.items[self.i]

    def next(self):
        tok = self.items[self.i]
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        kind, val, pos = self.peek()
        if not (kind == "op" and val == op):
            shown = val or "end of input"
            raise ExprSyntaxError(f"expected {op!r}, found {shown!r}", *self.position(pos))
        self.i += 1

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, *self.position(tok[2]))


class _Parser:
    def __init__(self, text: str, table: SymbolTable):
        self.t = _Tokens(text)
        self.table = table

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, _ = self.t.peek()
        if kind != "end":
            raise self.t.error(f"unexpected {val!r}")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            if self.t.accept("+"):
                terms.append(self.term())
            elif self.t.accept("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms)

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.t.accept("*"):
                e = mul(e, self.unary())
            elif self.t.accept("/"):
                tok = self.t.peek()
                d = self.unary()
                if d == const(0):
                    raise self.t.error("division by zero", tok)
                e = mul(e, power(d, -1))
            else:
                return e

    def unary(self) -> Expr:
        if self.t.accept("-"):
            return neg(self.unary())
        if self.t.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.t.accept("^") or self.t.accept("**"):
            k = self.exponent()
            if k < 0 and base == const(0):
                raise self.t.error("division by zero")
            return power(base, k)
        return base

    def exponent(self) -> int:
        paren = self.t.accept("(")
        sign = -1 if self.t.accept("-") else 1
        kind, val, pos = self.t.next()
        if kind != "num" or "." in val:
            raise ExprSyntaxError("exponent must be an integer", *self.t.position(pos))
        if paren:
            self.t.expect(")")
        return sign * int(val)

    def atom(self) -> Expr:
        tok = self.t.next()
        kind, val, pos = tok
        if kind == "num":
            return const(Fraction(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.t.expect(")")
            return e
        if kind == "name":
            return self.named(val, tok)
        shown = val or "end of input"
        raise ExprSyntaxError(f"unexpected {shown!r}", *self.t.position(pos))

    def named(self, name: str, tok) -> Expr:
        table = self.table
        if name == "D" and self.t.peek()[1] == "(" and "D" not in table.all_names():
            return self.derivative()
        if self.t.peek()[1] == "[":
            return self.jet(name, tok)
        if name in table.macros:
            return table.macros[name]
        if name in table.functions or (table.permissive and self.t.peek()[1] in (";", "(")):
            return self.function(name, tok)
        coord = table.coordinate(name)
        if coord is not None:
            return Sym(coord)
        if name in table.parameters or table.permissive:
            return Sym(Parameter(name))
        raise UndeclaredSymbol(f"undeclared symbol {name!r}", *self.t.position(tok[2]))

    def jet(self, fam: str, tok) -> Expr:
        sig = self.table.jet_family(fam)
        if sig is None:
            raise UndeclaredSymbol(f"{fam!r} is not a dependent family", *self.t.position(tok[2]))
        self.t.expect("[")
        a = self.integer()
        self.t.expect(",")
        i = self.integer()
        self.t.expect("]")
        if not (1 <= a <= sig.m and 1 <= i <= sig.n):
            raise self.t.error(f"jet {fam}[{a},{i}] out of range", tok)
        return Sym(Jet(a, i, fam))

    def integer(self) -> int:
        kind, val, pos = self.t.next()
        if kind != "num" or "." in val:
            raise ExprSyntaxError("expected an integer", *self.t.position(pos))
        return int(val)

    def function(self, name: str, tok) -> Expr:
        arity = self.table.functions.get(name)
        index: tuple = ()
        if self.t.accept(";"):
            kind, val, pos = self.t.next()
            if kind != "num":
                raise ExprSyntaxError("expected derivative indices after ';'", *self.t.position(pos))
            if "." in val:
                parts = val.split(".")
            else:
                parts = list(val)
            while self.t.accept("."):
                kind, more, pos = self.t.next()
                if kind != "num":
                    raise ExprSyntaxError("expected an index after '.'", *self.t.position(pos))
                parts.extend(more.split("."))
            index = tuple(sorted(int(p) for p in parts))
            if any(i < 1 for i in index):
                raise self.t.error("derivative indices start at 1", tok)
        if self.t.accept("("):
            args = [self.argument()]
            while self.t.accept(","):
                args.append(self.argument())
            self.t.expect(")")
            if arity is not None and len(args) != arity:
                raise self.t.error(f"{name} takes {arity} arguments, got {len(args)}", tok)
            args = tuple(args)
        else:
            if arity is None and index:
                arity = max(index)
            if arity is None:
                raise self.t.error(f"{name} needs explicit arguments", tok)
            args = self.table.default_args(arity)
        if index and max(index) > len(args):
            raise self.t.error(f"derivative index exceeds the arity of {name}", tok)
        return Sym(Opaque(name, index, args))

    def argument(self) -> Symbol:
        kind, val, pos = self.t.next()
        if kind != "name":
            raise ExprSyntaxError("function arguments must be coordinates", *self.t.position(pos))
        s = self.table.coordinate(val)
        if s is None:
            raise UndeclaredSymbol(f"undeclared coordinate {val!r}", *self.t.position(pos))
        return s

    def derivative(self) -> Expr:
        self.t.expect("(")
        e = self.expr()
        while self.t.accept(","):
            kind, val, pos = self.t.next()
            s = self.table.coordinate(val) if kind == "name" else None
            if s is None and kind == "name" and val in self.table.parameters:
                s = Parameter(val)
            if s is None:
                raise UndeclaredSymbol(f"cannot differentiate with respect to {val!r}", *self.t.position(pos))
            e = tree_diff(e, s)
        self.t.expect(")")
        return e


def parse_expr(text: str, table: SymbolTable | None = None) -> Expr:
    """Parse ``text``; without a table every name is accepted (permissive mode)."""
    if table is None:
        table = SymbolTable([Signature(9, 9), Signature(9, 9, "z", "w")], permissive=True)
    return _Parser(text, table).parse()
