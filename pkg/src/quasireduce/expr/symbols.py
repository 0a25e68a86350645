"""Symbol identifiers for jet-space expressions.

Five kinds exist: independent variables ``x_i``, dependent variables ``u_A``,
first-order jets ``u_{A,i}``, free parameters (``a1``, ``k``...) and opaque
function symbols ``f_{;I}`` whose formal derivatives are indexed by the
argument positions they were differentiated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

# class ranks fix the global variable order:
# parameters < independents < dependents < jets < opaque symbols
RANK_PARAMETER = 0
RANK_INDEPENDENT = 1
RANK_DEPENDENT = 2
RANK_JET = 3
RANK_OPAQUE = 4


@dataclass(frozen=True)
class Parameter:
    name: str

    rank = RANK_PARAMETER

    def sort_key(self):
        return (RANK_PARAMETER, _natural(self.name))

    def key_name(self) -> str:
        return f"P:{self.name}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Independent:
    index: int
    family: str = "x"

    rank = RANK_INDEPENDENT

    def sort_key(self):
        return (RANK_INDEPENDENT, self.family, self.index)

    def key_name(self) -> str:
        return f"I:{self.family}:{self.index}"

    def __str__(self) -> str:
        return f"{self.family}{self.index}"


@dataclass(frozen=True)
class Dependent:
    index: int
    family: str = "u"

    rank = RANK_DEPENDENT

    def sort_key(self):
        return (RANK_DEPENDENT, self.family, self.index)

    def key_name(self) -> str:
        return f"D:{self.family}:{self.index}"

    def __str__(self) -> str:
        return f"{self.family}{self.index}"


@dataclass(frozen=True)
class Jet:
    """First derivative of ``family_dep`` with respect to the ``var``-th independent."""

    dep: int
    var: int
    family: str = "u"

    rank = RANK_JET

    def sort_key(self):
        return (RANK_JET, self.family, self.dep, self.var)

    def key_name(self) -> str:
        return f"J:{self.family}:{self.dep}:{self.var}"

    def __str__(self) -> str:
        return f"{self.family}[{self.dep},{self.var}]"


@dataclass(frozen=True)
class Opaque:
    """Formal derivative ``name_{;index}`` of an unspecified function of ``args``.

    ``index`` lists argument positions (1-based) and is kept sorted, so mixed
    partials commute by construction.
    """

    name: str
    index: tuple = ()
    args: tuple = ()

    rank = RANK_OPAQUE

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.index))
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "args", tuple(self.args))
        for i in idx:
            if not 1 <= i <= len(self.args):
                raise ValueError(f"derivative slot {i} outside arity {len(self.args)} of {self.name}")

    @property
    def order(self) -> int:
        return len(self.index)

    def derivative(self, slot: int) -> "Opaque":
        return Opaque(self.name, self.index + (slot,), self.args)

    def with_args(self, args) -> "Opaque":
        return Opaque(self.name, self.index, tuple(args))

    def sort_key(self):
        return (
            RANK_OPAQUE,
            _natural(self.name),
            tuple(a.sort_key() for a in self.args),
            len(self.index),
            self.index,
        )

    def key_name(self) -> str:
        args = ",".join(a.key_name() for a in self.args)
        idx = ".".join(str(i) for i in self.index)
        return f"O:{self.name}:{idx}:{args}"

    def __str__(self) -> str:
        idx = "".join(str(i) for i in self.index) if all(i < 10 for i in self.index) else ".".join(map(str, self.index))
        head = f"{self.name};{idx}" if self.index else self.name
        return head


Symbol = Union[Parameter, Independent, Dependent, Jet, Opaque]
SYMBOL_TYPES = (Parameter, Independent, Dependent, Jet, Opaque)


def _natural(name: str):
    """Split trailing digits so that ``k2 < k10``."""
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    return (head, int(tail) if tail else -1, name)


def sort_key(s: Symbol):
    return s.sort_key()


def sorted_symbols(symbols: Iterable[Symbol]) -> tuple:
    return tuple(sorted(set(symbols), key=sort_key))


@dataclass(frozen=True)
class Signature:
    """Jet-space signature: ``n`` independents and ``m`` dependents."""

    n: int
    m: int
    x: str = "x"
    u: str = "u"

    def independents(self) -> list:
        return [Independent(i, self.x) for i in range(1, self.n + 1)]

    def dependents(self) -> list:
        return [Dependent(a, self.u) for a in range(1, self.m + 1)]

    def jets(self) -> list:
        return [Jet(a, i, self.u) for a in range(1, self.m + 1) for i in range(1, self.n + 1)]

    def jet(self, a: int, i: int) -> Jet:
        return Jet(a, i, self.u)

    def renamed(self, x: str, u: str) -> "Signature":
        return Signature(self.n, self.m, x, u)

    def __str__(self) -> str:
        return f"({self.n},{self.m})"
