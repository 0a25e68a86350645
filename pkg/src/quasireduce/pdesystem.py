"""First-order PDE systems held in rational normal form."""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr.field import RationalFunction, as_rf
from .expr.symbols import Jet, Signature


@dataclass(frozen=True)
class PDESystem:
    """Equations ``Delta_k(x, u, u^(1)) = 0`` over a jet-space signature.

    ``metadata`` carries provenance such as factors cleared during a
    push-forward; it is ignored by equality.
    """

    signature: Signature
    equations: tuple
    name: str | None = None
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        eqs = tuple(as_rf(e) for e in self.equations)
        object.__setattr__(self, "equations", eqs)
        for k, e in enumerate(eqs):
            if e.denominator().depends_on(lambda s: isinstance(s, Jet)):
                raise ValueError(f"equation {k} is not polynomial in the jets")

    def jets(self) -> list:
        return self.signature.jets()

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def with_equations(self, equations, **meta) -> "PDESystem":
        md = dict(self.metadata)
        md.update(meta)
        return PDESystem(self.signature, tuple(equations), self.name, md)

    def substitute(self, bindings) -> "PDESystem":
        return self.with_equations(e.subs(bindings) for e in self.equations)

    def cleared(self) -> "PDESystem":
        """Equations multiplied through by their (jet-free) denominators."""
        return self.with_equations(e.numerator() for e in self.equations)

    def __str__(self) -> str:
        return "\n".join(f"{e} = 0" for e in self.equations)


def jet_degree(e: RationalFunction, signature: Signature) -> int:
    return as_rf(e).degree_in(signature.jets())
