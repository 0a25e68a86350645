"""Canonical variables for the translation + scaling algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import SingularSystem, UnsupportedShape, VerificationFailed
from .expr.field import ONE_RF, ZERO_RF, RationalFunction, as_rf
from .expr.linear import matrix_rank, solve_linear
from .expr.symbols import Dependent, Independent, Jet, Signature
from .liegeom import VectorField


@dataclass(frozen=True)
class PointTransformation:
    """``z = Z(x, u), w = W(x, u)`` with an optional explicit inverse.

    ``inverse`` is ``(X_of, U_of)``, expressions in the target symbols.
    """

    signature: Signature
    Z: tuple
    W: tuple
    target: Signature | None = None
    inverse: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "Z", tuple(as_rf(e) for e in self.Z))
        object.__setattr__(self, "W", tuple(as_rf(e) for e in self.W))
        if self.target is None:
            object.__setattr__(self, "target", self.signature.renamed("z", "w"))
        if self.inverse is not None:
            xs, us = self.inverse
            object.__setattr__(self, "inverse", (tuple(as_rf(e) for e in xs), tuple(as_rf(e) for e in us)))
        if len(self.Z) != self.signature.n or len(self.W) != self.signature.m:
            raise ValueError("transformation size does not match the signature")

    @staticmethod
    def identity(signature: Signature, target: Signature | None = None) -> "PointTransformation":
        target = target or signature.renamed("z", "w")
        return PointTransformation(
            signature,
            tuple(as_rf(x) for x in signature.independents()),
            tuple(as_rf(u) for u in signature.dependents()),
            target,
            (tuple(as_rf(z) for z in target.independents()), tuple(as_rf(w) for w in target.dependents())),
        )

    def forward_bindings(self) -> dict:
        """Target coordinates in terms of source coordinates."""
        out = {z: e for z, e in zip(self.target.independents(), self.Z)}
        out.update({w: e for w, e in zip(self.target.dependents(), self.W)})
        return out

    def inverse_bindings(self) -> dict:
        xs, us = self.with_inverse().inverse
        out = {x: e for x, e in zip(self.signature.independents(), xs)}
        out.update({u: e for u, e in zip(self.signature.dependents(), us)})
        return out

    def with_inverse(self) -> "PointTransformation":
        if self.inverse is not None:
            return self
        return PointTransformation(self.signature, self.Z, self.W, self.target, derive_inverse(self))

    def inverted(self) -> "PointTransformation":
        t = self.with_inverse()
        xs, us = t.inverse
        # the inverse of the inverse is the forward map itself
        return PointTransformation(self.target, xs, us, self.signature, (self.Z, self.W))

    def round_trip_residuals(self) -> list:
        """``(X, U)(Z, W) - (x, u)`` and ``(Z, W)(X, U) - (z, w)``; all zero for a valid inverse."""
        t = self.with_inverse()
        fwd = t.forward_bindings()
        inv = t.inverse_bindings()
        xs, us = t.inverse
        out = []
        for x, e in zip(self.signature.independents() + self.signature.dependents(), xs + us):
            out.append(e.subs(fwd) - as_rf(x))
        for z, e in zip(self.target.independents() + self.target.dependents(), self.Z + self.W):
            out.append(e.subs(inv) - as_rf(z))
        return out

    def jacobian(self) -> list:
        coords = self.signature.independents() + self.signature.dependents()
        return [[e.diff(c) for c in coords] for e in self.Z + self.W]

    def jacobian_rank(self) -> tuple:
        return matrix_rank(self.jacobian())

    def __str__(self) -> str:
        parts = [f"{z} = {e}" for z, e in zip(self.target.independents(), self.Z)]
        parts += [f"{w} = {e}" for w, e in zip(self.target.dependents(), self.W)]
        return ", ".join(parts)


def derive_inverse(t: PointTransformation) -> tuple:
    """Inverse for ``W = u`` and ``Z`` affine in ``x`` with ``x``-free coefficients."""
    sig, tgt = t.signature, t.target
    us = sig.dependents()
    if any(not (w - as_rf(u)).is_zero() for w, u in zip(t.W, us)):
        raise UnsupportedShape("automatic inverse needs W = u; supply the inverse explicitly")
    xs = sig.independents()
    for e in t.Z:
        if e.depends_on(lambda s: isinstance(s, Jet)) or e.degree_in(xs) > 1:
            raise UnsupportedShape("automatic inverse needs Z affine in x")
        if not e.denominator().is_constant() and e.denominator().depends_on(set(xs).__contains__):
            raise UnsupportedShape("automatic inverse needs Z affine in x")
    rename = {u: as_rf(w) for u, w in zip(us, tgt.dependents())}
    eqs = [as_rf(z) - e.subs(rename) for z, e in zip(tgt.independents(), t.Z)]
    try:
        sol = solve_linear(eqs, xs)
    except SingularSystem as exc:
        raise UnsupportedShape("Z is not invertible in x") from exc
    for s in sol.values():
        if s.depends_on(lambda v: isinstance(v, (Independent, Dependent)) and v.family in (sig.x, sig.u)):
            raise UnsupportedShape("inverse still depends on source coordinates")
    return tuple(sol[x] for x in xs), tuple(as_rf(w) for w in tgt.dependents())


def _split_scaling(X: VectorField):
    """Return ``g`` with ``X = sum (x_i - g_i) d/dx_i``, or ``None``."""
    sig = X.signature
    if any(not e.is_zero() for e in X.eta):
        return None
    g = []
    xs = sig.independents()
    for x, xi in zip(xs, X.xi):
        gi = as_rf(x) - xi
        if gi.depends_on(lambda s: isinstance(s, (Independent, Jet))):
            return None
        g.append(gi)
    return g


def canonical_for_translation_scaling(fields: Sequence[VectorField]) -> PointTransformation:
    """``z_i = x_i - g_i(u)``, ``w = u`` for ``d/dx_1..d/dx_n`` plus ``sum (x_i - g_i) d/dx_i``."""
    fields = list(fields)
    if not fields:
        raise UnsupportedShape("no fields given")
    sig = fields[0].signature
    if len(fields) != sig.n + 1:
        raise UnsupportedShape(f"expected {sig.n + 1} fields, got {len(fields)}")
    for i, X in enumerate(fields[:-1], 1):
        if X != VectorField.translation(sig, i):
            raise UnsupportedShape(f"field {i} is not the translation d/dx{i}")
    g = _split_scaling(fields[-1])
    if g is None:
        raise UnsupportedShape("last field is not of the form sum (x_i - g_i(u)) d/dx_i")
    target = sig.renamed("z", "w")
    rename = {u: as_rf(w) for u, w in zip(sig.dependents(), target.dependents())}
    Z = tuple(as_rf(x) - gi for x, gi in zip(sig.independents(), g))
    W = tuple(as_rf(u) for u in sig.dependents())
    inverse = (
        tuple(as_rf(z) + gi.subs(rename) for z, gi in zip(target.independents(), g)),
        tuple(as_rf(w) for w in target.dependents()),
    )
    t = PointTransformation(sig, Z, W, target, inverse)
    check = verify_canonical(t, fields)
    if not check.ok or any(not r.is_zero() for r in t.round_trip_residuals()):
        raise VerificationFailed("constructed variables fail their own verification")
    return t


@dataclass
class CanonicalCheck:
    """Per-family verdicts; ``theorem_ok`` ignores the ``scaling_z`` family."""

    families: dict
    witnesses: dict = field(default_factory=dict)

    @property
    def theorem_ok(self) -> bool:
        return all(v for k, v in self.families.items() if k != "scaling_z")

    @property
    def ok(self) -> bool:
        return all(self.families.values())

    def __bool__(self) -> bool:
        return self.ok


def verify_canonical(t: PointTransformation, fields: Sequence[VectorField]) -> CanonicalCheck:
    fields = list(fields)
    n = t.signature.n
    base, scale = fields[:n], fields[n] if len(fields) > n else None
    fam = {"translations_z": True, "translations_w": True, "scaling_w": True, "scaling_z": True}
    wit: dict = {k: [] for k in fam}
    for i, X in enumerate(base, 1):
        for j, z in enumerate(t.Z, 1):
            v = X.apply(z)
            want = ONE_RF if i == j else ZERO_RF
            if not (v - want).is_zero():
                fam["translations_z"] = False
                wit["translations_z"].append(f"X{i}(z{j}) = {v} != {want}")
        for a, w in enumerate(t.W, 1):
            v = X.apply(w)
            if not v.is_zero():
                fam["translations_w"] = False
                wit["translations_w"].append(f"X{i}(w{a}) = {v}")
    if scale is None:
        fam["scaling_w"] = fam["scaling_z"] = False
        wit["scaling_w"].append("no scaling field given")
    else:
        for a, w in enumerate(t.W, 1):
            v = scale.apply(w)
            if not v.is_zero():
                fam["scaling_w"] = False
                wit["scaling_w"].append(f"X{n + 1}(w{a}) = {v}")
        for j, z in enumerate(t.Z, 1):
            v = scale.apply(z) - z
            if not v.is_zero():
                fam["scaling_z"] = False
                wit["scaling_z"].append(f"X{n + 1}(z{j}) - z{j} = {v}")
    return CanonicalCheck(fam, wit)
