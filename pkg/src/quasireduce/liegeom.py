"""Vector fields on (x, u)-space, brackets, first prolongation and symmetry checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from .errors import AnsatzTooSmall, InputContainsJets, SignatureMismatch
from .expr.field import ONE_RF, ZERO_RF, RationalFunction, as_rf
from .expr.linear import eliminate, eliminate_rows, matrix_rank
from .expr.ops import total_derivative
from .expr.symbols import Jet, Parameter, Signature


@dataclass(frozen=True)
class VectorField:
    """``sum_j xi_j d/dx_j + sum_A eta_A d/du_A`` with jet-free coefficients."""

    signature: Signature
    xi: tuple
    eta: tuple
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        xi = tuple(as_rf(c) for c in self.xi)
        eta = tuple(as_rf(c) for c in self.eta)
        if len(xi) != self.signature.n or len(eta) != self.signature.m:
            raise SignatureMismatch("component count does not match the signature")
        for c in xi + eta:
            if c.depends_on(lambda s: isinstance(s, Jet)):
                raise InputContainsJets("point vector fields cannot depend on jets")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @staticmethod
    def translation(signature: Signature, i: int, name: str | None = None) -> "VectorField":
        xi = [ONE_RF if j == i else ZERO_RF for j in range(1, signature.n + 1)]
        return VectorField(signature, tuple(xi), (ZERO_RF,) * signature.m, name)

    @property
    def components(self) -> tuple:
        return self.xi + self.eta

    def coordinates(self) -> list:
        return self.signature.independents() + self.signature.dependents()

    def apply(self, F) -> RationalFunction:
        """Action as a derivation on functions of (x, u)."""
        F = as_rf(F)
        out = ZERO_RF
        for c, v in zip(self.components, self.coordinates()):
            if not c.is_zero():
                d = F.diff(v)
                if not d.is_zero():
                    out = out + c * d
        return out

    def scaled(self, c) -> "VectorField":
        c = as_rf(c)
        return VectorField(self.signature, tuple(c * v for v in self.xi), tuple(c * v for v in self.eta), self.name)

    def __add__(self, other: "VectorField") -> "VectorField":
        _same(self, other)
        return VectorField(self.signature, tuple(a + b for a, b in zip(self.xi, other.xi)), tuple(a + b for a, b in zip(self.eta, other.eta)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scaled(-1)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.signature == other.signature and (self - other).is_zero()

    def __hash__(self):
        return hash((self.signature, tuple(c.key() for c in self.components)))

    def __str__(self) -> str:
        parts = []
        for c, v in zip(self.components, self.coordinates()):
            if not c.is_zero():
                parts.append(f"({c})*d/d{v}")
        return " + ".join(parts) if parts else "0"


def _same(X: VectorField, Y: VectorField) -> None:
    if X.signature != Y.signature:
        raise SignatureMismatch(f"signatures {X.signature} and {Y.signature} differ")


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^a = X(Y^a) - Y(X^a)``."""
    _same(X, Y)
    comps = [X.apply(b) - Y.apply(a) for a, b in zip(X.components, Y.components)]
    n = X.signature.n
    return VectorField(X.signature, tuple(comps[:n]), tuple(comps[n:]))


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    zeta: tuple  # zeta[A-1][i-1] multiplies d/du_{A,i}

    def apply(self, F) -> RationalFunction:
        F = as_rf(F)
        out = self.base.apply(F)
        sig = self.base.signature
        for a in range(sig.m):
            for i in range(sig.n):
                z = self.zeta[a][i]
                if z.is_zero():
                    continue
                d = F.diff(sig.jet(a + 1, i + 1))
                if not d.is_zero():
                    out = out + z * d
        return out


def prolong1(X: VectorField) -> ProlongedField:
    """``zeta_{A,i} = D_i eta_A - sum_k u_{A,k} D_i xi_k``."""
    sig = X.signature
    Dxi = [[total_derivative(X.xi[k], i, sig) for k in range(sig.n)] for i in range(1, sig.n + 1)]
    zeta = []
    for a in range(1, sig.m + 1):
        row = []
        for i in range(1, sig.n + 1):
            z = total_derivative(X.eta[a - 1], i, sig)
            for k in range(sig.n):
                d = Dxi[i - 1][k]
                if not d.is_zero():
                    z = z - as_rf(sig.jet(a, k + 1)) * d
            row.append(z)
        zeta.append(tuple(row))
    return ProlongedField(X, tuple(zeta))


def distribution_rank(fields: Sequence[VectorField], with_pivots: bool = False):
    """Generic rank of the coefficient matrix over the function field."""
    fields = list(fields)
    if not fields:
        return (0, []) if with_pivots else 0
    for f in fields[1:]:
        _same(fields[0], f)
    rank, pivots = matrix_rank([f.components for f in fields])
    return (rank, pivots) if with_pivots else rank


def resolve_constant_combination(target: VectorField, basis: Sequence[VectorField]):
    """Constants ``c`` with ``target = sum c_k basis_k``, or ``None``.

    Constants may involve declared parameters but nothing else.
    """
    unknowns = [Parameter(f"_c{k}") for k in range(len(basis))]
    rows = []
    for a in range(len(target.components)):
        # coefficient of each non-parameter monomial must match
        expr_rows: dict = {}
        pieces = [(None, target.components[a])] + [(u, b.components[a]) for u, b in zip(unknowns, basis)]
        for u, comp in pieces:
            if comp.is_zero():
                continue
            variables = [s for s in comp.free_symbols() if not isinstance(s, Parameter)]
            for mono, c in _split_all(comp, variables).items():
                coeffs, const = expr_rows.setdefault(mono, ({}, ZERO_RF))
                if u is None:
                    expr_rows[mono] = (coeffs, const - c)
                else:
                    coeffs[u] = coeffs.get(u, ZERO_RF) + c
        rows.extend(expr_rows.values())
    el = eliminate_rows(rows, unknowns)
    if el.residuals:
        return None
    out = []
    for u in unknowns:
        out.append(el.solution.get(u, ZERO_RF).subs({f: ZERO_RF for f in el.free}))
    return out


def _split_all(comp: RationalFunction, variables):
    """Split by monomials in ``variables`` including the denominator."""
    if comp.denominator().depends_on(set(variables).__contains__):
        # multiply out a non-parametric denominator: compare as a whole
        return {("__whole__", comp.key()): ONE_RF}
    return {tuple((str(s), e) for s, e in mono): c for mono, c in comp.split(variables).items()}


@dataclass
class AlgebraReport:
    """Commutator table and Theorem-1 structure verdict.

    ``table[(i, j)]`` (0-based, ``i < j``) holds the constant coefficients of
    the bracket in the input basis, or ``None`` when no constant combination
    exists.
    """

    table: dict
    structure_ok: bool
    distribution_rank: int
    certificates: list
    pivots: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def check_theorem1_structure(fields: Sequence[VectorField]) -> AlgebraReport:
    fields = list(fields)
    k = len(fields)
    sig = fields[0].signature
    for f in fields[1:]:
        _same(fields[0], f)
    table = {}
    certs = []
    failures = []
    for i in range(k):
        for j in range(i + 1, k):
            br = lie_bracket(fields[i], fields[j])
            table[(i, j)] = resolve_constant_combination(br, fields)
    ok = k == sig.n + 1
    if not ok:
        failures.append(f"expected {sig.n + 1} fields, got {k}")
    rank, pivots = distribution_rank(fields[: k - 1], with_pivots=True)
    for i in range(k - 1):
        for j in range(i + 1, k - 1):
            br = lie_bracket(fields[i], fields[j])
            good = br.is_zero()
            certs.append({"check": f"[X{i + 1},X{j + 1}] = 0", "ok": good, "residual": [str(c) for c in br.components]})
            if not good:
                ok = False
                failures.append(f"[X{i + 1},X{j + 1}] != 0")
        br = lie_bracket(fields[i], fields[k - 1]) - fields[i]
        good = br.is_zero()
        certs.append({"check": f"[X{i + 1},X{k}] = X{i + 1}", "ok": good, "residual": [str(c) for c in br.components]})
        if not good:
            ok = False
            failures.append(f"[X{i + 1},X{k}] != X{i + 1}")
    if rank != sig.n:
        ok = False
        failures.append(f"distribution rank {rank} != {sig.n}")
    return AlgebraReport(table, ok, rank, certs, pivots, failures)


# ---------------------------------------------------------------------------
# symmetry checks


class JetReduction:
    """Normal form modulo the equations that are linear in the jets.

    Each such equation is solved for its highest-ordered jet, so the
    exchange relation ``u[2,1] - u[1,2]`` rewrites ``u[2,1]`` to ``u[1,2]``.
    """

    def __init__(self, equations, signature: Signature):
        self.signature = signature
        jets = sorted(signature.jets(), key=lambda s: s.sort_key(), reverse=True)
        linear = [as_rf(e).numerator() for e in equations if _is_linear_in(as_rf(e), jets)]
        el = eliminate(linear, jets)
        self.images = dict(el.solution)
        self.pivots = list(el.pivots)
        self.free_jets = [j for j in signature.jets() if j not in self.images]
        self.equations = linear
        self.rank = len(el.pivots)

    def reduce(self, e) -> RationalFunction:
        e = as_rf(e)
        if not self.images:
            return e
        return e.subs(self.images, rename_opaque=False)

    def basis(self) -> list:
        """Reduced generators ``v - image(v)``."""
        return [as_rf(v) - self.images[v] for v in self.pivots]


def _is_linear_in(e: RationalFunction, jets) -> bool:
    return e.degree_in(jets) == 1 and not e.denominator().depends_on(lambda s: isinstance(s, Jet))


@dataclass
class SymmetryCertificate:
    """Outcome of :func:`check_symmetry`.

    ``multipliers[k][l]`` multiplies the nonlinear equation ``l``;
    ``linear_multipliers[k][p]`` multiplies the ``p``-th reduced linear
    generator from :class:`JetReduction`.  When ``holds`` is false,
    ``residuals`` lists the jet-free conditions that block a multiplier.
    """

    holds: bool
    multipliers: list
    linear_multipliers: list
    residuals: list
    mult_degree: int
    nonlinear_indices: list
    linear_basis: list
    verified: bool = False


def _jet_monomials(jets, degree: int):
    out = [()]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(jets, d):
            mono: dict = {}
            for j in combo:
                mono[j] = mono.get(j, 0) + 1
            out.append(tuple(sorted(mono.items(), key=lambda t: t[0].sort_key())))
    return out


def _mono_mul(a, b):
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items(), key=lambda t: t[0].sort_key()))


def _mono_rf(mono) -> RationalFunction:
    out = ONE_RF
    for s, e in mono:
        out = out * as_rf(s) ** e
    return out


def check_symmetry(system, X: VectorField, mult_degree: int | None = None, strict: bool = False) -> SymmetryCertificate:
    """Decide whether ``pr X(Delta_k) = sum_l lambda_kl Delta_l`` with polynomial multipliers.

    Equations linear in the jets are handled by reduction (their multipliers
    are recovered by exact division); the ansatz covers the remaining
    equations with multipliers of jet-degree at most ``mult_degree``.
    """
    sig = system.signature
    if X.signature != sig:
        raise SignatureMismatch(f"field signature {X.signature} differs from system signature {sig}")
    eqs = [as_rf(e).numerator() for e in system.equations]
    red = JetReduction(eqs, sig)
    jets = red.free_jets
    pr = prolong1(X)
    nonlinear = [l for l, e in enumerate(eqs) if not _is_linear_in(e, sig.jets())]
    reduced_nl = {l: red.reduce(eqs[l]) for l in nonlinear}
    images = [pr.apply(e) for e in eqs]
    if mult_degree is None:
        mult_degree = 0
        for k, p in enumerate(images):
            pk = red.reduce(p)
            if pk.is_zero():
                continue
            for l in nonlinear:
                mult_degree = max(mult_degree, pk.degree_in(jets) - reduced_nl[l].degree_in(jets))
    monos = _jet_monomials(jets, mult_degree)
    split_nl = {l: reduced_nl[l].split(jets) for l in nonlinear}
    multipliers = []
    residuals = []
    seen = set()
    for k, p in enumerate(images):
        pk = red.reduce(p)
        if pk.is_zero():
            multipliers.append({})
            continue
        unknowns = []
        rows: dict = {}
        for mono, c in pk.split(jets).items():
            rows[mono] = ({}, -c)
        for l in nonlinear:
            for mi, m in enumerate(monos):
                u = Parameter(f"_lam{l}_{mi}")
                unknowns.append((u, l, m))
                for mono, c in split_nl[l].items():
                    key = _mono_mul(m, mono)
                    coeffs, const = rows.setdefault(key, ({}, ZERO_RF))
                    coeffs[u] = coeffs.get(u, ZERO_RF) + c
        syms = [u for u, _, _ in unknowns]
        # rows at either end of the degree range first: the multiplier is
        # then fixed by the extreme homogeneous parts, which keeps it free of
        # the coefficients whenever the identity can hold at all
        keys = list(rows)
        degs = [sum(e for _, e in m) for m in keys]
        lo, hi = min(degs), max(degs)
        prio = [min(d - lo, hi - d) for d in degs]
        el = eliminate_rows([rows[m] for m in keys], syms, priority=prio)
        zero_free = {f: ZERO_RF for f in el.free}
        lam = {}
        for u, l, m in unknowns:
            val = el.solution.get(u)
            if val is None:
                continue
            if zero_free:
                val = val.subs(zero_free, rename_opaque=False)
            if not val.is_zero():
                lam[l] = lam.get(l, ZERO_RF) + val * _mono_rf(m)
        multipliers.append(lam)
        for r in el.residuals:
            # the same condition often surfaces from several jet monomials
            key = r.primitive().key()
            if key not in seen:
                seen.add(key)
                residuals.append(r.primitive())
    holds = not residuals
    if not holds and strict:
        raise AnsatzTooSmall(f"no multiplier of jet-degree <= {mult_degree}", residuals)
    linear_mults = []
    verified = False
    if holds:
        verified = True
        basis = red.basis()
        for k, p in enumerate(images):
            rest = p
            for l, lam in multipliers[k].items():
                rest = rest - lam * eqs[l]
            mus = []
            for v in red.pivots:
                img = red.images[v]
                after = rest.subs({v: img}, rename_opaque=False)
                diff = rest - after
                mus.append(diff / (as_rf(v) - img) if not diff.is_zero() else ZERO_RF)
                rest = after
            linear_mults.append(mus)
            if not rest.is_zero():
                verified = False
    return SymmetryCertificate(holds, multipliers, linear_mults, residuals, mult_degree, nonlinear, red.basis() if holds else [], verified)
