"""Monge-Ampere systems in (1+1), (2+1) and (3+1) dimensions.

Builders for the first-order systems obtained by taking the first
derivatives of ``u`` as new unknowns, the affine shift that removes the
source term, and derivation of the conditions under which the scaling
operator with ``g_i = f_{;i}`` is a symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import IndexOutOfRange, QuasiReduceError
from .expr.field import ONE_RF, ZERO_RF, RationalFunction, as_rf
from .expr.linear import cofactor, eliminate, laplace_determinant, solve_linear
from .expr.symbols import Dependent, Independent, Jet, Opaque, Parameter, Signature
from .liegeom import VectorField, check_symmetry
from .pdesystem import PDESystem

DIMENSIONS = {"1p1": (2, 5, 3), "2p1": (3, 14, 6), "3p1": (4, 43, 10)}

# kappas that the symmetry conditions are solved for
_LEADING = {"1p1": range(1, 2), "2p1": range(1, 8), "3p1": [i for i in range(1, 33) if i != 24]}


def _pairs(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def _jet(i: int, j: int) -> RationalFunction:
    """Symmetric second derivative ``u_{,ij}`` written as the jet ``u_{min,max}``."""
    return as_rf(Jet(min(i, j), max(i, j)))


# ---------------------------------------------------------------------------
# specs


@dataclass
class MASpec:
    """Coefficients of a Monge-Ampere equation.

    ``kappas[i-1]`` is the coefficient with index ``i``; by default each is an
    opaque function ``k<i>(u_1..u_n)``.  ``alphas`` default to parameters
    ``a1..aN``.  ``f`` is either the name of an opaque function or a
    concrete expression in the dependents.
    """

    dimension: str
    kappas: list | None = None
    alphas: list | None = None
    f: object = "f"

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}; expected one of {sorted(DIMENSIONS)}")
        n, nk, na = DIMENSIONS[self.dimension]
        us = tuple(Dependent(a) for a in range(1, n + 1))
        if self.kappas is None:
            self.kappas = [as_rf(Opaque(f"k{i}", (), us)) for i in range(1, nk + 1)]
        else:
            self.kappas = [as_rf(k) for k in self.kappas]
        if len(self.kappas) != nk:
            raise ValueError(f"{self.dimension} needs {nk} kappas, got {len(self.kappas)}")
        if self.dimension == "3p1":
            if not self.kappas[23].is_zero() and not _is_default_kappa(self.kappas[23], 24):
                raise ValueError("kappa_24 must vanish (the three mixed second derivatives of H are dependent)")
            self.kappas[23] = ZERO_RF
        for i, k in enumerate(self.kappas, 1):
            if k.depends_on(lambda s: isinstance(s, (Independent, Jet))):
                raise ValueError(f"kappa_{i} may depend only on the dependents")
        if self.alphas is None:
            self.alphas = [as_rf(Parameter(f"a{i}")) for i in range(1, na + 1)]
        else:
            self.alphas = [as_rf(a) for a in self.alphas]
        if len(self.alphas) != na:
            raise ValueError(f"{self.dimension} needs {na} alphas, got {len(self.alphas)}")
        if not isinstance(self.f, str):
            self.f = as_rf(self.f)
            if self.f.depends_on(lambda s: isinstance(s, (Independent, Jet))):
                raise ValueError("f may depend only on the dependents")

    @property
    def n(self) -> int:
        return DIMENSIONS[self.dimension][0]

    @property
    def signature(self) -> Signature:
        return Signature(self.n, self.n)

    def kappa(self, i: int) -> RationalFunction:
        return self.kappas[i - 1]

    def alpha_matrix(self) -> list:
        """Symmetric matrix whose upper triangle is filled row-wise by the alphas."""
        n = self.n
        M = [[ZERO_RF] * n for _ in range(n)]
        it = iter(self.alphas)
        for i, j in _pairs(n):
            M[i - 1][j - 1] = M[j - 1][i - 1] = next(it)
        return M

    def f_gradient(self) -> list:
        us = tuple(Dependent(a) for a in range(1, self.n + 1))
        if isinstance(self.f, str):
            return [as_rf(Opaque(self.f, (i,), us)) for i in range(1, self.n + 1)]
        return [self.f.diff(u) for u in us]

    def f_hessian(self) -> list:
        us = tuple(Dependent(a) for a in range(1, self.n + 1))
        g = self.f_gradient()
        return [[g[i].diff(us[j]) for j in range(self.n)] for i in range(self.n)]

    def with_kappas(self, values: dict) -> "MASpec":
        """Copy with ``kappa_i`` replaced by ``values[i]``."""
        ks = list(self.kappas)
        for i, v in values.items():
            ks[i - 1] = as_rf(v)
        return MASpec(self.dimension, ks, list(self.alphas), self.f)


def _is_default_kappa(k: RationalFunction, i: int) -> bool:
    syms = k.free_symbols()
    return len(syms) == 1 and isinstance(next(iter(syms)), Opaque) and next(iter(syms)).name == f"k{i}"


# ---------------------------------------------------------------------------
# Hessian machinery


@dataclass
class HessianPack:
    """Determinant of the symmetric jet matrix with its first and second derivatives.

    Derivatives treat each ``u_{i,j}`` (``i <= j``) as one variable, so an
    off-diagonal derivative is twice the cofactor.
    """

    size: int
    matrix: list
    H: RationalFunction
    dH: dict
    d2H: dict
    cofactors: dict
    f_cofactors: dict = field(default_factory=dict)

    def cofactor(self, i: int, j: int) -> RationalFunction:
        return self.cofactors[(min(i, j), max(i, j))]


def hessian_pack(k: int, f: str | None = "f") -> HessianPack:
    if k not in (2, 3, 4):
        raise IndexOutOfRange(f"Hessian size must be 2, 3 or 4, got {k}")
    M = [[_jet(i, j) for j in range(1, k + 1)] for i in range(1, k + 1)]
    H = laplace_determinant(M)
    pairs = _pairs(k)
    dH = {p: H.diff(Jet(*p)) for p in pairs}
    d2H = {}
    for a, p in enumerate(pairs):
        for q in pairs[a:]:
            d2H[(p, q)] = dH[p].diff(Jet(*q))
    cof = {(i, j): cofactor(M, i - 1, j - 1) for i, j in pairs}
    fcof = {}
    if f is not None:
        us = tuple(Dependent(a) for a in range(1, k + 1))
        F = [[as_rf(Opaque(f, tuple(sorted((i, j))), us)) for j in range(1, k + 1)] for i in range(1, k + 1)]
        fcof = {(i, j): cofactor(F, i - 1, j - 1) for i, j in pairs}
    return HessianPack(k, M, H, dH, d2H, cof, fcof)


def sigma(a: int, b: int) -> int:
    """Position of the pair ``a < b`` in the row-wise list 12, 13, 14, 23, 24, 34."""
    if not (1 <= a < b <= 4):
        raise IndexOutOfRange(f"sigma needs 1 <= a < b <= 4, got ({a},{b})")
    return 4 * (a - 1) - a * (a + 1) // 2 + b


def r_index(i: int, j: int) -> int:
    if not (1 <= i <= j <= 4):
        raise IndexOutOfRange(f"r needs 1 <= i <= j <= 4, got ({i},{j})")
    return i * (9 - i) // 2 + j - 3


def s_index(k: int, l: int, m: int, n: int) -> int:
    skl, smn = sigma(k, l), sigma(m, n)
    if skl > smn:
        raise IndexOutOfRange(f"s needs sigma_kl <= sigma_mn, got {skl} > {smn}")
    return smn + skl * (13 - skl) // 2 + 5


def index_maps(i: int, j: int, k: int, l: int, m: int, n: int) -> tuple:
    """``(r, s, (sigma_kl, sigma_mn))`` for the (3+1) coefficient layout."""
    return r_index(i, j), s_index(k, l, m, n), (sigma(k, l), sigma(m, n))


def offdiagonal_pairs() -> list:
    return [(a, b) for a in range(1, 5) for b in range(a + 1, 5)]


def second_derivative_layout() -> dict:
    """``s -> ((k,l),(m,n))`` for every kappa attached to a second derivative of H."""
    out = {}
    pairs = offdiagonal_pairs()
    for x, p in enumerate(pairs):
        for q in pairs[x:]:
            out[s_index(*p, *q)] = (p, q)
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# systems


def exchange_equations(sig: Signature) -> list:
    """``u_{j,i} - u_{i,j}`` for ``i < j``."""
    return [as_rf(Jet(j, i)) - as_rf(Jet(i, j)) for i, j in _pairs(sig.n) if i < j]


def basis_terms(dimension: str) -> dict:
    """``kappa index -> jet polynomial`` it multiplies (the constant is index -> 1)."""
    n, nk, _ = DIMENSIONS[dimension]
    hp = hessian_pack(n, f=None)
    out = {}
    if dimension == "1p1":
        out[1] = hp.H
        for idx, (i, j) in enumerate(_pairs(2), 2):
            out[idx] = _jet(i, j)
        out[5] = ONE_RF
        return out
    out[1] = hp.H
    if dimension == "2p1":
        for idx, p in enumerate(_pairs(3), 2):
            out[idx] = hp.dH[p]
        for idx, (i, j) in enumerate(_pairs(3), 8):
            out[idx] = _jet(i, j)
        out[14] = ONE_RF
        return out
    for i, j in _pairs(4):
        out[r_index(i, j)] = hp.dH[(i, j)]
    for s, (p, q) in second_derivative_layout().items():
        out[s] = hp.d2H[(p, q)]
    for i, j in _pairs(4):
        out[r_index(i, j) + 31] = _jet(i, j)
    out[43] = ONE_RF
    return dict(sorted(out.items()))


def ma_equation(spec: MASpec) -> RationalFunction:
    out = ZERO_RF
    for idx, term in basis_terms(spec.dimension).items():
        k = spec.kappa(idx)
        if not k.is_zero():
            out = out + k * term
    return out


def build_system(spec: MASpec) -> PDESystem:
    sig = spec.signature
    return PDESystem(sig, tuple(exchange_equations(sig)) + (ma_equation(spec),), f"ma_{spec.dimension}")


def shift_bindings(spec: MASpec) -> dict:
    """``u_A -> u_A + sum_i alpha_{Ai} x_i`` and ``u_{A,i} -> u_{A,i} + alpha_{Ai}``."""
    A = spec.alpha_matrix()
    n = spec.n
    binds = {}
    for a in range(1, n + 1):
        v = as_rf(Dependent(a))
        for i in range(1, n + 1):
            v = v + A[a - 1][i - 1] * as_rf(Independent(i))
            binds[Jet(a, i)] = as_rf(Jet(a, i)) + A[a - 1][i - 1]
        binds[Dependent(a)] = v
    return binds


def affine_shift(system: PDESystem, spec: MASpec) -> PDESystem:
    """Apply the symmetric affine shift; coefficient arguments are left unshifted."""
    binds = shift_bindings(spec)
    eqs = tuple(as_rf(e).subs(binds, rename_opaque=False) for e in system.equations)
    return PDESystem(system.signature, eqs, system.name, dict(system.metadata, shifted=True))


def _split_degree0(e: RationalFunction, sig: Signature):
    jets = sig.jets()
    d0 = e.homogeneous_part(jets, 0)
    return e - d0, d0


def homogenization_condition(spec: MASpec) -> RationalFunction:
    """Value of the last kappa that removes the jet-free part of the shifted equation."""
    sig = spec.signature
    nk = DIMENSIONS[spec.dimension][1]
    last = Parameter("_klast")
    trial = spec.with_kappas({nk: as_rf(last)})
    eq = affine_shift(build_system(trial), trial).equations[-1]
    _, d0 = _split_degree0(eq, sig)
    return solve_linear([d0], [last])[last]


def homogeneous_system(spec: MASpec) -> PDESystem:
    """Shifted system with the homogenization condition imposed."""
    nk = DIMENSIONS[spec.dimension][1]
    spec = spec.with_kappas({nk: homogenization_condition(spec)})
    sys = affine_shift(build_system(spec), spec)
    eq = sys.equations[-1]
    rest, d0 = _split_degree0(eq, spec.signature)
    if not d0.is_zero():
        raise QuasiReduceError("homogenization left a jet-free part")
    return sys.with_equations(sys.equations[:-1] + (rest,), homogeneous=True)


def scaling_field(spec: MASpec) -> VectorField:
    """``sum (x_i - g_i) d/dx_i`` with ``g_i = f_{;i}``."""
    sig = spec.signature
    g = spec.f_gradient()
    xi = tuple(as_rf(x) - gi for x, gi in zip(sig.independents(), g))
    return VectorField(sig, xi, (0,) * sig.m, name=f"Xi{sig.n + 1}")


def symmetry_fields(spec: MASpec) -> list:
    sig = spec.signature
    return [VectorField.translation(sig, i) for i in range(1, sig.n + 1)] + [scaling_field(spec)]


def hat_coefficients(spec: MASpec) -> dict:
    """Coefficients of the homogeneous shifted equation in the basis of the unshifted one."""
    eq = homogeneous_system(spec).equations[-1]
    basis = {i: t for i, t in basis_terms(spec.dimension).items() if not t.is_constant()}
    if spec.dimension == "3p1":
        basis.pop(24, None)
    unknowns = {i: Parameter(f"_c{i}") for i in basis}
    resid = eq
    for i, t in basis.items():
        resid = resid - as_rf(unknowns[i]) * t
    jets = spec.signature.jets()
    rows = list(resid.split(jets).values())
    sol = solve_linear(rows, list(unknowns.values()))
    return {i: sol[u] for i, u in unknowns.items()}


@dataclass
class ConditionSet:
    """Symmetry conditions on the coefficients.

    ``solved`` maps each leading kappa index to its value in terms of the
    others; ``conditions`` are the same relations as ``kappa_i - value``
    (cleared and sign-normalized), followed by any relation not involving a
    leading kappa.
    """

    conditions: list
    solved: dict
    raw_residuals: int
    mult_degree: int
    verified: bool


def _canonical(e: RationalFunction) -> RationalFunction:
    return as_rf(e).primitive()


def derive_conditions(spec: MASpec, mult_degree: int | None = None) -> ConditionSet:
    sys = homogeneous_system(spec)
    X = scaling_field(spec)
    cert = check_symmetry(sys, X, mult_degree)
    seen = {}
    for r in cert.residuals:
        c = _canonical(r)
        if not c.is_zero():
            seen.setdefault(c.key(), c)
    rows = list(seen.values())
    lead = [(i, spec.kappa(i)) for i in _LEADING[spec.dimension]]
    lead_syms = [k.free_symbols() for _, k in lead]
    kappa_syms = []
    for k in spec.kappas:
        for s in sorted(k.free_symbols(), key=lambda s: s.sort_key()):
            if isinstance(s, Opaque) and not s.index and s not in kappa_syms and s.name != (spec.f if isinstance(spec.f, str) else None):
                kappa_syms.append(s)
    pivotable = []
    index_of = {}
    for (i, k), fs in zip(lead, lead_syms):
        if len(fs) == 1 and (k - as_rf(next(iter(fs)))).is_zero():
            pivotable.append(next(iter(fs)))
            index_of[next(iter(fs))] = i
    el = eliminate(rows, kappa_syms or pivotable, pivot_candidates=pivotable) if rows else None
    solved, conditions = {}, []
    if el is not None:
        for s in sorted(el.solution, key=lambda s: index_of[s]):
            i = index_of[s]
            solved[i] = el.solution[s]
            conditions.append(_canonical(as_rf(s) - el.solution[s]))
        conditions.extend(_canonical(r) for r in el.residuals)
    return ConditionSet(conditions, solved, len(cert.residuals), cert.mult_degree, cert.verified)


def symmetry_conditions(spec: MASpec, mult_degree: int | None = None) -> list:
    """Conditions for the scaling operator to be a symmetry of the homogeneous shifted system.

    For (3+1) the convention ``kappa_24 = 0`` is appended as the last entry.
    """
    out = list(derive_conditions(spec, mult_degree).conditions)
    if spec.dimension == "3p1":
        out.append(kappa24_condition())
    return out


def kappa24_condition():
    """The redundant Hessian combination is removed by fixing ``kappa_24 = 0``."""
    return as_rf(Opaque("k24", (), tuple(Dependent(a) for a in range(1, 5))))


def impose(spec: MASpec, solved: dict) -> MASpec:
    """Spec with the leading kappas replaced by their solved values."""
    return spec.with_kappas(solved)


def reduction_input(spec: MASpec, mult_degree: int | None = None):
    """System with homogenization and symmetry conditions imposed, and its fields."""
    cs = derive_conditions(spec, mult_degree)
    s2 = impose(spec, cs.solved)
    return homogeneous_system(s2), symmetry_fields(s2), cs


# ---------------------------------------------------------------------------
# Von Karman


@dataclass
class VonKarman:
    spec: MASpec
    system: PDESystem
    conditions: list
    names: list
    reduced_spec: MASpec


def von_karman_spec(alphas: Sequence | None = None, f="f") -> MASpec:
    u2 = Dependent(2)
    b = as_rf(Opaque("b", (), (u2,)))
    kk = as_rf(Opaque("K2", (), (u2,)))
    return MASpec("1p1", [ONE_RF, ZERO_RF, ZERO_RF, -b, kk], list(alphas) if alphas is not None else None, f)


def von_karman_example(alphas: Sequence | None = None, f="f") -> VonKarman:
    """Equation ``u11 u22 - u12^2 + K2(u2) - b(u2) u22 = 0`` and its reduction conditions.

    ``K2`` and ``b`` stand for the compositions with the entropy ``s(u_2)``.
    Conditions are returned as expressions that must vanish: the value of
    ``K2`` forced by homogenization, the value of ``b`` forced by the
    symmetry condition, and the ``u_1``-independence of that value.
    """
    spec = von_karman_spec(alphas, f)
    u1, u2 = Dependent(1), Dependent(2)
    b = as_rf(Opaque("b", (), (u2,)))
    kk = as_rf(Opaque("K2", (), (u2,)))
    hom = homogenization_condition(spec)
    c1 = kk - hom
    cs = derive_conditions(spec)
    if len(cs.conditions) != 1:
        raise QuasiReduceError("expected a single symmetry condition")
    # the condition is linear in b; solve for it
    bsym = Parameter("_b")
    cond = cs.conditions[0].subs({Opaque("b", (), (u2,)): as_rf(bsym)}, rename_opaque=False)
    bval = solve_linear([cond], [bsym])[bsym]
    c2 = b - bval
    c3 = bval.diff(u1)
    reduced = spec.with_kappas({4: -bval, 5: hom.subs({Opaque("b", (), (u2,)): bval}, rename_opaque=False)})
    system = build_system(spec)
    return VonKarman(spec, system, [c1, c2, c3], ["K2", "b", "d/du1"], reduced)
