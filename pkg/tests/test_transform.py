from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quasireduce.canonical import PointTransformation, canonical_for_translation_scaling
from quasireduce.errors import UnsupportedShape
from quasireduce.expr import Dependent, Independent, Opaque, Signature, as_rf
from quasireduce.monge_ampere import MASpec, build_system, homogeneous_system, reduction_input, symmetry_fields
from quasireduce.pdesystem import PDESystem
from quasireduce.transform import classify, jet_exchange, push_forward, reduce, same_system
from reference_values import FINAL_1P1, FINAL_2P1, FINAL_3P1, KAPPA1_1P1, parse, table

SIG = Signature(2, 2)
TGT = Signature(2, 2, "z", "w")
X = [as_rf(Independent(1)), as_rf(Independent(2))]
U = [as_rf(Dependent(1)), as_rf(Dependent(2))]


def w(a, i, sig=TGT):
    return as_rf(sig.jet(a, i))


def newvars(dim):
    return canonical_for_translation_scaling(symmetry_fields(MASpec(dim))).with_inverse()


# --- jet exchange -------------------------------------------------------------


def test_jet_exchange_identity():
    ex = jet_exchange(PointTransformation.identity(SIG))
    assert ex == {SIG.jet(a, i): w(a, i) for a in (1, 2) for i in (1, 2)}


def test_jet_exchange_doubling_one_variable():
    s1, t1 = Signature(1, 1), Signature(1, 1, "z", "w")
    t = PointTransformation(s1, (2 * as_rf(Independent(1)),), (as_rf(Dependent(1)),), t1)
    assert jet_exchange(t) == {s1.jet(1, 1): 2 * w(1, 1, t1)}


@pytest.mark.parametrize("n", [2, 3])
def test_jet_exchange_newvars_satisfies_chain_rule(n):
    # chain rule: u_{A,i} = sum_j w_{A,j} (delta_ji - sum_B f_{jB} u_{B,i})
    sig, tgt = Signature(n, n), Signature(n, n, "z", "w")
    t = newvars(f"{n - 1}p1")
    ex = jet_exchange(t)
    args = tuple(Dependent(a, "w") for a in range(1, n + 1))
    H = [[as_rf(Opaque("f", tuple(sorted((j, b))), args)) for b in range(1, n + 1)] for j in range(1, n + 1)]
    Uo = [[ex[sig.jet(a, i)] for i in range(1, n + 1)] for a in range(1, n + 1)]
    for a in range(n):
        for i in range(n):
            rhs = as_rf(0)
            for j in range(n):
                dz = as_rf(1 if i == j else 0)
                for b in range(n):
                    dz = dz - H[j][b] * Uo[b][i]
                rhs = rhs + as_rf(tgt.jet(a + 1, j + 1)) * dz
            assert (Uo[a][i] - rhs).is_zero()


# --- push-forward examples ----------------------------------------------------


def test_push_identity_renames():
    eqs = [w(2, 1, SIG) - w(1, 2, SIG), U[0] * w(1, 1, SIG) + w(2, 2, SIG) + X[1] * w(1, 2, SIG)]
    S = PDESystem(SIG, tuple(eqs))
    out = push_forward(S, PointTransformation.identity(SIG))
    z2 = as_rf(Independent(2, "z"))
    want = [w(2, 1) - w(1, 2), as_rf(Dependent(1, "w")) * w(1, 1) + w(2, 2) + z2 * w(1, 2)]
    assert out.signature == TGT
    assert same_system(out.equations, want, TGT)


def test_final_display_1p1():
    r = reduce(*reduction_input(MASpec("1p1"))[:2])
    assert r.ok
    K1 = parse(KAPPA1_1P1, table(2, target=True))
    tb = table(2, target=True, macros={"K1": K1.to_expr()})
    assert same_system(r.system.equations, [parse(l, tb) for l in FINAL_1P1], TGT)


def test_final_display_2p1_at_alpha0():
    spec = MASpec("2p1", alphas=[0] * 6)
    S, fields, _ = reduction_input(spec)
    r = reduce(S, fields)
    assert r.ok and r.classification.quasilinear
    tb = table(3, target=True)
    assert same_system(r.system.equations, [parse(l, tb) for l in FINAL_2P1], r.system.signature)


@pytest.mark.slow
def test_final_display_3p1_at_alpha0():
    spec = MASpec("3p1", alphas=[0] * 10)
    S, fields, _ = reduction_input(spec)
    r = reduce(S, fields)
    assert r.ok
    tb = table(4, target=True)
    assert same_system(r.system.equations, [parse(l, tb) for l in FINAL_3P1], r.system.signature)


def test_fast_method_refuses_non_scaling_map():
    S = PDESystem(SIG, (w(1, 1, SIG) + w(2, 2, SIG),))
    W1, W2 = as_rf(Dependent(1, "w")), as_rf(Dependent(2, "w"))
    Zs = (as_rf(Independent(1, "z")), as_rf(Independent(2, "z")))
    t = PointTransformation(SIG, tuple(X), (U[0] + U[1] ** 2, U[1]), TGT, (Zs, (W1 - W2 ** 2, W2)))
    with pytest.raises(UnsupportedShape):
        push_forward(S, t, "fast")
    out = push_forward(S, t, "generic")
    assert out.metadata["method"] == "generic"
    # u1 = w1 - w2^2 gives u[1,1] = w[1,1] - 2*w2*w[2,1]
    assert same_system(out.equations, [w(1, 1) - 2 * W2 * w(2, 1) + w(2, 2)], TGT)


def test_generic_and_fast_agree_on_1p1():
    S, fields, _ = reduction_input(MASpec("1p1"))
    t = canonical_for_translation_scaling(fields)
    a, b = push_forward(S, t, "fast"), push_forward(S, t, "generic")
    assert same_system(a.equations, b.equations, TGT)


# --- classification -------------------------------------------------------------


def test_classify_reduced_1p1():
    r = reduce(*reduction_input(MASpec("1p1"))[:2])
    c = r.classification
    assert c.autonomous and c.quasilinear
    assert c.jet_degree == [1, 1] and c.homogeneous_in_jets == [True, True]
    assert len(c.matrices) == 2 and c.residual_source is None


def test_classify_generic_ma_equation():
    c = classify(build_system(MASpec("1p1")))
    assert c.jet_degree == [1, 2]
    assert c.homogeneous_in_jets == [True, False]
    assert not c.quasilinear and c.matrices is None
    assert len(c.residual_source) == 1


def test_classify_detects_explicit_coordinates():
    z1 = as_rf(Independent(1, "z"))
    c = classify(PDESystem(TGT, (w(1, 1) + z1 * w(1, 2),)))
    assert not c.autonomous and not c.quasilinear
    assert c.jet_degree == [1]


# --- pipeline -------------------------------------------------------------------


def test_reduce_fails_with_kappa1_free():
    spec = MASpec("1p1")
    r = reduce(homogeneous_system(spec), symmetry_fields(spec))
    assert not r.ok and r.stage == "symmetry"
    assert r.symmetry[-1].residuals


def test_reduce_rejects_counterexample_algebra():
    S = PDESystem(SIG, (w(2, 1, SIG) - w(1, 2, SIG),))
    from quasireduce.liegeom import VectorField
    fields = [VectorField.translation(SIG, 1), VectorField.translation(SIG, 2), VectorField(SIG, (X[1], X[0]), (0, 0))]
    r = reduce(S, fields)
    assert not r.ok and r.stage == "algebra"


@pytest.mark.slow
def test_reduce_3p1_succeeds():
    spec = MASpec("3p1", alphas=[0] * 10)
    S, fields, _ = reduction_input(spec)
    assert reduce(S, fields).ok


# --- properties -----------------------------------------------------------------

small = st.integers(-3, 3)


@st.composite
def quasilinear_systems(draw):
    def coeff():
        return as_rf(Fraction(draw(small), draw(st.integers(1, 2)))) + draw(small) * U[0] + draw(small) * U[1]

    eqs = []
    for _ in range(draw(st.integers(1, 2))):
        e = sum((coeff() * w(a, i, SIG) for a in (1, 2) for i in (1, 2)), as_rf(0))
        eqs.append(e if not e.is_zero() else w(1, 1, SIG))
    return PDESystem(SIG, tuple(eqs))


@st.composite
def gradient_maps(draw):
    c = [draw(small) for _ in range(4)]
    g = c[0] * U[0] ** 3 + c[1] * U[0] * U[1] ** 2 + c[2] * U[1] ** 2 + c[3] * U[0] * U[1]
    Z = (X[0] - g.diff(Dependent(1)), X[1] - g.diff(Dependent(2)))
    return PointTransformation(SIG, Z, tuple(U), TGT).with_inverse()


@settings(max_examples=20, deadline=None)
@given(quasilinear_systems(), gradient_maps())
def test_round_trip_random(S, t):
    S1 = push_forward(S, t)
    S2 = push_forward(S1, t.inverted())
    assert same_system(S2.equations, S.equations, SIG)


@st.composite
def coordinate_maps(draw):
    # Z depends on x only, W = u
    a, b, c, d = (draw(small) for _ in range(4))
    if a * d - b * c == 0:
        a, b, c, d = 1, b, 0, 1
    Z = (a * X[0] + b * X[1] + draw(small), c * X[0] + d * X[1] + draw(small))
    return PointTransformation(SIG, Z, tuple(U), TGT).with_inverse()


@settings(max_examples=20, deadline=None)
@given(quasilinear_systems(), coordinate_maps())
def test_push_preserves_jet_degree(S, t):
    assert classify(push_forward(S, t)).jet_degree == classify(S).jet_degree


@settings(max_examples=20, deadline=None)
@given(quasilinear_systems())
def test_identity_push_keeps_classification(S):
    a, b = classify(S), classify(push_forward(S, PointTransformation.identity(SIG)))
    assert (a.autonomous, a.jet_degree, a.homogeneous_in_jets, a.quasilinear) == (
        b.autonomous, b.jet_degree, b.homogeneous_in_jets, b.quasilinear)


@pytest.mark.parametrize("dim", ["1p1", "2p1", pytest.param("3p1", marks=pytest.mark.slow)])
def test_round_trip_ma_systems(dim):
    alphas = None if dim == "1p1" else [0] * len(MASpec(dim).alphas)
    S, fields, _ = reduction_input(MASpec(dim, alphas=alphas))
    t = canonical_for_translation_scaling(fields).with_inverse()
    S2 = push_forward(push_forward(S, t), t.inverted())
    assert same_system(S2.equations, S.equations, S.signature)
