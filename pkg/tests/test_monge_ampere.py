import pytest
from hypothesis import given, settings, strategies as st

from quasireduce.errors import IndexOutOfRange
from quasireduce.expr import Dependent, Jet, Opaque, Signature, as_rf
from quasireduce.monge_ampere import (
    DIMENSIONS,
    MASpec,
    affine_shift,
    basis_terms,
    build_system,
    derive_conditions,
    hat_coefficients,
    hessian_pack,
    homogeneous_system,
    homogenization_condition,
    index_maps,
    r_index,
    reduction_input,
    s_index,
    second_derivative_layout,
    sigma,
    symmetry_conditions,
    symmetry_fields,
    von_karman_example,
)
from quasireduce.transform import reduce, same_system
from reference_values import (
    COND_2P1,
    COND_2P1_LINE3_BARE,
    HESSIAN_IDENTITY_PAIRS,
    KAPPA5_1P1,
    KAPPA14_2P1,
    MA_1P1,
    SHIFTED_1P1,
    leibniz_det,
    parse,
    proportional,
    table,
)


def J(i, j):
    return as_rf(Jet(i, j))


# --- Hessian machinery ------------------------------------------------------


def test_hessian_2():
    hp = hessian_pack(2)
    assert (hp.H - (J(1, 1) * J(2, 2) - J(1, 2) ** 2)).is_zero()
    assert (hp.dH[(1, 2)] + 2 * J(1, 2)).is_zero()


def test_hessian_3_diagonal_minor():
    hp = hessian_pack(3)
    assert (hp.dH[(1, 1)] - (J(2, 2) * J(3, 3) - J(2, 3) ** 2)).is_zero()


def test_hessian_4_mixed_second_derivatives_cancel():
    d2H = hessian_pack(4).d2H
    assert sum((d2H[pq] for pq in HESSIAN_IDENTITY_PAIRS), as_rf(0)).is_zero()


@pytest.mark.parametrize("k", [2, 3, 4])
def test_hessian_invariants(k):
    hp = hessian_pack(k)
    M = [[J(min(i, j), max(i, j)) for j in range(1, k + 1)] for i in range(1, k + 1)]
    assert (hp.H - leibniz_det(M)).is_zero()
    for i in range(1, k + 1):
        row = sum((M[i - 1][j - 1] * hp.cofactor(i, j) for j in range(1, k + 1)), as_rf(0))
        assert (row - hp.H).is_zero()
    for (i, j), d in hp.dH.items():
        assert (d - (1 if i == j else 2) * hp.cofactor(i, j)).is_zero()


def test_hessian_size_checked():
    with pytest.raises(IndexOutOfRange):
        hessian_pack(5)


# --- index maps --------------------------------------------------------------


def test_index_examples():
    assert r_index(1, 1) == 2
    assert sigma(1, 2) == 1
    assert [sigma(a, b) for a in range(1, 5) for b in range(a + 1, 5)] == [1, 2, 3, 4, 5, 6]


def test_index_enumeration():
    rs = sorted(r_index(i, j) for i in range(1, 5) for j in range(i, 5))
    assert rs == list(range(2, 12))
    assert sorted(r + 31 for r in rs) == list(range(33, 43))
    # r(4,4) is 11, so the last first-order coefficient is kappa_42
    assert r_index(4, 4) == 11
    assert sorted(second_derivative_layout()) == [i for i in range(12, 33)]
    assert sorted(basis_terms("3p1")) == list(range(1, 44))
    # kappa_24 sits on one of the three dependent mixed derivatives and is fixed to zero
    assert second_derivative_layout()[24] in HESSIAN_IDENTITY_PAIRS
    assert MASpec("3p1").kappa(24).is_zero()


def test_index_maps_tuple():
    assert index_maps(1, 1, 1, 2, 3, 4) == (2, s_index(1, 2, 3, 4), (1, 6))


def test_index_errors():
    for bad in [lambda: r_index(2, 1), lambda: sigma(2, 2), lambda: s_index(3, 4, 1, 2), lambda: r_index(0, 5)]:
        with pytest.raises(IndexOutOfRange):
            bad()


# --- systems -------------------------------------------------------------------


def test_build_1p1_matches_display():
    S = build_system(MASpec("1p1"))
    assert same_system(S.equations, [parse(l, table(2)) for l in MA_1P1], S.signature)


def test_build_3p1_single_term():
    ks = [0] * 43
    ks[32] = 1
    S = build_system(MASpec("3p1", ks))
    assert len(S.equations) == 7
    assert (S.equations[-1] - J(1, 1)).is_zero()


def test_build_2p1_shape():
    S = build_system(MASpec("2p1"))
    assert len(S.equations) == 4
    assert S.equations[-1].degree_in(S.signature.jets()) == 3


def test_shift_1p1_matches_display():
    spec = MASpec("1p1")
    S = affine_shift(build_system(spec), spec)
    assert same_system(S.equations, [parse(l, table(2)) for l in SHIFTED_1P1], S.signature)


@pytest.mark.parametrize("dim", sorted(DIMENSIONS))
def test_shift_identity_at_zero_and_exchange_invariant(dim):
    spec = MASpec(dim)
    S = build_system(spec)
    zero = MASpec(dim, alphas=[0] * len(spec.alphas))
    assert all((a - b).is_zero() for a, b in zip(affine_shift(S, zero).equations, S.equations))
    shifted = affine_shift(S, spec)
    assert all((a - b).is_zero() for a, b in zip(shifted.equations[:-1], S.equations[:-1]))


def test_kappa_validation():
    with pytest.raises(ValueError):
        MASpec("2p1", kappas=[0] * 5)
    with pytest.raises(ValueError):
        MASpec("1p1", kappas=[J(1, 1), 0, 0, 0, 0])
    with pytest.raises(ValueError):
        MASpec("4p1")


# --- homogenization ---------------------------------------------------------


def test_kappa5_matches_display():
    assert (homogenization_condition(MASpec("1p1")) - parse(KAPPA5_1P1, table(2))).is_zero()


def test_kappa14_agrees_up_to_the_kappa2_sign():
    # the reference kappa_2 term carries the opposite sign; the other twelve terms agree
    fixed = KAPPA14_2P1.replace("- (a5^2 - a4*a6)*k2", "+ (a5^2 - a4*a6)*k2")
    assert fixed != KAPPA14_2P1
    assert (homogenization_condition(MASpec("2p1")) - parse(fixed, table(3))).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_last_kappa_by_direct_expansion(n):
    # the jet-free part of the shifted equation is the equation evaluated at jets = alpha
    dim = f"{n - 1}p1"
    spec = MASpec(dim)
    A = spec.alpha_matrix()
    binds = {Jet(i, j): A[i - 1][j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    total = as_rf(0)
    for idx, term in basis_terms(dim).items():
        if idx != DIMENSIONS[dim][1]:
            total = total + spec.kappa(idx) * term.subs(binds)
    if n == 3:
        # independent check of the H term with the permutation-sum determinant
        assert (basis_terms(dim)[1].subs(binds) - leibniz_det(A)).is_zero()
    assert (homogenization_condition(spec) + total).is_zero()


@pytest.mark.parametrize("dim", sorted(DIMENSIONS))
def test_homogenized_system_has_no_jet_free_part(dim):
    spec = MASpec(dim)
    S = homogeneous_system(spec)
    eq = S.equations[-1]
    assert eq.homogeneous_part(S.signature.jets(), 0).is_zero()
    assert not eq.is_zero()


@pytest.mark.parametrize("dim", sorted(DIMENSIONS))
def test_last_kappa_vanishes_at_zero_shift(dim):
    spec = MASpec(dim, alphas=[0] * len(MASpec(dim).alphas))
    assert homogenization_condition(spec).is_zero()


# --- symmetry conditions ------------------------------------------------------


def test_conditions_1p1():
    cs = derive_conditions(MASpec("1p1"))
    assert len(cs.conditions) == 1 and sorted(cs.solved) == [1]


def test_conditions_2p1_count_and_lines():
    spec = MASpec("2p1", alphas=[0] * 6)
    cs = derive_conditions(spec)
    assert len(cs.conditions) == 7 and sorted(cs.solved) == list(range(1, 8))
    tb = table(3)
    args = tuple(Dependent(a) for a in range(1, 4))
    for p, line in enumerate(COND_2P1, 1):
        derived = as_rf(Opaque(f"k{p}", (), args)) - cs.solved[p]
        assert proportional(derived, parse(line, tb)), p


def test_conditions_3p1_count():
    spec = MASpec("3p1", alphas=[0] * 10)
    conds = symmetry_conditions(spec)
    assert len(conds) == 32
    assert str(conds[-1]).startswith("k24")


@pytest.mark.slow
def test_conditions_2p1_with_symbolic_shift():
    # lines are stated on the shifted coefficients; substitute them and check
    # each line vanishes once the solved kappas are imposed
    spec = MASpec("2p1")
    cs = derive_conditions(spec)
    hats = hat_coefficients(spec)
    args = tuple(Dependent(a) for a in range(1, 4))
    macros = {f"h{i}": v.to_expr() for i, v in hats.items()}
    tb = table(3, macros=macros)
    solved = {Opaque(f"k{i}", (), args): v for i, v in cs.solved.items()}
    for p, line in enumerate(COND_2P1, 1):
        hatted = line
        for i in range(13, 0, -1):
            hatted = hatted.replace(f"k{i}", f"h{i}")
        e = parse(hatted, tb).subs(solved, rename_opaque=False)
        assert e.is_zero(), p
    # with the bare kappa_13 of reference line 3 the relation does not hold
    bare = parse(COND_2P1_LINE3_BARE, tb).subs(solved, rename_opaque=False)
    assert not bare.is_zero()


# --- witness and Von Karman --------------------------------------------------


def test_concrete_witness():
    u1, u2 = Dependent(1), Dependent(2)
    spec = MASpec("1p1", [Opaque("k1", (), (u1, u2)), 1, 0, 1, 0], [0, 0, 0], (as_rf(u1) ** 2 + as_rf(u2) ** 2) / 2)
    S, fields, cs = reduction_input(spec)
    assert cs.solved == {1: as_rf(-2)}
    r = reduce(S, fields)
    tgt = Signature(2, 2, "z", "w")
    w = lambda a, i: as_rf(tgt.jet(a, i))
    assert r.ok
    assert same_system(r.system.equations, [w(2, 1) - w(1, 2), w(1, 1) + w(2, 2)], tgt)


def test_von_karman_system_and_reduction():
    vk = von_karman_example()
    tb = table(2, extra_functions={"K2": 1, "b": 1})
    want = "u[2,1] - u[1,2]", "u[1,1]*u[2,2] - u[1,2]^2 - b(u2)*u[2,2] + K2(u2)"
    assert same_system(vk.system.equations, [parse(l, tb) for l in want], vk.system.signature)
    assert reduce(homogeneous_system(vk.reduced_spec), symmetry_fields(vk.reduced_spec)).ok


def test_von_karman_by_hand():
    # constant term of the shifted equation: a1*a3 - a2^2 - b*a3 + K2
    vk = von_karman_example()
    tb = table(2, extra_functions={"K2": 1, "b": 1})
    assert proportional(vk.conditions[0], parse("K2(u2) - a2^2 + a1*a3 - a3*b(u2)", tb))


def test_von_karman_at_zero_shift():
    vk = von_karman_example(alphas=[0, 0, 0])
    tb = table(2, extra_functions={"K2": 1, "b": 1})
    assert proportional(vk.conditions[0], parse("K2(u2)", tb))
    assert proportional(vk.conditions[1], parse("b(u2) - 1/f;11", tb))
    assert proportional(vk.conditions[2].numerator(), parse("f;111", tb))


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_von_karman_conditions_consistent(alphas):
    vk = von_karman_example(alphas=alphas)
    spec = vk.reduced_spec
    # the reduced spec satisfies homogenization exactly
    assert (spec.kappa(5) - homogenization_condition(spec)).is_zero()
