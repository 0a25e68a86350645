from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from quasireduce.errors import InputContainsJets, SignatureMismatch
from quasireduce.expr import Dependent, Independent, Jet, Opaque, Signature, as_rf, solve_linear
from quasireduce.liegeom import VectorField, check_symmetry, check_theorem1_structure, distribution_rank, lie_bracket, prolong1
from quasireduce.monge_ampere import MASpec, homogeneous_system, reduction_input, symmetry_fields
from quasireduce.pdesystem import PDESystem
from strategies import POINT_SYMBOLS, SIG, polynomials
from reference_values import BRACKETS_1P1, BRACKETS_2P1, KAPPA1_1P1, parse, table

x1, x2 = Independent(1), Independent(2)
u1, u2 = Dependent(1), Dependent(2)
U = (u1, u2)


def f(*idx):
    return as_rf(Opaque("f", idx, U))


def field(xi, eta=(0, 0), sig=SIG):
    return VectorField(sig, tuple(xi), tuple(eta))


D1 = VectorField.translation(SIG, 1)
D2 = VectorField.translation(SIG, 2)
XI3 = field([as_rf(x1) - f(1), as_rf(x2) - f(2)])


def test_bracket_examples():
    assert lie_bracket(D1, D2).is_zero()
    assert lie_bracket(D1, XI3) == D1
    assert lie_bracket(D2, XI3) == D2


def test_bracket_rejects_mixed_signatures():
    with pytest.raises(SignatureMismatch):
        lie_bracket(D1, VectorField.translation(Signature(2, 1), 1))


def test_fields_reject_jets():
    with pytest.raises(InputContainsJets):
        field([as_rf(Jet(1, 1)), 0])


fields = st.tuples(*[polynomials(POINT_SYMBOLS, degree=2) for _ in range(4)]).map(lambda cs: field(cs[:2], cs[2:]))


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(fields, fields, fields)
def test_jacobi_identity(X, Y, Z):
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    assert total.is_zero()


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(fields, fields, fields, st.fractions(min_value=-3, max_value=3, max_denominator=3))
def test_antisymmetry_and_bilinearity(X, Y, Z, c):
    assert lie_bracket(X, X).is_zero()
    assert lie_bracket(X, Y) == lie_bracket(Y, X).scaled(-1)
    assert lie_bracket(X.scaled(c) + Y, Z) == lie_bracket(X, Z).scaled(c) + lie_bracket(Y, Z)


def test_prolong_translation_is_zero():
    for X in (D1, D2):
        assert all(z.is_zero() for row in prolong1(X).zeta for z in row)


def test_prolong_uniform_scaling():
    P = prolong1(field([x1, x2]))
    for A in (1, 2):
        for i in (1, 2):
            assert P.zeta[A - 1][i - 1] == -as_rf(Jet(A, i))


def test_prolong_scaling_generator_by_hand():
    # D_i xi_k = delta_ik - sum_B f;kB u_{B,i}
    P = prolong1(XI3)
    for A in (1, 2):
        for i in (1, 2):
            want = -as_rf(Jet(A, i))
            for k in (1, 2):
                for B in (1, 2):
                    want = want + as_rf(Jet(A, k)) * f(k, B) * as_rf(Jet(B, i))
            assert P.zeta[A - 1][i - 1] == want
    # the displayed form of zeta_{1,1}
    z11 = -as_rf(Jet(1, 1)) * (1 - f(1, 1) * as_rf(Jet(1, 1)) - f(1, 2) * as_rf(Jet(2, 1)))
    z11 = z11 + as_rf(Jet(1, 2)) * (f(1, 2) * as_rf(Jet(1, 1)) + f(2, 2) * as_rf(Jet(2, 1)))
    assert P.zeta[0][0] == z11


def test_distribution_rank_examples():
    assert distribution_rank([D1, D2]) == 2
    assert distribution_rank([D1, D1.scaled(2)]) == 1
    # independent over the constants but not over the function field
    assert distribution_rank([D1, field([u1, 0])]) == 1


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4).filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0))
def test_rank_invariant_under_constant_recombination(m):
    a, b, c, d = m
    X, Y = XI3, field([u2, 0], [x1, 0])
    mixed = [X.scaled(a) + Y.scaled(b), X.scaled(c) + Y.scaled(d)]
    assert distribution_rank(mixed) == distribution_rank([X, Y])


def _table(report):
    return {k: None if v is None else [c.constant_value() for c in v] for k, v in report.table.items()}


def test_structure_1p1():
    r = check_theorem1_structure([D1, D2, XI3])
    assert r.structure_ok and r.distribution_rank == 2
    assert _table(r) == BRACKETS_1P1


def test_structure_2p1():
    spec = MASpec("2p1")
    r = check_theorem1_structure(symmetry_fields(spec))
    assert r.structure_ok and r.distribution_rank == 3
    assert _table(r) == BRACKETS_2P1


def test_structure_3p1():
    r = check_theorem1_structure(symmetry_fields(MASpec("3p1")))
    assert r.structure_ok and r.distribution_rank == 4
    want = {}
    for i in range(5):
        for j in range(i + 1, 5):
            want[(i, j)] = [1 if (j == 4 and k == i) else 0 for k in range(5)]
    assert _table(r) == want


def test_structure_counterexample():
    r = check_theorem1_structure([D1, D2, field([x2, x1])])
    assert not r.structure_ok
    assert _table(r)[(0, 2)] == [0, 1, 0]
    assert any("[X1,X3]" in msg for msg in r.failures)


def test_structure_needs_n_plus_one_fields():
    r = check_theorem1_structure([D1, XI3])
    assert not r.structure_ok


def test_translation_symmetry_of_autonomous_system():
    sys_ = PDESystem(SIG, (as_rf(Jet(2, 1)) - as_rf(Jet(1, 2)), as_rf(Jet(1, 1)) * as_rf(u2) + as_rf(Jet(2, 2)) ** 2))
    cert = check_symmetry(sys_, D1)
    assert cert.holds and cert.verified
    assert all(v.is_zero() for m in cert.multipliers for v in m.values())


def test_scaling_symmetry_with_kappa1_imposed():
    sys_, fields_, _ = reduction_input(MASpec("1p1"))
    cert = check_symmetry(sys_, fields_[2])
    assert cert.holds and cert.verified


def test_generic_kappa1_blocks_symmetry_exactly_on_the_formula():
    spec = MASpec("1p1")
    cert = check_symmetry(homogeneous_system(spec), symmetry_fields(spec)[2])
    assert not cert.holds
    assert len(cert.residuals) == 1
    k1 = Opaque("k1", (), U)
    solved = solve_linear([cert.residuals[0]], [k1])[k1]
    assert solved == parse(KAPPA1_1P1, table(2))


def test_symmetry_invariant_under_constant_scaling():
    spec = MASpec("1p1")
    sys_ = homogeneous_system(spec)
    X = symmetry_fields(spec)[2]
    a = check_symmetry(sys_, X)
    b = check_symmetry(sys_, X.scaled(Fraction(-3, 2)))
    assert a.holds == b.holds
    assert [r.primitive() for r in a.residuals] == [r.primitive() for r in b.residuals]
