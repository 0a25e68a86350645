from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from quasireduce.errors import Inconsistent, InputContainsJets, SingularSystem, Underdetermined
from quasireduce.expr import (
    Dependent,
    Independent,
    Jet,
    Opaque,
    Parameter,
    Signature,
    as_rf,
    diff,
    equal,
    evaluate,
    is_zero,
    normalize,
    solve_linear,
    substitute,
    total_derivative,
)
from quasireduce.expr.linear import adjugate, back_substitute, cofactor, determinant, eliminate, laplace_determinant
from quasireduce.expr.tree import Add, Mul, Sym, add, const, mul, power
from strategies import SIG, SYMBOLS, expressions, points
from reference_values import leibniz_det

x1, x2 = Independent(1), Independent(2)
u1, u2 = Dependent(1), Dependent(2)
U = (u1, u2)
a, b = Parameter("a"), Parameter("b")


def J(A, i):
    return as_rf(Jet(A, i))


def f(*idx):
    return as_rf(Opaque("f", idx, U))


# --- diff ------------------------------------------------------------------


def test_diff_of_ma_bracket():
    e = J(1, 1) * J(2, 2) - J(1, 2) ** 2
    assert diff(e, Jet(1, 2)) == -2 * J(1, 2)


def test_diff_chains_opaque_indices():
    assert diff(f(1), u2) == f(1, 2)
    assert f(2, 1) == f(1, 2)


def test_diff_constant():
    assert diff(as_rf(Fraction(7, 3)), u1).is_zero()


def test_jets_are_distinct_from_coordinates():
    assert diff(J(1, 1), u1).is_zero()
    assert diff(as_rf(u1), Jet(1, 1)).is_zero()
    assert diff(as_rf(x1), Jet(1, 1)).is_zero()


# --- total derivative -------------------------------------------------------


def test_total_derivative_of_new_variable():
    z1 = as_rf(x1) - f(1)
    want = -(f(1, 1) * J(1, 2) + f(1, 2) * J(2, 2))
    assert total_derivative(z1, 2, SIG) == want


def test_total_derivative_trivial():
    assert total_derivative(as_rf(x1), 1, SIG) == as_rf(1)
    assert total_derivative(as_rf(u1), 2, SIG) == J(1, 2)


def test_total_derivative_rejects_jets():
    with pytest.raises(InputContainsJets):
        total_derivative(J(1, 1), 1, SIG)


# --- substitute -------------------------------------------------------------


def test_substitute_examples():
    a1, a2 = Parameter("a1"), Parameter("a2")
    assert substitute(J(1, 1), {}) == J(1, 1)
    shifted = as_rf(u1) + as_rf(a1) * as_rf(x1) + as_rf(a2) * as_rf(x2)
    assert substitute(as_rf(u1), {u1: shifted}) == shifted
    w1, w2 = Dependent(1, "w"), Dependent(2, "w")
    assert substitute(f(1), {u1: w1, u2: w2}) == as_rf(Opaque("f", (1,), (w1, w2)))


def test_substitute_is_simultaneous():
    e = as_rf(u1) - 2 * as_rf(u2)
    assert substitute(e, {u1: u2, u2: u1}) == as_rf(u2) - 2 * as_rf(u1)


# --- normalize --------------------------------------------------------------


def test_normalize_examples():
    s1, s2 = Sym(u1), Sym(u2)
    assert is_zero(power(add(s1, s2), 2) - power(s1, 2) - 2 * s1 * s2 - power(s2, 2))
    assert is_zero((power(s1, 2) - power(s2, 2)) / (s1 - s2) - (s1 + s2))


def test_normal_form_sign_and_gcd():
    e = as_rf(u1) / (-2 * as_rf(u1) * as_rf(u2))
    assert e == as_rf(Fraction(-1, 2)) / as_rf(u2)
    assert str(as_rf(1) / (-as_rf(u2))) == str(-(as_rf(1) / as_rf(u2)))


def test_smart_constructors_flatten():
    e = add(add(Sym(u1), Sym(u2)), const(1))
    assert isinstance(e, Add) and len(e.terms) == 3
    assert mul(Sym(u1)) == Sym(u1)
    assert add(Sym(u1), const(0)) == Sym(u1)
    m = mul(mul(Sym(u1), Sym(u2)), Sym(x1))
    assert isinstance(m, Mul) and len(m.factors) == 3


def test_negative_powers_move_to_denominator():
    e = normalize(power(Sym(u1), -2))
    assert e.denominator() == as_rf(u1) ** 2
    assert e.numerator() == as_rf(1)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(expressions())
def test_zero_test(e):
    assert normalize(e - e).is_zero()
    assert not normalize(e + 1 - e).is_zero()


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(expressions(), expressions(), st.sampled_from(SYMBOLS))
def test_leibniz(p, q, s):
    P, Q = as_rf(p), as_rf(q)
    assert (diff(P * Q, s) - diff(P, s) * Q - P * diff(Q, s)).is_zero()


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(expressions(), st.sampled_from(SYMBOLS), st.sampled_from(SYMBOLS))
def test_partials_commute(e, s, t):
    E = as_rf(e)
    assert diff(diff(E, s), t) == diff(diff(E, t), s)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(expressions(), st.sampled_from(SYMBOLS))
def test_tree_and_field_derivatives_agree(e, s):
    assert as_rf(diff(e, s)) == diff(as_rf(e), s)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(expressions(), points(SYMBOLS))
def test_evaluation_agrees_with_normal_form(e, pt):
    try:
        v = evaluate(e, pt)
    except ZeroDivisionError:
        assume(False)
    assert as_rf(e).evaluate(pt) == v


# --- solve_linear -------------------------------------------------------------


def test_solve_linear_examples():
    X, Y = Parameter("X"), Parameter("Y")
    assert solve_linear([as_rf(a) * as_rf(X) - 1], [X]) == {X: 1 / as_rf(a)}
    assert solve_linear([as_rf(X) + as_rf(Y) - 2, as_rf(X) - as_rf(Y)], [X, Y]) == {X: as_rf(1), Y: as_rf(1)}


def test_solve_linear_errors():
    X, Y = Parameter("X"), Parameter("Y")
    with pytest.raises(SingularSystem):
        solve_linear([as_rf(X) + as_rf(Y), 2 * as_rf(X) + 2 * as_rf(Y)], [X, Y])
    with pytest.raises(Inconsistent):
        solve_linear([as_rf(X) - 1, as_rf(X) - 2, as_rf(Y)], [X, Y])
    with pytest.raises(Underdetermined):
        solve_linear([as_rf(X) + as_rf(Y)], [X, Y])
    with pytest.raises(ValueError):
        solve_linear([as_rf(X) * as_rf(Y) - 1, as_rf(X)], [X, Y])


def test_inverse_jet_map_of_newvars():
    """Old jets from D_i w_B = sum_j w_{B,j} D_i z_j, solved as a linear system in u-jets."""
    sig = SIG
    Z = [as_rf(x1) - f(1), as_rf(x2) - f(2)]
    wj = {(B, j): as_rf(Jet(B, j, "w")) for B in (1, 2) for j in (1, 2)}
    eqs = []
    for i in (1, 2):
        for B in (1, 2):
            lhs = J(B, i)
            rhs = sum((wj[(B, j)] * total_derivative(Z[j - 1], i, sig) for j in (1, 2)), as_rf(0))
            eqs.append(lhs - rhs)
    sol = solve_linear(eqs, sig.jets())
    assert all(r.is_zero() for r in back_substitute(eqs, sol))
    den = sol[Jet(1, 1)].denominator()
    W = [[wj[(1, 1)], wj[(1, 2)]], [wj[(2, 1)], wj[(2, 2)]]]
    Hf = [[f(1, 1), f(1, 2)], [f(1, 2), f(2, 2)]]
    # det(I + W Hf): rows of W against columns of Hf
    M = [[(1 if r == c else 0) + sum((W[r][k] * Hf[k][c] for k in range(2)), as_rf(0)) for c in range(2)] for r in range(2)]
    d = leibniz_det(M)
    assert (den / d).is_constant()


@st.composite
def _linear_systems(draw):
    n = draw(st.integers(1, 3))
    syms = [Parameter(f"X{i}") for i in range(n)]
    params = [u1, u2, a]
    coeff = st.sampled_from([as_rf(c) for c in range(-2, 3)] + [as_rf(p) for p in params] + [as_rf(u1) + 1, as_rf(a) * as_rf(u2)])
    eqs = []
    for _ in range(n + draw(st.integers(0, 1))):
        e = draw(coeff)
        for s in syms:
            e = e + draw(coeff) * as_rf(s)
        eqs.append(e)
    return eqs, syms


@settings(max_examples=60, deadline=None)
@given(_linear_systems())
def test_back_substitution_residuals_vanish(system):
    eqs, syms = system
    try:
        sol = solve_linear(eqs, syms)
    except (SingularSystem, Inconsistent, Underdetermined):
        assume(False)
    assert all(r.is_zero() for r in back_substitute(eqs, sol))


# --- determinants and cofactors -----------------------------------------------


def _generic(k):
    return [[as_rf(Parameter(f"m{i}{j}")) for j in range(k)] for i in range(k)]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_cofactor_expansion_along_each_row(k):
    M = _generic(k)
    D = leibniz_det(M)
    assert laplace_determinant(M) == D
    assert determinant(M) == D
    for i in range(k):
        assert sum((M[i][j] * cofactor(M, i, j) for j in range(k)), as_rf(0)) == D
        for other in range(k):
            if other != i:
                # alien cofactors vanish
                assert sum((M[i][j] * cofactor(M, other, j) for j in range(k)), as_rf(0)).is_zero()


@pytest.mark.parametrize("k", [2, 3, 4])
def test_adjugate_inverts(k):
    M = _generic(k)
    A = adjugate(M)
    D = leibniz_det(M)
    for i in range(k):
        for j in range(k):
            v = sum((M[i][t] * A[t][j] for t in range(k)), as_rf(0))
            assert v == (D if i == j else as_rf(0))


def test_equal_helper():
    assert equal(as_rf(u1) * 2, as_rf(u1) + as_rf(u1))
