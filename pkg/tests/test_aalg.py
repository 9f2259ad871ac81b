import pytest
from hypothesis import given, strategies as st

from kryify.aalg import (AlgebraSpec, AlphaBeta, SuperPolynomial, TensorSpec, _u_and_corrections, a_infty_sign,
                         ainfty_defect, all_perms, beta_correction, coassociativity_defect, coproduct,
                         coproduct_chain_defect, corrections_identity_defect, counit_defects, delta3,
                         delta3_homotopy_defect, differential, higher_coproduct, identity_suite, phi_by_series,
                         phi_chain_defect, phi_composition_defect, phi_stabilize, search_ainfty_signs, uvar,
                         vanishes, xi_key)
from kryify.ring import Poly, factorization_coeffs, xvar

S = SuperPolynomial


def gens(n, kmax):
    return ([S.even(xvar(i)) for i in range(1, n + 1)] + [S.xi(i) for i in range(1, n + 1)]
            + [S.u(k) for k in range(1, kmax + 1)])


@st.composite
def elements(draw, n=2, kmax=3, max_terms=3):
    out = S()
    for _ in range(draw(st.integers(0, max_terms))):
        term = S.even(Poly.const(draw(st.integers(-3, 3))))
        for g in draw(st.lists(st.sampled_from(gens(n, kmax)), max_size=3)):
            term = term * g
        out = out + term
    return out


@given(elements(), elements(), elements())
def test_super_algebra_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == S()


def test_odd_generators_anticommute():
    assert S.xi(1) * S.xi(2) == -(S.xi(2) * S.xi(1))
    assert (S.xi(1) * S.xi(1)).is_zero()
    assert S.u(2) * S.xi(1) == S.xi(1) * S.u(2)


@pytest.mark.parametrize("w", all_perms(3))
@pytest.mark.parametrize("flavor", ["A_w", "CA_w"])
def test_d_squared(w, flavor):
    spec = AlgebraSpec(3, w, flavor, kmax=4)
    for g in gens(3, 4):
        dd = differential(differential(g, spec), spec)
        assert vanishes(dd, 3) if flavor == "A_w" else dd.is_zero()


def test_d_squared_only_modulo_symmetric_identification():
    # d^2 u_2 = p_2(x) - p_2(x') is nonzero as a polynomial, zero in R x_{R^S} R
    spec = AlgebraSpec(2, (1, 2), "A_w", kmax=2)
    dd = differential(differential(S.u(2), spec), spec)
    assert not dd.is_zero()
    assert vanishes(dd, 2)
    assert not vanishes(S.even(xvar(1) - xvar(1, 1)), 2)


def test_foreign_generator_rejected():
    spec = AlgebraSpec(2, (1, 2), "A_w", kmax=2)
    with pytest.raises(ValueError):
        differential(S.u(3), spec)


def test_coproduct_of_u2():
    expected = S.u(2) + S.even(Poly.from_var(uvar(2, 2)))
    for i in (1, 2):
        expected = expected + S.xi(i) * S.odd(xi_key(i, 2))
    assert coproduct(S.u(2), (1, 2), (1, 2)) == expected


@pytest.mark.parametrize("n", [1, 2, 3])
def test_coproduct_chain_map(n):
    for v in all_perms(n):
        for w in all_perms(n):
            for g in gens(n, 4):
                assert vanishes(coproduct_chain_defect(g, v, w, 4), n)


@given(elements(n=2, kmax=3))
def test_coproduct_chain_map_on_products(e):
    assert vanishes(coproduct_chain_defect(e, (2, 1), (2, 1), 6), 2)


@pytest.mark.parametrize("n", [2, 3])
def test_counit(n):
    for g in gens(n, 4) + [S.xi(1) * S.u(2), S.u(2) * S.u(3)]:
        left, right = counit_defects(g, n)
        assert vanishes(left, n) and vanishes(right, n)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("n", [2, 3])
def test_coassociativity_up_to_homotopy(k, n):
    assert vanishes(coassociativity_defect(k, n), n)


def test_delta3_of_u3():
    expected = S()
    for i in (1, 2):
        expected = expected + S.xi(i) * S.odd(xi_key(i, 2)) * S.odd(xi_key(i, 3))
    assert delta3(S.u(3), 2) == expected
    assert higher_coproduct(3, 3, 2) == expected
    with pytest.raises(ValueError):
        higher_coproduct(2, 3, 2)


CONTROL = [S.xi(1) * S.u(3), S.xi(1) * S.xi(2) * S.u(3), S.u(2) * S.u(3)]


@pytest.mark.parametrize("e", CONTROL + [S.u(3), S.u(2) * S.u(2)], ids=lambda e: e.to_str())
def test_delta3_homotopy_identity(e):
    assert vanishes(delta3_homotopy_defect(e, 2), 2)


@pytest.mark.parametrize("e", CONTROL, ids=lambda e: e.to_str())
def test_delta3_without_koszul_sign_fails(e):
    assert not vanishes(delta3_homotopy_defect(e, 2, koszul_sign=False), 2)


@pytest.mark.parametrize("m,k,n", [(m, k, n) for n in (2, 3) for m in (3, 4) for k in range(m, 6)])
def test_ainfty_relations(m, k, n):
    assert vanishes(ainfty_defect(m, k, n), n)


def test_ainfty_sign_rule_is_the_unique_solution_for_m4():
    for k in (4, 5):
        sols = search_ainfty_signs(4, k, 2)
        assert len(sols) == 1
        assert all(a_infty_sign(s, a) == sg for (s, t, a), sg in sols[0].items())


def test_beta_correction_example():
    got = beta_correction((2, 3, 1), 3)
    x1, x2, x3 = (xvar(i) for i in (1, 2, 3))
    expected = (S.even(2 * x1 + x3) * S.xi(1) * S.xi(2) + S.even(2 * x1 + x3) * S.xi(1) * S.xi(3)
                + S.even(-x1 - x2 - x3) * S.xi(2) * S.xi(3))
    assert got == expected
    assert beta_correction((1, 2), 1).is_zero()


@pytest.mark.parametrize("w", [w for n in (1, 2, 3) for w in all_perms(n)])
def test_alpha_beta(w):
    assert all(AlphaBeta(w, 5).check().values())


@pytest.mark.parametrize("mu,N", [((1,), 4), ((2,), 5), ((1, 1), 4), ((2, 1), 5), ((1, 2), 5), ((1, 1, 1), 5)])
def test_phi_jacobian_matches_series(mu, N):
    series = phi_by_series(mu, N)
    for k in range(1, N + 1):
        assert phi_stabilize(mu, N, k) == series[k]
        assert phi_chain_defect(mu, N, k).is_zero()


def test_phi_example():
    assert phi_stabilize((1,), 2, 2) == S.even(2 * xvar(1)) * S.u(1)
    with pytest.raises(ValueError):
        phi_stabilize((0,), 2, 1)


@pytest.mark.parametrize("mu,mu2,N2", [((1,), (2,), 4), ((1, 1), (2, 1), 4), ((1, 1), (1, 2), 5), ((1,), (3,), 5)])
def test_phi_composition_law(mu, mu2, N2):
    for k in range(1, N2 + 1):
        assert phi_composition_defect(mu, mu2, N2, k).is_zero()


CORRECTIONS = [((1, 2), 2), ((2, 2), 2), ((1, 1), 2), ((1, 2, 3), 3), ((2, 3), 3), ((1, 2), 3)]


@pytest.mark.parametrize("factors,n", CORRECTIONS)
def test_corrections_identity(factors, n):
    defect, C = corrections_identity_defect(factors, n)
    assert vanishes(defect, n)


@pytest.mark.parametrize("factors,n", [c for c in CORRECTIONS if c[0] != (1, 1)])
def test_corrections_are_needed(factors, n):
    # negative control: U(Q) alone does not satisfy the identity
    U, C, Q = _u_and_corrections(list(factors), n)
    assert C
    rhs = S()
    for i, a in enumerate(factorization_coeffs(Q, n), start=1):
        rhs = rhs + S.even(a) * S.xi(i)
    defect = differential(U, AlgebraSpec(n, None, "A_w", kmax=max(factors))) - rhs
    assert not vanishes(defect, n)


def test_corrections_vanish_for_equal_linear_factors():
    assert corrections_identity_defect((1, 1), 2)[1] == {}


def test_tensor_spec_untwisted():
    T = TensorSpec.untwisted(2, 2)
    assert vanishes(differential(differential(S.odd(xi_key(1, 2)), T), T), 2)


def test_identity_suite_small():
    rows = identity_suite(2, 3)
    assert rows and all(r["status"] == "pass" and r["defect"] == "0" for r in rows)
    assert {r["identity"] for r in rows} >= {"d^2=0", "coproduct_chain", "counit_left", "delta3_homotopy",
                                             "a_infinity", "alpha_beta_id", "beta_chain", "phi_composition"}
