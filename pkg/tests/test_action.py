import pytest
from hypothesis import given, strategies as st

from kryify.action import (all_braid_words, braid_action, generator_action, koszul_action, koszul_product_action,
                           tensor_action, transport_action, u2_explicit, unit_action, verify_action)
from kryify.gradedlinalg import gaussian_simplify
from kryify.ring import xvar
from kryify.soergel import BraidWord


@pytest.mark.parametrize("beta", all_braid_words(2, 3), ids=lambda b: "%d:%s" % (b.n, b.word))
def test_verify_action_short_words(beta):
    rep = verify_action(braid_action(beta, 3))
    assert rep["ok"], rep["failures"]


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=3, max_size=3))
def test_verify_action_length_three(word):
    assert verify_action(braid_action(BraidWord(3, word), 3))["ok"]


def _factors(beta, kmax=3):
    return [generator_action(beta.n, abs(s), 1 if s > 0 else -1, kmax) for s in beta.word]


@pytest.mark.parametrize("word", [[1, 1], [1, 2], [1, -2, 1], [1, 1, 1], [2, 1, -2, 1]])
def test_u2_explicit_matches_coproduct_assembly(word):
    beta = BraidWord(3, word)
    assert (u2_explicit(_factors(beta)) - braid_action(beta, 3).u[2]).is_zero()


def test_u2_explicit_needs_elementary_factors():
    A = braid_action(BraidWord(2, [1, 1]), 3)
    with pytest.raises(ValueError):
        u2_explicit([A, A])


def test_full_twist_u2_is_twice_bstar():
    A = braid_action(BraidWord(2, [1, 1]), 3)
    S = gaussian_simplify(A.complex, preserve_right=True)
    B = transport_action(A, S)
    assert verify_action(B)["ok"]
    C = B.complex
    # minimal complex B -> B -> R: two copies of B (rank 2 each) and R
    assert C.rank == 5 and [g[2] for g in C.degs] == [0, 0, -1, -1, -2]
    r = C.degs.index((0, -2, -2))
    U = B.u[2]
    entries = {(i, j): p for i, j, p in U.entries()}
    assert set(entries) == {(0, r), (1, r)}
    # column proportional to b^* = (x_1, -1) with factor +-2 (basis normalization of the summand)
    lam = -entries[(1, r)].constant_term()
    assert abs(lam) == 2
    assert entries[(0, r)] == xvar(1) * lam
    assert B.u[1].is_zero()
    assert (B.xi[1] + B.xi[2]).is_zero()


def test_koszul_actions():
    assert verify_action(koszul_action(3, 1, 3))["ok"]
    assert verify_action(koszul_product_action(3, [(1, 2), (2, 3), (1, 2)]))["ok"]
    assert verify_action(unit_action(2))["ok"]


def test_tensor_action_rejects_mismatched_strands():
    with pytest.raises(ValueError):
        tensor_action(unit_action(2), unit_action(3))


def test_all_braid_words_count():
    words = all_braid_words(2, 3)
    # 2 strands: 1 + 2 + 4; 3 strands: 1 + 4 + 16
    assert len(words) == 28
