import pytest
from hypothesis import given, strategies as st

from kryify.ring import xvar
from kryify.soergel import (BraidWord, b_map, bstar_map, koszul_object, koszul_product, rouquier_complex,
                            rouquier_generator, symmetric_check, transposition)


@st.composite
def braids(draw, max_strands=4, max_len=5):
    n = draw(st.integers(2, max_strands))
    gens = [s for i in range(1, n) for s in (i, -i)]
    return BraidWord(n, draw(st.lists(st.sampled_from(gens), max_size=max_len)))


def test_parse_and_invariants():
    b = BraidWord.parse("1 1 1", 2)
    assert b.word == [1, 1, 1]
    assert b.permutation() == (2, 1)
    assert b.writhe() == 3
    assert b.components() == 1
    assert BraidWord(2, [1, 1]).components() == 2
    assert BraidWord(3, [1, -2, 1, -2]).components() == 1
    with pytest.raises(ValueError):
        BraidWord(2, [2])
    with pytest.raises(ValueError):
        BraidWord(2, [0])


@given(braids())
def test_braid_operations(b):
    assert b.mirror().mirror().word == b.word
    assert b.mirror().permutation() == b.permutation()
    assert b.rotate(1).components() == b.components()
    s = b.stabilize()
    assert s.n == b.n + 1 and s.components() == b.components()
    assert sorted(sum(b.cycles(), [])) == list(range(1, b.n + 1))


def test_transposition():
    assert transposition(3, 1, 3) == (3, 2, 1)


@given(braids(max_strands=3, max_len=3))
def test_rouquier_complex_is_bimodule_complex(b):
    C = rouquier_complex(b)
    assert C.check_d_squared()
    assert C.check_homogeneous()
    assert C.check_right_action()
    assert symmetric_check(C, b.n)
    assert C.rank == 3 ** len(b.word)


@pytest.mark.parametrize("sign", [1, -1])
def test_generator_degrees(sign):
    C = rouquier_generator(2, 1, sign)
    assert sorted(g[2] for g in C.degs) == ([-1, 0, 0] if sign > 0 else [0, 0, 1])
    with pytest.raises(ValueError):
        rouquier_generator(2, 2, sign)


def test_b_bstar_composite():
    # b o b^* is multiplication by x_i - x_{i+1}
    M = b_map(2, 1) @ bstar_map(2, 1)
    assert M.get(0, 0) == xvar(1) - xvar(2)


def test_koszul_objects():
    K = koszul_object(3, 1, 3)
    assert K.perm == (3, 2, 1)
    assert K.check_d_squared() and K.check_right_action()
    P = koszul_product(3, [(1, 2), (2, 3)])
    assert P.rank == 4 and P.check_d_squared()
    with pytest.raises(ValueError):
        koszul_object(2, 1, 1)
