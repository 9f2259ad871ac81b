from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kryify.gradedlinalg import (ChainComplex, HMatrix, TriGradedTable, Window, exact_rank, gaussian_simplify,
                                 homology_dims, parallel_map, stack_rank)
from kryify.ring import Poly, variable, xvar
from kryify.soergel import BraidWord, rouquier_complex


@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=0, max_size=6))
def test_exact_rank_matches_sympy(rows):
    # independent route: sympy's rational row reduction
    dict_rows = [{j: Fraction(v, 2) for j, v in enumerate(r) if v} for r in rows]
    expected = sympy.Matrix(rows).rank() if rows else 0
    assert exact_rank(dict_rows, 5) == expected


def test_stack_rank_blocks():
    blocks = {(0, 0): [{0: 1}, {1: 1}], (1, 1): [{0: 2}]}
    assert stack_rank(blocks, [2, 1], [2, 1]) == 3


def test_window_parse():
    W = Window.parse("-2,4,-1,3")
    assert (W.qmin, W.qmax, W.tmin, W.tmax, W.amin) == (-2, 4, -1, 3, None)
    assert Window.parse("0,0,0,0,2,4").contains(2, 0, 0)
    assert not Window.parse("0,0,0,0,2,4").contains(0, 0, 0)
    with pytest.raises(ValueError):
        Window.parse("1,2,3")
    with pytest.raises(ValueError):
        Window(3, 2, 0, 0)


@given(st.dictionaries(st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4)), st.integers(1, 9)))
def test_table_json_roundtrip(dims):
    T = TriGradedTable(dims, Window(-4, 4, -4, 4), {"note": "x"})
    assert TriGradedTable.from_json(T.to_json()) == T
    assert T.to_json() == TriGradedTable.from_json(T.to_json()).to_json()
    assert len(T.to_csv().splitlines()) == len(T.dims) + 1


def test_table_rejects_negative():
    with pytest.raises(ValueError):
        TriGradedTable({(0, 0, 0): -1})


def _koszul_x():
    # [Q[x] --x--> Q[x]] with generators in t = 1, 0
    d = HMatrix(2, 2)
    d.set(1, 0, xvar(1))
    return ChainComplex([(0, 2, 1), (0, 0, 0)], d, [variable("x", 1).id])


def test_homology_of_koszul_complex():
    T = homology_dims(_koszul_x(), Window(-4, 6, -1, 2))
    # homology is Q = Q[x]/(x) in degree (0, 0, 0)
    assert T.dims == {(0, 0, 0): 1}


def test_curved_complex_refused():
    C = _koszul_x()
    C.curvature = xvar(1)
    with pytest.raises(ValueError):
        homology_dims(C, Window(0, 0, 0, 0))


@pytest.mark.parametrize("word", [[1, 1], [1, -1], [1, 2, 1]])
def test_gaussian_simplify_is_homotopy_equivalence(word):
    beta = BraidWord(max(abs(s) for s in word) + 1, word)
    C = rouquier_complex(beta)
    S = gaussian_simplify(C, track=True)
    d, h = C.d, S.homotopy
    N = C.rank
    lhs = S.iota @ S.pi - HMatrix.identity(N)
    assert (lhs - (d @ h + h @ d)).is_zero()
    assert (S.pi @ S.iota - HMatrix.identity(S.complex.rank)).is_zero()
    assert S.complex.check_d_squared()
    W = Window(-6, 6, -4, 4)
    assert homology_dims(C, W) == homology_dims(S.complex, W)


def test_parallel_map_order_and_determinism():
    items = list(range(7))
    assert parallel_map(abs, items, 1) == parallel_map(abs, items, 2) == items


def test_hmatrix_algebra():
    A = HMatrix(2, 2)
    A.set(0, 1, xvar(1))
    B = HMatrix.identity(2, Poly.const(3))
    assert (A @ B - A.scale(3)).is_zero()
    assert (A @ A).is_zero()
