import pytest
from hypothesis import assume, given, strategies as st

from kryify.basicobj import (KoszulProduct, SurfaceData, model_lefschetz, model_vs_computed, normal_form,
                             perm_cycles, predicted_shift, refl_length, skein_triangle, square_move, swap_disjoint,
                             verify_cube)
from kryify.gradedlinalg import Window, compose_perm
from kryify.soergel import transposition

WINDOW = Window(-6, 6, -5, 4)


@st.composite
def products(draw, max_n=5, max_pairs=7):
    n = draw(st.integers(2, max_n))
    pair = st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] != p[1])
    return KoszulProduct(n, draw(st.lists(pair, max_size=max_pairs)))


@given(products(max_pairs=4), products(max_pairs=4), st.data())
def test_normal_form_invariant_under_disjoint_swap(K1, K2, data):
    n = max(K1.n, K2.n, 4)
    i, j, k, m = data.draw(st.permutations(range(1, n + 1)))[:4]
    K = KoszulProduct(n, K1.pairs + [(i, j), (k, m)] + K2.pairs)
    assert normal_form(swap_disjoint(K, len(K1.pairs))) == normal_form(K)


@given(st.integers(3, 5), st.data())
def test_normal_form_invariant_under_square_move(n, data):
    i, j, k = data.draw(st.permutations(range(1, n + 1)))[:3]
    head = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] != p[1]),
                              max_size=3))
    K = KoszulProduct(n, head + [(i, j), (i, j), (i, k)])
    M = square_move(K, len(head))
    assert M.pairs[len(head)] == tuple(sorted((k, j)))
    assert normal_form(M) == normal_form(K)


def test_moves_reject_bad_positions():
    K = KoszulProduct(3, [(1, 2), (2, 3), (1, 2)])
    with pytest.raises(ValueError):
        swap_disjoint(K, 0)
    with pytest.raises(ValueError):
        square_move(K, 0)


@given(st.permutations(range(1, 6)), st.integers(1, 5), st.integers(1, 5))
def test_reflection_length_law(w, i, j):
    assume(i != j)
    w = tuple(w)
    t = transposition(5, i, j)
    # multiplying by a reflection changes the reflection length by exactly one
    assert abs(refl_length(compose_perm(w, t)) - refl_length(w)) == 1
    assert refl_length(w) == 5 - len(perm_cycles(w))


@given(products())
def test_genus_formula_consistent(K):
    w, S = normal_form(K)
    assert S.c == len(perm_cycles(w))
    assert S.s == len(K.classes())
    # Euler characteristic: sum over classes of (2 - 2g - b) equals |S| - e summed
    assert sum(2 - 2 * g - b for b, g in S.pairs) == K.n - len(K.pairs)


@pytest.mark.parametrize("text", ["(1,0)", "(1,1)", "(2,0)", "(2,1)", "(1,0),(1,1)", "(3,2)", "(1,1),(2,0)"])
def test_realization_has_requested_surface(text):
    S = SurfaceData.parse(text)
    assert SurfaceData.parse(S.to_str()) == S
    for single in ("none", "pair"):
        K = S.realization(single)
        if single == "none" and (1, 0) in S.pairs:
            continue
        assert normal_form(K)[1] == S


def test_surface_parse_errors():
    with pytest.raises(ValueError):
        SurfaceData.parse("nothing")
    with pytest.raises(ValueError):
        SurfaceData([(0, 1)])


def test_predicted_shift():
    K = SurfaceData.parse("(1,1)").realization()
    assert predicted_shift(K) == (0, -1, 1)


@pytest.mark.parametrize("text", ["(1,0)", "(1,1)", "(2,0)", "(1,0),(1,0)"])
def test_model_matches_pipeline(text):
    rep = model_vs_computed(SurfaceData.parse(text), WINDOW)
    assert rep["ok"]
    assert rep["shift"] == rep["predicted_shift"]
    assert any(r["model"] for r in rep["slices"])


def test_square_move_preserves_computed_homology():
    K = KoszulProduct(3, [(1, 2), (1, 2), (1, 3)])
    M = square_move(K, 0)
    r1, r2 = model_vs_computed(K, WINDOW), model_vs_computed(M, WINDOW)
    assert r1["ok"] and r2["ok"]
    assert [(r["slice"], r["pipeline"]) for r in r1["slices"]] == [(r["slice"], r["pipeline"]) for r in r2["slices"]]


@pytest.mark.parametrize("text", ["(1,0)", "(1,1)", "(2,2)", "(1,1),(1,1)", "(3,0)"])
def test_model_lefschetz(text):
    rep = model_lefschetz(SurfaceData.parse(text), 3, WINDOW)
    assert rep["ok"] and rep["verdicts"]


@pytest.mark.parametrize("i,j,n", [(1, 2, 2), (1, 2, 3), (1, 3, 3), (2, 3, 3)])
def test_cube(i, j, n):
    rep = verify_cube(i, j, n)
    assert rep["ok"], rep


@pytest.mark.parametrize("n", [2, 3])
def test_skein_triangle(n):
    rep = skein_triangle(n)
    assert rep["ok"] and rep["homotopy_verified"]
    assert all(rep["checks"].values())
    assert rep["signs"] == [1, -1, 1, 1, -1]
