from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hopd.exactlin import (Echelon, GradedMap, GradedSpace, NotAComplexError, cohomology, kernel,
                           koszul_sign, rank, shift)

entries = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)))


def columns_of(m):
    """Column j of m as a sparse vector over row indices."""
    return {j: {i: Fraction(row[j]) for i, row in enumerate(m) if row[j]} for j in range(len(m[0]))}


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(columns_of(m).values()) == sympy.Matrix(m).rank()


@given(matrices())
def test_kernel_is_kernel_of_full_dimension(m):
    cols = columns_of(m)
    ker = kernel(range(len(m[0])), cols)
    assert len(ker) == len(m[0]) - sympy.Matrix(m).rank()
    for v in ker:
        image = {}
        for j, c in v.items():
            for i, x in cols[j].items():
                image[i] = image.get(i, 0) + c * x
        assert not any(image.values())


@given(matrices())
def test_echelon_coordinates_reconstruct(m):
    ech = Echelon()
    for v in columns_of(m).values():
        ech.add(v)
    for v in columns_of(m).values():
        coords = ech.coordinates(v)
        back = {}
        for c, row in zip(coords, ech.rows):
            for k, x in row.items():
                back[k] = back.get(k, 0) + c * x
        assert {k: x for k, x in back.items() if x} == v


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.permutations(list(range(n))), st.permutations(list(range(n))),
    st.lists(st.integers(0, 3), min_size=n, max_size=n))))
def test_koszul_sign_composes(t):
    p, s, degs = t
    # reorder by p, then reorder the result by s
    moved = [degs[x] for x in p]
    both = [p[x] for x in s]
    assert koszul_sign(both, degs) == koszul_sign(p, degs) * koszul_sign(s, moved)


def test_koszul_sign_examples():
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [1, 2]) == 1
    assert koszul_sign([2, 1, 0], [1, 1, 1]) == -1


def circle():
    """Simplicial cochains of the boundary of a triangle."""
    V = GradedSpace(["v1", "v2", "v3", "e12", "e13", "e23"], [0, 0, 0, 1, 1, 1])
    cols = {"v1": {"e12": -1, "e13": -1}, "v2": {"e12": 1, "e23": -1}, "v3": {"e13": 1, "e23": 1}}
    return V, GradedMap(V, V, 1, cols)


def test_cohomology_of_circle():
    V, d = circle()
    H = cohomology(d, d)
    assert H.dims() == {0: 1, 1: 1}
    for key, z in H.representatives.items():
        assert not d(z)


def test_not_a_complex_is_reported():
    V = GradedSpace(["a", "b", "c"], [0, 1, 2])
    d = GradedMap(V, V, 1, {"a": {"b": 1}, "b": {"c": 1}})
    with pytest.raises(NotAComplexError):
        cohomology(d, d)


def test_graded_map_rejects_wrong_degree():
    V = GradedSpace(["a", "b"], [0, 0])
    with pytest.raises(ValueError):
        GradedMap(V, V, 1, {"a": {"b": 1}})


def test_shift_moves_degrees():
    V = GradedSpace(["a"], [2])
    assert shift(V, 1).degree("a") == 3
