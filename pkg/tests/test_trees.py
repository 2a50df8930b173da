import math

import pytest
from hypothesis import given, strategies as st

from hopd.trees import (TreeError, automorphisms, count_planar_structures, encode, enumerate_trees,
                        is_normalized, leaves, n_vertices, normalize, parse, planar_structures,
                        relabel_leaves)


def test_schroeder_counts():
    # leaf-labelled trees with all vertices of arity >= 2
    assert [len(enumerate_trees(n, n, arities=range(2, n + 1))) for n in range(2, 6)] == [1, 4, 26, 236]


def test_binary_counts_are_double_factorials():
    for n in range(2, 6):
        expected = math.prod(range(1, 2 * n - 2, 2))
        assert len(enumerate_trees(n, n - 1, arities=[2])) == expected


@pytest.mark.parametrize("n", [3, 4])
def test_encode_parse_round_trip(n):
    for t in enumerate_trees(n, n, arities=range(2, n + 1)):
        assert parse(encode(t)) == t
        assert is_normalized(t)


leaf_perms = st.permutations([1, 2, 3, 4]).map(tuple)


@given(leaf_perms, st.sampled_from(enumerate_trees(4, 3, arities=[2, 3])))
def test_normal_form_is_canonical(perm, t):
    moved = relabel_leaves(t, {i + 1: perm[i] for i in range(4)})
    nf = normalize(moved)
    assert len(nf) == 1
    (u, c), = nf.items()
    assert is_normalized(u) and c == 1
    assert sorted(leaves(u)) == [1, 2, 3, 4]
    assert normalize(u) == {u: 1}


def test_labelled_trees_are_rigid():
    t = parse("<a>(<b>(1,2),<b>(3,4))")
    assert len(automorphisms(t)) == 1
    assert len(automorphisms(t, labelled=False)) == 8


def test_planar_structures_count():
    t = parse("<a>(<b>(1,2,3),4)")
    assert count_planar_structures(t) == len(planar_structures(t)) == 2 * 6
    assert n_vertices(t) == 2


def test_parse_reports_column():
    with pytest.raises(TreeError, match="column"):
        parse("<a>(1,2")
