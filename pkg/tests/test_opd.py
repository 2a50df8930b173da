from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hopd import perms as P
from hopd.opd import (ID, AssOperad, ComOperad, EndOperad, FreeOperad, OperadError,
                      PresentedOperad, check_operad_axioms, coinvariants, evaluate_tree,
                      generator_collection, tree_module_dim_oracle)
from hopd.defcx import parse_relation
from hopd.trees import parse


@pytest.mark.parametrize("make", [
    lambda: AssOperad(4),
    lambda: ComOperad(4),
    lambda: EndOperad(2, max_arity=3),
    lambda: EndOperad(2, [0, 1], max_arity=3),
])
def test_builtin_operads_satisfy_axioms(make):
    rep = check_operad_axioms(make())
    assert rep.passed, rep.witness
    assert rep.checked > 0


def test_broken_composition_is_caught():
    class Bad(AssOperad):
        def compose(self, i, a, b):
            out = super().compose(i, a, b)
            return {k: 2 * v for k, v in out.items()} if len(a) == 3 else out
    rep = check_operad_axioms(Bad(4))
    assert not rep.passed and rep.witness


perm4 = st.permutations([1, 2, 3, 4]).map(tuple)


@given(perm4, perm4, st.sampled_from(EndOperad(2, [0, 1], max_arity=4).basis(4)))
def test_action_is_left_action(p, q, key):
    E = EndOperad(2, [0, 1], max_arity=4)
    lhs = E.act_vec(E.act(key, q), p)
    assert lhs == E.act(key, P.compose(p, q))


def test_presented_dimensions():
    cases = {
        ("m", "regular", "<m>(<m>(1,2),3) - <m>(1,<m>(2,3))"): [1, 2, 6, 24],
        ("c", "symmetric", "<c>(<c>(1,2),3) - <c>(1,<c>(2,3))"): [1, 1, 1, 1],
        ("b", "antisymmetric", "<b>(<b>(1,2),3) + <b>(<b>(2,3),1) + <b>(<b>(3,1),2)"): [1, 1, 2, 6],
    }
    for (g, sym, rel), dims in cases.items():
        X = generator_collection([(g, 2, 0, sym)])
        Q = PresentedOperad(X, [parse_relation(rel)], 4)
        assert [len(Q.basis(n)) for n in range(1, 5)] == dims


def test_free_operad_matches_orbit_count():
    X = generator_collection([("m", 2, 0, "regular"), ("t", 3, 0, "symmetric")])
    F = FreeOperad(X, max_arity=5)
    for n in range(2, 6):
        keys = [k for k in F.basis(n) if k is not ID]
        assert len(keys) == tree_module_dim_oracle({2: 2, 3: 1}, n, n)


def test_evaluate_tree_in_ass():
    A = AssOperad(4)
    # keys are words: the product x3 x1 x2
    assert evaluate_tree(A, _relabel(parse("<m>(<m>(3,1),2)"), {"m": (1, 2)})) == {(3, 1, 2): Fraction(1)}
    assert evaluate_tree(A, _relabel(parse("<m>(2,<m>(3,1))"), {"m": (1, 2)})) == {(2, 3, 1): Fraction(1)}


def _relabel(t, images):
    from hopd.trees import Tree
    return Tree(images[t.label], tuple(_relabel(c, images) if isinstance(c, Tree) else c for c in t.children))


def test_coinvariants_project_include():
    E = EndOperad(2, max_arity=3)
    for n in (1, 2, 3):
        C = coinvariants(E, n)
        for k in C.keys:
            assert C.project(C.include(k)) == {k: 1}
    # End_V(n) with dim V = 2 has (2^n multisets of inputs) x 2 outputs orbits
    assert len(coinvariants(E, 2).keys) == 3 * 2


def test_end_operad_size_cap():
    with pytest.raises(OperadError):
        EndOperad(10, max_arity=6, max_basis=1000)


def test_end_evaluate_from_table():
    E = EndOperad(2, max_arity=2)
    mu = E.from_table(2, lambda ins: {1: 1} if ins == (1, 1) else {})
    assert E.evaluate(mu, (1, 1)) == {1: 1}
    assert E.evaluate(mu, (1, 2)) == {}
