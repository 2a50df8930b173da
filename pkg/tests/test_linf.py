import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hopd.defcx import homotopy_convolution
from hopd.exactlin import GradedSpace
from hopd.homotopy import (ainfinity_dual_cooperad, ainfinity_homotopy_operad, check_stasheff,
                           strict_from_operad, symmetrized_operation)
from hopd.linf import (LInfinity, LInfinityError, MCElement, check_linf_relations, linf_from_homotopy,
                       linf_from_operad, mc_check, perturb, symmetrize, tensor_power)
from hopd.opd import AssOperad, ComOperad, EndOperad

from instances import gauge_algebra, m3_algebra


@pytest.mark.parametrize("P", [AssOperad(4), ComOperad(4)])
def test_strict_relations(P):
    for L in (linf_from_homotopy(strict_from_operad(P)), linf_from_operad(P)):
        rep = check_linf_relations(L, 4)
        assert rep.passed and rep.checked, rep.witness


def test_non_strict_convolution_relations():
    D = ainfinity_dual_cooperad(gauge_algebra(), 5)
    H = homotopy_convolution(D, EndOperad(2, [0, 1], max_arity=1), 5)
    rep = check_linf_relations(linf_from_homotopy(H), 4)
    assert rep.passed and rep.checked > 100, rep.witness


def test_brackets_are_symmetrized_operations():
    W = m3_algebra()
    assert check_stasheff(W, 5).passed
    L = linf_from_homotopy(ainfinity_homotopy_operad(W, 5))
    for n in range(1, 5):
        for w in itertools.combinations_with_replacement((1, 2, 3), n):
            expected = {"w%d" % j: c for j, c in symmetrized_operation(W, w).items()}
            assert L.bracket(*["w%d" % i for i in w]) == expected
    assert L.bracket("w1", "w1", "w1") == {"w3": Fraction(-6)}


degs = st.lists(st.integers(-2, 2), min_size=1, max_size=4)


@given(degs)
def test_symmetrize_is_symmetric(ds):
    keys = ["x%d" % i for i in range(len(ds))]
    deg = dict(zip(keys, ds)).get
    T = symmetrize(tuple(keys), deg)
    for p in itertools.permutations(range(len(keys))):
        # the symmetric tensor of a reordered monomial differs by the Koszul sign only
        U = symmetrize(tuple(keys[i] for i in p), deg)
        assert U == T or U == {w: -c for w, c in T.items()}


def abelian_line():
    """g = Q x in degree 1 with all brackets zero."""
    sp = GradedSpace(["x"], [1])
    return LInfinity(sp, {}, K=2)


def test_mc_check_and_perturb_on_abelian():
    L = abelian_line()
    phi = MCElement(L, {"x": Fraction(3)})
    assert mc_check(L, phi, bound=2) == {}
    Lp = perturb(L, phi, bound=2)
    assert Lp.word_op(1, ("x",)) == {}


def test_mc_element_degree_checked():
    sp = GradedSpace(["y"], [0])
    with pytest.raises(LInfinityError):
        MCElement(LInfinity(sp, {}, K=2), {"y": 1})


def test_tensor_power_size():
    assert len(tensor_power({"a": 1, "b": 2}, 3)) == 8
