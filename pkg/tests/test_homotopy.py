import itertools
import random
from fractions import Fraction

import pytest

from hopd.defcx import quadratic_model
from hopd.homotopy import (AInfinityAlgebra, ainfinity_dual_cooperad, ainfinity_homotopy_operad,
                           check_morphism, check_square_zero, check_stasheff, decalage_sign,
                           identity_morphism, shifted_residual, stasheff_residual,
                           strict_from_operad)
from hopd.opd import AssOperad, ComOperad, EndOperad, OperadError, check_operad_axioms

from instances import dg_algebra, gauge_algebra, m3_algebra


@pytest.mark.parametrize("P", [AssOperad(4), ComOperad(4), EndOperad(2, [0, 1], max_arity=3)])
def test_strict_operads_square_zero(P):
    rep = check_square_zero(strict_from_operad(P), max_arity=P.max_arity)
    assert rep.passed, rep.witness


def test_non_associative_composition_breaks_square_zero():
    class Bad(AssOperad):
        def compose(self, i, a, b):
            out = super().compose(i, a, b)
            return {k: 2 * v for k, v in out.items()} if len(a) == 3 else out
    rep = check_square_zero(strict_from_operad(Bad(4)), max_arity=4)
    assert not rep.passed and rep.witness


@pytest.mark.parametrize("name,dims", [("ass", [1, 2, 6, 24]), ("com", [1, 1, 2, 6]), ("lie", [1, 1, 1, 1])])
def test_koszul_dual_dims_and_h0(name, dims):
    M = quadratic_model(name, 4)
    assert [len(M.dual.basis(n)) for n in range(1, 5)] == dims
    assert M.h0_dims() == {n: len(M.Q.basis(n)) for n in range(1, 5)}


def test_cobar_is_dg_operad():
    rep = check_operad_axioms(quadratic_model("ass", 4).cobar)
    assert rep.passed, rep.witness


def test_identity_morphism_checks():
    H = strict_from_operad(AssOperad(3))
    assert check_morphism(identity_morphism(H)).passed


def test_stasheff_on_gauge_example():
    W = gauge_algebra()
    assert all(W.ops.get(n) for n in range(1, 6))
    assert check_stasheff(W, 5).passed


def test_ainfinity_degree_check():
    with pytest.raises(OperadError):
        AInfinityAlgebra([0, 0], {2: {(1, 1): {1: 1}}, 3: {(1, 1, 1): {1: 1}}})


def random_algebra(seed):
    rng = random.Random(seed)
    degs = [0, 1, -1, 0]

    def table(n):
        out = {}
        for ins in itertools.product(range(1, 5), repeat=n):
            d = sum(degs[i - 1] for i in ins) + 2 - n
            out[ins] = {j: rng.randint(-2, 2) for j in range(1, 5) if degs[j - 1] == d}
        return out
    return AInfinityAlgebra(degs, {n: table(n) for n in (1, 2, 3)})


@pytest.mark.parametrize("seed", [1, 2])
def test_shifted_residual_matches_stasheff_up_to_sign(seed):
    # on arbitrary (non A-infinity) data the two residuals agree up to a global sign per input
    W = random_algebra(seed)
    H = ainfinity_homotopy_operad(W, 6)
    for n in range(1, 4):
        for ins in itertools.product(range(1, 5), repeat=n):
            a = stasheff_residual(W, ins)
            b = {int(k[1:]): v for k, v in shifted_residual(H, ["w%d" % i for i in ins]).items()}
            ratios = {b.get(k, 0) / a[k] if a.get(k) else None for k in set(a) | set(b)}
            assert ratios <= {Fraction(1), Fraction(-1)}, (ins, a, b)


def test_ainfinity_operads_square_zero():
    for W in (dg_algebra(), gauge_algebra(), m3_algebra()):
        rep = check_square_zero(ainfinity_homotopy_operad(W, 5))
        assert rep.passed, rep.witness


def test_dual_coalgebra_cobar_square_zero():
    D = ainfinity_dual_cooperad(gauge_algebra(), 5)
    Om = D.cobar
    assert all(not Om.d_vec(Om.d(k)) for k in Om.basis(1))


def test_decalage_sign_values():
    # (-1)^(n(n-1)/2 + 1 + sum (n - i) d_i)
    assert decalage_sign(1, [0]) == -1
    assert decalage_sign(2, [0, 0]) == 1
    assert decalage_sign(2, [1, 0]) == -1
    assert decalage_sign(2, [0, 1]) == 1
    assert decalage_sign(3, [0, 0, 0]) == 1
    assert decalage_sign(3, [1, 0, 0]) == 1
