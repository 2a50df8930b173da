"""Shared example objects for the tests."""
from fractions import Fraction

from hopd.homotopy import AInfinityAlgebra, ainfinity_gauge

# Q[x]/(x^2) on the basis 1, x
DUAL_NUMBERS = {(1, 1): {1: 1}, (1, 2): {2: 1}, (2, 1): {2: 1}}
# 2-dim nonabelian Lie algebra [e, f] = f
NONABELIAN = {(1, 2): {2: 1}, (2, 1): {2: -1}}


def dg_algebra():
    """A dg algebra on degrees 0, 1: m_1(e1) = e2, e1 the unit-like idempotent."""
    return AInfinityAlgebra([0, 1], {1: {(1,): {2: 1}}, 2: {(1, 1): {1: 1}, (2, 1): {2: 1}}})


def gauge_algebra(max_n=5):
    """The dg algebra transported along f_2, an A-infinity algebra with m_1..m_5 nonzero."""
    f2 = {(2, 2): {2: Fraction(1)}, (1, 2): {1: Fraction(2)}, (2, 1): {1: Fraction(-1)}}
    return ainfinity_gauge(dg_algebra(), f2, max_n)


def m3_algebra():
    """Degrees 1, 1, 2 with m_2(w1, w2) = m_2(w2, w1) = w3 and m_3(w1, w1, w1) = w3."""
    return AInfinityAlgebra([1, 1, 2], {2: {(1, 2): {3: 1}, (2, 1): {3: 1}}, 3: {(1, 1, 1): {3: 1}}})


def dual_numbers_mu(P):
    return P.from_table(2, lambda ins: DUAL_NUMBERS.get(ins, {}))
