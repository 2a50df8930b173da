from hypothesis import given, strategies as st

from hopd import perms as P


def perm_of(n):
    return st.permutations(list(range(1, n + 1))).map(tuple)


sizes = st.integers(1, 6)


@given(sizes.flatmap(lambda n: st.tuples(perm_of(n), perm_of(n), perm_of(n))))
def test_compose_associative(t):
    p, q, r = t
    assert P.compose(P.compose(p, q), r) == P.compose(p, P.compose(q, r))


@given(sizes.flatmap(perm_of))
def test_inverse(p):
    e = P.identity(len(p))
    assert P.compose(p, P.inverse(p)) == e == P.compose(P.inverse(p), p)


@given(sizes.flatmap(lambda n: st.tuples(perm_of(n), perm_of(n))))
def test_sign_is_multiplicative(t):
    p, q = t
    assert P.sign(P.compose(p, q)) == P.sign(p) * P.sign(q)


def test_compose_applies_right_factor_first():
    # slot k goes to perm[k-1]: q moves 1 -> 2, then p moves 2 -> 3
    p, q = (1, 3, 2), (2, 1, 3)
    pq = P.compose(p, q)
    assert pq[0] == p[q[0] - 1] == 3


def test_adjacent_word_rebuilds_permutation():
    for p in P.all_perms(4):
        acc = P.identity(4)
        for j in P.adjacent_word(p):
            acc = P.compose(P.transposition(4, j), acc)
        assert acc == p
        inversions = sum(1 for a in range(4) for b in range(a + 1, 4) if p[a] > p[b])
        assert len(P.adjacent_word(p)) == inversions


def test_all_perms_counts():
    assert [len(P.all_perms(n)) for n in range(1, 6)] == [1, 2, 6, 24, 120]
