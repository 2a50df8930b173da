"""Small helpers for permutations written as 1-based tuples: slot k goes to perm[k-1]."""

from __future__ import annotations

import itertools
from functools import lru_cache


def identity(n: int) -> tuple:
    return tuple(range(1, n + 1))


def compose(p: tuple, q: tuple) -> tuple:
    """p o q: apply q first."""
    return tuple(p[x - 1] for x in q)


def inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for k, x in enumerate(p, 1):
        out[x - 1] = k
    return tuple(out)


def transposition(n: int, j: int) -> tuple:
    """The adjacent transposition exchanging slots j and j+1."""
    p = list(range(1, n + 1))
    p[j - 1], p[j] = p[j], p[j - 1]
    return tuple(p)


@lru_cache(maxsize=None)
def all_perms(n: int) -> tuple:
    return tuple(tuple(p) for p in itertools.permutations(range(1, n + 1)))


@lru_cache(maxsize=None)
def adjacent_word(p: tuple) -> tuple:
    """
    Indices j_1, ..., j_r with p = s_{j_r} o ... o s_{j_1}, i.e. applying
    s_{j_1} first.  The word is reduced (bubble sort).
    """
    w = list(p)
    undo = []
    # swap values j, j+1 when they are inverted; this walks p back to identity
    while True:
        where = {x: k for k, x in enumerate(w)}
        for j in range(1, len(w)):
            if where[j + 1] < where[j]:
                w[where[j]], w[where[j + 1]] = j + 1, j
                undo.append(j)
                break
        else:
            break
    return tuple(reversed(undo))


def block_compose(pi: tuple, i: int, rho: tuple) -> tuple:
    """
    The permutation pi o_i rho of labels of a composite a o_i b.

    If a has its slots relabelled by pi and b by rho, then the composite of
    the relabelled elements at label pi(i) equals the composite a o_i b with
    its slots relabelled by the returned permutation.
    """
    n, m = len(pi), len(rho)
    j = pi[i - 1]

    def adj(label):
        return label if label < j else label + m - 1

    out = []
    for k in range(1, i):
        out.append(adj(pi[k - 1]))
    for r in range(1, m + 1):
        out.append(j + rho[r - 1] - 1)
    for k in range(i + 1, n + 1):
        out.append(adj(pi[k - 1]))
    return tuple(out)


def sign(p: tuple) -> int:
    s = 1
    p = list(p)
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                s = -s
    return s
