"""
L-infinity algebras in the shifted convention.

An ``LInfinity`` lives on a graded space g; the brackets are maps
l_n: S^n(g[-1]) -> g[-1] of degree +1, where g[-1] lowers every degree by
one.  Symmetric powers are realised as symmetric tensors inside the tensor
algebra (the invariant picture): a monomial x_1...x_n corresponds to
sum_s eps(s) x_s(1) (x) ... (x) x_s(n).

Brackets are stored as *word operators*: multilinear maps on tensor words.
Only their restriction to symmetric tensors carries meaning.  A tensor is a
dict mapping tuples of basis keys to coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from .exactlin import GradedSpace, axpy, koszul_sign, scale
from .opd import CheckReport, Coinvariants, key_str
from .trees import Tree, normalize
from .homotopy import HomotopyMorphism, HomotopyOperad, check_square_zero


class LInfinityError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# --------------------------------------------------------------------------
# tensors and shuffles


def tensor_product(u: Mapping, v: Mapping) -> dict:
    out: dict = {}
    for a, ca in u.items():
        for b, cb in v.items():
            axpy(out, {a + b: 1}, ca * cb)
    return out


def tensor_power(vec: Mapping, n: int) -> dict:
    """vec^{(x) n} for a vector (keys -> coef) as a tensor of words."""
    out = {(): Fraction(1)}
    single = {(k,): c for k, c in vec.items()}
    for _ in range(n):
        out = tensor_product(out, single)
    return out


@lru_cache(maxsize=None)
def shuffle_perms(p: int, q: int) -> tuple:
    """(p,q)-shuffles as position lists: the new word is (w[s[0]], w[s[1]], ...)."""
    out = []
    n = p + q
    for first in itertools.combinations(range(n), p):
        slots = [0] * n
        fi = iter(range(p))
        si = iter(range(p, n))
        fs = set(first)
        for pos in range(n):
            slots[pos] = next(fi) if pos in fs else next(si)
        out.append(tuple(slots))
    return tuple(out)


def shuffle(p: int, q: int, degrees) -> list:
    """The Koszul-signed (p,q)-shuffles on a word with the given degrees: [(sign, positions)]."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be non-negative")
    if len(degrees) != p + q:
        raise ValueError("need p+q degrees")
    return [(koszul_sign(s, list(degrees)), s) for s in shuffle_perms(p, q)]


def apply_shuffle(p: int, q: int, tensor: Mapping, deg: Callable) -> dict:
    out: dict = {}
    for w, c in tensor.items():
        degs = [deg(x) for x in w]
        for s in shuffle_perms(p, q):
            axpy(out, {tuple(w[i] for i in s): 1}, c * koszul_sign(s, degs))
    return out


def symmetrize(word: tuple, deg: Callable) -> dict:
    """The symmetric tensor of the monomial word[0]...word[n-1]."""
    out: dict = {}
    degs = [deg(x) for x in word]
    for s in itertools.permutations(range(len(word))):
        axpy(out, {tuple(word[i] for i in s): 1}, koszul_sign(list(s), degs))
    return out


def asymmetry_witness(tensor: Mapping, deg: Callable):
    """A word and adjacent swap under which the tensor is not invariant, or None."""
    for w in sorted(tensor, key=key_str):
        c = tensor[w]
        for j in range(len(w) - 1):
            s = list(range(len(w)))
            s[j], s[j + 1] = s[j + 1], s[j]
            w2 = tuple(w[i] for i in s)
            sign = koszul_sign(s, [deg(x) for x in w])
            if tensor.get(w2, 0) != c * sign:
                return (w, j + 1)
    return None


# --------------------------------------------------------------------------
# planar trees and the symmetrization map


@lru_cache(maxsize=None)
def planar_trees(arities: tuple) -> tuple:
    """
    Planar trees whose vertices, in depth-first order, have the given
    arities.  Vertex labels are the DFS positions; leaves are numbered
    1, 2, ... from left to right.
    """
    n = len(arities)

    def build(pos):
        # all (tree, next position) for the subtree rooted at vertex `pos`
        k = arities[pos]
        results = []

        def fill(slot, nxt, kids):
            if slot == k:
                results.append((tuple(kids), nxt))
                return
            fill(slot + 1, nxt, kids + [None])
            if nxt < n:
                for sub, after in build(nxt):
                    fill(slot + 1, after, kids + [sub])
        fill(0, pos + 1, [])
        return [(("v", pos, kids), nxt) for kids, nxt in results]

    out = []
    for t, nxt in build(0):
        if nxt == n:
            counter = iter(range(1, 10 ** 6))

            def conv(node):
                _, pos, kids = node
                return Tree(pos, tuple(next(counter) if c is None else conv(c) for c in kids))
            out.append(conv(t))
    return tuple(out)


def planar_sum(word: tuple, arity: Callable, act: Callable, deg: Callable) -> dict:
    """i on one tensor word: the signed sum of normalized decorated trees."""
    out: dict = {}
    for t in planar_trees(tuple(arity(x) for x in word)):
        dec = _decorate(t, word)
        axpy(out, normalize(dec, act, deg), 1)
    return out


def _decorate(t: Tree, word):
    if isinstance(t, int):
        return t
    return Tree(word[t.label], tuple(_decorate(c, word) for c in t.children))


def symmetrize_i(C, tensor: Mapping, shift: int = -1) -> dict:
    """
    The map i from symmetric tensors of (+)C to decorated trees.  Vertex
    degrees are shifted by ``shift`` (the cofree cooperad on C[-1]).
    Non-symmetric input raises with an asymmetry witness.
    """
    deg = lambda k: C.degree(k) + shift
    wit = asymmetry_witness(tensor, deg)
    if wit is not None:
        raise LInfinityError("input is not a symmetric tensor", wit)
    out: dict = {}
    for w, c in tensor.items():
        axpy(out, planar_sum(w, C.arity, C.act, deg), c)
    return out


def symmetrize_i_coinv(C, cinv: Mapping[int, Coinvariants], tensor: Mapping, shift: int = -1) -> dict:
    """i on coinvariant words: include each factor through the averaging section first."""
    return symmetrize_i(C, _include_tensor(cinv, tensor), shift)


def _include_tensor(cinv, tensor):
    out: dict = {}
    for w, c in tensor.items():
        part = {(): Fraction(c)}
        for x in w:
            part = tensor_product(part, {(k,): v for k, v in cinv[x[1]].include(x).items()})
        axpy(out, part, 1)
    return out


# --------------------------------------------------------------------------
# L-infinity algebras


class LInfinity:
    """
    ``ops[n](word)`` returns l_n on a tensor word (a vector on g).
    ``grading(key)`` is the optional second grading; ``max_grading`` the
    bound above which brackets have been truncated away.  ``K`` is the
    largest n with a possibly nonzero bracket (None if unbounded).
    """

    def __init__(self, space: GradedSpace, ops: Mapping[int, Callable], K: int | None,
                 grading: Callable | None = None, max_grading: int | None = None,
                 name: str = "L"):
        self.space = space
        self.ops = dict(ops)
        self.K = K
        self.grading = grading
        self.max_grading = max_grading
        self.name = name
        self._cache: dict = {}

    def deg(self, key) -> int:
        """Degree in g[-1]."""
        return self.space.degree(key) - 1

    def word_op(self, n: int, word: tuple) -> dict:
        ck = (n, word)
        if ck not in self._cache:
            op = self.ops.get(n)
            self._cache[ck] = {} if op is None else dict(op(word))
        return self._cache[ck]

    def apply(self, n: int, tensor: Mapping) -> dict:
        out: dict = {}
        for w, c in tensor.items():
            if len(w) != n:
                raise ValueError("word of length %d passed to l_%d" % (len(w), n))
            axpy(out, self.word_op(n, w), c)
        return out

    def bracket(self, *xs) -> dict:
        """l_n on the monomial x_1...x_n (a symmetric tensor)."""
        return self.apply(len(xs), symmetrize(tuple(xs), self.deg))

    def word_grading(self, w) -> int:
        return sum(self.grading(x) for x in w) if self.grading else 0

    def max_n(self, m_bound: int) -> int:
        return m_bound if self.K is None else min(self.K, m_bound)


def l_nk(L: LInfinity, n: int, k: int, tensor: Mapping) -> dict:
    """l_n^k = Sh_{1,k} o (l_n (x) id^k) on a tensor of length n+k."""
    out: dict = {}
    for w, c in tensor.items():
        head = L.word_op(n, w[:n])
        if not head:
            continue
        tail = w[n:]
        part = {(y,) + tail: cy * c for y, cy in head.items()}
        axpy(out, apply_shuffle(1, k, part, L.deg), 1)
    return out


def coderivation_component(L: LInfinity, tensor: Mapping, m: int, target_len: int) -> dict:
    """Component of the coderivation from S^m into S^target_len."""
    n = m - target_len + 1
    if n < 1 or (L.K is not None and n > L.K):
        return {}
    return l_nk(L, n, target_len - 1, tensor)


def relation_residual(L: LInfinity, tensor: Mapping, m: int) -> dict:
    """sum_{n+k=m} l_{k+1}(l_n^k(X)) for a tensor of length m."""
    out: dict = {}
    for n in range(1, m + 1):
        k = m - n
        if L.K is not None and (n > L.K or k + 1 > L.K):
            continue
        inner = l_nk(L, n, k, tensor)
        if inner:
            axpy(out, L.apply(k + 1, inner), 1)
    return out


def symmetric_words(L: LInfinity, m: int):
    """Multisets of m basis keys within the grading bound, pruned by grading."""
    keys = list(L.space.basis)
    if L.grading is None or L.max_grading is None:
        for combo in itertools.combinations_with_replacement(range(len(keys)), m):
            yield tuple(keys[i] for i in combo)
        return
    order = sorted(range(len(keys)), key=lambda i: (L.grading(keys[i]), i))
    gr = [L.grading(keys[i]) for i in order]
    bound = L.max_grading

    def rec(start, left, budget, acc):
        if left == 0:
            yield tuple(keys[order[i]] for i in acc)
            return
        for j in range(start, len(order)):
            # the remaining picks all have grading >= gr[j]
            if gr[j] * left > budget:
                break
            yield from rec(j, left - 1, budget - gr[j], acc + [j])
    yield from rec(0, m, bound, [])


def check_linf_relations(L: LInfinity, up_to: int, words: Callable | None = None) -> CheckReport:
    """
    Evaluates the generalized Jacobi relations on every symmetric basis word
    of length m <= up_to (within the grading bound, so no truncated bracket
    can enter).  ``words(m)`` may restrict the tested words.
    """
    rep = CheckReport()
    for m in range(1, up_to + 1):
        gen = words(m) if words is not None else symmetric_words(L, m)
        for w in gen:
            X = symmetrize(w, L.deg)
            if not X:
                continue
            rep.checked += 1
            res = relation_residual(L, X, m)
            if res:
                rep.fail("relation m=%d fails on %s" % (m, " . ".join(key_str(x) for x in w)))
    return rep


# --------------------------------------------------------------------------
# brackets from homotopy operads


def total_space(H: HomotopyOperad) -> GradedSpace:
    keys = []
    for n in range(1, H.max_arity + 1):
        keys.extend(H.P.basis(n))
    return GradedSpace(keys, [H.P.degree(k) for k in keys], "(+)%s" % H.P.name)


def linf_from_homotopy(H: HomotopyOperad, variant: str = "total", check: bool = False) -> LInfinity:
    """
    Brackets l_n = sum over planar trees with n vertices of the structure
    map applied to the tree (the symmetrization map i followed by the
    structure).  ``variant`` is "total" (on (+)P) or "coinvariant" (on the
    S-coinvariants, through projection and averaging section).
    """
    if check:
        rep = check_square_zero(H)
        if not rep.passed:
            raise LInfinityError("homotopy operad is not square-zero", rep.witness)
    P = H.P
    N = H.max_arity
    deg = lambda k: P.degree(k) - 1
    cache: dict = {}

    def total_op(word):
        if word in cache:
            return cache[word]
        total_arity = sum(P.arity(x) for x in word) - len(word) + 1
        out: dict = {}
        if total_arity <= N and len(word) <= H.max_weight:
            for t, c in planar_sum(word, P.arity, P.act, deg).items():
                axpy(out, H.op(t), c)
        cache[word] = out
        return out

    grading = lambda k: P.arity(k) - 1
    # l_n lives on trees with n vertices: n <= N - 1 unless arity-1 keys exist
    nmax = max(N, H.max_weight)
    if variant == "total":
        ops = {n: total_op for n in range(1, nmax + 1)}
        return LInfinity(total_space(H), ops, None, grading, N - 1, name="L(%s)" % H.name)
    if variant != "coinvariant":
        raise ValueError("variant must be 'total' or 'coinvariant'")
    cinv = {n: Coinvariants(P, n) for n in range(1, N + 1)}
    keys = [k for n in range(1, N + 1) for k in cinv[n].keys]
    space = GradedSpace(keys, [cinv[k[1]].space.degree(k) for k in keys], "(+)_S %s" % P.name)

    def coinv_op(word):
        tens = _include_tensor(cinv, {word: Fraction(1)})
        out: dict = {}
        for w, c in tens.items():
            axpy(out, total_op(w), c)
        return project_total(cinv, out)

    ops = {n: coinv_op for n in range(1, nmax + 1)}
    L = LInfinity(space, ops, None, lambda k: k[1] - 1, N - 1, name="L_S(%s)" % H.name)
    L.coinvariants = cinv
    return L


def coinvariant_linf(L: LInfinity, C, max_arity: int, name: str | None = None) -> LInfinity:
    """
    The L-infinity algebra on the S-coinvariants of a total one: each
    coinvariant key is included by the averaging section, the total
    bracket applied, and the result projected back.
    """
    cinv = {n: Coinvariants(C, n) for n in range(1, max_arity + 1)}
    keys = [k for n in range(1, max_arity + 1) for k in cinv[n].keys]
    space = GradedSpace(keys, [cinv[k[1]].space.degree(k) for k in keys], "(+)_S %s" % C.name)

    def make(n):
        def op(word):
            out: dict = {}
            for w, c in _include_tensor(cinv, {word: Fraction(1)}).items():
                axpy(out, L.word_op(n, w), c)
            return project_total(cinv, out)
        return op

    ops = {n: make(n) for n in L.ops}
    LS = LInfinity(space, ops, L.K, lambda k: k[1] - 1, max_arity - 1, name=name or "%s_S" % L.name)
    LS.coinvariants = cinv
    return LS


def project_total(cinv, vec: Mapping) -> dict:
    """The projection (+)P -> (+)_S P."""
    by_n: dict = {}
    for k, c in vec.items():
        n = cinv[1].C.arity(k)
        by_n.setdefault(n, {})[k] = c
    out: dict = {}
    for n, v in by_n.items():
        axpy(out, cinv[n].project(v), 1)
    return out


def linf_from_operad(P, sign: Callable | None = None, keep_unit: bool = False) -> LInfinity:
    """
    Fast path for a strict dg operad: l_1 = -d, l_2 is the pre-Lie product
    sum_i a o_i b (with the binary sign of the strict structure), higher
    brackets vanish.  Agrees with linf_from_homotopy(strict_from_operad(P)).
    """
    from .homotopy import strict_from_operad, strict_sign
    H = strict_from_operad(P, keep_unit=keep_unit)
    sg = sign or strict_sign
    N = P.max_arity

    def op(word):
        if len(word) == 1:
            return scale(P.d(word[0]), -1)
        if len(word) == 2:
            a, b = word
            if P.arity(a) + P.arity(b) - 1 > N:
                return {}
            out: dict = {}
            for i in range(1, P.arity(a) + 1):
                axpy(out, P.compose(i, a, b), sg(P.degree(a)))
            return {k: v for k, v in out.items() if k in _key_set(H)}
        return {}

    ops = {1: op, 2: op}
    return LInfinity(total_space(H), ops, 2, lambda k: P.arity(k) - 1, N - 1, name="L(%s)" % P.name)


def _key_set(H):
    if not hasattr(H, "_keyset"):
        H._keyset = set(total_space(H).basis)
    return H._keyset


# --------------------------------------------------------------------------
# Maurer-Cartan elements


@dataclass
class MCElement:
    owner: LInfinity
    vector: dict
    positive: bool = False

    def __post_init__(self):
        for k in self.vector:
            if self.owner.space.degree(k) != 1:
                raise LInfinityError("MC elements have degree 1 in g", k)
        if self.owner.grading is not None:
            self.positive = all(self.owner.grading(k) >= 1 for k in self.vector)


def _series_bound(L: LInfinity, phi: MCElement, bound: int | None) -> int:
    if bound is not None:
        return bound
    if L.K is not None:
        return L.K
    if phi.positive and L.max_grading is not None:
        return L.max_grading
    raise LInfinityError("series does not terminate: give a bound or use a positively graded element")


def mc_check(L: LInfinity, phi: MCElement, bound: int | None = None) -> dict:
    """sum_n l_n(phi^{(x) n}); zero exactly for Maurer-Cartan elements."""
    nmax = _series_bound(L, phi, bound)
    out: dict = {}
    for n in range(1, nmax + 1):
        axpy(out, L.apply(n, tensor_power(phi.vector, n)), 1)
    return out


def perturb(L: LInfinity, phi: MCElement, bound: int | None = None, check_mc: bool = True) -> LInfinity:
    """l~_j(x) = sum_p l_{j+p}(Sh_{p,j}(phi^p (x) x))."""
    if check_mc and mc_check(L, phi, bound):
        raise LInfinityError("not a Maurer-Cartan element")
    nmax = _series_bound(L, phi, bound)
    pw = {p: tensor_power(phi.vector, p) for p in range(0, nmax + 1)}

    def make(j):
        def op(word):
            out: dict = {}
            for p in range(0, nmax - j + 1):
                X = apply_shuffle(p, j, tensor_product(pw[p], {word: 1}), L.deg)
                axpy(out, L.apply(j + p, X), 1)
            return out
        return op

    ops = {j: make(j) for j in range(1, nmax + 1)}
    return LInfinity(L.space, ops, L.K if L.K is not None else None, L.grading, L.max_grading,
                     name="%s^phi" % L.name)


# --------------------------------------------------------------------------
# morphisms


class LInfinityMorphism:
    def __init__(self, source: LInfinity, target: LInfinity, comps: Mapping[int, Callable],
                 K: int | None = None):
        self.source, self.target = source, target
        self.comps = dict(comps)
        self.K = K
        self._cache: dict = {}

    def word_op(self, n, word):
        ck = (n, word)
        if ck not in self._cache:
            f = self.comps.get(n)
            self._cache[ck] = {} if f is None else dict(f(word))
        return self._cache[ck]

    def apply(self, n, tensor):
        out: dict = {}
        for w, c in tensor.items():
            axpy(out, self.word_op(n, w), c)
        return out

    def coalgebra_component(self, tensor: Mapping, N: int, m: int) -> dict:
        """Component in S^m of the induced coalgebra map on a tensor of length N."""
        out: dict = {}
        for comp in _compositions(N, m):
            for w, c in tensor.items():
                part = {(): Fraction(c)}
                pos = 0
                for ni in comp:
                    val = self.word_op(ni, w[pos:pos + ni])
                    if not val:
                        part = {}
                        break
                    part = tensor_product(part, {(y,): cy for y, cy in val.items()})
                    pos += ni
                axpy(out, part, 1)
        return out


def _compositions(N, m):
    if m == 0:
        if N == 0:
            yield ()
        return
    for first in range(1, N - m + 2):
        for rest in _compositions(N - first, m - 1):
            yield (first,) + rest


def morphism_residual(f: LInfinityMorphism, X: Mapping, N: int) -> dict:
    S, T = f.source, f.target
    lhs: dict = {}
    for m in range(1, N + 1):
        if T.K is not None and m > T.K:
            continue
        Fm = f.coalgebra_component(X, N, m)
        if Fm:
            axpy(lhs, T.apply(m, Fm), 1)
    rhs: dict = {}
    for n in range(1, N + 1):
        k = N - n
        if S.K is not None and n > S.K:
            continue
        inner = l_nk(S, n, k, X)
        if inner:
            axpy(rhs, f.apply(k + 1, inner), 1)
    axpy(lhs, rhs, -1)
    return lhs


def check_linf_morphism(f: LInfinityMorphism, up_to: int, words: Callable | None = None) -> CheckReport:
    rep = CheckReport()
    for N in range(1, up_to + 1):
        gen = words(N) if words is not None else symmetric_words(f.source, N)
        for w in gen:
            X = symmetrize(w, f.source.deg)
            if not X:
                continue
            rep.checked += 1
            if morphism_residual(f, X, N):
                rep.fail("morphism relation N=%d fails on %s" % (N, " . ".join(key_str(x) for x in w)))
    return rep


def identity_linf_morphism(L: LInfinity) -> LInfinityMorphism:
    return LInfinityMorphism(L, L, {1: lambda w: {w[0]: Fraction(1)}}, K=1)


def linf_morphism_from_homotopy(F: HomotopyMorphism, L1: LInfinity | None = None,
                                L2: LInfinity | None = None) -> LInfinityMorphism:
    """f_n = sum over planar trees with n vertices of the components of F (total variant)."""
    H1, H2 = F.H1, F.H2
    L1 = L1 or linf_from_homotopy(H1)
    L2 = L2 or linf_from_homotopy(H2)
    P = H1.P
    N = H1.max_arity
    deg = lambda k: P.degree(k) - 1

    def comp(word):
        if sum(P.arity(x) for x in word) - len(word) + 1 > N or len(word) > H1.max_weight:
            return {}
        out: dict = {}
        for t, c in planar_sum(word, P.arity, P.act, deg).items():
            axpy(out, F.component(t), c)
        return out

    return LInfinityMorphism(L1, L2, {n: comp for n in range(1, max(N, H1.max_weight) + 1)})


def pushforward_mc(f: LInfinityMorphism, phi: MCElement, bound: int | None = None) -> MCElement:
    nmax = _series_bound(f.source, phi, bound)
    psi: dict = {}
    for n in range(1, nmax + 1):
        axpy(psi, f.apply(n, tensor_power(phi.vector, n)), 1)
    return MCElement(f.target, psi)


def perturb_morphism(f: LInfinityMorphism, phi: MCElement, bound: int | None = None) -> LInfinityMorphism:
    """f~_n(x) = sum_p f_{n+p}(Sh_{p,n}(phi^p (x) x)), from perturb(source, phi) to perturb(target, psi)."""
    psi = pushforward_mc(f, phi, bound)
    nmax = _series_bound(f.source, phi, bound)
    S2 = perturb(f.source, phi, bound)
    T2 = perturb(f.target, psi, nmax if bound is None and f.target.K is None and not psi.positive else bound)
    pw = {p: tensor_power(phi.vector, p) for p in range(0, nmax + 1)}
    deg = f.source.deg

    def make(n):
        def op(word):
            out: dict = {}
            for p in range(0, nmax - n + 1):
                X = apply_shuffle(p, n, tensor_product(pw[p], {word: 1}), deg)
                axpy(out, f.apply(n + p, X), 1)
            return out
        return op

    g = LInfinityMorphism(S2, T2, {n: make(n) for n in range(1, nmax + 1)})
    g.psi = psi
    return g
