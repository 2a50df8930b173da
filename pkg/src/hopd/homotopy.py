"""
Operads and cooperads up to homotopy.

A homotopy operad on a collection P is a square-zero coderivation of the
cofree cooperad on P[-1] (trees whose vertices are decorated by P, each
vertex lowering the degree by one).  It is determined by its components
``structure(t)``: for a decorated tree t with leaves 1..k this is the value
of the coderivation followed by projection onto P[-1], written as a vector
of P keys (an element of degree sum(|p_v|) - |t| + 2 in P).

Dually a homotopy cooperad on C is a square-zero derivation of the free
operad on C[1], given by its values on generators.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, Mapping

from .exactlin import axpy, koszul_sign, parity_sign, scale
from .opd import (ID, CheckReport, CofreeCooperad, Collection, Cooperad, FreeOperad,
                  Operad, OperadError, ReducedCollection, augmentation_ideal,
                  evaluate_tree, two_vertex_parts, map_labels, _tag_local,
                  _dfs_labels as dfs_labels)
from .trees import (Tree, connected_subtrees, encode, graft, corolla, leaves,
                    n_vertices, split_subtree, subtree_at, vertex_paths)


def edge_partitions(t: Tree):
    """All partitions of the vertices of t into connected blocks (by cutting edges)."""
    vp = vertex_paths(t)
    edges = [p for p in vp if p]
    for mask in range(1 << len(edges)):
        cut = {edges[e] for e in range(len(edges)) if mask >> e & 1}
        blocks: dict = {}
        for p in vp:
            top = p
            while top and top not in cut:
                top = top[:-1]
            blocks.setdefault(top, []).append(p)
        yield [tuple(blocks[b]) for b in sorted(blocks, key=vp.index)]


def tag_vertices(t: Tree) -> Tree:
    """Replace each label by (DFS index, label)."""
    return map_labels(_tag_local(t), lambda lab: (lab[1], lab[2]))


def untag(t: Tree) -> Tree:
    return map_labels(t, lambda lab: lab[1])


def contract_blocks(t: Tree, blocks, labels):
    """
    Replace each connected block of vertices by one vertex with the given
    label.  Returns the new tree and, per vertex in its DFS order, the index
    of the block it came from.
    """
    out = tag_vertices(map_labels(t, lambda lab: None))
    order = sorted(range(len(blocks)), key=lambda b: -len(min(blocks[b], key=len)))
    for b in order:
        _, _, rebuild = split_subtree(out, blocks[b])
        out = rebuild(("B", b))
    start = [lab[1] for lab in dfs_labels(out)]
    return map_labels(out, lambda lab: labels[lab[1]]), start


class HomotopyOperad:
    """
    A homotopy operad: underlying collection ``P`` (vertex decorations) and
    the structure maps.  ``bar`` is the cofree cooperad on P[-1] carrying
    the coderivation as its differential.
    """

    def __init__(self, P: Collection, structure: Callable[[Tree], Mapping], max_arity: int = 4,
                 max_weight: int | None = None, name: str = "H", strict_source: Operad | None = None):
        self.P = P
        self._structure = structure
        self.max_arity = max_arity
        self.name = name
        self.strict_source = strict_source
        if max_weight is None:
            max_weight = max(max_arity - 1, 1)
        self.bar = CofreeCooperad(P, max_arity, max_weight, shift=-1, name="B(%s)" % name,
                                  differential=self.coderivation)
        self.max_weight = max_weight
        self._cache: dict = {}

    def vdeg(self, label) -> int:
        return self.P.degree(label) - 1

    def op(self, t: Tree) -> dict:
        """The component on one decorated tree with leaves 1..k."""
        if t not in self._cache:
            self._cache[t] = dict(self._structure(t))
        return self._cache[t]

    def coderivation(self, key) -> dict:
        if key is ID:
            return {}
        vp = vertex_paths(key)
        degs = [self.vdeg(subtree_at(key, p).label) for p in vp]
        tagged = tag_vertices(key)
        out: dict = {}
        for vs in connected_subtrees(key):
            loc, legs, rebuild = split_subtree(tagged, vs)
            val = self.op(untag(loc))
            if not val:
                continue
            ids = [vp.index(p) for p in vs]
            rest = [q for q in range(len(vp)) if q not in ids]
            sign = koszul_sign(ids + rest, degs)
            pos = {q: 1 + r for r, q in enumerate(rest)}
            for y, c in val.items():
                new = rebuild((-1, y))
                start = [0 if q == -1 else pos[q] for q, _ in dfs_labels(new)]
                axpy(out, self.bar.normal(untag(new), start), c * sign)
        return out

    def coderivation_vec(self, vec: Mapping) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.coderivation(k), c)
        return out

    def arity_of(self, t: Tree) -> int:
        return len(leaves(t))


# --------------------------------------------------------------------------
# strict operads


def strict_sign(a_deg: int) -> int:
    """Sign relating the binary component of strict(P) to the composition."""
    return parity_sign(a_deg)


def strict_from_operad(P: Operad, max_weight: int | None = None, name: str | None = None,
                       keep_unit: bool = False) -> HomotopyOperad:
    """
    The homotopy operad of a dg operad: the one-vertex component is -d and
    the two-vertex component is the partial composition, up to a sign
    depending on the degree of the upper vertex.  Augmented operads lose
    their unit unless ``keep_unit`` is set.
    """
    Pbar = P if keep_unit else augmentation_ideal(P)

    def structure(t: Tree):
        nv = n_vertices(t)
        if nv == 1:
            return scale(P.d(t.label), -1)
        if nv == 2:
            return scale(evaluate_tree(P, t), strict_sign(P.degree(t.label)))
        return {}

    if max_weight is None:
        max_weight = max(P.max_arity - 1, 1)
    return HomotopyOperad(Pbar, structure, P.max_arity, max_weight,
                          name=name or "strict(%s)" % P.name, strict_source=P)


class StrictOperad(Operad):
    """The dg operad underlying a strict homotopy operad."""

    def __init__(self, H: HomotopyOperad, unit: Mapping):
        super().__init__()
        self.H = H
        self._unit = dict(unit)
        self.name = "op(%s)" % H.name
        self.max_arity = H.max_arity
        self._units = set(self._unit)

    def basis(self, n):
        extra = [k for k in self._units if n == 1 and k not in self.H.P.basis(1)]
        return self.H.P.basis(n) + extra

    def degree(self, key):
        return 0 if key in self._units else self.H.P.degree(key)

    def arity(self, key):
        return 1 if key in self._units else self.H.P.arity(key)

    def act(self, key, perm):
        return {key: Fraction(1)} if key in self._units else self.H.P.act(key, perm)

    @property
    def unit(self):
        return dict(self._unit)

    def compose(self, i, a, b):
        if a in self._units and len(self._unit) == 1:
            return {b: Fraction(1)}
        if b in self._units and len(self._unit) == 1:
            return {a: Fraction(1)}
        n = self.arity(a)
        m = self.arity(b)
        if self._over(n + m - 1):
            return {}
        t = graft(corolla(m, b), corolla(n, a), i)
        return scale(self.H.op(t), strict_sign(self.degree(a)))

    def has_differential(self):
        return True

    def d(self, key):
        if key in self._units:
            return {}
        return scale(self.H.op(corolla(self.arity(key), key)), -1)


def operad_from_strict(H: HomotopyOperad, unit: Mapping | None = None) -> Operad:
    if not is_strict(H):
        raise OperadError("%s has nonzero components on trees with three or more vertices" % H.name)
    if H.strict_source is not None:
        return H.strict_source
    if unit is None:
        raise OperadError("a unit is needed to recover an operad")
    return StrictOperad(H, unit)


def _all_bar_keys(H: HomotopyOperad, max_arity=None, max_weight=None):
    N = min(max_arity or H.max_arity, H.max_arity)
    W = max_weight or H.max_weight
    for n in range(1, N + 1):
        for k in H.bar.basis(n):
            if k is not ID and n_vertices(k) <= W:
                yield k


def is_strict(H: HomotopyOperad) -> bool:
    for k in _all_bar_keys(H):
        if n_vertices(k) >= 3 and H.op(k):
            return False
    return True


def is_minimal(H: HomotopyOperad) -> bool:
    for n in range(1, H.max_arity + 1):
        for p in H.P.basis(n):
            if H.op(corolla(n, p)):
                return False
    return True


def check_square_zero(H: HomotopyOperad, max_arity: int | None = None,
                      max_weight: int | None = None, sample: int | None = None,
                      seed: int = 0) -> CheckReport:
    """
    Checks that the coderivation squares to zero on bar basis trees up to the
    given arity and weight.  With ``sample`` only that many trees per arity
    are drawn (seeded); the witness is the first tree with nonzero square.
    """
    rep = CheckReport()
    keys = list(_all_bar_keys(H, max_arity, max_weight))
    if sample is not None:
        rng = random.Random(seed)
        by_n: dict = {}
        for k in keys:
            by_n.setdefault(len(leaves(k)), []).append(k)
        keys = []
        for n in sorted(by_n):
            ks = by_n[n]
            keys.extend(ks if len(ks) <= sample else rng.sample(ks, sample))
    for k in keys:
        rep.checked += 1
        sq = H.coderivation_vec(H.coderivation(k))
        if sq:
            rep.fail("square of the coderivation is nonzero on %s" % encode(k))
    return rep


# --------------------------------------------------------------------------
# morphisms


class HomotopyMorphism:
    """
    A morphism H1 -> H2 given by components ``phi(t)`` (t a decorated tree of
    H1 with leaves 1..k, value a vector of H2 keys of degree sum|p_v| - |t| + 1).
    """

    def __init__(self, H1: HomotopyOperad, H2: HomotopyOperad, components: Callable[[Tree], Mapping]):
        self.H1, self.H2 = H1, H2
        self._phi = components
        self._cache: dict = {}

    def component(self, t: Tree) -> dict:
        if t not in self._cache:
            self._cache[t] = dict(self._phi(t))
        return self._cache[t]

    def on_bar(self, key) -> dict:
        """The induced cooperad map B(H1) -> B(H2) on one tree."""
        vp = vertex_paths(key)
        degs = [self.H1.vdeg(subtree_at(key, p).label) for p in vp]
        out: dict = {}
        for blocks in edge_partitions(key):
            locs = []
            for b in blocks:
                loc, _, _ = split_subtree(key, b)
                locs.append(self.component(loc))
            if any(not v for v in locs):
                continue
            perm = [vp.index(p) for b in blocks for p in b]
            sign = koszul_sign(perm, degs)
            for combo in itertools.product(*(list(v.items()) for v in locs)):
                coef = sign
                labs = []
                for lab, c in combo:
                    coef *= c
                    labs.append(lab)
                new, start = contract_blocks(key, blocks, labs)
                axpy(out, self.H2.bar.normal(new, start), coef)
        return out

    def on_bar_vec(self, vec):
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.on_bar(k), c)
        return out

    def project(self, vec) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.component(k), c)
        return out


def check_morphism(F: HomotopyMorphism, max_arity: int | None = None,
                   max_weight: int | None = None) -> CheckReport:
    """phi(D1 t) = (projection of D2)(F t) on all bar trees of H1."""
    rep = CheckReport()
    H2 = F.H2
    for k in _all_bar_keys(F.H1, max_arity, max_weight):
        rep.checked += 1
        lhs = F.project(F.H1.coderivation(k))
        rhs: dict = {}
        for t, c in F.on_bar(k).items():
            axpy(rhs, H2.op(t), c)
        if lhs != rhs:
            rep.fail("morphism relation fails on %s" % encode(k))
    return rep


def identity_morphism(H: HomotopyOperad) -> HomotopyMorphism:
    def phi(t):
        return {t.label: Fraction(1)} if n_vertices(t) == 1 else {}
    return HomotopyMorphism(H, H, phi)


def strict_morphism(H1: HomotopyOperad, H2: HomotopyOperad, f: Callable) -> HomotopyMorphism:
    """The morphism induced by a map of collections f (key -> vector) commuting with the structures."""
    def phi(t):
        return f(t.label) if n_vertices(t) == 1 else {}
    return HomotopyMorphism(H1, H2, phi)


# --------------------------------------------------------------------------
# homotopy cooperads, bar and cobar


class HomotopyCooperad:
    """
    A homotopy cooperad on C: a derivation of the free operad on C[1] given
    on generators by ``structure(c)``, a vector of decorated trees (leaves
    1..k, vertices labelled by keys of C).  ``cobar`` is that free operad.
    """

    def __init__(self, C: Collection, structure: Callable, max_arity: int = 4,
                 max_weight: int | None = None, name: str = "C"):
        self.C = C
        self.name = name
        self.max_arity = max_arity
        self._structure = structure
        self.cobar = FreeOperad(C, max_arity, max_weight, shift=1,
                                differential=self.structure, name="Omega(%s)" % name)

    def structure(self, c) -> dict:
        return self._structure(c)


def cobar_structure(C: Cooperad) -> Callable:
    """Generator values of the cobar differential of a dg cooperad."""
    def structure(c):
        out: dict = {}
        n = C.arity(c)
        for k, v in C.d(c).items():
            axpy(out, {corolla(n, k): 1}, -v)
        for t, v in C.infinitesimal(c).items():
            u, _, _ = two_vertex_parts(t)
            axpy(out, {t: 1}, v * cobar_sign(C.degree(u)))
        return out
    return structure


def cobar_sign(u_deg: int) -> int:
    """Sign of the two-vertex part of the cobar differential."""
    return -parity_sign(u_deg)


def cobar(C: Cooperad, max_arity: int | None = None, max_weight: int | None = None) -> FreeOperad:
    """The cobar construction of a (coaugmented) dg cooperad as a dg free operad."""
    N = max_arity or C.max_arity
    Cbar = ReducedCollection(C, drop=[ID])
    return FreeOperad(Cbar, N, max_weight, shift=1, differential=cobar_structure(C),
                      name="Omega(%s)" % C.name)


def homotopy_cooperad_from(C: Cooperad, max_arity=None) -> HomotopyCooperad:
    N = max_arity or C.max_arity
    return HomotopyCooperad(ReducedCollection(C, drop=[ID]), cobar_structure(C), N, name=C.name)


def bar(P: Operad, max_weight: int | None = None) -> CofreeCooperad:
    """The bar construction of a dg operad (augmentation ideal, shifted down)."""
    return strict_from_operad(P, max_weight).bar


# --------------------------------------------------------------------------
# A-infinity algebras as homotopy operads concentrated in arity 1


class AInfinityAlgebra:
    """
    An A-infinity algebra on a graded space with basis 1..dim.  ``ops[n]``
    maps an input tuple of basis indices to a vector over 1..dim (the
    unshifted m_n, of degree 2 - n).
    """

    def __init__(self, degrees: list, ops: Mapping[int, Mapping], name: str = "W"):
        self.degrees = list(degrees)
        self.dim = len(self.degrees)
        self.ops = {n: {tuple(k): {j: Fraction(c) for j, c in v.items() if c}
                        for k, v in tab.items()} for n, tab in ops.items()}
        self.name = name
        for n, tab in self.ops.items():
            for ins, v in tab.items():
                for j in v:
                    if self.deg(j) != sum(self.deg(i) for i in ins) + 2 - n:
                        raise OperadError("m_%d%r has the wrong degree" % (n, ins))

    def deg(self, i: int) -> int:
        return self.degrees[i - 1]

    def m(self, n: int, ins: tuple) -> dict:
        return dict(self.ops.get(n, {}).get(tuple(ins), {}))

    def m_vec(self, n: int, tensor: Mapping) -> dict:
        out: dict = {}
        for w, c in tensor.items():
            axpy(out, self.m(n, w), c)
        return out

    @property
    def max_n(self) -> int:
        return max((n for n, t in self.ops.items() if t), default=1)


def stasheff_residual(W: AInfinityAlgebra, ins: tuple) -> dict:
    """sum over r+s+t = n of (-1)^(rs+t) m_(r+1+t)(1^r (x) m_s (x) 1^t) on basis inputs."""
    n = len(ins)
    out: dict = {}
    for s in range(1, n + 1):
        for r in range(0, n - s + 1):
            t = n - r - s
            inner = W.m(s, ins[r:r + s])
            if not inner:
                continue
            sign = parity_sign(r * s + t) * parity_sign((2 - s) * sum(W.deg(i) for i in ins[:r]))
            for y, c in inner.items():
                axpy(out, W.m(r + 1 + t, ins[:r] + (y,) + ins[r + s:]), sign * c)
    return out


def check_stasheff(W: AInfinityAlgebra, up_to: int) -> CheckReport:
    rep = CheckReport()
    for n in range(1, up_to + 1):
        for ins in itertools.product(range(1, W.dim + 1), repeat=n):
            rep.checked += 1
            if stasheff_residual(W, ins):
                rep.fail("Stasheff relation fails on inputs %r" % (ins,))
    return rep


def decalage_sign(n: int, degs) -> int:
    """Sign of the shifted operation b_n relative to m_n on inputs of the given (unshifted) degrees."""
    e = n * (n - 1) // 2 + 1 + sum((n - i) * d for i, d in enumerate(degs, 1))
    return parity_sign(e)


def ladder(labels) -> Tree:
    """The arity-1 chain tree with the given labels from the root down."""
    t = 1
    for lab in reversed(list(labels)):
        t = Tree(lab, (t,))
    return t


def ladder_labels(t) -> list:
    out = []
    while not isinstance(t, int):
        out.append(t.label)
        t = t.children[0]
    return out


def ainfinity_collection(W: AInfinityAlgebra) -> Collection:
    from .opd import TableCollection
    keys = ["w%d" % i for i in range(1, W.dim + 1)]
    return TableCollection({1: keys}, {k: W.deg(i) for i, k in enumerate(keys, 1)}, {k: {} for k in keys},
                           name=W.name, max_arity=1)


def ainfinity_homotopy_operad(W: AInfinityAlgebra, max_weight: int | None = None) -> HomotopyOperad:
    """
    W as a homotopy operad in arity 1: the component on a ladder with
    labels x_1..x_n (root first) is the shifted operation b_n(x_1, ..., x_n).
    """
    C = ainfinity_collection(W)
    idx = {k: i for i, k in enumerate(C.basis(1), 1)}

    def structure(t):
        ins = tuple(idx[x] for x in ladder_labels(t))
        val = W.m(len(ins), ins)
        s = decalage_sign(len(ins), [W.deg(i) for i in ins])
        return {"w%d" % j: s * c for j, c in val.items()}

    mw = max_weight or max(W.max_n + 1, 4)
    return HomotopyOperad(C, structure, 1, mw, name=W.name)


def shifted_residual(H: HomotopyOperad, labels) -> dict:
    """The square of the coderivation on a ladder, projected to one vertex."""
    sq = H.coderivation_vec(H.coderivation(ladder(labels)))
    return {ladder_labels(t)[0]: c for t, c in sq.items() if n_vertices(t) == 1}


def shifted_operation(W: AInfinityAlgebra, n: int, ins: tuple) -> dict:
    """b_n on basis inputs: m_n with the decalage sign."""
    s = decalage_sign(n, [W.deg(i) for i in ins])
    return {j: s * c for j, c in W.m(n, ins).items()}


def ainfinity_dual_cooperad(W: AInfinityAlgebra, max_weight: int | None = None) -> HomotopyCooperad:
    """
    The dual A-infinity coalgebra as a homotopy cooperad in arity 1: the
    generator w_j* goes to the sum of ladders w_i1* ... w_in* weighted by
    the coefficient of w_j in b_n(w_i1, ..., w_in).
    """
    from .opd import TableCollection
    keys = ["w%d*" % i for i in range(1, W.dim + 1)]
    C = TableCollection({1: keys}, {k: -W.deg(i) for i, k in enumerate(keys, 1)},
                        {k: {} for k in keys}, name=W.name + "*", max_arity=1)
    table: dict = {}
    for n, tab in W.ops.items():
        for ins in tab:
            t = ladder(["w%d*" % i for i in ins])
            for j, c in shifted_operation(W, n, ins).items():
                axpy(table.setdefault("w%d*" % j, {}), {t: 1}, c)

    def structure(c):
        return dict(table.get(c, {}))

    mw = max_weight or max(W.max_n + 1, 4)
    return HomotopyCooperad(C, structure, 1, mw, name=W.name + "*")


def _compositions(n):
    if n == 0:
        yield ()
        return
    for k in range(1, n + 1):
        for rest in _compositions(n - k):
            yield (k,) + rest


def ainfinity_gauge(W: AInfinityAlgebra, f2: Mapping, max_n: int) -> AInfinityAlgebra:
    """
    Transport W along the A-infinity isomorphism with shifted components
    f_1 = id and f_2 (a table of degree-0 maps of shifted inputs).  The
    result is again an A-infinity algebra, usually with higher operations.
    """
    sd = lambda i: W.deg(i) - 1
    f2 = {tuple(k): {j: Fraction(c) for j, c in v.items()} for k, v in f2.items()}
    for ins, v in f2.items():
        for j in v:
            if sd(j) != sd(ins[0]) + sd(ins[1]):
                raise OperadError("f_2%r does not have shifted degree 0" % (ins,))

    def fcomp(k, w):
        if k == 1:
            return {w[0]: Fraction(1)}
        return dict(f2.get(w, {})) if k == 2 else {}

    def blocks(fn, word, cp):
        part = {(): Fraction(1)}
        pos = 0
        for k in cp:
            g = fn(k, word[pos:pos + k])
            pos += k
            part = {p + (y,): c * cy for p, c in part.items() for y, cy in g.items()}
        return part

    inv: dict = {}

    def gcomp(k, w):
        # the inverse coalgebra map, from G o F = id
        if k == 1:
            return {w[0]: Fraction(1)}
        if (k, w) not in inv:
            out: dict = {}
            for cp in _compositions(k):
                if len(cp) == k:
                    continue
                for ww, c in blocks(fcomp, w, cp).items():
                    axpy(out, gcomp(len(ww), ww), -c)
            inv[(k, w)] = out
        return inv[(k, w)]

    def coder(word):
        out: dict = {}
        for r in range(len(word)):
            for s in range(1, len(word) - r + 1):
                sg = parity_sign(sum(sd(i) for i in word[:r]))
                for y, c in shifted_operation(W, s, word[r:r + s]).items():
                    axpy(out, {word[:r] + (y,) + word[r + s:]: 1}, c * sg)
        return out

    ops: dict = {}
    for n in range(1, max_n + 1):
        tab = {}
        for w in itertools.product(range(1, W.dim + 1), repeat=n):
            Y: dict = {}
            for cp in _compositions(n):
                for ww, c in blocks(fcomp, w, cp).items():
                    axpy(Y, coder(ww), c)
            out: dict = {}
            for ww, c in Y.items():
                axpy(out, gcomp(len(ww), ww), c)
            if out:
                s = decalage_sign(n, [W.deg(i) for i in w])
                tab[w] = {j: s * c for j, c in out.items()}
        ops[n] = tab
    return AInfinityAlgebra(W.degrees, ops, name=W.name + "'")


def symmetrized_operation(W: AInfinityAlgebra, word: tuple) -> dict:
    """Oracle: sum over orderings of b_n, with Koszul signs of the shifted degrees."""
    n = len(word)
    out: dict = {}
    for p in itertools.permutations(range(n)):
        sign = koszul_sign(list(p), [W.deg(i) - 1 for i in word])
        axpy(out, shifted_operation(W, n, tuple(word[i] for i in p)), sign)
    return out
