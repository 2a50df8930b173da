"""
Deformation complexes of operad maps.

``ConvolutionOperad(A, P)`` is Hom(A, P) for a cooperad A and an operad P.
Its basis key ``(a, p)`` is the map sending the basis element a of A to p
and every other basis element to 0; its degree is |p| - |a|.  Morphisms
out of the cobar construction of A are Maurer-Cartan elements of the
L-infinity algebra on its S-coinvariants, and perturbing by such an
element gives the deformation complex.
"""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from typing import Callable, Mapping

from . import perms as PM
from .exactlin import (Echelon, GradedMap, GradedSpace, axpy, cohomology, kernel, rank,
                       parity_sign, scale)
from .opd import (ID, CheckReport, Collection, Cooperad, EndOperad,
                  Operad, OperadError, PresentedOperad, SubCooperad, evaluate_tree,
                  generator_collection, key_str, map_labels, vec_str)
from .trees import Tree, corolla, n_vertices
from .homotopy import (HomotopyOperad, bar, cobar, cobar_structure)


class DeformationError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# --------------------------------------------------------------------------
# convolution operads


class ConvolutionOperad(Operad):
    """
    Hom(A, P) with (f o_i g) = gamma_i (f (x) g) Delta_i and
    D f = d_P f - (-1)^|f| f d_A.  The symmetric groups act by
    (s.f)(c) = s.f(s^-1.c).
    """

    def __init__(self, A: Cooperad, P: Operad, max_arity: int | None = None, name: str | None = None):
        super().__init__()
        self.A, self.P = A, P
        self.max_arity = min(max_arity or P.max_arity, A.max_arity, P.max_arity)
        self.name = name or "Hom(%s,%s)" % (A.name, P.name)
        self._dual: dict = {}

    def basis(self, n):
        if n > self.max_arity:
            return []
        return [(a, p) for a in self.A.basis(n) for p in self.P.basis(n)]

    def degree(self, key):
        a, p = key
        return self.P.degree(p) - self.A.degree(a)

    def arity(self, key):
        return self.P.arity(key[1])

    def _dual_action(self, n: int, perm: tuple) -> dict:
        """a -> {c: coef of a in s^-1.c}, the action on the dual basis."""
        ck = (n, perm)
        if ck not in self._dual:
            inv = PM.inverse(perm)
            tab: dict = {}
            for c in self.A.basis(n):
                for a, v in self.A.act(c, inv).items():
                    tab.setdefault(a, {})[c] = v
            self._dual[ck] = tab
        return self._dual[ck]

    def act(self, key, perm):
        a, p = key
        n = len(perm)
        out: dict = {}
        pv = self.P.act(p, perm)
        for c, v in self._dual_action(n, perm).get(a, {}).items():
            for q, w in pv.items():
                out[(c, q)] = out.get((c, q), 0) + v * w
        return {k: v for k, v in out.items() if v}

    def compose(self, i, f, g):
        a, p = f
        b, q = g
        n, m = self.A.arity(a), self.A.arity(b)
        if self._over(n + m - 1):
            return {}
        hits = self.A.cocompose_table(i, n, m).get((a, b))
        if not hits:
            return {}
        pq = self.P.compose(i, p, q)
        if not pq:
            return {}
        sign = parity_sign(self.degree(g) * self.A.degree(a))
        out: dict = {}
        for c, coef in hits:
            for r, w in pq.items():
                k = (c, r)
                out[k] = out.get(k, 0) + coef * w * sign
        return {k: v for k, v in out.items() if v}

    @property
    def unit(self):
        return {(ID, u): c for u, c in self.P.unit.items()}

    def has_differential(self):
        return self.A.has_differential() or self.P.has_differential()

    def _codiff(self, n: int) -> dict:
        """a -> {c: coef of a in d_A c}."""
        cache = self.__dict__.setdefault("_codiff_cache", {})
        if n not in cache:
            tab: dict = {}
            for c in self.A.basis(n):
                for a, v in self.A.d(c).items():
                    tab.setdefault(a, {})[c] = v
            cache[n] = tab
        return cache[n]

    def d(self, key):
        a, p = key
        out: dict = {}
        for q, v in self.P.d(p).items():
            axpy(out, {(a, q): 1}, v)
        s = -parity_sign(self.degree(key))
        for c, v in self._codiff(self.P.arity(p)).get(a, {}).items():
            axpy(out, {(c, p): 1}, s * v)
        return out


def convolution_operad(A: Cooperad, P: Operad, max_arity: int | None = None) -> ConvolutionOperad:
    return ConvolutionOperad(A, P, max_arity)


# --------------------------------------------------------------------------
# homotopy convolution


def _index_structure(D, max_arity: int) -> dict:
    """Tree -> [(generator c, coefficient of the tree in D(c))]."""
    idx: dict = {}
    for n in range(1, max_arity + 1):
        for c in D.C.basis(n):
            for t, v in D.structure(c).items():
                idx.setdefault(t, []).append((c, v))
    return idx


def convolution_sign(k: int, Fdeg: list, sdeg: list) -> int:
    """
    Sign for a tree with k vertices in DFS order: (-1)^k (-1)^(sum |f_v|)
    times the Koszul sign of moving each shifted map F_j past the
    shifted cooperad elements sa_i of the earlier vertices.
    """
    e = k + sum(f + 1 for f in Fdeg)
    for j in range(k):
        for i in range(j):
            e += Fdeg[j] * sdeg[i]
    return parity_sign(e)


def homotopy_convolution(D, P: Operad, max_weight: int | None = None, name: str | None = None) -> HomotopyOperad:
    """
    Hom(D, P) for a homotopy cooperad D and a dg operad P, as a homotopy
    operad on the collection of keys (c, p) with c a generator of D.  The
    component on a tree t composes the P-labels along t and pairs the
    C-labels with the part of the structure of D shaped like t.
    """
    N = min(D.max_arity, P.max_arity)
    A = D.C

    class _Coll(Collection):
        name = "Hom(%s,%s)" % (D.name, P.name)
        max_arity = N

        def basis(self, n):
            if n > N:
                return []
            return [(a, p) for a in A.basis(n) for p in P.basis(n)]

        def degree(self, key):
            return P.degree(key[1]) - A.degree(key[0])

        def arity(self, key):
            return P.arity(key[1])

    coll = _Coll()
    helper = ConvolutionOperad(_WithCounit(A), P, N)
    coll.act = helper.act
    index = _index_structure(D, N)

    def structure(t):
        labs = _dfs(t)
        ctree = map_labels(t, lambda lab: lab[0])
        out: dict = {}
        if len(labs) == 1:
            a, p = labs[0]
            for q, v in P.d(p).items():
                axpy(out, {(a, q): 1}, -v)
        hits = index.get(ctree)
        if not hits:
            return out
        gam = evaluate_tree(P, map_labels(t, lambda lab: lab[1]))
        if not gam:
            return out
        Fdeg = [P.degree(p) - A.degree(a) - 1 for a, p in labs]
        sdeg = [A.degree(a) + 1 for a, p in labs]
        sign = convolution_sign(len(labs), Fdeg, sdeg)
        for c, v in hits:
            for r, w in gam.items():
                axpy(out, {(c, r): 1}, sign * v * w)
        return out

    mw = max_weight or getattr(D.cobar, "max_weight", None)
    return HomotopyOperad(coll, structure, N, mw, name=name or coll.name)


def _dfs(t) -> list:
    out = []

    def walk(x):
        if isinstance(x, int):
            return
        out.append(x.label)
        for c in x.children:
            walk(c)
    walk(t)
    return out


class _WithCounit(Cooperad):
    """A reduced collection seen as a cooperad with zero decomposition, for the action only."""

    def __init__(self, C):
        self.C = C
        self.name = C.name
        self.max_arity = C.max_arity

    def basis(self, n):
        return self.C.basis(n)

    def degree(self, key):
        return self.C.degree(key)

    def arity(self, key):
        return self.C.arity(key)

    def act(self, key, perm):
        return self.C.act(key, perm)


# --------------------------------------------------------------------------
# quadratic models


def parse_relation(text: str) -> dict:
    """A signed sum of encoded trees, e.g. ``<m>(<m>(1,2),3) - <m>(1,<m>(2,3))``."""
    from .trees import parse
    out: dict = {}
    s = text.strip()
    pos = 0
    sign = 1
    coef = Fraction(1)
    while pos < len(s):
        ch = s[pos]
        if ch.isspace():
            pos += 1
        elif ch in "+-":
            sign = -1 if ch == "-" else 1
            pos += 1
        elif ch.isdigit():
            j = pos
            while j < len(s) and (s[j].isdigit() or s[j] == "/"):
                j += 1
            coef = Fraction(s[pos:j])
            pos = j
            while pos < len(s) and s[pos] in " *":
                pos += 1
        elif ch == "<":
            depth = 0
            j = pos
            while j < len(s):
                if s[j] == "(":
                    depth += 1
                elif s[j] == ")":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            t = parse(s[pos:j + 1])
            axpy(out, {t: 1}, sign * coef)
            sign, coef = 1, Fraction(1)
            pos = j + 1
        else:
            raise OperadError("unexpected character %r at column %d" % (ch, pos + 1))
    return out


MODELS = {
    "ass": ([("m", 2, 0, "regular")], ["<m>(<m>(1,2),3) - <m>(1,<m>(2,3))"]),
    "com": ([("c", 2, 0, "symmetric")], ["<c>(<c>(1,2),3) - <c>(1,<c>(2,3))"]),
    "lie": ([("b", 2, 0, "antisymmetric")],
            ["<b>(<b>(1,2),3) + <b>(<b>(2,3),1) + <b>(<b>(3,1),2)"]),
}


class QuadraticModel:
    """
    A binary quadratic operad Q with its bar construction B = BQ and the
    Koszul dual cooperad K inside it: in arity n, the cocycles among trees
    with n - 1 vertices (degree 1 - n).  ``cobar`` is the cobar
    construction of K, whose degree-0 cohomology recovers Q.
    """

    def __init__(self, name: str, Q: Operad, max_arity: int):
        if max_arity < 2:
            raise DeformationError("quadratic models need max_arity >= 2")
        if Q.basis(0) or len(Q.basis(1)) != 1:
            raise DeformationError("Q must be 1-reduced: Q(0) = 0 and Q(1) spanned by the unit")
        self.name = name
        self.Q = Q
        self.max_arity = max_arity
        self.bar = bar(Q, max_weight=max_arity - 1)
        spans = {}
        for n in range(2, max_arity + 1):
            top = [k for k in self.bar.basis(n) if k is not ID and n_vertices(k) == n - 1]
            spans[n] = kernel(top, {k: self.bar.d(k) for k in top})
        self.dual = SubCooperad(self.bar, spans, name="%s^!" % name)
        self._cobar = None

    @property
    def cobar(self):
        if self._cobar is None:
            self._cobar = cobar(self.dual, self.max_arity)
        return self._cobar

    def generator_keys(self) -> list:
        return [k for k in self.Q.basis(2)]

    def h0_dims(self) -> dict:
        """dim H^0(cobar(K)(n)) for 1 <= n <= max_arity."""
        Om = self.cobar
        out = {}
        for n in range(1, self.max_arity + 1):
            keys = Om.basis(n)
            deg = {k: Om.degree(k) for k in keys}
            sp = GradedSpace(keys, [deg[k] for k in keys])
            cols = {k: Om.d(k) for k in keys}
            dmap = GradedMap(sp, sp, 1, cols)
            out[n] = cohomology(dmap, dmap).dim(0)
        return out


@functools.lru_cache(maxsize=None)
def quadratic_model(name: str, max_arity: int = 4) -> QuadraticModel:
    key = name.lower()
    if key not in MODELS:
        raise DeformationError("unknown model %r (known: %s)" % (name, ", ".join(sorted(MODELS))))
    gens, rels = MODELS[key]
    X = generator_collection(gens, name=key)
    Q = PresentedOperad(X, [parse_relation(r) for r in rels], max_arity, name=key.capitalize())
    return QuadraticModel(key.capitalize(), Q, max_arity)


# --------------------------------------------------------------------------
# Maurer-Cartan elements from operad maps


@functools.lru_cache(maxsize=None)
def end_operad(dim: int, degrees: tuple | None = None, max_arity: int = 4) -> EndOperad:
    """Shared EndOperad instances, so cached convolution setups are reused."""
    return EndOperad(dim, list(degrees) if degrees else None, max_arity=max_arity)


def _cooperad_of(A):
    return A.dual if isinstance(A, QuadraticModel) else A


class ConvolutionLie:
    """
    The convolution operad Hom(A, P) (unit kept), its total L-infinity
    algebra and the one on S-coinvariants.
    """

    def __init__(self, A: Cooperad, P: Operad, max_arity: int | None = None):
        from .linf import coinvariant_linf, linf_from_operad
        self.A, self.P = A, P
        self.conv = ConvolutionOperad(A, P, max_arity)
        self.max_arity = self.conv.max_arity
        self.total = linf_from_operad(self.conv, keep_unit=True)
        self.linf = coinvariant_linf(self.total, self.conv, self.max_arity,
                                     name="L(%s)" % self.conv.name)
        self.cinv = self.linf.coinvariants

    def project(self, vec: Mapping) -> dict:
        from .linf import project_total
        return project_total(self.cinv, vec)

    def include(self, vec: Mapping) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.cinv[k[1]].include(k), c)
        return out


_SETUPS: dict = {}


def convolution_lie(A, P: Operad, max_arity: int | None = None) -> ConvolutionLie:
    """Cached ConvolutionLie for (A, P); A may be a QuadraticModel."""
    A = _cooperad_of(A)
    key = (id(A), id(P), max_arity)
    if key not in _SETUPS:
        _SETUPS[key] = (A, P, ConvolutionLie(A, P, max_arity))
    return _SETUPS[key][2]


def check_equivariant(A: Collection, P: Collection, data: Mapping, max_arity: int) -> CheckReport:
    """data(s.c) = s.data(c) for adjacent transpositions s."""
    rep = CheckReport()
    for n in range(1, max_arity + 1):
        for c in A.basis(n):
            if c is ID:
                continue
            for j in range(1, n):
                s = PM.transposition(n, j)
                rep.checked += 1
                lhs: dict = {}
                for c2, v in A.act(c, s).items():
                    axpy(lhs, data.get(c2, {}), v)
                rhs = P.act_vec(data.get(c, {}), s)
                if lhs != rhs:
                    rep.fail("map data is not equivariant at %s under s_%d" % (key_str(c), j))
    return rep


def generator_images(M: QuadraticModel, P: Operad, images: Mapping) -> dict:
    """
    Extend images of named generators of Q (name -> P(2) vector) to every
    basis key of Q(2) through the symmetric group action.
    """
    Q = M.Q
    out: dict = {}
    named = {Tree(g, (1, 2)): g for g in images}
    for q in Q.basis(2):
        for g_tree, g in named.items():
            for s in PM.all_perms(2):
                img = Q.act(g_tree, s)
                if set(img) == {q}:
                    out[q] = scale(P.act_vec(images[g], s), 1 / img[q])
                    break
            if q in out:
                break
        if q not in out:
            raise DeformationError("no image given for the generator %s" % key_str(q))
    return out


def data_from_generators(M: QuadraticModel, P: Operad, qimages: Mapping) -> dict:
    """Map data on K(2) (K the dual cooperad) from images of Q(2) basis keys."""
    data: dict = {}
    for c in M.dual.basis(2):
        if c is ID:
            continue
        val: dict = {}
        for t, coef in M.dual.vector(c).items():
            axpy(val, qimages.get(t.label, {}), coef)
        if val:
            data[c] = val
    return data


def generators_from_data(M: QuadraticModel, data: Mapping) -> dict:
    """Inverse of data_from_generators."""
    out: dict = {}
    for q in M.Q.basis(2):
        coords = M.dual.coordinates({corolla(2, q): Fraction(1)}, 2)
        val: dict = {}
        for c, v in coords.items():
            axpy(val, data.get(c, {}), v)
        out[q] = val
    return out


def mc_from_map(A, P: Operad, data: Mapping, max_arity: int | None = None):
    """
    The coinvariant element of Hom(A, P) given by map data (generator c of
    the cobar construction -> vector in P).  Raises when the data is not
    equivariant.
    """
    from .linf import MCElement
    S = convolution_lie(A, P, max_arity)
    rep = check_equivariant(S.A, P, data, S.max_arity)
    if not rep.passed:
        raise DeformationError("map data is not S-equivariant", rep.witness)
    total: dict = {}
    for c, vec in data.items():
        # arity-n data enters with weight 1/n!, matching the bracket on coinvariants
        w = Fraction(1, math.factorial(S.A.arity(c)))
        for p, v in vec.items():
            axpy(total, {(c, p): 1}, v * w)
    return MCElement(S.linf, S.project(total))


def map_from_mc(A, P: Operad, phi, max_arity: int | None = None) -> dict:
    """Read the map data off the averaged representative of phi."""
    S = convolution_lie(A, P, max_arity)
    vec = phi.vector if hasattr(phi, "vector") else phi
    out: dict = {}
    for (c, p), v in S.include(vec).items():
        axpy(out.setdefault(c, {}), {p: 1}, v * math.factorial(S.A.arity(c)))
    return {c: v for c, v in out.items() if v}


def mc_residual(A, P: Operad, phi, max_arity: int | None = None) -> dict:
    from .linf import mc_check
    S = convolution_lie(A, P, max_arity)
    return mc_check(S.linf, phi, bound=2)


def compatibility_residual(A, P: Operad, data: Mapping) -> dict:
    """
    phi(d c) - d_P phi(c) on each generator c, where phi is the operad map
    out of the cobar construction defined by the data: {c: residual}.
    """
    A = _cooperad_of(A)
    struct = cobar_structure(A)
    out: dict = {}
    for n in range(1, A.max_arity + 1):
        for c in A.basis(n):
            if c is ID:
                continue
            res: dict = {}
            for t, v in struct(c).items():
                labelled = map_labels(t, lambda lab: data.get(lab, {}))
                if all(_dfs(labelled)):
                    axpy(res, evaluate_tree(P, labelled), v)
            axpy(res, P.d_vec(data.get(c, {})), -1)
            if res:
                out[c] = res
    return out


# --------------------------------------------------------------------------
# deformation complexes and operad cohomology


EXACT, TRUNCATED = "EXACT", "TRUNCATED"


class DeformationComplex:
    """
    The coinvariant convolution L-infinity algebra perturbed by an MC
    element phi; ``D`` is its differential l~_1 as a sparse map on
    coinvariant keys.  Construction certifies D^2 = 0.
    """

    def __init__(self, setup: ConvolutionLie, phi, certify: bool = True):
        from .linf import mc_check, perturb
        self.setup = setup
        self.phi = phi
        L = setup.linf
        if phi.vector and not phi.positive:
            raise DeformationError("the base point must have arity grading >= 1")
        if mc_check(L, phi, bound=2):
            raise DeformationError("the base point is not a Maurer-Cartan element")
        self.linf = perturb(L, phi, bound=2, check_mc=False)
        self.space = L.space
        self.max_arity = setup.max_arity
        self.columns = {}
        for k in self.space.basis:
            v = self.linf.word_op(1, (k,))
            if v:
                self.columns[k] = v
        if certify:
            for k, col in self.columns.items():
                sq: dict = {}
                for j, c in col.items():
                    axpy(sq, self.columns.get(j, {}), c)
                if sq:
                    raise DeformationError("D^2 != 0", k)

    def arity(self, key) -> int:
        return key[1]

    def degree(self, key) -> int:
        return self.space.degree(key)

    def D(self, vec: Mapping) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.columns.get(k, {}), c)
        return out

    def map(self) -> GradedMap:
        return GradedMap(self.space, self.space, 1, self.columns)

    def degree_zero_target(self) -> bool:
        """True when P has all its basis elements in degree 0 up to the bound."""
        P = self.setup.P
        return all(P.degree(p) == 0 for n in range(1, self.max_arity + 1) for p in P.basis(n))


def deformation_complex(M, P: Operad, phi=None, data: Mapping | None = None,
                        max_arity: int | None = None) -> DeformationComplex:
    """
    L_A(P) for A a QuadraticModel (its dual cooperad) or a cooperad.  The
    base point is an MCElement, or map data on the cobar generators; with
    neither the zero element is used.
    """
    S = convolution_lie(M, P, max_arity)
    if phi is None:
        phi = mc_from_map(M, P, data or {}, max_arity)
    return DeformationComplex(S, phi)


def cell_flag(D: DeformationComplex, degree: int) -> str:
    """
    A degree is EXACT when P sits in degree 0 and degree + 2 <= max_arity:
    keys of arity above the bound then have degree >= max_arity, so the
    dropped part cannot touch degrees degree and degree + 1.
    """
    if D.degree_zero_target() and degree + 2 <= D.max_arity:
        return EXACT
    return TRUNCATED


def operad_cohomology(D: DeformationComplex, degrees=None) -> list:
    """
    Rows {degree, arity, dim, flag, representatives} of H(L_A(P), D).  The
    arity is that of the degree's keys (a string "a..b" if several).
    """
    H = cohomology(D.map(), D.map())
    degs = sorted(set(D.space.degrees)) if degrees is None else list(degrees)
    rows = []
    for k in degs:
        ars = sorted({D.arity(x) for x in D.space.in_degree(k)})
        if not ars:
            # empty cell: for a degree-0 target degree k lives in arity k + 1
            arity = k + 1 if D.degree_zero_target() and k >= 0 else "-"
        elif len(ars) == 1:
            arity = ars[0]
        else:
            arity = "%d..%d" % (ars[0], ars[-1])
        reps = [H.representatives[h] for h in H.space.in_degree(k)]
        rows.append({"degree": k, "arity": arity, "dim": H.dim(k), "flag": cell_flag(D, k),
                     "representatives": reps})
    return rows


def formal_deformation_check(D: DeformationComplex, phi_t: Mapping, N: int) -> dict:
    """
    MC residual of phi + sum_j t^j phi_t[j] in L (x) k[t]/t^N, returned as
    {j: residual} for 1 <= j < N.  The order-1 entry is D(phi_t[1]).
    """
    if phi_t.get(0):
        raise DeformationError("the family has a constant term in t", phi_t[0])
    L = D.setup.linf
    parts = {0: dict(D.phi.vector)}
    for j, v in phi_t.items():
        if 0 < j < N and v:
            parts[j] = dict(v)
    out = {j: {} for j in range(1, N)}
    # tensors[j]: words of the current length whose t-powers add up to j
    tensors = {0: {(): Fraction(1)}}
    for n in range(1, 3):
        nxt: dict = {}
        for j, T in tensors.items():
            for i, v in parts.items():
                if j + i >= N:
                    continue
                acc = nxt.setdefault(j + i, {})
                for w, c in T.items():
                    for k, x in v.items():
                        axpy(acc, {w + (k,): 1}, c * x)
        tensors = nxt
        for j, T in tensors.items():
            if j >= 1:
                axpy(out[j], L.apply(n, T), 1)
    return out


# --------------------------------------------------------------------------
# classical oracles


def _structure_table(table: Mapping) -> dict:
    return {tuple(k): {j: Fraction(c) for j, c in v.items() if c} for k, v in table.items()}


def associator_witness(dim: int, mult: Mapping):
    """First (a, b, c) with (ab)c != a(bc), or None."""
    m = _structure_table(mult)

    def prod(u, v):
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                axpy(out, m.get((i, j), {}), a * b)
        return out

    for a, b, c in itertools.product(range(1, dim + 1), repeat=3):
        ea, eb, ec = {a: 1}, {b: 1}, {c: 1}
        left = prod(prod(ea, eb), ec)
        right = prod(ea, prod(eb, ec))
        if left != right:
            return (a, b, c), left, right
    return None


def _oracle_rows(dims: dict, kernels: dict, images: dict, min_degree: int) -> list:
    return [{"degree": n - 1, "arity": n, "cochain_degree": n, "dim": dims[n], "flag": EXACT}
            if n >= 1 else
            {"degree": -1, "arity": 0, "cochain_degree": 0, "dim": dims[n], "flag": EXACT}
            for n in sorted(dims) if n >= min_degree]


def _check_degree_zero(V):
    degs = getattr(V, "degrees", None)
    if degs and any(degs):
        raise DeformationError("the oracles handle algebras concentrated in degree 0")


def hochschild_oracle(V, mult: Mapping, degree_max: int, min_degree: int = 0) -> list:
    """
    dim HH^n(V, V) for min_degree <= n <= degree_max from the cochain
    complex Hom(V^n, V).  With min_degree = 1 the complex starts at
    Hom(V, V), so the first entry counts all derivations.
    Rows carry degree = n - 1 and arity = n to line up with operad_cohomology.
    """
    _check_degree_zero(V)
    dim = V.dim if hasattr(V, "dim") else int(V)
    wit = associator_witness(dim, mult)
    if wit is not None:
        raise DeformationError("multiplication is not associative at %r: %s != %s"
                               % (wit[0], vec_str(wit[1]), vec_str(wit[2])), wit)
    m = _structure_table(mult)
    rng = range(1, dim + 1)

    def basis(n):
        return [(ins, j) for ins in itertools.product(rng, repeat=n) for j in rng]

    def delta(n, f):
        # f = (ins, j): the cochain sending e_ins to e_j; d f on e_(a_1..a_n+1)
        ins, j = f
        out: dict = {}
        for a in itertools.product(rng, repeat=n + 1):
            val: dict = {}
            if a[1:] == ins:
                axpy(val, m.get((a[0], j), {}), 1)
            for i in range(1, n + 1):
                for k, c in m.get((a[i - 1], a[i]), {}).items():
                    if a[:i - 1] + (k,) + a[i + 1:] == ins:
                        axpy(val, {j: 1}, parity_sign(i) * c)
            if a[:n] == ins:
                axpy(val, m.get((j, a[n]), {}), parity_sign(n + 1))
            for t, c in val.items():
                axpy(out, {(a, t): 1}, c)
        return out

    dims = {}
    lo = max(min_degree, 0)
    cols = {n: {f: delta(n, f) for f in basis(n)} for n in range(lo, degree_max + 1)}
    for n in range(lo, degree_max + 1):
        ker = len(kernel(basis(n), cols[n]))
        im = 0
        if n - 1 >= lo:
            im = rank_of(cols[n - 1].values())
        dims[n] = ker - im
    return _oracle_rows(dims, {}, {}, min_degree)


def rank_of(vectors) -> int:
    from .exactlin import rank
    return rank(vectors)


def jacobi_witness(dim: int, bracket: Mapping):
    """First failure of antisymmetry or the Jacobi identity, or None."""
    b = _structure_table(bracket)

    def br(u, v):
        out: dict = {}
        for i, a in u.items():
            for j, c in v.items():
                axpy(out, b.get((i, j), {}), a * c)
        return out

    for x, y in itertools.product(range(1, dim + 1), repeat=2):
        s = br({x: 1}, {y: 1})
        axpy(s, br({y: 1}, {x: 1}), 1)
        if s:
            return ("antisymmetry", (x, y))
    for x, y, z in itertools.combinations_with_replacement(range(1, dim + 1), 3):
        for p in sorted(set(itertools.permutations((x, y, z)))):
            a, bb, c = ({k: 1} for k in p)
            j = br(a, br(bb, c))
            axpy(j, br(bb, br(c, a)), 1)
            axpy(j, br(c, br(a, bb)), 1)
            if j:
                return ("jacobi", p)
    return None


def chevalley_eilenberg_oracle(g, bracket: Mapping, degree_max: int, min_degree: int = 0) -> list:
    """dim H^n(g; g) from the complex Hom(Lambda^n g, g), min_degree <= n <= degree_max."""
    _check_degree_zero(g)
    dim = g.dim if hasattr(g, "dim") else int(g)
    wit = jacobi_witness(dim, bracket)
    if wit is not None:
        raise DeformationError("bracket fails %s at %r" % wit, wit)
    b = _structure_table(bracket)
    rng = range(1, dim + 1)

    def basis(n):
        return [(ins, j) for ins in itertools.combinations(rng, n) for j in rng]

    def value(f, xs):
        """f on a tuple of basis indices (antisymmetric extension)."""
        ins, j = f
        if len(set(xs)) < len(xs) or tuple(sorted(xs)) != ins:
            return {}
        order = sorted(range(len(xs)), key=lambda i: xs[i])
        return {j: Fraction(PM.sign(tuple(o + 1 for o in order)))}

    def delta(n, f):
        out: dict = {}
        for xs in itertools.combinations(rng, n + 1):
            val: dict = {}
            for i in range(n + 1):
                rest = xs[:i] + xs[i + 1:]
                for t, c in value(f, rest).items():
                    axpy(val, b.get((xs[i], t), {}), parity_sign(i) * c)
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    rest = tuple(x for q, x in enumerate(xs) if q not in (i, j))
                    for k, c in b.get((xs[i], xs[j]), {}).items():
                        axpy(val, value(f, (k,) + rest), parity_sign(i + j) * c)
            for t, c in val.items():
                axpy(out, {(xs, t): 1}, c)
        return out

    dims = {}
    lo = max(min_degree, 0)
    cols = {n: {f: delta(n, f) for f in basis(n)} for n in range(lo, degree_max + 1)}
    for n in range(lo, degree_max + 1):
        ker = len(kernel(basis(n), cols[n]))
        im = rank_of(cols[n - 1].values()) if n - 1 >= lo else 0
        dims[n] = ker - im
    return _oracle_rows(dims, {}, {}, min_degree)


# --------------------------------------------------------------------------
# comparison of the two models


def extend_to_operad_map(M: QuadraticModel, P: Operad, qimages: Mapping) -> dict:
    """Images of every basis key of Q, composing the generator images along each normal form."""
    Q = M.Q
    gen = {}
    for q, v in qimages.items():
        gen[q.label] = v
    out = {}
    for n in range(1, M.max_arity + 1):
        for q in Q.basis(n):
            if q is ID:
                out[q] = dict(P.unit)
            else:
                out[q] = evaluate_tree(P, map_labels(q, lambda x: gen.get(x, {})))
    return out


def bar_model_data(M: QuadraticModel, P: Operad, qimages: Mapping) -> dict:
    """Map data on BQ: the one-vertex tree on q goes to phi(q), everything else to 0."""
    images = extend_to_operad_map(M, P, qimages)
    data = {}
    for n in range(2, M.max_arity + 1):
        for q in M.Q.basis(n):
            t = corolla(n, q)
            if images.get(q):
                data[t] = scale(images[q], BAR_MODEL_SIGN)
    return data


BAR_MODEL_SIGN = 1


def postcomposition_morphism(S_src: ConvolutionLie, S_tgt: ConvolutionLie, images: Mapping):
    """
    The strict L-infinity morphism Hom(A, P) -> Hom(A, P') induced by an
    operad map P -> P' given on basis keys of P (``images``).
    """
    from .linf import LInfinityMorphism

    def f1(word):
        total: dict = {}
        for (c, p), v in S_src.include({word[0]: 1}).items():
            for p2, w in images.get(p, {}).items():
                axpy(total, {(c, p2): 1}, v * w)
        return S_tgt.project(total)

    return LInfinityMorphism(S_src.linf, S_tgt.linf, {1: f1}, K=1)


def restriction_map(M: QuadraticModel, S_bar: ConvolutionLie, S_dual: ConvolutionLie) -> Callable:
    """Hom(BQ, P) -> Hom(K, P) induced by the inclusion K -> BQ, on coinvariant vectors."""
    K = M.dual
    coef: dict = {}
    for n in range(1, M.max_arity + 1):
        for c in K.basis(n):
            for t, v in K.vector(c).items():
                coef.setdefault(t, []).append((c, v))

    def apply(vec):
        total: dict = {}
        for (t, p), v in S_bar.include(vec).items():
            for c, w in coef.get(t, []):
                axpy(total, {(c, p): 1}, v * w)
        return S_dual.project(total)
    return apply


class ClassSolver:
    """Coordinates of cocycles in a chosen basis of cohomology classes in one degree."""

    def __init__(self, D: DeformationComplex, degree: int):
        self.ech = Echelon()
        for k in D.space.in_degree(degree - 1):
            col = D.columns.get(k)
            if col:
                self.ech.add(col)
        self.n_image = len(self.ech)
        H = cohomology(D.map(), D.map())
        self.reps = [H.representatives[h] for h in H.space.in_degree(degree)]

    def coordinates(self, z: Mapping) -> list:
        """Solve z = sum x_i rep_i + boundary."""
        cols = {("r", i): r for i, r in enumerate(self.reps)}
        cols.update({("b", i): r for i, r in enumerate(self.ech.rows)})
        target = dict(z)
        # solve by elimination on the augmented system
        keys = list(cols) + [("z", 0)]
        cols[("z", 0)] = scale(target, -1)
        ker = kernel(keys, cols)
        for v in ker:
            if v.get(("z", 0)):
                s = v[("z", 0)]
                return [v.get(("r", i), Fraction(0)) / s for i in range(len(self.reps))]
        raise DeformationError("vector is not a cocycle modulo boundaries")


def low_degree_compare(M: QuadraticModel, P: Operad, qimages: Mapping, k_max: int = 2) -> dict:
    """
    Cohomology of Hom(BQ, P) and Hom(K, P) (K the Koszul dual cooperad)
    twisted by the base points from the same operad map Q -> P, compared
    in degrees <= k_max through the restriction map.
    """
    N = M.max_arity
    if k_max + 2 > N:
        raise DeformationError("degrees <= %d need max_arity >= %d" % (k_max, k_max + 2))
    S_dual = convolution_lie(M.dual, P)
    S_bar = convolution_lie(M.bar, P)
    phi_dual = mc_from_map(M.dual, P, data_from_generators(M, P, qimages))
    phi_bar = mc_from_map(M.bar, P, bar_model_data(M, P, qimages))
    D_dual = DeformationComplex(S_dual, phi_dual)
    D_bar = DeformationComplex(S_bar, phi_bar)
    res = restriction_map(M, S_bar, S_dual)
    report = {"degrees": [], "equal": True}
    rows_dual = {r["degree"]: r for r in operad_cohomology(D_dual)}
    rows_bar = {r["degree"]: r for r in operad_cohomology(D_bar)}
    for k in range(0, k_max + 1):
        rd, rb = rows_dual.get(k), rows_bar.get(k)
        dd = rd["dim"] if rd else 0
        db = rb["dim"] if rb else 0
        flags = (cell_flag(D_dual, k), cell_flag(D_bar, k))
        solver = ClassSolver(D_dual, k)
        matrix = []
        for z in (rb["representatives"] if rb else []):
            img = res(z)
            if D_dual.D(img):
                raise DeformationError("restriction of a cocycle is not a cocycle", k)
            matrix.append(solver.coordinates(img))
        rk = rank([{i: x for i, x in enumerate(row) if x} for row in matrix])
        ok = dd == db and rk == dd
        report["degrees"].append({"degree": k, "dim_bar": db, "dim_dual": dd, "rank": rk,
                                  "matrix": matrix, "flags": flags, "equal": ok})
        report["equal"] = report["equal"] and ok
    return report
