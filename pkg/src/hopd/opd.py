"""
Symmetric collections, operads and cooperads over the rationals.

Elements are sparse vectors over basis keys.  Every basis key of arity n has
its inputs numbered 1..n, and ``act(key, perm)`` moves input k to position
``perm[k-1]``.  This is a left action: ``act(act(x, q), p) == act(x, p o q)``.

Partial composition ``compose(i, a, b)`` plugs b into input i of a; inputs
of b become i..i+m-1 and the later inputs of a shift up by m-1.  Results
above ``max_arity`` are dropped and counted in ``truncation_events``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from . import perms as P
from .exactlin import (Echelon, GradedSpace, axpy, koszul_sign, parity_sign, scale)
from .trees import (Tree, TreeError, encode, enumerate_trees, graft,
                    is_leaf, leaves, n_vertices, normalize, relabel_leaves,
                    standardize_leaves, vertex_paths, subtree_at)


class OperadError(ValueError):
    pass


class _Identity:
    """The operadic unit (or counit) basis key of a free construction."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "id"

    def __reduce__(self):
        return (_Identity, ())


ID = _Identity()


def key_str(key) -> str:
    """Deterministic text form of a basis key."""
    if isinstance(key, Tree):
        return encode(key)
    if isinstance(key, tuple):
        return "(" + ",".join(key_str(k) for k in key) + ")"
    return str(key)


def sort_keys(keys: Iterable) -> list:
    return sorted(keys, key=lambda k: (len(key_str(k)), key_str(k)))


def vec_str(vec: Mapping) -> str:
    if not vec:
        return "0"
    parts = []
    for k in sort_keys(vec):
        parts.append("%s*%s" % (vec[k], key_str(k)))
    return " + ".join(parts)


# --------------------------------------------------------------------------
# collections


class Collection:
    """A finite symmetric collection, truncated at ``max_arity``."""

    name = "C"
    max_arity = 4

    def basis(self, n: int) -> list:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def arity(self, key) -> int:
        raise NotImplementedError

    def act(self, key, perm: tuple) -> dict:
        raise NotImplementedError

    def space(self, n: int) -> GradedSpace:
        cache = self.__dict__.setdefault("_spaces", {})
        if n not in cache:
            b = self.basis(n)
            cache[n] = GradedSpace(b, [self.degree(k) for k in b], "%s(%d)" % (self.name, n))
        return cache[n]

    def act_vec(self, vec: Mapping, perm: tuple) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.act(k, perm), c)
        return out

    def dim(self, n: int) -> int:
        return len(self.basis(n))


class TableCollection(Collection):
    """
    A collection given by explicit bases and the action of adjacent
    transpositions: ``moves[key][j]`` is the image of key under s_j.
    """

    def __init__(self, bases: Mapping[int, list], degrees: Mapping, moves: Mapping,
                 name: str = "C", max_arity: int | None = None):
        self.bases = {n: list(b) for n, b in bases.items()}
        self.degrees = dict(degrees)
        self.moves = moves
        self.name = name
        self.max_arity = max_arity if max_arity is not None else max(self.bases, default=0)
        self._arity = {k: n for n, b in self.bases.items() for k in b}
        self._cache: dict = {}

    def basis(self, n):
        return list(self.bases.get(n, []))

    def degree(self, key):
        return self.degrees[key]

    def arity(self, key):
        return self._arity[key]

    def act(self, key, perm):
        perm = tuple(perm)
        ck = (key, perm)
        if ck not in self._cache:
            vec = {key: Fraction(1)}
            for j in P.adjacent_word(perm):
                out: dict = {}
                for k, c in vec.items():
                    axpy(out, self.moves[k][j], c)
                vec = out
            self._cache[ck] = vec
        return dict(self._cache[ck])


def generator_collection(gens: Iterable[tuple], name: str = "X") -> TableCollection:
    """
    Build a collection from generator specs ``(name, arity, degree, action)``.

    ``action`` is "symmetric", "antisymmetric", "trivial" (same as
    symmetric), "regular", or a pair ``(dim, {j: matrix})`` where column c
    of each matrix is the image of basis vector c under s_j.
    """
    bases: dict = {}
    degrees: dict = {}
    moves: dict = {}
    for gname, k, deg, action in gens:
        keys = []
        if action in ("symmetric", "trivial", "antisymmetric"):
            keys = [gname]
            s = -1 if action == "antisymmetric" else 1
            moves[gname] = {j: {gname: Fraction(s)} for j in range(1, k)}
        elif action == "regular":
            all_p = P.all_perms(k)
            names = {p: (gname if p == P.identity(k) else "%s.%s" % (gname, "".join(map(str, p))))
                     for p in all_p}
            # basis element p is the generator with inputs relabelled by p
            keys = [names[p] for p in all_p]
            for p in all_p:
                moves[names[p]] = {j: {names[P.compose(P.transposition(k, j), p)]: Fraction(1)}
                                   for j in range(1, k)}
        else:
            dim, mats = action
            keys = ["%s_%d" % (gname, c) for c in range(1, dim + 1)]
            for c, key in enumerate(keys):
                moves[key] = {}
                for j in range(1, k):
                    mat = mats.get(j)
                    if mat is None:
                        raise OperadError("missing action of s_%d on %s" % (j, gname))
                    moves[key][j] = {keys[r]: Fraction(mat[r][c]) for r in range(dim) if mat[r][c]}
        bases.setdefault(k, []).extend(keys)
        for key in keys:
            degrees[key] = deg
    return TableCollection(bases, degrees, moves, name=name)


# --------------------------------------------------------------------------
# operads


class Operad(Collection):
    """Base class: subclasses provide compose, unit, and optionally d."""

    name = "P"

    def __init__(self):
        self.truncation_events = 0

    def compose(self, i: int, a, b) -> dict:
        raise NotImplementedError

    @property
    def unit(self) -> dict:
        raise NotImplementedError

    def d(self, key) -> dict:
        return {}

    def has_differential(self) -> bool:
        return False

    def _over(self, n: int) -> bool:
        if n > self.max_arity:
            self.truncation_events = getattr(self, "truncation_events", 0) + 1
            return True
        return False

    def compose_vec(self, i: int, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for a, ca in u.items():
            for b, cb in v.items():
                axpy(out, self.compose(i, a, b), ca * cb)
        return out

    def d_vec(self, vec: Mapping) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.d(k), c)
        return out

    def augmented(self) -> bool:
        """True when P(1) is spanned by the unit and P(0) = 0."""
        return len(self.basis(1)) == 1 and not self.basis(0)


class AssOperad(Operad):
    """The associative operad: basis of Ass(n) is words (orderings of 1..n)."""

    name = "Ass"

    def __init__(self, max_arity: int = 4):
        super().__init__()
        self.max_arity = max_arity

    def basis(self, n):
        if n < 1 or n > self.max_arity:
            return []
        return [tuple(p) for p in P.all_perms(n)]

    def degree(self, key):
        return 0

    def arity(self, key):
        return len(key)

    def act(self, key, perm):
        return {tuple(perm[x - 1] for x in key): Fraction(1)}

    def compose(self, i, a, b):
        n, m = len(a), len(b)
        if self._over(n + m - 1):
            return {}
        out = []
        for x in a:
            if x < i:
                out.append(x)
            elif x == i:
                out.extend(y + i - 1 for y in b)
            else:
                out.append(x + m - 1)
        return {tuple(out): Fraction(1)}

    @property
    def unit(self):
        return {(1,): Fraction(1)}


class ComOperad(Operad):
    name = "Com"

    def __init__(self, max_arity: int = 4):
        super().__init__()
        self.max_arity = max_arity

    def basis(self, n):
        return [("com", n)] if 1 <= n <= self.max_arity else []

    def degree(self, key):
        return 0

    def arity(self, key):
        return key[1]

    def act(self, key, perm):
        return {key: Fraction(1)}

    def compose(self, i, a, b):
        n = a[1] + b[1] - 1
        if self._over(n):
            return {}
        return {("com", n): Fraction(1)}

    @property
    def unit(self):
        return {("com", 1): Fraction(1)}


class EndOperad(Operad):
    """
    End_V for a finite-dimensional graded V with basis e_1..e_d.

    The key ``(j, (i_1, ..., i_n))`` is the map sending e_{i_1} x ... x e_{i_n}
    to e_j and every other basis tensor to 0.  A key acted on by perm is the
    map g with g(w_1, ..., w_n) = +-f(w_perm[1], ..., w_perm[n]).
    """

    name = "End"

    def __init__(self, dim: int, degrees: list | None = None, max_arity: int = 4,
                 max_basis: int = 200000):
        super().__init__()
        self.vdim = dim
        self.vdeg = list(degrees) if degrees is not None else [0] * dim
        if len(self.vdeg) != dim:
            raise OperadError("need one degree per basis vector of V")
        self.max_arity = max_arity
        total = sum(dim ** (n + 1) for n in range(max_arity + 1))
        if total > max_basis:
            raise OperadError("End_V up to arity %d has %d basis elements, above the cap %d"
                              % (max_arity, total, max_basis))

    def basis(self, n):
        # arity 0 (the constants V) is left out: trees never carry stumps
        if n < 1 or n > self.max_arity:
            return []
        rng = range(1, self.vdim + 1)
        return [(j, ins) for ins in itertools.product(rng, repeat=n) for j in rng]

    def degree(self, key):
        j, ins = key
        return self.vdeg[j - 1] - sum(self.vdeg[i - 1] for i in ins)

    def arity(self, key):
        return len(key[1])

    def act(self, key, perm):
        j, ins = key
        n = len(ins)
        new = [0] * n
        for k in range(n):
            new[perm[k] - 1] = ins[k]
        # g(x_1..x_n) = f(x_perm[1], ..., x_perm[n]) reorders the inputs
        sign = koszul_sign([perm[k] - 1 for k in range(n)], [self.vdeg[x - 1] for x in new])
        return {(j, tuple(new)): sign}

    def compose(self, i, a, b):
        j, ins = a
        k, ins2 = b
        n = len(ins) + len(ins2) - 1
        if self._over(n):
            return {}
        if ins[i - 1] != k:
            return {}
        new = ins[:i - 1] + ins2 + ins[i:]
        s = parity_sign(self.degree(b) * sum(self.vdeg[x - 1] for x in ins[:i - 1]))
        return {(j, new): Fraction(s)}

    @property
    def unit(self):
        return {(j, (j,)): Fraction(1) for j in range(1, self.vdim + 1)}

    def evaluate(self, f: Mapping, inputs: tuple) -> dict:
        """f applied to a tensor of basis vectors (indices)."""
        out: dict = {}
        for (j, ins), c in f.items():
            if ins == tuple(inputs):
                axpy(out, {j: 1}, c)
        return out

    def from_table(self, n: int, table: Callable[[tuple], Mapping]) -> dict:
        """The element whose value on e_{i_1}..e_{i_n} is ``table(i)``, a vector over 1..dim."""
        out: dict = {}
        for ins in itertools.product(range(1, self.vdim + 1), repeat=n):
            for j, c in table(ins).items():
                if c:
                    axpy(out, {(j, ins): 1}, c)
        return out


def endomorphism_operad(dim: int, degrees: list | None = None, max_arity: int = 4) -> EndOperad:
    return EndOperad(dim, degrees, max_arity)


def act_on_vector(P_: Collection, vec: Mapping, perm: tuple) -> dict:
    return P_.act_vec(vec, perm)


def evaluate_tree(P_: Operad, tree) -> dict:
    """
    Compose a decorated tree in P.

    Vertex labels are basis keys of P (or sparse vectors); the children
    of a vertex fill its inputs in order, and the leaf labels say where each
    input of the composite goes.  Vertices are composed root first, then
    subtrees left to right, so no Koszul sign arises beyond P's own.
    """
    def ev(node):
        if is_leaf(node):
            return dict(P_.unit), [node]
        vec = dict(node.label) if isinstance(node.label, dict) else {node.label: Fraction(1)}
        order = []
        pos = 1
        for c in node.children:
            if is_leaf(c):
                order.append(c)
                pos += 1
                continue
            sub, lv = ev(c)
            vec = P_.compose_vec(pos, vec, sub)
            order.extend(lv)
            pos += len(lv)
        return vec, order

    vec, order = ev(tree)
    if sorted(order) != list(range(1, len(order) + 1)):
        raise TreeError("leaf labels of %s are not 1..n" % encode(tree))
    return P_.act_vec(vec, tuple(order))


# --------------------------------------------------------------------------
# axiom checks


@dataclass
class CheckReport:
    passed: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)

    def fail(self, msg: str):
        self.passed = False
        if len(self.failures) < 20:
            self.failures.append(msg)

    def merge(self, other: "CheckReport"):
        self.checked += other.checked
        if not other.passed:
            self.passed = False
            self.failures.extend(other.failures[: 20 - len(self.failures)])

    @property
    def witness(self):
        return self.failures[0] if self.failures else None


def _gen_perms(n):
    return [P.identity(n)] + [P.transposition(n, j) for j in range(1, n)]


def check_operad_axioms(P_: Operad, max_arity: int | None = None) -> CheckReport:
    """
    Equivariance, sequential and parallel associativity, unit, and the
    derivation properties of d, on all basis elements up to ``max_arity``.

    Equivariance is tested on the identity and adjacent transpositions,
    which generate each symmetric group.
    """
    N = min(max_arity or P_.max_arity, P_.max_arity)
    rep = CheckReport()
    B = {n: P_.basis(n) for n in range(0, N + 1)}
    dg = P_.degree
    unit = P_.unit

    for n in range(1, N + 1):
        for a in B[n]:
            rep.checked += 1
            left = P_.compose_vec(1, unit, {a: 1})
            if left != {a: 1}:
                rep.fail("left unit fails on %s" % key_str(a))
            for i in range(1, n + 1):
                right = P_.compose_vec(i, {a: 1}, unit)
                if right != {a: 1}:
                    rep.fail("right unit fails on %s at input %d" % (key_str(a), i))

    for n in range(1, N + 1):
        for m in range(0, N - n + 2):
            if not B.get(m):
                continue
            for a in B[n]:
                for b in B[m]:
                    for i in range(1, n + 1):
                        base = P_.compose(i, a, b)
                        for pi in _gen_perms(n):
                            for rho in _gen_perms(m):
                                rep.checked += 1
                                lhs = P_.compose_vec(pi[i - 1], P_.act(a, pi), P_.act(b, rho))
                                rhs = P_.act_vec(base, P.block_compose(pi, i, rho))
                                if lhs != rhs:
                                    rep.fail("equivariance fails: %s o_%d %s with %r, %r"
                                             % (key_str(a), i, key_str(b), pi, rho))
                        if P_.has_differential():
                            rep.checked += 1
                            lhs = P_.d_vec(base)
                            rhs = P_.compose_vec(i, P_.d(a), {b: 1})
                            axpy(rhs, P_.compose_vec(i, {a: 1}, P_.d(b)), parity_sign(dg(a)))
                            if lhs != rhs:
                                rep.fail("d is not a derivation on %s o_%d %s"
                                         % (key_str(a), i, key_str(b)))

    for n in range(1, N + 1):
        for m in range(0, N - n + 2):
            for l in range(0, N - n - m + 3):
                if max(n + m + l - 2, n + m - 1, n + l - 1) > N or not B.get(m) or not B.get(l):
                    continue
                for a in B[n]:
                    for b in B[m]:
                        for c in B[l]:
                            for i in range(1, n + 1):
                                ab = P_.compose(i, a, b)
                                for j in range(1, m + 1):
                                    rep.checked += 1
                                    lhs = P_.compose_vec(i + j - 1, ab, {c: 1})
                                    rhs = P_.compose_vec(i, {a: 1}, P_.compose(j, b, c))
                                    if lhs != rhs:
                                        rep.fail("sequential associativity fails: (%s o_%d %s) o_%d %s"
                                                 % (key_str(a), i, key_str(b), i + j - 1, key_str(c)))
                                for k in range(i + 1, n + 1):
                                    rep.checked += 1
                                    lhs = P_.compose_vec(k + m - 1, ab, {c: 1})
                                    rhs = P_.compose_vec(i, P_.compose(k, a, c), {b: 1})
                                    rhs = scale(rhs, parity_sign(dg(b) * dg(c)))
                                    if lhs != rhs:
                                        rep.fail("parallel associativity fails: %s, %s at %d, %s at %d"
                                                 % (key_str(a), key_str(b), i, key_str(c), k))

    if P_.has_differential():
        for n in range(0, N + 1):
            for a in B[n]:
                rep.checked += 1
                if P_.d_vec(P_.d(a)):
                    rep.fail("d^2 != 0 on %s" % key_str(a))
                for pi in _gen_perms(n):
                    if P_.d_vec(P_.act(a, pi)) != P_.act_vec(P_.d(a), pi):
                        rep.fail("d is not equivariant on %s" % key_str(a))
    return rep


# --------------------------------------------------------------------------
# coinvariants


class Coinvariants:
    """
    C(n)_{S_n} realised inside C(n) as the invariants.

    ``project`` sends a vector to coordinates of its average, ``include``
    sends a coordinate key to an invariant vector; project o include = id.
    """

    def __init__(self, C: Collection, n: int):
        self.C, self.n = C, n
        perms = P.all_perms(n)
        self._perms = perms
        order = {k: i for i, k in enumerate(C.basis(n))}
        self.echelon = Echelon(order=order.__getitem__)
        for k in C.basis(n):
            self.echelon.add(self.average({k: Fraction(1)}))
        self.keys = [("S", n, j) for j in range(len(self.echelon))]
        degs = [C.space(n).vector_degree(r) for r in self.echelon.rows]
        self.space = GradedSpace(self.keys, degs, "%s(%d)_S" % (C.name, n))

    def average(self, vec: Mapping) -> dict:
        out: dict = {}
        for p in self._perms:
            axpy(out, self.C.act_vec(vec, p), Fraction(1, len(self._perms)))
        return out

    def project(self, vec: Mapping) -> dict:
        coords = self.echelon.coordinates(self.average(vec))
        return {self.keys[j]: c for j, c in enumerate(coords) if c}

    def include(self, key) -> dict:
        return dict(self.echelon.rows[key[2]])

    def include_vec(self, vec: Mapping) -> dict:
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.include(k), c)
        return out


def coinvariants(C: Collection, n: int) -> Coinvariants:
    return Coinvariants(C, n)


# --------------------------------------------------------------------------
# tree modules: free operads and cofree cooperads


def map_labels(t, f):
    if is_leaf(t):
        return t
    return Tree(f(t.label), tuple(map_labels(c, f) for c in t.children))


def _dfs_labels(t) -> list:
    out = []

    def walk(node):
        if is_leaf(node):
            return
        out.append(node.label)
        for c in node.children:
            walk(c)
    walk(t)
    return out


def substitute_vertex(t: Tree, path: tuple, local: Tree):
    """
    Replace the vertex at ``path`` by the tree ``local`` whose leaves 1..k
    stand for the children of that vertex.  Returns the new tree and the
    tensor position of each of its vertices (DFS order), where the tensor
    order lists the old vertices with the local tree's vertices taking the
    place of the replaced one.
    """
    vp = vertex_paths(t)
    r = vp.index(path)
    nloc = n_vertices(local)
    idx = {p: q for q, p in enumerate(vp)}

    def tag_old(node, p):
        if is_leaf(node):
            return node
        if p == path:
            kids = node.children
            loc = relabel_leaves(local, {j: -j for j in range(1, len(kids) + 1)})

            def plug(x):
                if is_leaf(x):
                    c = kids[-x - 1]
                    return c if is_leaf(c) else tag_old(c, p + (-x,))
                return Tree(x.label, tuple(plug(y) for y in x.children))
            loc_tagged = _tag_local(loc)
            return plug(loc_tagged)
        return Tree((0, idx[p], node.label),
                    tuple(tag_old(c, p + (j,)) for j, c in enumerate(node.children, 1)))

    new = tag_old(t, ())
    start = []
    for tag, q, _ in _dfs_labels(new):
        if tag == 0:
            start.append(q if q < r else q + nloc - 1)
        else:
            start.append(r + q)
    return map_labels(new, lambda lab: lab[2]), start


def _tag_local(loc: Tree) -> Tree:
    counter = iter(range(10 ** 9))

    def walk(node):
        if is_leaf(node):
            return node
        lab = (1, next(counter), node.label)
        return Tree(lab, tuple(walk(c) for c in node.children))
    return walk(loc)


def graft_ordered(b: Tree, a: Tree, i: int):
    """a o_i b for decorated trees, with tensor positions (a's vertices first)."""
    na = n_vertices(a)
    ta = _tag_local(a)
    ta = map_labels(ta, lambda lab: (0, lab[1], lab[2]))
    tb = _tag_local(b)
    new = graft(tb, ta, i)
    start = [q if tag == 0 else na + q for tag, q, _ in _dfs_labels(new)]
    return map_labels(new, lambda lab: lab[2]), start


class TreeModule(Collection):
    """
    Normalized trees decorated by a collection X, shifted by ``shift`` per
    vertex.  The unit key ``ID`` (the trivial tree) lives in arity 1.
    """

    def __init__(self, gens: Collection, max_arity: int = 4, max_weight: int | None = None,
                 shift: int = 0, name: str | None = None):
        self.gens = gens
        self.max_arity = max_arity
        self.shift = shift
        ars = [k for k in range(0, max_arity + 1) if gens.basis(k)]
        if 0 in ars:
            raise OperadError("generators of arity 0 are not supported")
        if max_weight is None:
            if 1 in ars:
                raise OperadError("arity-1 generators need an explicit max_weight")
            max_weight = max(max_arity - 1, 1)
        self.max_weight = max_weight
        self.gen_arities = tuple(ars)
        self.name = name or "T(%s)" % gens.name
        self._basis: dict = {}
        self.truncation_events = 0

    def vdeg(self, label) -> int:
        return self.gens.degree(label) + self.shift

    def degree(self, key) -> int:
        if key is ID:
            return 0
        return sum(self.vdeg(l) for l in _dfs_labels(key))

    def arity(self, key) -> int:
        return 1 if key is ID else len(leaves(key))

    def weight(self, key) -> int:
        return 0 if key is ID else n_vertices(key)

    def basis(self, n):
        if n not in self._basis:
            out = [ID] if n == 1 else []
            if 1 <= n <= self.max_arity and self.gen_arities:
                for sh in enumerate_trees(n, self.max_weight, arities=self.gen_arities):
                    out.extend(self._decorate(sh))
            self._basis[n] = out
        return list(self._basis[n])

    def _decorate(self, sh: Tree) -> list:
        if is_leaf(sh):
            return [sh]
        opts = [self._decorate(c) for c in sh.children]
        res = []
        for lab in self.gens.basis(len(sh.children)):
            for combo in itertools.product(*opts):
                res.append(Tree(lab, tuple(combo)))
        return res

    def normal(self, tree, start=None) -> dict:
        return normalize(tree, self.gens.act, self.vdeg, start)

    def act(self, key, perm):
        if key is ID:
            return {ID: Fraction(1)}
        return self.normal(relabel_leaves(key, {k: perm[k - 1] for k in range(1, len(perm) + 1)}))

    def _too_big(self, tree) -> bool:
        if len(leaves(tree)) > self.max_arity or n_vertices(tree) > self.max_weight:
            self.truncation_events += 1
            return True
        return False


class FreeOperad(TreeModule, Operad):
    """
    The free operad on X (optionally with a derivation).

    ``differential(gen)`` returns the derivation on a generator as a sparse
    vector of decorated trees with leaves 1..k (any vertex order).
    """

    def __init__(self, gens, max_arity=4, max_weight=None, shift=0, differential=None,
                 name=None):
        TreeModule.__init__(self, gens, max_arity, max_weight, shift, name)
        self.gen_d = differential

    @property
    def unit(self):
        return {ID: Fraction(1)}

    def compose(self, i, a, b):
        if a is ID:
            if i != 1:
                raise OperadError("the unit has one input")
            return {b: Fraction(1)}
        if b is ID:
            return {a: Fraction(1)}
        t, start = graft_ordered(b, a, i)
        if self._too_big(t):
            return {}
        return self.normal(t, start)

    def has_differential(self):
        return self.gen_d is not None

    def d(self, key):
        if key is ID or self.gen_d is None:
            return {}
        out: dict = {}
        vp = vertex_paths(key)
        before = 0
        for p in vp:
            lab = subtree_at(key, p).label
            sgn = parity_sign(before)
            for loc, c in self.gen_d(lab).items():
                new, start = substitute_vertex(key, p, loc)
                if self._too_big(new):
                    continue
                axpy(out, self.normal(new, start), c * sgn)
            before += self.vdeg(lab)
        return out


def free_operad(gens: Collection, max_arity: int = 4, **kw) -> FreeOperad:
    return FreeOperad(gens, max_arity, **kw)


class PresentedOperad(Operad):
    """
    Free operad on X modulo the operadic ideal generated by relations.

    Basis keys are the normal-form tree monomials: the tree monomials that
    are not pivots of the ideal in each arity.
    """

    def __init__(self, gens: Collection, relations: list, max_arity: int = 4,
                 max_weight: int | None = None, name: str = "P"):
        super().__init__()
        self.free = FreeOperad(gens, max_arity, max_weight)
        self.gens = gens
        self.name = name
        self.max_arity = max_arity
        self.relations = []
        for r in relations:
            v: dict = {}
            for t, c in r.items():
                axpy(v, self.free.normal(t), c)
            if v:
                self.relations.append(v)
        self._ideal: dict = {}
        self._nf_basis: dict = {}
        self._build()

    def _build(self):
        N = self.max_arity
        fr = self.free
        for n in range(0, N + 1):
            fb = fr.basis(n)
            rank_of = {k: i for i, k in enumerate(fb)}
            ech = Echelon(order=lambda k, r=rank_of: -r[k])
            queue = [r for r in self.relations if fr.arity(next(iter(r))) == n]
            for k in range(2, n):
                m = n - k + 1
                for x in self._ideal[k].rows:
                    for a in fr.basis(m):
                        if a is ID:
                            continue
                        for i in range(1, m + 1):
                            queue.append(fr.compose_vec(i, {a: 1}, x))
                        for j in range(1, k + 1):
                            queue.append(fr.compose_vec(j, x, {a: 1}))
            while queue:
                v = queue.pop()
                if ech.add(v):
                    for j in range(1, n):
                        queue.append(fr.act_vec(v, P.transposition(n, j)))
            self._ideal[n] = ech
            piv = set(ech.pivots)
            self._nf_basis[n] = [k for k in fb if k not in piv]

    def reduce(self, vec: Mapping) -> dict:
        if not vec:
            return {}
        n = self.free.arity(next(iter(vec)))
        return self._ideal[n].reduce(vec)

    def basis(self, n):
        return list(self._nf_basis.get(n, []))

    def degree(self, key):
        return self.free.degree(key)

    def arity(self, key):
        return self.free.arity(key)

    def act(self, key, perm):
        return self.reduce(self.free.act(key, perm))

    def compose(self, i, a, b):
        if self._over(self.arity(a) + self.arity(b) - 1):
            return {}
        return self.reduce(self.free.compose(i, a, b))

    @property
    def unit(self):
        return {ID: Fraction(1)}

    def in_ideal(self, vec: Mapping) -> bool:
        return not self.reduce(vec)


# --------------------------------------------------------------------------
# cooperads


def two_vertex_parts(t: Tree):
    """(upper key, lower key, slot of the lower vertex) of a 2-vertex tree."""
    for j, c in enumerate(t.children, 1):
        if not is_leaf(c):
            return t.label, c.label, j
    raise OperadError("not a two-vertex tree: %s" % encode(t))


class Cooperad(Collection):
    """
    A cooperad given by its infinitesimal decomposition: ``infinitesimal(c)``
    is a sparse vector over normalized 2-vertex trees whose vertices are
    decorated by non-counit basis keys.  The counit key is ``ID``.
    """

    name = "C"

    def infinitesimal(self, key) -> dict:
        raise NotImplementedError

    def d(self, key) -> dict:
        return {}

    def has_differential(self) -> bool:
        return False

    def d_vec(self, vec):
        out: dict = {}
        for k, c in vec.items():
            axpy(out, self.d(k), c)
        return out

    def cocompose(self, i: int, key, m: int) -> dict:
        """The component of the decomposition in C(n-m+1) (x)_i C(m), as {(a, b): coef}."""
        if key is ID:
            return {(ID, ID): Fraction(1)} if (i, m) == (1, 1) else {}
        n = self.arity(key)
        out: dict = {}
        if m == 1:
            out[(key, ID)] = Fraction(1)
        if m == n and i == 1:
            out[(ID, key)] = out.get((ID, key), 0) + Fraction(1)
        block = list(range(i, i + m))
        for t, c in self.infinitesimal(key).items():
            u, l, j = two_vertex_parts(t)
            if sorted(leaves(t.children[j - 1])) == block:
                axpy(out, {(u, l): 1}, c)
        return out

    def cocompose_table(self, i: int, n: int, m: int) -> dict:
        """{(a, b): [(c, coef), ...]} for a in C(n), b in C(m), c in C(n+m-1)."""
        cache = self.__dict__.setdefault("_cotab", {})
        ck = (i, n, m)
        if ck not in cache:
            tab: dict = {}
            for c in self.basis(n + m - 1):
                for ab, coef in self.cocompose(i, c, m).items():
                    tab.setdefault(ab, []).append((c, coef))
            cache[ck] = tab
        return cache[ck]


class CofreeCooperad(TreeModule, Cooperad):
    """
    The cofree conilpotent cooperad on X: decorated trees, decomposed by
    cutting one internal edge.  ``differential`` (key -> vector) may be set
    afterwards to turn it into a dg cooperad.
    """

    def __init__(self, gens, max_arity=4, max_weight=None, shift=0, name=None,
                 differential=None):
        TreeModule.__init__(self, gens, max_arity, max_weight, shift, name)
        self.differential = differential

    def has_differential(self):
        return self.differential is not None

    def d(self, key):
        if key is ID or self.differential is None:
            return {}
        return self.differential(key)

    def infinitesimal(self, key):
        if key is ID:
            return {}
        vp = vertex_paths(key)
        degs = [self.vdeg(subtree_at(key, p).label) for p in vp]
        out: dict = {}
        for v in vp[1:]:
            lower = subtree_at(key, v)
            low_leaves = sorted(leaves(lower))
            cut = low_leaves[0]

            def rep(node, p):
                if p == v:
                    return cut
                if is_leaf(node):
                    return node
                return Tree(node.label, tuple(rep(c, p + (j,)) for j, c in enumerate(node.children, 1)))
            upper = rep(key, ())
            up_leaves = sorted(leaves(upper))
            u_key, _ = standardize_leaves(upper)
            l_key, _ = standardize_leaves(lower)
            kids = tuple(Tree(l_key, tuple(low_leaves)) if x == cut else x for x in up_leaves)
            two = Tree(u_key, kids)
            low_ids = [q for q, p in enumerate(vp) if p[:len(v)] == v]
            up_ids = [q for q in range(len(vp)) if q not in low_ids]
            sign = koszul_sign(up_ids + low_ids, degs)
            axpy(out, {two: 1}, sign)
        return out


def cofree_cooperad(gens: Collection, max_arity: int = 4, **kw) -> CofreeCooperad:
    return CofreeCooperad(gens, max_arity, **kw)


class SubCooperad(Cooperad):
    """
    The sub-cooperad spanned, in each arity, by given vectors of C (plus the
    counit).  Keys are ``("K", n, j)``; coordinates are read at pivots.
    """

    def __init__(self, C: Cooperad, spans: Mapping[int, list], name: str = "K"):
        self.C = C
        self.name = name
        self.max_arity = C.max_arity
        self.ech: dict = {}
        for n in range(0, C.max_arity + 1):
            order = {k: i for i, k in enumerate(C.basis(n))}
            e = Echelon(order=order.__getitem__)
            for v in spans.get(n, []):
                e.add(v)
            self.ech[n] = e
        self._deg = {}
        for n, e in self.ech.items():
            for j, r in enumerate(e.rows):
                self._deg[("K", n, j)] = C.space(n).vector_degree(r)

    def basis(self, n):
        out = [ID] if n == 1 else []
        return out + [("K", n, j) for j in range(len(self.ech.get(n, ())))]

    def degree(self, key):
        return 0 if key is ID else self._deg[key]

    def arity(self, key):
        return 1 if key is ID else key[1]

    def vector(self, key) -> dict:
        return {ID: Fraction(1)} if key is ID else dict(self.ech[key[1]].rows[key[2]])

    def coordinates(self, vec: Mapping, n: int) -> dict:
        coords = self.ech[n].coordinates(vec)
        return {("K", n, j): c for j, c in enumerate(coords) if c}

    def act(self, key, perm):
        if key is ID:
            return {ID: Fraction(1)}
        return self.coordinates(self.C.act_vec(self.vector(key), perm), key[1])

    def infinitesimal(self, key):
        if key is ID:
            return {}
        full: dict = {}
        for k, c in self.vector(key).items():
            axpy(full, self.C.infinitesimal(k), c)
        frames: dict = {}
        for t, c in full.items():
            u, l, j = two_vertex_parts(t)
            frame = Tree(None, tuple(x if is_leaf(x) else Tree(None, x.children) for x in t.children))
            frames.setdefault(frame, {}).setdefault(l, {})[u] = c
        out: dict = {}
        for frame, by_l in frames.items():
            j = next(q for q, x in enumerate(frame.children, 1) if not is_leaf(x))
            nu = len(frame.children)
            nl = len(frame.children[j - 1].children)
            # first the upper tensor factor, then the lower one
            rows: dict = {}
            for l, uvec in by_l.items():
                for a, ca in self.coordinates(uvec, nu).items():
                    rows.setdefault(a, {})[l] = ca
            for a, lvec in rows.items():
                for b, cb in self.coordinates(lvec, nl).items():
                    kids = tuple(x if is_leaf(x) else Tree(b, x.children) for x in frame.children)
                    axpy(out, {Tree(a, kids): 1}, cb)
        return out

    def d(self, key):
        if key is ID or not self.C.has_differential():
            return {}
        return self.coordinates(self.C.d_vec(self.vector(key)), key[1])

    def has_differential(self):
        return self.C.has_differential()


# --------------------------------------------------------------------------
# dimension oracle


def _shapes(n: int, max_v: int, arities: tuple):
    """Unlabelled rooted tree shapes as sorted nested tuples; a leaf is 'L'."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def gen(n, budget):
        out = set()
        if n == 1:
            out.add(("L", 0))
        if budget <= 0:
            return frozenset(out)
        for k in arities:
            for parts in _compositions_sorted(n, k):
                for combo in _child_choices(parts, budget - 1, gen):
                    used = sum(c[1] for c in combo)
                    kids = tuple(sorted((c[0] for c in combo), key=repr))
                    out.add((("V", kids), used + 1))
        return frozenset(out)

    return sorted({s for s, _ in gen(n, max_v) if s != "L"}, key=repr)


def _compositions_sorted(n, k):
    def rec(n, k, mx):
        if k == 0:
            if n == 0:
                yield ()
            return
        for first in range(min(n, mx), 0, -1):
            for rest in rec(n - first, k - 1, first):
                yield (first,) + rest
    return list(rec(n, k, n))


def _child_choices(parts, budget, gen):
    opts = [sorted(gen(p, budget), key=repr) for p in parts]
    for combo in itertools.product(*opts):
        if sum(c[1] for c in combo) <= budget:
            yield combo


def _shape_aut(s) -> int:
    if s == "L":
        return 1
    kids = s[1]
    out = 1
    for k in kids:
        out *= _shape_aut(k)
    from collections import Counter
    import math
    for mult in Counter(kids).values():
        out *= math.factorial(mult)
    return out


def _shape_vertex_arities(s) -> list:
    if s == "L":
        return []
    out = [len(s[1])]
    for k in s[1]:
        out.extend(_shape_vertex_arities(k))
    return out


def tree_module_dim_oracle(dims: Mapping[int, int], n: int, max_vertices: int) -> int:
    """
    dim of the tree module on a collection with dim X(k) = dims[k], at arity
    n, counted over unlabelled shapes as dim X^{(x)T} * n! / |Aut T|.  Valid
    because leaf labellings are a free Aut T-set.
    """
    import math
    ars = tuple(k for k, d in sorted(dims.items()) if d and k >= 1)
    total = Fraction(0)
    for s in _shapes(n, max_vertices, ars):
        prod = 1
        for k in _shape_vertex_arities(s):
            prod *= dims.get(k, 0)
        total += Fraction(prod * math.factorial(n), _shape_aut(s))
    if total.denominator != 1:
        raise OperadError("non-integral orbit count")
    return int(total)


class ReducedCollection(Collection):
    """C with some basis keys removed (the unit of an augmented operad, or a counit)."""

    def __init__(self, C: Collection, drop: Iterable = (ID,), name: str | None = None):
        self.C = C
        self.drop = set(drop)
        self.max_arity = C.max_arity
        self.name = name or C.name

    def basis(self, n):
        return [k for k in self.C.basis(n) if k not in self.drop]

    def degree(self, key):
        return self.C.degree(key)

    def arity(self, key):
        return self.C.arity(key)

    def act(self, key, perm):
        return self.C.act(key, perm)


def augmentation_ideal(P_: Operad) -> Collection:
    """P without its unit when P is augmented, otherwise P itself."""
    if P_.augmented():
        return ReducedCollection(P_, drop=list(P_.unit))
    return P_
