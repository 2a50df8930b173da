"""
Rooted trees with labelled leaves.

A tree is a nested ``Tree(label, children)`` value.  Children are either
integers (leaves, labelled 1..n; the root leg is the implicit basepoint 0)
or subtrees.  ``label`` is ``None`` for bare trees and a basis key for trees
decorated by a collection.

A tree is *normalized* when the children of every vertex are sorted by the
smallest leaf label underneath them.  With distinct leaf labels and no
arity-0 vertices this is a canonical form: two leaf-labelled trees are
isomorphic iff their normal forms coincide, and normal forms have no
nontrivial automorphisms.

Vertices are addressed by paths: the root is ``()``, and the vertex in slot
``j`` (1-based) of vertex ``p`` is ``p + (j,)``.  The canonical vertex order
is depth-first preorder in slot order.

Canonical string grammar::

    tree  := label? "(" item ("," item)* ")"  |  label? "()"
    item  := INT | tree
    label := "<" text ">"        (text without unbalanced angle brackets)
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator

from .exactlin import axpy, koszul_sign


@dataclass(frozen=True)
class Tree:
    label: object
    children: tuple

    def __repr__(self):
        return encode(self)

    @property
    def arity(self) -> int:
        return len(self.children)


class TreeError(ValueError):
    pass


def corolla(n: int, label=None) -> Tree:
    return Tree(label, tuple(range(1, n + 1)))


# --------------------------------------------------------------------------
# basic queries


def is_leaf(x) -> bool:
    return isinstance(x, int)


def leaves(t) -> list:
    """Leaf labels in planar (left-to-right) order."""
    if is_leaf(t):
        return [t]
    out = []
    for c in t.children:
        out.extend(leaves(c))
    return out


def min_leaf(t) -> float:
    if is_leaf(t):
        return t
    best = math.inf
    for c in t.children:
        m = min_leaf(c)
        if m < best:
            best = m
    return best


def n_leaves(t) -> int:
    return len(leaves(t))


def vertex_paths(t: Tree) -> list:
    """All vertex paths in depth-first preorder."""
    out = []

    def walk(node, path):
        out.append(path)
        for j, c in enumerate(node.children, 1):
            if not is_leaf(c):
                walk(c, path + (j,))
    walk(t, ())
    return out


def n_vertices(t: Tree) -> int:
    if is_leaf(t):
        return 0
    return 1 + sum(n_vertices(c) for c in t.children)


def subtree_at(t: Tree, path: tuple) -> Tree:
    for j in path:
        t = t.children[j - 1]
    return t


def labels(t: Tree) -> list:
    """Vertex labels in canonical vertex order."""
    return [subtree_at(t, p).label for p in vertex_paths(t)]


def shape(t):
    """Forget decorations."""
    if is_leaf(t):
        return t
    return Tree(None, tuple(shape(c) for c in t.children))


def relabel_leaves(t, mapping):
    if is_leaf(t):
        return mapping[t]
    return Tree(t.label, tuple(relabel_leaves(c, mapping) for c in t.children))


def standardize_leaves(t):
    """Relabel leaves order-preservingly to 1..n.  Returns (tree, sorted old labels)."""
    old = sorted(leaves(t))
    return relabel_leaves(t, {a: i for i, a in enumerate(old, 1)}), old


def check_tree(t: Tree, allow_stumps: bool = False) -> None:
    ls = leaves(t)
    if sorted(ls) != list(range(1, len(ls) + 1)):
        raise TreeError("leaf labels must be exactly 1..n, got %r" % ls)

    def walk(node):
        if not node.children and not allow_stumps:
            raise TreeError("arity-0 vertex")
        for c in node.children:
            if not is_leaf(c):
                walk(c)
    walk(t)


# --------------------------------------------------------------------------
# encoding


def _label_str(label) -> str:
    if label is None:
        return ""
    if isinstance(label, Tree):
        return "<%s>" % encode(label)
    if isinstance(label, tuple):
        return "<%s>" % ",".join(_plain(x) for x in label)
    return "<%s>" % (label,)


def _plain(x) -> str:
    if isinstance(x, Tree):
        return encode(x)
    if isinstance(x, tuple):
        return "(%s)" % ",".join(_plain(y) for y in x)
    return str(x)


def encode(t) -> str:
    if is_leaf(t):
        return str(t)
    return "%s(%s)" % (_label_str(t.label), ",".join(encode(c) for c in t.children))


def parse(s: str) -> Tree:
    """Parse the canonical encoding; labels are returned as strings."""
    pos = 0

    def err(msg):
        raise TreeError("%s at column %d in %r" % (msg, pos + 1, s))

    def item():
        nonlocal pos
        if pos < len(s) and s[pos].isdigit():
            start = pos
            while pos < len(s) and s[pos].isdigit():
                pos += 1
            return int(s[start:pos])
        return node()

    def node():
        nonlocal pos
        label = None
        if pos < len(s) and s[pos] == "<":
            depth, start = 0, pos + 1
            while pos < len(s):
                if s[pos] == "<":
                    depth += 1
                elif s[pos] == ">":
                    depth -= 1
                    if depth == 0:
                        break
                pos += 1
            if pos >= len(s):
                err("unterminated label")
            label = s[start:pos]
            pos += 1
        if pos >= len(s) or s[pos] != "(":
            err("expected '('")
        pos += 1
        kids = []
        if pos < len(s) and s[pos] == ")":
            pos += 1
            return Tree(label, ())
        while True:
            kids.append(item())
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            if pos < len(s) and s[pos] == ")":
                pos += 1
                return Tree(label, tuple(kids))
            err("expected ',' or ')'")

    s = s.replace(" ", "")
    t = node()
    if pos != len(s):
        err("trailing characters")
    return t


# --------------------------------------------------------------------------
# normal forms


def normalize_shape(t):
    """Normal form of a bare (or decorated, ignoring actions) tree."""
    if is_leaf(t):
        return t
    kids = sorted((normalize_shape(c) for c in t.children), key=min_leaf)
    return Tree(t.label, tuple(kids))


def is_normalized(t) -> bool:
    if is_leaf(t):
        return True
    mins = [min_leaf(c) for c in t.children]
    return mins == sorted(mins) and all(is_normalized(c) for c in t.children)


def normalize(t: Tree, act: Callable | None = None, degree: Callable | None = None,
              start: list | None = None) -> dict:
    """
    Normal form of a decorated tree as a signed sum of normalized trees.

    ``act(label, perm)`` returns the relabelled decoration (a sparse vector)
    where slot k of the decoration is moved to slot ``perm[k-1]``.
    ``degree(label)`` gives the degree used for Koszul signs when the vertex
    order changes.  With ``act`` None decorations are left alone.
    """
    order: list = []

    def number(node):
        idx = len(order)
        order.append(node)
        kids = []
        for c in node.children:
            if is_leaf(c):
                kids.append(c)
            else:
                sub = number(c)
                kids.append(sub)
        return (idx, node.label, kids)

    root = number(t)
    degs = [0 if degree is None else degree(n.label) for n in order]
    if start is not None:
        by_pos = [0] * len(order)
        for i, p in enumerate(start):
            by_pos[p] = degs[i]

    def walk(rec):
        """Returns list of (coef, tree, ids-in-new-order)."""
        idx, label, kids = rec
        keyed = []
        for c in kids:
            if is_leaf(c):
                keyed.append((c, [(Fraction(1), c, [])]))
            else:
                opts = walk(c)
                keyed.append((min_leaf(opts[0][1]) if opts else math.inf, opts))
        if any(not opts for _, opts in keyed):
            return []
        perm_sorted = sorted(range(len(keyed)), key=lambda j: keyed[j][0])
        newpos = [0] * len(keyed)
        for pos, j in enumerate(perm_sorted, 1):
            newpos[j] = pos
        if act is None or label is None or newpos == sorted(newpos):
            labs = {label: Fraction(1)}
        else:
            labs = act(label, tuple(newpos))
        if not labs:
            return []
        out = []
        ordered = [keyed[j][1] for j in perm_sorted]
        for lab, lc in labs.items():
            for combo in itertools.product(*ordered):
                coef = lc
                ids = [idx]
                kids2 = []
                for c, sub, sids in combo:
                    coef *= c
                    kids2.append(sub)
                    ids.extend(sids)
                out.append((coef, Tree(lab, tuple(kids2)), ids))
        return out

    result: dict = {}
    for coef, tree, ids in walk(root):
        if degree is None:
            sign = 1
        elif start is None:
            sign = koszul_sign(ids, degs)
        else:
            sign = koszul_sign([start[i] for i in ids], by_pos)
        axpy(result, {tree: 1}, coef * sign)
    return result


# --------------------------------------------------------------------------
# grafting and contraction


def graft(s, t: Tree, x: int) -> Tree:
    """
    Graft the root of s onto leaf x of t (the composite t o_x s).

    Leaves of t below x keep their labels, the leaves of s become
    x..x+m-1 and the remaining leaves of t move up by m-1.
    """
    if x == 0:
        raise TreeError("cannot graft onto the basepoint")
    tl = leaves(t)
    if x not in tl:
        raise TreeError("%r is not a leaf of %s" % (x, encode(t)))
    m = n_leaves(s)
    tmap = {a: (a if a < x else a + m - 1) for a in tl if a != x}
    smap = {b: x + b - 1 for b in leaves(s)}
    s2 = relabel_leaves(s, smap)

    def walk(node):
        if is_leaf(node):
            return s2 if node == x else tmap[node]
        return Tree(node.label, tuple(walk(c) for c in node.children))
    return walk(t)


def is_connected(t: Tree, vset) -> bool:
    vset = set(vset)
    if not vset:
        return False
    tops = [p for p in vset if not (p and p[:-1] in vset)]
    return len(tops) == 1


def connected_subtrees(t: Tree) -> list:
    """All connected vertex sets (as sorted tuples of paths), in a fixed order."""
    out = []

    def grow(top):
        # all connected sets with top vertex `top`
        node = subtree_at(t, top)
        child_opts = []
        for j, c in enumerate(node.children, 1):
            if is_leaf(c):
                continue
            child_opts.append([()] + grow(top + (j,)))
        res = []
        for combo in itertools.product(*child_opts):
            s = (top,)
            for part in combo:
                s += part
            res.append(s)
        return res

    for p in vertex_paths(t):
        out.extend(grow(p))
    order = {p: i for i, p in enumerate(vertex_paths(t))}
    return [tuple(sorted(s, key=order.__getitem__)) for s in out]


def split_subtree(t: Tree, vset):
    """
    Cut out the connected vertex set ``vset`` of t.

    Returns ``(local, legs, rebuild)``: ``local`` is the subtree restricted to
    vset with its boundary legs relabelled 1..k in order of their smallest
    leaf in t; ``legs`` lists, per local leaf, the original child item (leaf
    or subtree of t); ``rebuild(label)`` returns t with vset replaced by a
    single vertex of that label (children in local leaf order).
    """
    vset = set(vset)
    if not is_connected(t, vset):
        raise TreeError("vertex set is not connected")
    top = min(vset, key=len)
    boundary = []

    def collect(path):
        node = subtree_at(t, path)
        for j, c in enumerate(node.children, 1):
            cp = path + (j,)
            if not is_leaf(c) and cp in vset:
                collect(cp)
            else:
                boundary.append(c)
    collect(top)
    order = sorted(range(len(boundary)), key=lambda i: min_leaf(boundary[i]))
    local_label = {i: pos for pos, i in enumerate(order, 1)}
    legs = [boundary[i] for i in order]
    counter = iter(range(len(boundary)))

    def local(path):
        node = subtree_at(t, path)
        kids = []
        for j, c in enumerate(node.children, 1):
            cp = path + (j,)
            if not is_leaf(c) and cp in vset:
                kids.append(local(cp))
            else:
                kids.append(local_label[next(counter)])
        return Tree(node.label, tuple(kids))
    loc = local(top)

    def rebuild(label):
        new = Tree(label, tuple(legs))

        def walk(node, path):
            if path == top:
                return new
            if is_leaf(node):
                return node
            return Tree(node.label, tuple(
                c if is_leaf(c) else walk(c, path + (j,))
                for j, c in enumerate(node.children, 1)))
        return walk(t, ())
    return loc, legs, rebuild


def contract(t: Tree, vset) -> Tree:
    """t/s: contract the connected vertex set to a single (bare) vertex."""
    _, _, rebuild = split_subtree(t, vset)
    return normalize_shape(shape(rebuild(None)))


# --------------------------------------------------------------------------
# automorphisms


@dataclass(frozen=True)
class TreeAutomorphism:
    vertex_map: tuple     # ((path, image path), ...)
    leg_maps: tuple       # ((path, (image slot of slot 1, ...)), ...)
    leaf_map: tuple       # ((leaf, image leaf), ...)

    def as_dicts(self):
        return dict(self.vertex_map), dict(self.leg_maps), dict(self.leaf_map)

    def compose(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        """self o other."""
        v1, g1, l1 = self.as_dicts()
        v2, g2, l2 = other.as_dicts()
        vm = {p: v1[v2[p]] for p in v2}
        gm = {p: tuple(g1[v2[p]][k - 1] for k in g2[p]) for p in g2}
        lm = {a: l1[l2[a]] for a in l2}
        return _mk_aut(vm, gm, lm)


def _mk_aut(vm, gm, lm) -> TreeAutomorphism:
    return TreeAutomorphism(tuple(sorted(vm.items())), tuple(sorted(gm.items())),
                            tuple(sorted(lm.items())))


def _isos(t, a, b, pa, pb, labelled):
    """All isomorphisms from subtree a (at path pa) to subtree b (at pb)."""
    if is_leaf(a) or is_leaf(b):
        if is_leaf(a) and is_leaf(b) and (not labelled or a == b):
            return [({}, {}, {a: b})]
        return []
    if len(a.children) != len(b.children):
        return []
    k = len(a.children)
    out = []
    for perm in itertools.permutations(range(k)):
        parts = []
        for j in range(k):
            sub = _isos(t, a.children[j], b.children[perm[j]],
                        pa + (j + 1,), pb + (perm[j] + 1,), labelled)
            if not sub:
                break
            parts.append(sub)
        else:
            for combo in itertools.product(*parts):
                vm = {pa: pb}
                gm = {pa: tuple(p + 1 for p in perm)}
                lm = {}
                for v, g, l in combo:
                    vm.update(v)
                    gm.update(g)
                    lm.update(l)
                out.append((vm, gm, lm))
    return out


def automorphisms(t: Tree, labelled: bool = True) -> list:
    """
    The automorphism group of t fixing the root leg.

    With ``labelled=True`` automorphisms must also fix every leaf label, so
    any tree with distinct leaf labels is rigid.  With ``labelled=False``
    leaves are interchangeable and the group of the underlying shape is
    returned, together with the induced permutation of leaf labels.
    """
    found = _isos(t, t, t, (), (), labelled)
    auts = sorted({_mk_aut(*x) for x in found}, key=lambda a: (a.leaf_map, a.leg_maps))
    return auts


# --------------------------------------------------------------------------
# enumeration


def set_partitions(items: tuple, k: int) -> Iterator[list]:
    """Partitions of ``items`` into exactly k nonempty blocks, blocks in first-element order."""
    items = tuple(items)
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    # first in a singleton block
    for p in set_partitions(rest, k - 1):
        yield [(first,)] + p
    # first joins an existing block
    for p in set_partitions(rest, k):
        for i in range(len(p)):
            yield sorted([p[j] if j != i else (first,) + p[j] for j in range(len(p))])


@lru_cache(maxsize=None)
def _gen(n: int, budget: int, arities: tuple | None, stumps: bool) -> tuple:
    """All normalized bare trees with leaves 1..n and at most `budget` vertices."""
    if budget <= 0:
        return ()
    out = []
    max_z = budget - 1 if stumps else 0
    for kk in range(0 if n == 0 else 1, n + 1):
        for z in range(0, max_z + 1):
            k = kk + z
            if arities is not None and k not in arities:
                continue
            if k == 0 and not stumps:
                continue
            blocks_iter = set_partitions(tuple(range(1, n + 1)), kk) if n else [[]]
            for blocks in blocks_iter:
                out.extend(_fill(blocks, z, budget - 1, arities, stumps))
    return tuple(out)


def _fill(blocks, z, budget, arities, stumps):
    # each block becomes a leaf (if singleton) or a subtree; z stumps appended
    choices = []
    for b in blocks:
        opts = []
        if len(b) == 1:
            opts.append((0, b[0]))
        for nb in range(1, budget + 1):
            for sub in _gen(len(b), nb, arities, stumps):
                if n_vertices(sub) == nb:
                    opts.append((nb, relabel_leaves(sub, dict(enumerate(b, 1)))))
        choices.append(opts)
    stump_opts = []
    if z:
        for nb in range(1, budget + 1):
            for sub in _gen(0, nb, arities, stumps):
                if n_vertices(sub) == nb:
                    stump_opts.append((nb, sub))
    res = []
    for combo in itertools.product(*choices):
        used = sum(c[0] for c in combo)
        if used > budget:
            continue
        if z:
            for sc in itertools.combinations_with_replacement(range(len(stump_opts)), z):
                u2 = used + sum(stump_opts[i][0] for i in sc)
                if u2 <= budget:
                    kids = tuple(c[1] for c in combo) + tuple(stump_opts[i][1] for i in sc)
                    res.append(Tree(None, kids))
        else:
            res.append(Tree(None, tuple(c[1] for c in combo)))
    return res


def enumerate_trees(n_leaves: int, max_vertices: int, arities=None,
                    allow_arity_zero: bool = False) -> list:
    """
    One normalized representative per isomorphism class of rooted trees with
    leaves labelled 1..n_leaves and at most ``max_vertices`` vertices.

    ``arities`` restricts the allowed vertex arities (number of inputs).
    Arity-0 vertices are excluded unless ``allow_arity_zero``; with them
    enabled the output still has one tree per class but stumps make some
    classes carry automorphisms.
    """
    if n_leaves < 0 or max_vertices < 1:
        raise TreeError("need n_leaves >= 0 and max_vertices >= 1")
    ar = None if arities is None else tuple(sorted(set(arities)))
    if not allow_arity_zero and ar is not None:
        ar = tuple(a for a in ar if a > 0)
    if ar is None and not allow_arity_zero:
        ar = tuple(range(1, n_leaves + 1))
    trees = _gen(n_leaves, max_vertices, ar, allow_arity_zero)
    uniq = {encode(t): t for t in trees}
    return [uniq[k] for k in sorted(uniq, key=lambda s: (len(s), s))]


# --------------------------------------------------------------------------
# planar structures


@dataclass(frozen=True)
class PlanarTree:
    tree: Tree            # children listed in planar order, original leaf labels
    vertex_order: tuple   # paths (in `tree`) in induced linear order
    leaf_order: tuple     # original leaf labels, left to right

    @property
    def planar_labelled(self) -> Tree:
        """The tree with leaves renamed 1..n from left to right."""
        return relabel_leaves(self.tree, {a: i for i, a in enumerate(self.leaf_order, 1)})


def planar_structures(t: Tree) -> list:
    """All planar structures on t: an ordering of the inputs at every vertex."""
    def walk(node):
        if is_leaf(node):
            return [node]
        kid_opts = [walk(c) for c in node.children]
        out = []
        for perm in itertools.permutations(range(len(node.children))):
            for combo in itertools.product(*(kid_opts[j] for j in perm)):
                out.append(Tree(node.label, tuple(combo)))
        return out
    res = []
    for pt in walk(t):
        res.append(PlanarTree(pt, tuple(vertex_paths(pt)), tuple(leaves(pt))))
    return res


def count_planar_structures(t: Tree) -> int:
    if is_leaf(t):
        return 1
    out = math.factorial(len(t.children))
    for c in t.children:
        out *= count_planar_structures(c)
    return out
