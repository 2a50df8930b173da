"""
Exact graded linear algebra over the rationals.

Vectors are plain dicts mapping basis keys to Fractions (zero entries are
never stored).  Spaces carry a finite basis of hashable keys, each with an
integer degree.  Maps are stored column-wise and are always homogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

Scalar = Fraction
Vec = dict

ZERO = Fraction(0)
ONE = Fraction(1)


# --------------------------------------------------------------------------
# sparse vectors


def axpy(acc: dict, vec: Mapping, coeff=1) -> dict:
    """acc += coeff * vec, in place; drops cancelled entries."""
    if not coeff:
        return acc
    for k, v in vec.items():
        x = acc.get(k, 0) + coeff * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def add_term(acc: dict, key, coeff) -> dict:
    if coeff:
        x = acc.get(key, 0) + coeff
        if x:
            acc[key] = x
        else:
            del acc[key]
    return acc


def scale(vec: Mapping, coeff) -> dict:
    if not coeff:
        return {}
    return {k: coeff * v for k, v in vec.items()}


def vsum(vecs: Iterable[Mapping]) -> dict:
    acc: dict = {}
    for v in vecs:
        axpy(acc, v)
    return acc


def linear_extend(fn: Callable[[Hashable], Mapping], vec: Mapping) -> dict:
    """Extend a function on basis keys linearly to a sparse vector."""
    acc: dict = {}
    for k, c in vec.items():
        axpy(acc, fn(k), c)
    return acc


def bilinear_extend(fn, u: Mapping, v: Mapping) -> dict:
    acc: dict = {}
    for a, ca in u.items():
        for b, cb in v.items():
            axpy(acc, fn(a, b), ca * cb)
    return acc


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def fstr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


# --------------------------------------------------------------------------
# signs


def koszul_sign(perm, degrees) -> Fraction:
    """
    Sign of reordering graded symbols x_0..x_{n-1} into (x_{perm[0]}, ..., x_{perm[n-1]}).

    Each transposition of two odd symbols contributes a factor -1.  The
    reordering by ``perm`` followed by ``sigma`` is the permutation
    ``[perm[s] for s in sigma]``, and signs multiply accordingly.
    """
    n = len(perm)
    if len(degrees) != n:
        raise ValueError("permutation of length %d but %d degrees" % (n, len(degrees)))
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of 0..%d: %r" % (n - 1, perm))
    odd = [degrees[p] % 2 for p in perm]
    sign = 1
    for a in range(n):
        if not odd[a]:
            continue
        pa = perm[a]
        for b in range(a + 1, n):
            if odd[b] and perm[b] < pa:
                sign = -sign
    return Fraction(sign)


def parity_sign(k: int) -> int:
    return -1 if k % 2 else 1


# --------------------------------------------------------------------------
# spaces and maps


class GradedSpace:
    """Finite-dimensional Z-graded rational vector space with a named basis."""

    def __init__(self, basis: Iterable[Hashable], degrees: Iterable[int], name: str = ""):
        self.basis = tuple(basis)
        self.degrees = tuple(int(d) for d in degrees)
        if len(self.basis) != len(self.degrees):
            raise ValueError("basis and degrees differ in length")
        self.index = {k: i for i, k in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise ValueError("basis keys are not unique")
        self._deg = dict(zip(self.basis, self.degrees))
        self.name = name

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], name: str = "") -> "GradedSpace":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs], name)

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, key):
        return key in self._deg

    def __iter__(self):
        return iter(self.basis)

    def degree(self, key) -> int:
        return self._deg[key]

    def in_degree(self, d: int) -> list:
        return [k for k in self.basis if self._deg[k] == d]

    def profile(self) -> dict:
        """Dimension in each degree."""
        out: dict = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def vector_degree(self, vec: Mapping):
        degs = {self._deg[k] for k in vec}
        if len(degs) > 1:
            raise ValueError("inhomogeneous vector")
        return degs.pop() if degs else None

    def __repr__(self):
        return "GradedSpace(%s%s)" % (self.name + ", " if self.name else "", self.profile())


def shift(V: GradedSpace, p: int) -> GradedSpace:
    """V[p] with V[p]^n = V^{n-p}: a degree-d element of V sits in degree d + p."""
    return GradedSpace(V.basis, [d + p for d in V.degrees], V.name and "%s[%d]" % (V.name, p))


@dataclass
class GradedMap:
    source: GradedSpace
    target: GradedSpace
    degree: int
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        cols = {}
        for i, col in self.columns.items():
            col = {k: frac(v) for k, v in col.items() if v}
            if not col:
                continue
            di = self.source.degree(i)
            for j in col:
                if self.target.degree(j) != di + self.degree:
                    raise ValueError(
                        "entry (%r, %r) violates degree %d" % (j, i, self.degree))
            cols[i] = col
        self.columns = cols

    @classmethod
    def from_function(cls, source, target, degree, fn) -> "GradedMap":
        return cls(source, target, degree, {k: fn(k) for k in source.basis})

    def __call__(self, vec: Mapping) -> dict:
        acc: dict = {}
        for k, c in vec.items():
            col = self.columns.get(k)
            if col:
                axpy(acc, col, c)
        return acc

    def entries(self) -> list:
        """Canonically ordered sparse triplets (target index, source index, value)."""
        out = []
        for i, col in self.columns.items():
            si = self.source.index[i]
            for j, v in col.items():
                out.append((self.target.index[j], si, v))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other."""
        if other.target.basis != self.source.basis:
            raise ValueError("shape mismatch in composition")
        return GradedMap(other.source, self.target, self.degree + other.degree,
                         {i: self(col) for i, col in other.columns.items()})

    def is_zero(self) -> bool:
        return not self.columns

    def rank(self) -> int:
        return rank(self.columns.values())

    def kernel(self) -> list:
        return kernel(self.source.basis, self.columns)

    def scaled(self, c) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree,
                         {i: scale(col, c) for i, col in self.columns.items()})


def shift_map(f: GradedMap, p: int) -> GradedMap:
    """f[p] = (-1)^{p|f|} f between the shifted spaces."""
    sign = parity_sign(p * f.degree)
    return GradedMap(shift(f.source, p), shift(f.target, p), f.degree,
                     {i: scale(col, sign) for i, col in f.columns.items()})


def zero_map(source, target, degree=1) -> GradedMap:
    return GradedMap(source, target, degree, {})


# --------------------------------------------------------------------------
# elimination


class Echelon:
    """
    Incrementally maintained echelon basis of a subspace.

    Every stored vector has a pivot key that no other stored vector
    contains, so coordinates with respect to the stored basis are read
    off at the pivots.
    """

    def __init__(self, order: Callable | None = None):
        self.rows: list = []        # reduced vectors
        self.pivots: list = []      # pivot key of each row
        self._where: dict = {}      # pivot key -> row index
        self._order = order

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: Mapping) -> dict:
        v = dict(vec)
        for p, i in self._where.items():
            c = v.get(p)
            if c:
                axpy(v, self.rows[i], -c)
        return v

    def _choose_pivot(self, v):
        if self._order is None:
            return next(iter(v))
        return min(v, key=self._order)

    def add(self, vec: Mapping) -> bool:
        """Insert a vector; returns False when it already lies in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        p = self._choose_pivot(v)
        v = scale(v, 1 / v[p])
        for row in self.rows:
            c = row.get(p)
            if c:
                axpy(row, v, -c)
        self._where[p] = len(self.rows)
        self.rows.append(v)
        self.pivots.append(p)
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: Mapping) -> list:
        """Coordinates of a vector known to lie in the span."""
        coords = [vec.get(p, ZERO) for p in self.pivots]
        rest = dict(vec)
        for c, row in zip(coords, self.rows):
            axpy(rest, row, -c)
        if rest:
            raise ValueError("vector is not in the span")
        return coords


def rank(vectors: Iterable[Mapping]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


def kernel(source_basis: Iterable, columns: Mapping) -> list:
    """Basis of the kernel of the map whose columns are given, as source vectors."""
    ech = Echelon()
    tags: list = []            # parallel to ech rows: source combination
    out = []
    for i in source_basis:
        col = dict(columns.get(i, {}))
        comb = {i: ONE}
        # reduce col against existing rows, carrying the combination
        for p, r in list(ech._where.items()):
            c = col.get(p)
            if c:
                axpy(col, ech.rows[r], -c)
                axpy(comb, tags[r], -c)
        if not col:
            out.append(comb)
            continue
        p = next(iter(col))
        inv = 1 / col[p]
        col = scale(col, inv)
        comb = scale(comb, inv)
        for r, row in enumerate(ech.rows):
            c = row.get(p)
            if c:
                axpy(row, col, -c)
                axpy(tags[r], comb, -c)
        ech._where[p] = len(ech.rows)
        ech.rows.append(col)
        ech.pivots.append(p)
        tags.append(comb)
    return out


# --------------------------------------------------------------------------
# cohomology


class NotAComplexError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass
class Cohomology:
    space: GradedSpace                  # one basis key per class: ("H", n)
    representatives: dict               # key -> cocycle in the middle space
    kernel_dims: dict
    image_dims: dict

    def dims(self) -> dict:
        return self.space.profile()

    def dim(self, degree: int) -> int:
        return self.space.profile().get(degree, 0)


def cohomology(d_in: GradedMap, d_out: GradedMap, check: bool = True) -> Cohomology:
    """Cohomology at the middle space of  A --d_in--> M --d_out--> B."""
    M = d_in.target
    if d_out.source.basis != M.basis:
        raise ValueError("shape mismatch: d_in target and d_out source differ")
    if d_in.degree != 1 or d_out.degree != 1:
        raise ValueError("differentials must have degree +1")
    if check:
        for i, col in d_in.columns.items():
            w = d_out(col)
            if w:
                raise NotAComplexError("d_out o d_in != 0 on %r" % (i,), witness=i)
    keys, reps, kd, imd = [], {}, {}, {}
    for deg in sorted(set(M.degrees)):
        mids = M.in_degree(deg)
        midset = set(mids)
        ker = kernel(mids, {i: d_out.columns.get(i, {}) for i in mids})
        img = Echelon()
        for i in d_in.source.in_degree(deg - 1):
            col = d_in.columns.get(i)
            if col:
                img.add(col)
        kd[deg], imd[deg] = len(ker), len(img)
        n = 0
        for z in ker:
            assert set(z) <= midset
            if img.add(z):
                key = ("H", deg, n)
                keys.append((key, deg))
                reps[key] = z
                n += 1
    space = GradedSpace([k for k, _ in keys], [d for _, d in keys], "H")
    return Cohomology(space, reps, kd, imd)
