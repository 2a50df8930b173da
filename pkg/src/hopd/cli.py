"""
Command-line frontend: ``hopd check``, ``hopd cohomology`` and ``hopd oracle``.

Exit status is 0 on success, 1 when a check fails (the witness is printed),
and 2 for unreadable or malformed input.  File formats are described in
``docs/formats.md``.
"""
from __future__ import annotations

import json
import random
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import click

from .opd import (AssOperad, ComOperad, OperadError, PresentedOperad,
                  check_operad_axioms, evaluate_tree, generator_collection, vec_str)
from .trees import Tree


class InputError(ValueError):
    """A malformed input file; carries the 1-based line and column."""

    def __init__(self, path, line, col, msg):
        super().__init__("%s:%d:%d: %s" % (path, line, col, msg))
        self.line = line
        self.col = col


# --------------------------------------------------------------------------
# tokenizer shared by both formats

_HEADER = re.compile(r"\s*(\w+)\s+([A-Za-z0-9_.\-]+)\s*$")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_.]*)"
                    r"|(?P<op>[()\[\],+\-*=]))")


def _tokens(path, lineno, text):
    """(kind, value, column) triples; raises InputError on stray characters."""
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1
            while col <= len(text) and text[col - 1].isspace():
                col += 1
            raise InputError(path, lineno, col, "unexpected character %r" % text[col - 1])
        kind = m.lastgroup
        col = m.start(kind) + 1
        out.append((kind, m.group(kind), col))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, path, lineno, toks, width):
        self.path, self.lineno, self.toks, self.i = path, lineno, toks, 0
        self.width = width

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.width + 1)

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg, col=None):
        raise InputError(self.path, self.lineno, col or self.peek()[2], msg)

    def expect(self, value):
        kind, v, col = self.next()
        if v != value:
            self.error("expected %r, found %s" % (value, repr(v) if v else "end of line"), col)

    def done(self):
        if self.i < len(self.toks):
            self.error("unexpected %r" % self.peek()[1])


def _header_name(cur, line):
    m = _HEADER.match(line)
    if not m:
        cur.error("expected one name (letters, digits, '.', '_', '-')", cur.toks[0][2] + len(cur.toks[0][1]) + 1)
    return m.group(2)


def _logical_lines(path, text):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield i, line


def _coefficient(cur):
    """Optional rational coefficient with optional '*'."""
    kind, v, _ = cur.peek()
    if kind == "num":
        cur.next()
        if cur.peek()[1] == "*":
            cur.next()
        return Fraction(v)
    return Fraction(1)


# --------------------------------------------------------------------------
# .opd: operad presentations

SYMMETRIES = ("regular", "symmetric", "antisymmetric")
REALIZATIONS = ("ass", "com")


@dataclass
class Presentation:
    name: str = "Q"
    generators: list = field(default_factory=list)   # (name, arity, degree, symmetry)
    relations: list = field(default_factory=list)    # (line, {Tree: coef})
    dims: dict | None = None
    realize: str | None = None

    def gen(self, name):
        for g in self.generators:
            if g[0] == name:
                return g
        return None

    def operad(self, max_arity):
        X = generator_collection(self.generators, name=self.name)
        return PresentedOperad(X, [r for _, r in self.relations], max_arity, name=self.name)

    @property
    def quadratic(self):
        """Binary generators in degree 0 with relations in arity 3."""
        return (all(g[1] == 2 and g[2] == 0 for g in self.generators)
                and all(_tree_arity(t) == 3 for _, r in self.relations for t in r))


def _tree_arity(t):
    return sum(_tree_arity(c) if isinstance(c, Tree) else 1 for c in t.children)


def _parse_tree(cur, pres, leaves):
    kind, name, col = cur.next()
    if kind != "name":
        cur.error("expected a generator name", col)
    g = pres.gen(name)
    if g is None:
        cur.error("unknown generator %r" % name, col)
    cur.expect("(")
    kids = []
    while True:
        kind, v, c = cur.peek()
        if kind == "num":
            cur.next()
            if "/" in v or int(v) < 1:
                cur.error("leaf labels are positive integers", c)
            if int(v) in leaves:
                cur.error("leaf %s used twice" % v, c)
            leaves.add(int(v))
            kids.append(int(v))
        else:
            kids.append(_parse_tree(cur, pres, leaves))
        kind, v, c = cur.next()
        if v == ")":
            break
        if v != ",":
            cur.error("expected ',' or ')'", c)
    if len(kids) != g[1]:
        cur.error("generator %r takes %d inputs, got %d" % (name, g[1], len(kids)), col)
    return Tree(g[0], tuple(kids))


def _parse_relation(cur, pres):
    out: dict = {}
    arity = None
    sign = 1
    first = True
    while cur.peek()[0] is not None:
        kind, v, col = cur.peek()
        if v in ("+", "-"):
            cur.next()
            sign = -1 if v == "-" else 1
        elif not first:
            cur.error("expected '+' or '-'")
        coef = _coefficient(cur)
        leaves: set = set()
        tcol = cur.peek()[2]
        t = _parse_tree(cur, pres, leaves)
        if leaves != set(range(1, len(leaves) + 1)):
            cur.error("leaves must be 1..%d" % len(leaves), tcol)
        if arity is not None and len(leaves) != arity:
            cur.error("all terms of a relation need the same arity", tcol)
        arity = len(leaves)
        out[t] = out.get(t, 0) + sign * coef
        sign = 1
        first = False
    if first:
        cur.error("empty relation")
    return {t: c for t, c in out.items() if c}


def parse_opd(text, path="<opd>"):
    pres = Presentation()
    seen_header = False
    for lineno, line in _logical_lines(path, text):
        cur = _Cursor(path, lineno, _tokens(path, lineno, line), len(line.rstrip()))
        kind, word, col = cur.next()
        if kind != "name":
            cur.error("expected a keyword", col)
        if word == "operad":
            pres.name = _header_name(cur, line)
            seen_header = True
            continue
        elif word == "generator":
            kind, name, c = cur.next()
            if kind != "name":
                cur.error("expected a generator name", c)
            if pres.gen(name):
                cur.error("generator %r declared twice" % name, c)
            cur.expect("arity")
            kind, k, c = cur.next()
            if kind != "num" or "/" in k or int(k) < 2:
                cur.error("arity must be an integer >= 2", c)
            deg, sym = 0, "regular"
            while cur.peek()[0] is not None:
                kind, v, c = cur.next()
                if v == "degree":
                    neg = cur.peek()[1] == "-"
                    if neg:
                        cur.next()
                    kind, d, c2 = cur.next()
                    if kind != "num" or "/" in d:
                        cur.error("degree must be an integer", c2)
                    deg = -int(d) if neg else int(d)
                elif v in SYMMETRIES:
                    sym = v
                else:
                    cur.error("expected 'degree' or one of %s" % ", ".join(SYMMETRIES), c)
            if int(k) > 2 and sym != "regular":
                cur.error("symmetric and antisymmetric generators must be binary", col)
            pres.generators.append((name, int(k), deg, sym))
        elif word == "relation":
            pres.relations.append((lineno, _parse_relation(cur, pres)))
        elif word == "dims":
            dims = {}
            n = 1
            while cur.peek()[0] is not None:
                kind, v, c = cur.next()
                if kind != "num" or "/" in v:
                    cur.error("dims are nonnegative integers", c)
                dims[n] = int(v)
                n += 1
            if not dims:
                cur.error("dims needs at least one entry")
            pres.dims = dims
        elif word == "realize":
            kind, v, c = cur.next()
            if v not in REALIZATIONS:
                cur.error("realize takes one of %s" % ", ".join(REALIZATIONS), c)
            pres.realize = v
        else:
            cur.error("unknown keyword %r" % word, col)
        cur.done()
    if not seen_header:
        raise InputError(path, 1, 1, "missing 'operad NAME' line")
    if not pres.generators:
        raise InputError(path, 1, 1, "no generators declared")
    return pres


# --------------------------------------------------------------------------
# .alg: finite-dimensional algebras by structure constants


@dataclass
class AlgebraFile:
    name: str
    kind: str                  # "associative" or "lie"
    basis: list
    table: dict                # (i, j) -> {k: coef}, 1-based indices

    @property
    def dim(self):
        return len(self.basis)


def _parse_combination(cur, index):
    """A linear combination of basis names, or 0."""
    out: dict = {}
    if cur.peek()[1] == "0" and cur.i + 1 == len(cur.toks):
        cur.next()
        return out
    sign = 1
    first = True
    while cur.peek()[0] is not None:
        kind, v, col = cur.peek()
        if v in ("+", "-"):
            cur.next()
            sign = -1 if v == "-" else 1
        elif not first:
            cur.error("expected '+' or '-'")
        kind, v, col = cur.peek()
        after = cur.toks[cur.i + 1][1] if cur.i + 1 < len(cur.toks) else None
        # a numeric basis name stands alone; any other number is a coefficient
        bare = kind == "num" and v in index and after in (None, "+", "-")
        coef = Fraction(1) if bare else _coefficient(cur)
        kind, v, col = cur.next()
        if kind != "name" and not (kind == "num" and v in index):
            cur.error("expected a basis element", col)
        if v not in index:
            cur.error("unknown basis element %r" % v, col)
        k = index[v]
        out[k] = out.get(k, 0) + sign * coef
        sign = 1
        first = False
    if first:
        cur.error("expected a linear combination")
    return {k: c for k, c in out.items() if c}


def parse_alg(text, path="<alg>"):
    name, kind, basis, index, table = None, "associative", None, {}, {}
    for lineno, line in _logical_lines(path, text):
        cur = _Cursor(path, lineno, _tokens(path, lineno, line), len(line.rstrip()))
        k0, word, col = cur.peek()
        if word == "algebra":
            name = _header_name(cur, line)
            continue
        elif word == "kind":
            cur.next()
            k, v, c = cur.next()
            if v not in ("associative", "lie"):
                cur.error("kind is 'associative' or 'lie'", c)
            kind = v
        elif word == "basis":
            cur.next()
            if basis is not None:
                cur.error("basis declared twice", col)
            basis = []
            while cur.peek()[0] is not None:
                k, v, c = cur.next()
                if k not in ("name", "num") or "/" in v:
                    cur.error("basis elements are names", c)
                if v in index:
                    cur.error("basis element %r repeated" % v, c)
                basis.append(v)
                index[v] = len(basis)
            if not basis:
                cur.error("empty basis")
        else:
            if basis is None:
                cur.error("products need a 'basis' line first", col)
            if kind == "lie":
                cur.expect("[")
            k, a, c = cur.next()
            if a not in index:
                cur.error("unknown basis element %r" % a, c)
            cur.expect("," if kind == "lie" else "*")
            k, b, c = cur.next()
            if b not in index:
                cur.error("unknown basis element %r" % b, c)
            if kind == "lie":
                cur.expect("]")
            cur.expect("=")
            key = (index[a], index[b])
            if key in table:
                cur.error("product of %s and %s given twice" % (a, b), col)
            table[key] = _parse_combination(cur, index)
        cur.done()
    if basis is None:
        raise InputError(path, 1, 1, "missing 'basis' line")
    if kind == "lie":
        table = _antisymmetrize(table, path)
    return AlgebraFile(name or "A", kind, basis, {k: v for k, v in table.items() if v})


def _antisymmetrize(table, path):
    out = dict(table)
    for (a, b), v in table.items():
        neg = {k: -c for k, c in v.items()}
        if (b, a) in table and table[(b, a)] != neg:
            raise InputError(path, 1, 1, "bracket is not antisymmetric on (%d, %d)" % (a, b))
        out[(b, a)] = neg
        if a == b and v:
            raise InputError(path, 1, 1, "bracket of a basis element with itself must vanish")
    return out


# --------------------------------------------------------------------------
# jobs


@dataclass
class JobConfig:
    command: str
    inputs: list
    max_arity: int | None = None
    max_weight: int | None = None
    kmax: int | None = None
    fmt: str = "text"
    seed: int = 0


def _realization(pres, N):
    """The generator images in a built-in operad."""
    if pres.realize == "ass":
        R = AssOperad(max_arity=N)
        imgs = {}
        for g, k, d, sym in pres.generators:
            if sym == "regular":
                imgs[g] = {tuple(range(1, k + 1)): 1}
            elif sym == "symmetric":
                imgs[g] = {(1, 2): 1, (2, 1): 1}
            else:
                imgs[g] = {(1, 2): 1, (2, 1): -1}
        return R, imgs
    R = ComOperad(max_arity=N)
    imgs = {}
    for g, k, d, sym in pres.generators:
        if sym == "antisymmetric":
            imgs[g] = {}
        else:
            imgs[g] = {R.basis(k)[0]: 1}
    return R, imgs


def _relabel(t, imgs):
    return Tree(imgs[t.label], tuple(_relabel(c, imgs) if isinstance(c, Tree) else c
                                     for c in t.children))


def run_check(pres, cfg: JobConfig):
    """List of (name, passed, detail) for each check."""
    from .defcx import QuadraticModel
    from .homotopy import check_square_zero, strict_from_operad
    N = cfg.max_arity
    results = []
    Q = pres.operad(N)
    rep = check_operad_axioms(Q)
    results.append(("operad axioms", rep.passed, rep.witness or "%d checks" % rep.checked))
    dims = {n: len(Q.basis(n)) for n in range(1, N + 1)}
    if pres.dims is not None:
        bad = [(n, pres.dims[n], dims[n]) for n in sorted(pres.dims) if n <= N and pres.dims[n] != dims[n]]
        results.append(("declared dims", not bad,
                         "arity %d: declared %d, computed %d" % bad[0] if bad else
                         " ".join(str(dims[n]) for n in sorted(dims))))
    if pres.realize:
        R, imgs = _realization(pres, N)
        wit = None
        for lineno, rel in pres.relations:
            val: dict = {}
            for t, c in rel.items():
                for k, x in evaluate_tree(R, _relabel(t, imgs)).items():
                    val[k] = val.get(k, 0) + c * x
            val = {k: v for k, v in val.items() if v}
            if val:
                wit = "relation on line %d evaluates to %s in %s" % (lineno, vec_str(val), R.name)
                break
        results.append(("relations hold in " + R.name, wit is None, wit or "%d relations" % len(pres.relations)))
    H = strict_from_operad(Q, max_weight=cfg.max_weight or N - 1)
    sq = check_square_zero(H, max_arity=N, sample=50, seed=cfg.seed)
    results.append(("bar square-zero (sampled)", sq.passed, sq.witness or "%d trees" % sq.checked))
    if pres.quadratic and N >= 3:
        M = QuadraticModel(pres.name, Q, N)
        om = check_operad_axioms(M.cobar)
        results.append(("cobar of the Koszul dual is a dg operad", om.passed,
                        om.witness or "%d checks" % om.checked))
        h0 = M.h0_dims()
        bad = [n for n in h0 if h0[n] != dims[n]]
        results.append(("degree-0 cohomology of the cobar recovers the operad", not bad,
                        "arity %d: %d vs %d" % (bad[0], h0[bad[0]], dims[bad[0]]) if bad else
                        " ".join(str(h0[n]) for n in sorted(h0))))
    return results


def _named(alg, vec):
    if not vec:
        return "0"
    parts = []
    for k in sorted(vec):
        c = vec[k]
        parts.append(alg.basis[k - 1] if c == 1 else "%s*%s" % (c, alg.basis[k - 1]))
    return " + ".join(parts)


def validate_algebra(alg: AlgebraFile, model: str):
    """Raises DeformationError with a witness in the algebra's own basis names."""
    from .defcx import DeformationError, associator_witness, jacobi_witness
    b = alg.basis
    if alg.kind == "lie":
        if model != "lie":
            raise DeformationError("a Lie algebra is a target for the lie model only")
        wit = jacobi_witness(alg.dim, alg.table)
        if wit is not None:
            raise DeformationError("bracket fails %s at %s" % (wit[0], ", ".join(b[i - 1] for i in wit[1])), wit)
        return
    if model == "lie":
        raise DeformationError("the lie model needs a Lie algebra target")
    wit = associator_witness(alg.dim, alg.table)
    if wit is not None:
        x, y, z = (b[i - 1] for i in wit[0])
        raise DeformationError("not associative: (%s*%s)*%s = %s but %s*(%s*%s) = %s"
                               % (x, y, z, _named(alg, wit[1]), x, y, z, _named(alg, wit[2])), wit)
    if model == "com":
        for (i, j), v in alg.table.items():
            if alg.table.get((j, i), {}) != v:
                raise DeformationError("not commutative: %s*%s != %s*%s" % (b[i - 1], b[j - 1], b[j - 1], b[i - 1]))


def algebra_target(alg: AlgebraFile, model: str, N: int):
    """EndOperad of the algebra with the image of the generator."""
    from .defcx import end_operad
    validate_algebra(alg, model)
    P = end_operad(alg.dim, max_arity=N)
    mu = P.from_table(2, lambda ins: alg.table.get(ins, {}))
    return P, mu


def run_cohomology(model: str, alg: AlgebraFile, kmax: int, N: int | None):
    from .defcx import (data_from_generators, deformation_complex, generator_images,
                        operad_cohomology, quadratic_model)
    N = N or kmax + 2
    M = quadratic_model(model, N)
    P, mu = algebra_target(alg, model, N)
    gname = M.generator_keys()[0].label
    data = data_from_generators(M, P, generator_images(M, P, {gname: mu}))
    D = deformation_complex(M, P, data=data)
    rows = operad_cohomology(D, degrees=range(0, kmax + 1))
    return N, [_plain_row(r) for r in rows]


def run_oracle(alg: AlgebraFile, kmax: int):
    from .defcx import chevalley_eilenberg_oracle, hochschild_oracle
    validate_algebra(alg, "lie" if alg.kind == "lie" else "ass")
    if alg.kind == "lie":
        rows = chevalley_eilenberg_oracle(alg.dim, alg.table, kmax + 1, min_degree=1)
    else:
        rows = hochschild_oracle(alg.dim, alg.table, kmax + 1, min_degree=1)
    return [_plain_row(r) for r in rows if 0 <= r["degree"] <= kmax]


def _plain_row(r):
    return {"degree": r["degree"], "arity": r["arity"], "dim": r["dim"], "flag": r["flag"]}


def table_schema():
    return json.loads(resources.files("hopd").joinpath("table.schema.json").read_text())


def format_table(doc, fmt):
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = ["degree\tarity\tdim\tflag"]
    for r in doc["rows"]:
        lines.append("%d\t%s\t%d\t%s" % (r["degree"], r["arity"], r["dim"], r["flag"]))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# click wiring


def _read(path, parser):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise click.ClickException(str(e)) from e
    return parser(text, path)


def _fail_input(e):
    click.echo("error: %s" % e, err=True)
    sys.exit(2)


@click.group()
def main():
    """Deformation complexes of operad maps over exact rational arithmetic."""


_format = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                       show_default=True)
_seed = click.option("--seed", type=int, default=0, show_default=True,
                     help="Seed for sampled checks; output is a function of inputs and seed.")


@main.command()
@click.option("--operad", "operad_path", required=True, type=click.Path(dir_okay=False))
@click.option("--max-arity", type=click.IntRange(2, 6), default=4, show_default=True)
@click.option("--max-weight", type=click.IntRange(1, 6), default=None)
@_format
@_seed
def check(operad_path, max_arity, max_weight, fmt, seed):
    """Check the operad given by a presentation file."""
    random.seed(seed)
    try:
        pres = _read(operad_path, parse_opd)
    except InputError as e:
        _fail_input(e)
    cfg = JobConfig("check", [operad_path], max_arity, max_weight, None, fmt, seed)
    try:
        results = run_check(pres, cfg)
    except OperadError as e:
        click.echo("error: %s" % e, err=True)
        sys.exit(2)
    ok = all(p for _, p, _ in results)
    if fmt == "json":
        click.echo(json.dumps({"operad": pres.name, "max_arity": max_arity, "seed": seed, "passed": ok,
                               "checks": [{"name": n, "passed": p, "detail": d} for n, p, d in results]},
                              indent=2, sort_keys=True))
    else:
        for n, p, d in results:
            click.echo("%s  %s: %s" % ("PASS" if p else "FAIL", n, d))
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--model", type=click.Choice(["ass", "com", "lie"]), required=True)
@click.option("--target", "target_path", required=True, type=click.Path(dir_okay=False))
@click.option("--kmax", type=click.IntRange(0, 4), default=2, show_default=True)
@click.option("--max-arity", type=click.IntRange(2, 6), default=None,
              help="Truncation bound; defaults to kmax + 2 so every row is EXACT.")
@_format
@_seed
def cohomology(model, target_path, kmax, max_arity, fmt, seed):
    """Cohomology table of the deformation complex of model -> End(target)."""
    from .defcx import DeformationError
    random.seed(seed)
    try:
        alg = _read(target_path, parse_alg)
    except InputError as e:
        _fail_input(e)
    try:
        N, rows = run_cohomology(model, alg, kmax, max_arity)
    except DeformationError as e:
        click.echo("error: %s" % e, err=True)
        sys.exit(1)
    doc = {"command": "cohomology", "model": model, "target": alg.name, "max_arity": N,
           "seed": seed, "rows": rows}
    click.echo(format_table(doc, fmt))
    bad = [r["degree"] for r in rows if r["flag"] != "EXACT"]
    if bad:
        click.echo("note: degrees %s are TRUNCATED; use --max-arity %d"
                   % (", ".join(map(str, bad)), max(bad) + 2), err=True)


@main.command()
@click.option("--target", "target_path", required=True, type=click.Path(dir_okay=False))
@click.option("--kmax", type=click.IntRange(0, 6), default=2, show_default=True)
@_format
@_seed
def oracle(target_path, kmax, fmt, seed):
    """Hochschild or Chevalley-Eilenberg table computed directly from cochains."""
    from .defcx import DeformationError
    try:
        alg = _read(target_path, parse_alg)
    except InputError as e:
        _fail_input(e)
    try:
        rows = run_oracle(alg, kmax)
    except DeformationError as e:
        click.echo("error: %s" % e, err=True)
        sys.exit(1)
    doc = {"command": "oracle", "model": "ass" if alg.kind == "associative" else "lie",
           "target": alg.name, "max_arity": None, "seed": seed, "rows": rows}
    click.echo(format_table(doc, fmt))


if __name__ == "__main__":
    main()
