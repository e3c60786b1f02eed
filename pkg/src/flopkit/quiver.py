"""Quivers, weighted gradings, relations and a graded path-algebra engine.

Paths are written left to right in traversal order: the path ``(e, f)``
first follows ``e`` and then ``f``.  A path is a triple
``(source, target, arrows)`` so that trivial paths keep their vertex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Sequence, Tuple

from .linalg import Field, QQ, rref, reduce_vector

CONVENTION = "left-to-right"


@dataclass(frozen=True)
class Arrow:
    label: str
    source: object
    target: object


class Quiver:
    def __init__(self, vertices: Sequence, arrows: Sequence[Tuple[str, object, object]]):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        self.arrows = [Arrow(*a) for a in arrows]
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate arrow labels")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise ValueError(f"arrow {a.label} has an invalid endpoint")
        self.arrow = {a.label: a for a in self.arrows}
        self._out = {v: sorted((a for a in self.arrows if a.source == v), key=lambda a: a.label)
                     for v in self.vertices}

    def out_arrows(self, v) -> List[Arrow]:
        return self._out[v]

    def path(self, *labels, at=None) -> "Path":
        """Build a path from arrow labels; ``at`` names the vertex of a trivial path."""
        if not labels:
            return (at, at, ())
        for x, y in zip(labels, labels[1:]):
            if self.arrow[x].target != self.arrow[y].source:
                raise ValueError(f"{x} and {y} are not composable")
        return (self.arrow[labels[0]].source, self.arrow[labels[-1]].target, tuple(labels))


Path = Tuple[object, object, Tuple[str, ...]]


class Grading:
    """Positive integer weight per arrow."""

    def __init__(self, weights: Dict[str, int]):
        for k, w in weights.items():
            if w < 1:
                raise ValueError(f"arrow {k} has non-positive weight {w}")
        self.weights = dict(weights)

    @classmethod
    def unit(cls, q: Quiver) -> "Grading":
        return cls({a.label: 1 for a in q.arrows})

    def degree(self, path: Path) -> int:
        return sum(self.weights[a] for a in path[2])


@dataclass
class Relation:
    """A formal linear combination of paths, as ``[(coeff, path), ...]``."""

    terms: List[Tuple[int, Path]]
    name: str = ""

    def endpoints(self):
        return {(p[0], p[1]) for _, p in self.terms}

    def __str__(self):
        return format_combination(self.terms)


def format_combination(terms) -> str:
    out = []
    for c, p in terms:
        mono = "*".join(p[2]) if p[2] else f"1_{p[0]}"
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        out.append(f"{sign} {mono}" if mag == 1 else f"{sign} {mag}{mono and '*' + mono}")
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else s


def enumerate_paths(q: Quiver, g: Grading, d: int, i, j) -> List[Path]:
    """All paths from i to j of total weight d, lexicographic in arrow labels."""
    out = []

    def walk(v, remaining, acc):
        if remaining == 0:
            if v == j:
                out.append((i, j, tuple(acc)))
            return
        for a in q.out_arrows(v):
            w = g.weights[a.label]
            if w <= remaining:
                acc.append(a.label)
                walk(a.target, remaining - w, acc)
                acc.pop()

    walk(i, d, [])
    return out


def check_homogeneous(relations: Sequence[Relation], grading: Grading):
    """True iff every relation has one endpoint pair and one degree; plus violations."""
    report = []
    for r in relations:
        ends = r.endpoints()
        degs = {grading.degree(p) for _, p in r.terms}
        if len(ends) > 1:
            report.append(f"{r.name or r}: mixed endpoints {sorted(map(str, ends))}")
        if len(degs) > 1:
            report.append(f"{r.name or r}: mixed degrees {sorted(degs)}")
    return not report, report


def concat(p: Path, q: Path) -> Path:
    if p[1] != q[0]:
        raise ValueError("paths are not composable")
    return (p[0], q[1], p[2] + q[2])


class _Component:
    __slots__ = ("basis", "vindex", "red", "pivots", "coord_of_col", "nv")

    def __init__(self):
        self.basis: List[Path] = []


class GradedAlgebraHandle:
    """The graded quotient kQ/I, computed degree by degree.

    The degree-d piece from i to j is V/K where V is the sum over arrows a
    leaving i of a (x) A_{d-w(a)}(t(a), j) and K is spanned by the images of
    r.b for relations r and basis monomials b.  Basis representatives are the
    non-pivot monomials of the echelon form of K.
    """

    def __init__(self, quiver: Quiver, grading: Grading, relations: Sequence[Relation],
                 field: Field = QQ, max_degree: int = 20, name: str = ""):
        ok, report = check_homogeneous(relations, grading)
        if not ok:
            raise ValueError("inhomogeneous relations: " + "; ".join(report))
        self.quiver = quiver
        self.grading = grading
        self.relations = list(relations)
        self.field = field
        self.max_degree = max_degree
        self.name = name
        self.convention = CONVENTION
        self._comps: Dict[tuple, _Component] = {}
        self._nf: Dict[Path, tuple] = {}
        self._prod: Dict[tuple, tuple] = {}
        self._rels_from = {}
        for r in self.relations:
            s = next(iter(r.endpoints()))
            self._rels_from.setdefault(s[0], []).append(
                (grading.degree(r.terms[0][1]), s[1], [(field(c), p) for c, p in r.terms]))

    # components -----------------------------------------------------------
    def component(self, d: int, i, j) -> _Component:
        key = (d, i, j)
        c = self._comps.get(key)
        if c is not None:
            return c
        if d > self.max_degree:
            raise ValueError(f"degree {d} exceeds max_degree {self.max_degree}")
        if d < 0:
            c = _Component()
            c.nv, c.red, c.pivots, c.coord_of_col, c.vindex = 0, [], [], {}, {}
            self._comps[key] = c
            return c
        F = self.field
        c = _Component()
        if d == 0:
            c.basis = [(i, i, ())] if i == j else []
            c.nv = len(c.basis)
            c.vindex = {}
            c.red, c.pivots = [], []
            c.coord_of_col = {0: 0} if i == j else {}
            self._comps[key] = c
            return c
        # V coordinates: (arrow, index in lower component)
        cols = []
        vindex = {}
        for a in self.quiver.out_arrows(i):
            w = self.grading.weights[a.label]
            sub = self.component(d - w, a.target, j)
            start = len(cols)
            vindex[a.label] = start
            for b in sub.basis:
                cols.append((a.label, b))
        nv = len(cols)
        c.nv = nv
        c.vindex = vindex
        rows = []
        for dr, tgt, terms in self._rels_from.get(i, []):
            if dr > d:
                continue
            sub = self.component(d - dr, tgt, j)
            for b in sub.basis:
                v = [F.zero()] * nv
                for coef, p in terms:
                    full = concat(p, b)
                    self._add_embedded(v, full, coef, d, j, vindex)
                if any(v):
                    rows.append(v)
        if rows:
            red, piv = _rref_rows(rows, nv, F)
        else:
            red, piv = [], []
        c.red, c.pivots = red, piv
        pset = set(piv)
        c.coord_of_col = {}
        for col, (lab, b) in enumerate(cols):
            if col not in pset:
                c.coord_of_col[col] = len(c.basis)
                a = self.quiver.arrow[lab]
                c.basis.append((i, j, (lab,) + b[2]))
        self._comps[key] = c
        return c

    def _add_embedded(self, v, path: Path, coef, d, j, vindex):
        F = self.field
        lab = path[2][0]
        a = self.quiver.arrow[lab]
        rest = (a.target, path[1], path[2][1:])
        sub = self.nf(rest)
        off = vindex[lab]
        for k, x in enumerate(sub):
            if x:
                v[off + k] = F.add(v[off + k], F.mul(coef, x))

    def dimension(self, d: int, i, j) -> int:
        return len(self.component(d, i, j).basis)

    def graded_component(self, d: int, i, j):
        c = self.component(d, i, j)
        return len(c.basis), list(c.basis)

    def degree(self, path: Path) -> int:
        return self.grading.degree(path)

    # normal forms ---------------------------------------------------------
    def nf(self, path: Path) -> tuple:
        """Coordinates of a path in the basis of its graded component."""
        r = self._nf.get(path)
        if r is not None:
            return r
        d = self.grading.degree(path)
        i, j = path[0], path[1]
        c = self.component(d, i, j)
        F = self.field
        if d == 0:
            r = (F.one(),)
        else:
            v = [F.zero()] * c.nv
            self._add_embedded(v, path, F.one(), d, j, c.vindex)
            v = reduce_vector(v, c.red, c.pivots, F)
            out = [F.zero()] * len(c.basis)
            for col, x in enumerate(v):
                if x:
                    out[c.coord_of_col[col]] = x
            r = tuple(out)
        self._nf[path] = r
        return r

    # elements -------------------------------------------------------------
    def element(self, terms, d=None, i=None, j=None) -> "Elem":
        """Element from ``[(coeff, path)]`` or a path-string like ``"e*f - 2*l"``."""
        if isinstance(terms, str):
            terms = self.parse_combination(terms)
        F = self.field
        if not terms:
            if d is None:
                raise ValueError("zero element needs (d, i, j)")
            return self.zero(d, i, j)
        degs = {self.grading.degree(p) for _, p in terms}
        ends = {(p[0], p[1]) for _, p in terms}
        if len(degs) != 1 or len(ends) != 1:
            raise ValueError("element is not homogeneous")
        dd = degs.pop()
        ii, jj = ends.pop()
        if d is not None and (d, i, j) != (dd, ii, jj):
            raise ValueError(f"element has degree/endpoints {(dd, ii, jj)}, expected {(d, i, j)}")
        vec = [F.zero()] * self.dimension(dd, ii, jj)
        for coef, p in terms:
            coef = F(coef)
            for k, x in enumerate(self.nf(p)):
                if x:
                    vec[k] = F.add(vec[k], F.mul(coef, x))
        return Elem(self, dd, ii, jj, tuple(vec))

    def zero(self, d, i, j) -> "Elem":
        F = self.field
        n = self.dimension(d, i, j) if d >= 0 else 0
        return Elem(self, d, i, j, (F.zero(),) * n)

    def unit(self, v) -> "Elem":
        return Elem(self, 0, v, v, (self.field.one(),))

    def parse_combination(self, s: str):
        return parse_combination(self.quiver, s)

    def multiply(self, x: "Elem", y: "Elem") -> "Elem":
        """x followed by y (left-to-right concatenation)."""
        if x.j != y.i:
            raise ValueError("elements are not composable")
        F = self.field
        d = x.d + y.d
        n = self.dimension(d, x.i, y.j)
        out = [F.zero()] * n
        bx = self.component(x.d, x.i, x.j).basis
        by = self.component(y.d, y.i, y.j).basis
        for a, ca in enumerate(x.coeffs):
            if not ca:
                continue
            for b, cb in enumerate(y.coeffs):
                if not cb:
                    continue
                key = (bx[a], by[b])
                prod = self._prod.get(key)
                if prod is None:
                    prod = self.nf(concat(bx[a], by[b]))
                    self._prod[key] = prod
                s = F.mul(ca, cb)
                for k, z in enumerate(prod):
                    if z:
                        out[k] = F.add(out[k], F.mul(s, z))
        return Elem(self, d, x.i, y.j, tuple(out))

    # oracle ---------------------------------------------------------------
    def brute_force_dimension(self, d: int, i, j) -> Tuple[int, int]:
        """(quotient dim, ideal dim) from the literal span of p.r.q; slow oracle."""
        q, g, F = self.quiver, self.grading, self.field
        paths = enumerate_paths(q, g, d, i, j)
        idx = {p: k for k, p in enumerate(paths)}
        rows = []
        for r in self.relations:
            (s, t), = r.endpoints()
            dr = g.degree(r.terms[0][1])
            for dl in range(0, d - dr + 1):
                for pl in enumerate_paths(q, g, dl, i, s):
                    for pr in enumerate_paths(q, g, d - dr - dl, t, j):
                        v = [F.zero()] * len(paths)
                        for c, p in r.terms:
                            full = concat(concat(pl, p), pr)
                            k = idx[full]
                            v[k] = F.add(v[k], F(c))
                        rows.append(v)
        rk = len(_rref_rows(rows, len(paths), F)[1]) if rows else 0
        return len(paths) - rk, rk

    # text format ----------------------------------------------------------
    def to_text(self) -> str:
        return to_text(self.quiver, self.grading, self.relations, self.name)


def _rref_rows(rows, ncols, F):
    from .linalg import Matrix
    return rref(Matrix(F, len(rows), ncols, rows))


class Elem:
    """Homogeneous element of degree d from vertex i to vertex j."""

    __slots__ = ("h", "d", "i", "j", "coeffs")

    def __init__(self, h, d, i, j, coeffs):
        self.h, self.d, self.i, self.j, self.coeffs = h, d, i, j, coeffs

    def is_zero(self):
        return not any(self.coeffs)

    def _compat(self, o):
        if (self.d, self.i, self.j) != (o.d, o.i, o.j):
            if o.is_zero():
                return False
            if self.is_zero():
                return None
            raise ValueError("adding elements of different degree or endpoints")
        return True

    def __add__(self, o):
        c = self._compat(o)
        if c is False:
            return self
        if c is None:
            return o
        F = self.h.field
        return Elem(self.h, self.d, self.i, self.j,
                    tuple(F.add(a, b) for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        F = self.h.field
        return Elem(self.h, self.d, self.i, self.j, tuple(F.neg(a) for a in self.coeffs))

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        F = self.h.field
        c = F(c)
        return Elem(self.h, self.d, self.i, self.j, tuple(F.mul(c, a) for a in self.coeffs))

    def __mul__(self, o):
        return self.h.multiply(self, o)

    def __eq__(self, o):
        if not isinstance(o, Elem):
            return NotImplemented
        if self.is_zero() and o.is_zero():
            return True
        return (self.d, self.i, self.j, self.coeffs) == (o.d, o.i, o.j, o.coeffs)

    def __hash__(self):
        return hash((self.d, self.i, self.j, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        basis = self.h.component(self.d, self.i, self.j).basis
        return format_combination([(int(c) if self.h.field.p else c, b)
                                   for c, b in zip(self.coeffs, basis) if c])


def parse_combination(q: Quiver, s: str):
    """Parse ``"e*f*a1 - a1*l"``.  Powers ``(f*e)^2`` and trivial ``1_v`` allowed."""
    out = []
    terms, buf, depth = [], "", 0
    for ch in s.strip():
        if ch in "+-" and depth == 0 and buf.strip():
            terms.append(buf)
            buf = ""
        depth += (ch == "(") - (ch == ")")
        buf += ch
    if buf.strip():
        terms.append(buf)
    for t in terms:
        t = t.replace(" ", "")
        sign = -1 if t.startswith("-") else 1
        t = t.lstrip("+-")
        m = re.match(r"(\d+)\*?(?=[A-Za-z(]|1_)", t)
        c = 1
        if m:
            c = int(m.group(1))
            t = t[m.end():]
        out.append((sign * c, _parse_monomial(q, t)))
    return out


def _parse_monomial(q: Quiver, mono: str) -> Path:
    if mono.startswith("1_"):
        v = mono[2:]
        for x in q.vertices:
            if str(x) == v:
                return (x, x, ())
        raise ValueError(f"unknown vertex {v}")
    labels = []
    for tok in re.finditer(r"\(([^)]*)\)\^(\d+)|([A-Za-z0-9_]+)(?:\^(\d+))?", mono):
        grp, gexp, lab, lexp = tok.groups()
        if grp is not None:
            inner = [x for x in grp.replace("*", " ").split() if x]
            labels.extend(inner * int(gexp))
        else:
            labels.extend([lab] * (int(lexp) if lexp else 1))
    if not labels:
        raise ValueError(f"empty monomial {mono!r}")
    return q.path(*labels)


def to_text(q: Quiver, g: Grading, relations: Sequence[Relation], name: str = "") -> str:
    lines = []
    if name:
        lines.append(f"name: {name}")
    lines.append("vertices: " + " ".join(map(str, q.vertices)))
    for a in q.arrows:
        lines.append(f"arrow {a.label}: {a.source} -> {a.target} [{g.weights[a.label]}]")
    for r in relations:
        lines.append(f"relation: {r}")
    return "\n".join(lines) + "\n"


def from_text(text: str):
    """Inverse of :func:`to_text`; returns (quiver, grading, relations, name)."""
    name, verts, arrows, weights, rels = "", [], [], {}, []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "name":
            name = rest.strip()
        elif key == "vertices":
            verts = [int(v) if v.lstrip("-").isdigit() else v for v in rest.split()]
        elif key.startswith("arrow"):
            lab = key.split()[1]
            m = re.match(r"\s*(\S+)\s*->\s*(\S+)\s*(?:\[(\d+)\])?", rest)
            if not m:
                raise ValueError(f"bad arrow line {raw!r}")
            conv = lambda v: int(v) if v.lstrip("-").isdigit() else v
            arrows.append((lab, conv(m.group(1)), conv(m.group(2))))
            weights[lab] = int(m.group(3) or 1)
        elif key == "relation":
            rels.append(rest.strip())
        else:
            raise ValueError(f"unknown line {raw!r}")
    q = Quiver(verts, arrows)
    return q, Grading(weights), [Relation(parse_combination(q, r)) for r in rels], name
