"""Finite-dimensional path algebras and their representations.

Representations are covariant: a vector space per vertex and, for each
arrow a: s -> t, a matrix of shape dim V_t x dim V_s.  With left-to-right
paths this makes a representation a right module, and the path ``a b``
acts by ``M_b @ M_a``.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence

from .linalg import Field, Matrix, QQ, kernel_basis, rank, rref, solve
from .quiver import Grading, GradedAlgebraHandle, Quiver, Relation, parse_combination

NODE_CAP = 500


class RequiresFieldExtension(Exception):
    """A module whose endomorphism ring is not split local over the base field."""


class PossiblyInfiniteType(Exception):
    pass


class FDAlgebra:
    """A finite-dimensional quotient kQ/I with an explicit path-monomial basis."""

    def __init__(self, quiver: Quiver, relations: Sequence[Relation], grading: Grading,
                 field: Field = QQ, name: str = "", max_degree: int = 200):
        self.quiver = quiver
        self.relations = list(relations)
        self.grading = grading
        self.field = field
        self.name = name
        self.h = GradedAlgebraHandle(quiver, grading, relations, field, max_degree, name)
        maxw = max(grading.weights.values())
        vs = quiver.vertices
        basis = []
        d, empty_run = 0, 0
        while empty_run < maxw:
            if d > max_degree:
                raise ValueError(f"{name}: no nilpotency bound found up to degree {max_degree}")
            found = False
            for i in vs:
                for j in vs:
                    b = self.h.component(d, i, j).basis
                    basis.extend(b)
                    found = found or bool(b)
            empty_run = 0 if found else empty_run + 1
            d += 1
        self.top_degree = d - maxw - 1
        self.basis = basis
        self.index = {p: k for k, p in enumerate(basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def vertices(self):
        return self.quiver.vertices

    def coords(self, path) -> List:
        """Coordinates of a path in the global basis (zero beyond the top degree)."""
        F = self.field
        out = [F.zero()] * self.dim
        d = self.grading.degree(path)
        if d > self.top_degree:
            return out
        comp = self.h.component(d, path[0], path[1]).basis
        for c, b in zip(self.h.nf(path), comp):
            if c:
                out[self.index[b]] = c
        return out

    def product(self, p, q) -> List:
        if p[1] != q[0]:
            return [self.field.zero()] * self.dim
        return self.coords((p[0], q[1], p[2] + q[2]))

    def structure_constants(self):
        """{(i, j): coordinate vector of b_i * b_j} over composable basis pairs."""
        out = {}
        for a, p in enumerate(self.basis):
            for b, q in enumerate(self.basis):
                if p[1] == q[0]:
                    out[(a, b)] = tuple(self.product(p, q))
        return out

    def cartan(self):
        """dim e_i A e_j for vertex pairs."""
        return {(i, j): sum(1 for p in self.basis if p[0] == i and p[1] == j)
                for i in self.vertices for j in self.vertices}

    def to_text(self) -> str:
        return self.h.to_text()

    # modules ---------------------------------------------------------------
    def projective(self, i) -> "Rep":
        """P_i = e_i A: paths starting at i, arrows acting by right multiplication."""
        F = self.field
        at = {v: [p for p in self.basis if p[0] == i and p[1] == v] for v in self.vertices}
        pos = {v: {p: k for k, p in enumerate(at[v])} for v in self.vertices}
        mats = {}
        for a in self.quiver.arrows:
            cols = []
            for p in at[a.source]:
                v = self.coords((p[0], a.target, p[2] + (a.label,)))
                col = [F.zero()] * len(at[a.target])
                for k, c in enumerate(v):
                    if c:
                        col[pos[a.target][self.basis[k]]] = c
                cols.append(col)
            mats[a.label] = Matrix.from_columns(F, cols, len(at[a.target]))
        return Rep(self, {v: len(at[v]) for v in self.vertices}, mats, name=f"P{i}")

    def regular(self) -> "Rep":
        r = None
        for v in self.vertices:
            p = self.projective(v)
            r = p if r is None else r.direct_sum(p)
        r.name = "A"
        return r

    def simple(self, i) -> "Rep":
        dims = {v: (1 if v == i else 0) for v in self.vertices}
        return Rep(self, dims, None, name=f"S{i}")

    def rep(self, dims: Dict, mats: Dict, name="") -> "Rep":
        return Rep(self, dims, mats, name=name)

    def __repr__(self):
        return f"FDAlgebra({self.name}, dim={self.dim}, field={self.field})"


# constructors -------------------------------------------------------------

def _two_cycle(extra_loop=False):
    arrows = [("a", 1, 2), ("b", 2, 1)]
    if extra_loop:
        arrows.append(("y", 2, 2))
    return Quiver([1, 2], arrows)


def lambda_con(k: int, field: Field = QQ) -> FDAlgebra:
    """Two-cycle a: 1 -> 2, b: 2 -> 1 with (ab)^k a = 0 = b(ab)^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = _two_cycle()
    rels = [Relation(parse_combination(q, f"(a*b)^{k}*a")),
            Relation(parse_combination(q, f"b*(a*b)^{k}"))]
    alg = FDAlgebra(q, rels, Grading.unit(q), field, name=f"lambda_con({k})")
    alg.k, alg.kind = k, "lambda_con"
    return alg


def gamma_con(k: int, field: Field = QQ) -> FDAlgebra:
    """Two-cycle plus a loop y at 2 with y^k = ba, ay = 0 = yb."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = _two_cycle(extra_loop=True)
    rels = [Relation(parse_combination(q, f"y^{k} - b*a")),
            Relation(parse_combination(q, "a*y")),
            Relation(parse_combination(q, "y*b"))]
    g = Grading({"a": k, "b": k, "y": 2})
    alg = FDAlgebra(q, rels, g, field, name=f"gamma_con({k})")
    alg.k, alg.kind = k, "gamma_con"
    return alg


def truncated_two_cycle(k: int, field: Field = QQ) -> FDAlgebra:
    """Two-cycle path algebra modulo all paths of length >= 2k+1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = _two_cycle()
    g = Grading.unit(q)
    rels = [Relation([(1, p)]) for i in q.vertices
            for j in q.vertices
            for p in _paths(q, g, 2 * k + 1, i, j)]
    alg = FDAlgebra(q, rels, g, field, name=f"truncated_two_cycle({k})")
    alg.k, alg.kind = k, "truncated"
    return alg


def _paths(q, g, d, i, j):
    from .quiver import enumerate_paths
    return enumerate_paths(q, g, d, i, j)


def same_structure(x: FDAlgebra, y: FDAlgebra) -> bool:
    """Identical bases (as path monomials) and identical structure constants."""
    return (x.field == y.field and x.quiver.vertices == y.quiver.vertices
            and [(a.label, a.source, a.target) for a in x.quiver.arrows]
            == [(a.label, a.source, a.target) for a in y.quiver.arrows]
            and x.basis == y.basis and x.structure_constants() == y.structure_constants())


# representations ----------------------------------------------------------

class Rep:
    """A finite-dimensional representation; immutable after construction."""

    def __init__(self, alg: FDAlgebra, dims: Dict, mats: Optional[Dict] = None, name: str = "",
                 check: bool = True):
        self.alg = alg
        self.dims = {v: int(dims.get(v, 0)) for v in alg.vertices}
        F = alg.field
        self.mats = {}
        for a in alg.quiver.arrows:
            shape = (self.dims[a.target], self.dims[a.source])
            m = (mats or {}).get(a.label)
            if m is None:
                m = Matrix.zeros(F, *shape)
            elif not isinstance(m, Matrix):
                m = Matrix(F, shape[0], shape[1], m)
            if (m.rows, m.cols) != shape:
                raise ValueError(f"arrow {a.label} matrix has shape {(m.rows, m.cols)}, expected {shape}")
            self.mats[a.label] = m
        self.name = name
        if check:
            bad = self.relation_violations()
            if bad:
                raise ValueError(f"relations fail on representation: {bad}")

    @property
    def field(self):
        return self.alg.field

    @property
    def dim_vector(self):
        return tuple(self.dims[v] for v in self.alg.vertices)

    @property
    def dim(self):
        return sum(self.dims.values())

    def action(self, path) -> Matrix:
        """Matrix of a path: V_source -> V_target."""
        m = Matrix.identity(self.field, self.dims[path[0]])
        for lab in path[2]:
            m = self.mats[lab] @ m
        return m

    def relation_violations(self):
        bad = []
        for r in self.alg.relations:
            (s, t), = r.endpoints()
            tot = Matrix.zeros(self.field, self.dims[t], self.dims[s])
            for c, p in r.terms:
                tot = tot + self.action(p).scale(c)
            if not tot.is_zero():
                bad.append(str(r))
        return bad

    def direct_sum(self, other: "Rep") -> "Rep":
        F = self.field
        mats = {}
        for a in self.alg.quiver.arrows:
            x, y = self.mats[a.label], other.mats[a.label]
            top = x.hstack(Matrix.zeros(F, x.rows, y.cols))
            bot = Matrix.zeros(F, y.rows, x.cols).hstack(y)
            mats[a.label] = top.vstack(bot)
        dims = {v: self.dims[v] + other.dims[v] for v in self.alg.vertices}
        return Rep(self.alg, dims, mats, name=f"{self.name}+{other.name}", check=False)

    def is_zero(self):
        return self.dim == 0

    def support(self):
        return {v for v in self.alg.vertices if self.dims[v]}

    def __repr__(self):
        return f"Rep({self.name or '?'}, dimvec={self.dim_vector})"

    # sub and quotient -----------------------------------------------------
    def subrep(self, spaces: Dict) -> "Rep":
        """Restriction to invariant subspaces given by column-basis matrices per vertex."""
        mats = {}
        for a in self.alg.quiver.arrows:
            U_s, U_t = spaces[a.source], spaces[a.target]
            img = self.mats[a.label] @ U_s
            x = solve(U_t, img) if U_t.cols or not img.cols else None
            if U_t.cols == 0:
                if not img.is_zero():
                    raise ValueError("subspaces are not invariant")
                x = Matrix.zeros(self.field, 0, U_s.cols)
            if x is None:
                raise ValueError("subspaces are not invariant")
            mats[a.label] = x
        return Rep(self.alg, {v: spaces[v].cols for v in self.alg.vertices}, mats, check=False)

    def quotient(self, spaces: Dict):
        """Quotient by invariant subspaces; returns (rep, projection matrices per vertex)."""
        F = self.field
        proj, comp = {}, {}
        for v in self.alg.vertices:
            n, U = self.dims[v], spaces[v]
            C = _complement_columns(F, U, n)
            B = U.hstack(C) if U.cols else C
            proj[v] = solve(B, Matrix.identity(F, n)).block(U.cols, n, 0, n)
            comp[v] = C
        mats = {a.label: proj[a.target] @ self.mats[a.label] @ comp[a.source]
                for a in self.alg.quiver.arrows}
        dims = {v: self.dims[v] - spaces[v].cols for v in self.alg.vertices}
        return Rep(self.alg, dims, mats, check=False), proj


def _complement_columns(F, U: Matrix, n: int) -> Matrix:
    """Standard basis vectors completing the columns of U to a basis."""
    piv = set(rref(U.transpose())[1]) if U.cols else set()
    keep = [c for c in range(n) if c not in piv]
    return Matrix.from_columns(F, [[1 if r == c else 0 for r in range(n)] for c in keep], n)


def _vec_index(M: Rep, N: Rep):
    """Variable layout for a family of maps M_v -> N_v (row-major per vertex)."""
    off, layout = 0, {}
    for v in M.alg.vertices:
        layout[v] = off
        off += N.dims[v] * M.dims[v]
    return layout, off


def hom_space(M: Rep, N: Rep):
    """(dim, basis) of Hom(M, N); each basis element is {vertex: matrix N_v x M_v}."""
    if M.alg is not N.alg and (M.alg.name, M.field) != (N.alg.name, N.field):
        raise ValueError("representations of different algebras")
    F = M.field
    layout, nvars = _vec_index(M, N)
    rows = []
    for a in M.alg.quiver.arrows:
        s, t = a.source, a.target
        A_N, A_M = N.mats[a.label], M.mats[a.label]
        # (A_N phi_s - phi_t A_M)[r][c] = 0
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [0] * nvars
                for k in range(N.dims[s]):
                    x = A_N[r, k]
                    if x:
                        idx = layout[s] + k * M.dims[s] + c
                        row[idx] = F.add(row[idx], x)
                for k in range(M.dims[t]):
                    x = A_M[k, c]
                    if x:
                        idx = layout[t] + r * M.dims[t] + k
                        row[idx] = F.sub(row[idx], x)
                rows.append(row)
    if nvars == 0:
        return 0, []
    K = kernel_basis(Matrix(F, len(rows), nvars, rows)) if rows else Matrix.identity(F, nvars)
    basis = [_unpack(M, N, layout, K.column(j)) for j in range(K.cols)]
    return len(basis), basis


def _unpack(M, N, layout, vec):
    F = M.field
    out = {}
    for v in M.alg.vertices:
        r, c = N.dims[v], M.dims[v]
        o = layout[v]
        out[v] = Matrix(F, r, c, [vec[o + i * c:o + (i + 1) * c] for i in range(r)])
    return out


def hom_dim(M: Rep, N: Rep) -> int:
    return hom_space(M, N)[0]


def compose_maps(g: Dict, f: Dict) -> Dict:
    """g o f for vertexwise matrix families."""
    return {v: g[v] @ f[v] for v in f}


def total_matrix(M: Rep, N: Rep, f: Dict) -> Matrix:
    """Block-diagonal matrix of a map on the total spaces."""
    from .linalg import block_matrix
    vs = M.alg.vertices
    blocks = [[f[v] if v == w else None for w in vs] for v in vs]
    return block_matrix(M.field, blocks, [N.dims[v] for v in vs], [M.dims[v] for v in vs])


def is_iso_map(M: Rep, N: Rep, f: Dict) -> bool:
    return M.dim_vector == N.dim_vector and all(
        rank(f[v]) == M.dims[v] for v in M.alg.vertices)


# endomorphisms and decomposition --------------------------------------------

def _col_space(m: Matrix) -> Matrix:
    """Columns forming a basis of the column space (echelon choice)."""
    red, piv = rref(m.transpose())
    return Matrix.from_columns(m.field, red, m.rows) if red else Matrix.zeros(m.field, m.rows, 0)


def _is_nilpotent(x: Matrix) -> bool:
    y, n = x, x.rows
    for _ in range(max(n.bit_length(), 1)):
        y = y @ y
    return y.is_zero()


def _eigen_shift(x: Matrix):
    """lambda with x - lambda nilpotent, or None."""
    F, n = x.field, x.rows
    if n == 0:
        return F.zero()
    ident = Matrix.identity(F, n)
    cands = []
    if not F.p or n % F.p:
        tr = F.zero()
        for i in range(n):
            tr = F.add(tr, x[i, i])
        cands.append(F.mul(tr, F.inv(F(n))))
    elif F.p:
        cands.extend(F.elements())
    for lam in cands:
        if _is_nilpotent(x - ident.scale(lam)):
            return lam
    return None


def _span_rref(mats: List[Matrix]):
    if not mats:
        return [], []
    F = mats[0].field
    rows = [[v for r in m.data for v in r] for m in mats]
    return rref(Matrix(F, len(rows), len(rows[0]), rows))


def certify_local(M: Rep, endo_total: List[Matrix]) -> bool:
    """Certify End(M) local with residue field the base field.

    R = span(b - lambda_b) is checked to be a nilpotent two-sided ideal of
    codimension one, which forces End/rad = the base field.
    """
    F, n = M.field, M.dim
    if n == 0:
        return False
    ident = Matrix.identity(F, n)
    R = []
    for b in endo_total:
        lam = _eigen_shift(b)
        if lam is None:
            return False
        R.append(b - ident.scale(lam))
    red, piv = _span_rref(R)
    if len(piv) != len(endo_total) - 1:
        return False
    basis = [Matrix(F, n, n, [r[i * n:(i + 1) * n] for i in range(n)]) for r in red]
    cur = basis
    for _ in range(n + 1):
        prods = [x @ y for x in cur for y in basis]
        prods = [p for p in prods if not p.is_zero()]
        if not prods:
            return True
        red2, piv2 = _span_rref(prods)
        # closure: products stay inside R
        for row in red2:
            if len(_span_rref(basis + [Matrix(F, n, n, [row[i * n:(i + 1) * n] for i in range(n)])])[1]) != len(basis):
                return False
        cur = [Matrix(F, n, n, [r[i * n:(i + 1) * n] for i in range(n)]) for r in red2]
    return False


def _min_poly(x: Matrix):
    """Monic minimal polynomial coefficients, low degree first."""
    F, n = x.field, x.rows
    powers = [Matrix.identity(F, n)]
    while True:
        nxt = powers[-1] @ x
        cols = [[v for r in p.data for v in r] for p in powers]
        A = Matrix.from_columns(F, cols, n * n)
        b = Matrix.from_columns(F, [[v for r in nxt.data for v in r]], n * n)
        sol = solve(A, b)
        if sol is not None:
            return [F.neg(sol[i, 0]) for i in range(len(powers))] + [F.one()]
        powers.append(nxt)


def _factor(coeffs, F: Field):
    """Distinct irreducible factors over F (low degree first coefficient lists)."""
    import sympy
    t = sympy.Symbol("t")
    conv = (lambda c: int(c)) if F.p else (lambda c: sympy.Rational(c.numerator, c.denominator))
    expr = sum(conv(c) * t ** k for k, c in enumerate(coeffs))
    poly = sympy.Poly(expr, t, modulus=F.p) if F.p else sympy.Poly(expr, t, domain="QQ")
    out = []
    for fac, _ in poly.factor_list()[1]:
        cs = [F(sympy.Rational(c)) if not F.p else F(int(c)) for c in reversed(fac.all_coeffs())]
        out.append(cs)
    return out


def _eval_poly(coeffs, x: Matrix) -> Matrix:
    F = x.field
    r = Matrix.zeros(F, x.rows, x.cols)
    ident = Matrix.identity(F, x.rows)
    for c in reversed(coeffs):
        r = r @ x + ident.scale(c)
    return r


def _endo_total(M: Rep):
    _, basis = hom_space(M, M)
    return basis, [total_matrix(M, M, f) for f in basis]


def _split_by(M: Rep, f: Dict, poly) -> Optional[tuple]:
    """Fitting splitting of M along g(f) for a polynomial g; None if trivial.

    Returns two (summand, inclusion) pairs.
    """
    n = M.dim
    U, W = {}, {}
    for v in M.alg.vertices:
        y = _eval_poly(poly, f[v])
        yN = y
        for _ in range(max(n.bit_length(), 1)):
            yN = yN @ yN
        U[v] = kernel_basis(yN)
        W[v] = _col_space(yN)
    du = sum(U[v].cols for v in U)
    if du == 0 or du == n:
        return None
    return (M.subrep(U), U), (M.subrep(W), W)


def _rng_elements(F: Field, rng: random.Random, k: int):
    if F.p:
        return [rng.randrange(F.p) for _ in range(k)]
    return [rng.randint(-3, 3) for _ in range(k)]


def split_summands(M: Rep, seed: int = 0, tries: int = 60) -> List[tuple]:
    """Indecomposable summands of M with their inclusions {vertex: matrix}.

    The inclusions of all summands together form a basis of M at each vertex.
    """
    if M.dim == 0:
        return []
    F = M.field
    basis, tot = _endo_total(M)
    if certify_local(M, tot):
        return [(M, {v: Matrix.identity(F, M.dims[v]) for v in M.alg.vertices})]
    rng = random.Random(seed)
    vs = M.alg.vertices
    flat = Matrix(F, len(basis), sum(M.dims[v] ** 2 for v in vs),
                  [[c for v in vs for r in b[v].data for c in r] for b in basis])

    def unflatten(row):
        f, k = {}, 0
        for v in vs:
            n = M.dims[v]
            f[v] = Matrix(F, n, n, [row[k + i * n:k + (i + 1) * n] for i in range(n)])
            k += n * n
        return f

    def candidates():
        yield from basis
        for _ in range(tries):
            cs = Matrix(F, 1, len(basis), [_rng_elements(F, rng, len(basis))])
            yield unflatten((cs @ flat).data[0])

    for f in candidates():
        x = total_matrix(M, M, f)
        facs = _factor(_min_poly(x), F)
        if len(facs) < 2:
            continue
        parts = _split_by(M, f, facs[0])
        if parts:
            out = []
            for piece, inc in parts:
                for sub, inc2 in split_summands(piece, seed, tries):
                    out.append((sub, {v: inc[v] @ inc2[v] for v in inc}))
            return out
    raise RequiresFieldExtension(f"{M!r}: endomorphism ring is not split local over {F}")


def decompose(M: Rep, seed: int = 0, tries: int = 60) -> List[Rep]:
    """Split M into indecomposables; each piece is certified local."""
    return [r for r, _ in split_summands(M, seed, tries)]


def is_indecomposable(M: Rep) -> bool:
    return M.dim > 0 and certify_local(M, _endo_total(M)[1])


def iso_witness(M: Rep, N: Rep, seed: int = 0, tries: int = 200) -> Optional[Dict]:
    """An explicit isomorphism M -> N, or None."""
    if M.dim_vector != N.dim_vector:
        return None
    if M.dim == 0:
        return {v: Matrix.zeros(M.field, 0, 0) for v in M.alg.vertices}
    dim, basis = hom_space(M, N)
    if dim == 0:
        return None
    F = M.field
    for f in basis:
        if is_iso_map(M, N, f):
            return f
    if F.p and F.p ** dim <= 4096:
        import itertools
        combos = itertools.product(range(F.p), repeat=dim)
    else:
        rng = random.Random(seed)
        combos = (_rng_elements(F, rng, dim) for _ in range(tries))
    for cs in combos:
        f = {v: Matrix.zeros(F, N.dims[v], M.dims[v]) for v in M.alg.vertices}
        for c, b in zip(cs, basis):
            if c:
                f = {v: f[v] + b[v].scale(c) for v in f}
        if is_iso_map(M, N, f):
            return f
    return None


def is_isomorphic(M: Rep, N: Rep) -> bool:
    return iso_witness(M, N) is not None


# syzygies and almost split sequences -----------------------------------------

def radical_spaces(X: Rep) -> Dict:
    """Column bases of rad X = sum of arrow images, per vertex."""
    F = X.field
    out = {}
    for v in X.alg.vertices:
        imgs = [X.mats[a.label] for a in X.alg.quiver.arrows if a.target == v]
        m = Matrix.zeros(F, X.dims[v], 0)
        for x in imgs:
            m = m.hstack(x)
        out[v] = _col_space(m) if m.cols else m
    return out


def socle_spaces(X: Rep) -> Dict:
    """Column bases of soc X = common kernel of outgoing arrows, per vertex."""
    F = X.field
    out = {}
    for v in X.alg.vertices:
        outs = [X.mats[a.label] for a in X.alg.quiver.arrows if a.source == v]
        m = Matrix.zeros(F, 0, X.dims[v])
        for x in outs:
            m = m.vstack(x)
        out[v] = kernel_basis(m) if m.rows else Matrix.identity(F, X.dims[v])
    return out


def top_dims(X: Rep) -> Dict:
    rad = radical_spaces(X)
    return {v: X.dims[v] - rad[v].cols for v in X.alg.vertices}


def projective_cover(X: Rep):
    """(P, pi) with pi: P -> X a projective cover, as per-vertex matrices."""
    A, F = X.alg, X.field
    rad = radical_spaces(X)
    P, blocks = None, []
    for v in A.vertices:
        C = _complement_columns(F, rad[v], X.dims[v])
        for j in range(C.cols):
            Pv = A.projective(v)
            paths = {w: [p for p in A.basis if p[0] == v and p[1] == w] for w in A.vertices}
            x = C.block(0, C.rows, j, j + 1)
            blocks.append({w: Matrix.from_columns(F, [(X.action(p) @ x).column(0) for p in paths[w]], X.dims[w])
                           if paths[w] else Matrix.zeros(F, X.dims[w], 0) for w in A.vertices})
            P = Pv if P is None else P.direct_sum(Pv)
    if P is None:
        return Rep(A, {}, None, check=False), {v: Matrix.zeros(F, X.dims[v], 0) for v in A.vertices}
    pi = {}
    for w in A.vertices:
        m = Matrix.zeros(F, X.dims[w], 0)
        for b in blocks:
            m = m.hstack(b[w])
        pi[w] = m
    return P, pi


def syzygy(X: Rep):
    """(Omega X, iota, P, pi) with 0 -> Omega X -> P -> X -> 0."""
    P, pi = projective_cover(X)
    K = {v: kernel_basis(pi[v]) for v in X.alg.vertices}
    return P.subrep(K), K, P, pi


def omega(X: Rep) -> Rep:
    return syzygy(X)[0]


def tau(X: Rep) -> Rep:
    """Auslander-Reiten translate, tau = Omega^2 for symmetric algebras."""
    return omega(omega(X))


def _flatten(f: Dict, vs) -> List:
    return [x for v in vs for r in f[v].data for x in r]


def _rad_endo(Y: Rep) -> List[Dict]:
    basis, tot = _endo_total(Y)
    F = Y.field
    out = []
    for b, t in zip(basis, tot):
        lam = _eigen_shift(t)
        if lam is None:
            raise RequiresFieldExtension(f"{Y!r}")
        r = {v: b[v] - Matrix.identity(F, Y.dims[v]).scale(lam) for v in b}
        if any(not r[v].is_zero() for v in r):
            out.append(r)
    return out


def almost_split_sequence(X: Rep):
    """(tau X, middle term E) of the almost split sequence ending at X."""
    A, F, vs = X.alg, X.field, X.alg.vertices
    Y = tau(X)
    OX, iota, P, pi = syzygy(X)
    _, H = hom_space(OX, Y)
    _, HP = hom_space(P, Y)
    im_vecs = [_flatten(compose_maps(phi, iota), vs) for phi in HP]
    nv = len(_flatten(H[0], vs)) if H else 0
    red, piv = rref(Matrix(F, len(im_vecs), nv, im_vecs)) if im_vecs else ([], [])
    from .linalg import reduce_vector
    rad = _rad_endo(Y)
    cols = []
    for h in H:
        col = []
        for r in rad:
            col.extend(reduce_vector(_flatten(compose_maps(r, h), vs), red, piv, F))
        cols.append(col)
    nrows = len(cols[0]) if cols else 0
    if nrows:
        Z = kernel_basis(Matrix.from_columns(F, cols, nrows))
        cands = [Z.column(j) for j in range(Z.cols)]
    else:
        cands = [[1 if i == j else 0 for i in range(len(H))] for j in range(len(H))]
    eta = None
    for c in cands:
        e = {v: Matrix.zeros(F, Y.dims[v], OX.dims[v]) for v in vs}
        for cj, h in zip(c, H):
            if cj:
                e = {v: e[v] + h[v].scale(cj) for v in vs}
        if any(reduce_vector(_flatten(e, vs), red, piv, F)):
            eta = e
            break
    if eta is None:
        raise ValueError(f"no almost split sequence found ending at {X!r}")
    W = Y.direct_sum(P)
    sub = {v: eta[v].vstack(-iota[v]) for v in vs}
    E, _ = W.quotient(sub)
    return Y, E


def is_projective(X: Rep) -> bool:
    P, _ = projective_cover(X)
    return P.dim == X.dim


# knitting ------------------------------------------------------------------

class ARQuiver:
    """Indecomposables with irreducible-map multiplicities and the translate."""

    def __init__(self, alg, nodes, projective, arrows, tau_map, middles):
        self.alg = alg
        self.nodes = nodes
        self.projective = projective
        self.arrows = arrows            # {(src, tgt): multiplicity}
        self.tau = tau_map              # {node: tau(node)} on non-projectives
        self.middles = middles          # {node: {summand: multiplicity}}

    def dim_vectors(self):
        return [n.dim_vector for n in self.nodes]

    def tau_orbits(self):
        seen, orbits = set(), []
        for x in sorted(self.tau):
            if x in seen:
                continue
            orb, y = [], x
            while y not in seen:
                seen.add(y)
                orb.append(y)
                y = self.tau[y]
            orbits.append(orb)
        return orbits

    def is_cylinder(self) -> bool:
        """tau is a permutation of the non-projective nodes (periodic, so the stable part closes up)."""
        nonproj = {i for i, p in enumerate(self.projective) if not p}
        return set(self.tau) == nonproj and set(self.tau.values()) == nonproj

    def mesh_report(self):
        """Middle terms versus arrows into each node, plus dimension additivity."""
        bad = []
        for x, mid in self.middles.items():
            into = {s: m for (s, t), m in self.arrows.items() if t == x}
            if into != mid:
                bad.append((x, "arrows", into, mid))
            dv = [a + b for a, b in zip(self.nodes[x].dim_vector, self.nodes[self.tau[x]].dim_vector)]
            tot = [0] * len(dv)
            for s, m in mid.items():
                tot = [t + m * d for t, d in zip(tot, self.nodes[s].dim_vector)]
            if tot != dv:
                bad.append((x, "additivity", tot, dv))
        return not bad, bad

    def labels(self):
        return [label_module(n) for n in self.nodes]

    def to_dot(self) -> str:
        labs = self.labels()
        lines = [f'digraph "AR({self.alg.name})" {{', "  rankdir=LR;"]
        for i, n in enumerate(self.nodes):
            dv = ",".join(map(str, n.dim_vector))
            shape = "box" if self.projective[i] else "ellipse"
            lines.append(f'  n{i} [label="{labs[i]}\\n({dv})", shape={shape}];')
        for (s, t), m in sorted(self.arrows.items()):
            for _ in range(m):
                lines.append(f"  n{s} -> n{t};")
        for x, y in sorted(self.tau.items()):
            lines.append(f"  n{x} -> n{y} [style=dashed, constraint=false, label=tau];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_data(self):
        labs = self.labels()
        return {"algebra": self.alg.name, "field": str(self.alg.field),
                "nodes": [{"id": i, "label": labs[i], "dim_vector": list(n.dim_vector),
                           "projective": self.projective[i]} for i, n in enumerate(self.nodes)],
                "arrows": [{"source": s, "target": t, "multiplicity": m}
                           for (s, t), m in sorted(self.arrows.items())],
                "tau": [{"node": x, "tau": y} for x, y in sorted(self.tau.items())],
                "cylinder": self.is_cylinder(), "mesh_ok": self.mesh_report()[0]}


def label_module(X: Rep) -> str:
    """Short name: S_i, M_i (dimension vector (1,1) with top S_i), P_i, or top/dims."""
    dv = X.dim_vector
    tops = top_dims(X)
    topv = [v for v in X.alg.vertices if tops[v]]
    if X.dim == 1:
        return f"S{topv[0]}"
    if getattr(X, "_projective", False):
        return f"Q{topv[0]}"
    if X.alg.quiver.vertices == [1, 2] and dv == (1, 1) and len(topv) == 1:
        return f"M{topv[0]}"
    return f"U{''.join(map(str, topv))}[{','.join(map(str, dv))}]"


def knit(alg: FDAlgebra, cap: int = NODE_CAP) -> ARQuiver:
    """Knit the AR quiver from the projectives backwards along almost split sequences."""
    nodes, proj = [], []

    def find(X):
        for i, n in enumerate(nodes):
            if n.dim_vector == X.dim_vector and is_isomorphic(n, X):
                return i
        return None

    def add(X, is_proj=False):
        i = find(X)
        if i is not None:
            return i, False
        if len(nodes) >= cap:
            raise PossiblyInfiniteType(f"more than {cap} indecomposables knitted")
        X._projective = is_proj
        nodes.append(X)
        proj.append(is_proj)
        return len(nodes) - 1, True

    arrows, tau_map, middles = {}, {}, {}
    queue = []
    for v in alg.vertices:
        P = alg.projective(v)
        pi, _ = add(P, True)
        rad = P.subrep(radical_spaces(P))
        for piece in decompose(rad):
            ri, new = add(piece)
            arrows[(ri, pi)] = arrows.get((ri, pi), 0) + 1
            if new:
                queue.append(ri)
    while queue:
        x = queue.pop(0)
        Y, E = almost_split_sequence(nodes[x])
        yi, new = add(Y)
        if new:
            queue.append(yi)
        tau_map[x] = yi
        mid = {}
        for piece in decompose(E):
            pi_, new = add(piece, is_projective(piece))
            mid[pi_] = mid.get(pi_, 0) + 1
            if new and not proj[pi_]:
                queue.append(pi_)
        middles[x] = mid
        for s, m in mid.items():
            arrows[(s, x)] = m
            if (yi, s) not in arrows:
                arrows[(yi, s)] = m
    # arrows out of tau X into middle terms are known from the mesh; projectives get rad P -> P
    return ARQuiver(alg, nodes, proj, arrows, tau_map, middles)


def irreducible_multiplicities(nodes: List[Rep]) -> Dict:
    """dim rad(X,Y)/rad^2(X,Y) over a complete list of indecomposables."""
    n = len(nodes)
    F = nodes[0].field
    vs = nodes[0].alg.vertices
    rad = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                rad[(i, j)] = _rad_endo(nodes[i])
            else:
                rad[(i, j)] = hom_space(nodes[i], nodes[j])[1]
    out = {}
    for i in range(n):
        for j in range(n):
            if not rad[(i, j)]:
                continue
            prods = []
            for z in range(n):
                for f in rad[(i, z)]:
                    for g in rad[(z, j)]:
                        prods.append(_flatten(compose_maps(g, f), vs))
            base = [_flatten(f, vs) for f in rad[(i, j)]]
            nv = len(base[0])
            r1 = rank(Matrix(F, len(base), nv, base))
            r2 = rank(Matrix(F, len(prods), nv, prods)) if prods else 0
            if r1 - r2:
                out[(i, j)] = r1 - r2
    return out


def ar_quiver(alg: FDAlgebra) -> ARQuiver:
    return knit(alg)


def enumerate_indecomposables(alg: FDAlgebra) -> List[Rep]:
    return knit(alg).nodes


def brute_force_indecomposables(alg: FDAlgebra, max_total_dim: int) -> List[Rep]:
    """All indecomposables of total dimension <= max_total_dim over a small prime field."""
    import itertools
    F = alg.field
    if not F.p:
        raise ValueError("brute force needs a finite field")
    arrows = alg.quiver.arrows
    vs = alg.vertices
    found = []
    for dims in itertools.product(range(max_total_dim + 1), repeat=len(vs)):
        if not 0 < sum(dims) <= max_total_dim:
            continue
        dd = dict(zip(vs, dims))
        sizes = [dd[a.target] * dd[a.source] for a in arrows]
        for entries in itertools.product(range(F.p), repeat=sum(sizes)):
            mats, pos = {}, 0
            for a, s in zip(arrows, sizes):
                r, c = dd[a.target], dd[a.source]
                mats[a.label] = Matrix(F, r, c, [entries[pos + i * c:pos + (i + 1) * c] for i in range(r)])
                pos += s
            X = Rep(alg, dd, mats, check=False)
            if X.relation_violations() or not is_indecomposable(X):
                continue
            if not any(Y.dim_vector == X.dim_vector and is_isomorphic(X, Y) for Y in found):
                found.append(X)
    return found


# bricks, Hom tables and orthogonality ------------------------------------------

def standard_modules(alg: FDAlgebra) -> Dict[str, Rep]:
    """Q1, Q2 (projectives), M1, M2 (the (1,1) modules with top S1, S2), S1, S2."""
    out = {"Q1": alg.projective(1), "Q2": alg.projective(2)}
    out["Q1"].name, out["Q2"].name = "Q1", "Q2"
    out["M1"] = alg.rep({1: 1, 2: 1}, {"a": [[1]]}, "M1")
    out["M2"] = alg.rep({1: 1, 2: 1}, {"b": [[1]]}, "M2")
    out["S1"], out["S2"] = alg.simple(1), alg.simple(2)
    return out


HOM_ORDER = ["Q1", "Q2", "M1", "M2", "S1", "S2"]


def hom_table(alg: FDAlgebra, order=HOM_ORDER):
    """Rows X, columns Y, entry dim Hom(X, Y)."""
    mods = standard_modules(alg)
    return [[hom_dim(mods[x], mods[y]) for y in order] for x in order]


def format_table(table, order=HOM_ORDER) -> str:
    w = max(len(s) for s in order) + 1
    lines = ["Hom".ljust(w) + "".join(s.rjust(w) for s in order)]
    for name, row in zip(order, table):
        lines.append(name.ljust(w) + "".join(str(x).rjust(w) for x in row))
    return "\n".join(lines) + "\n"


def bricks(alg: FDAlgebra, nodes: List[Rep] = None) -> List[Rep]:
    nodes = nodes if nodes is not None else enumerate_indecomposables(alg)
    return [X for X in nodes if hom_dim(X, X) == 1]


def single_simple(X: Rep):
    """The vertex i if every composition factor of X is S_i, else None."""
    sup = X.support()
    return next(iter(sup)) if len(sup) == 1 else None


def orthogonality_report(alg: FDAlgebra, nodes: List[Rep] = None) -> dict:
    """Check: Hom(A, B) = 0 forces A or B to be filtered by a single simple.

    Vanishing of Hom(A, B) passes to subsets, and a set fails to be
    single-simple exactly when it contains a mixed module or two modules with
    different supports.  So a counterexample exists iff one exists with
    |A|, |B| <= 2, and checking those pairs is exhaustive over all subsets.
    """
    nodes = nodes if nodes is not None else enumerate_indecomposables(alg)
    n = len(nodes)
    H = [[hom_dim(x, y) for y in nodes] for x in nodes]
    sup = [single_simple(x) for x in nodes]

    def impure(S):
        vals = {sup[i] for i in S}
        return None in vals or len(vals) > 1

    small = [(i,) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    bad = [S for S in small if impure(S)]
    checked = 0
    for A in bad:
        for B in bad:
            checked += 1
            if all(H[a][b] == 0 for a in A for b in B):
                labs = [label_module(x) for x in nodes]
                return {"algebra": alg.name, "ok": False, "pairs_checked": checked,
                        "counterexample": {"A": [labs[a] for a in A], "B": [labs[b] for b in B]}}
    return {"algebra": alg.name, "ok": True, "pairs_checked": checked, "indecomposables": n}
