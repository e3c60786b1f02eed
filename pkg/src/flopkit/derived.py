"""Complexes of contraction-algebra representations and the functors acting on them.

Objects of the category C (complexes whose cohomology is a module over the
contraction algebra) are stored as bounded complexes of representations of
``lambda_con(1)``.  The NCCR at n = 1 enters only through the projective
resolutions of the simples, which compute RHom in C; on a complex whose vertex-0
part is zero, any path through vertex 0 acts as zero.

Mutation is realized on the contraction side.  For k = 1 the two-term tilting
complex behind Phi_i is, up to a shift, the restriction of the two-sided complex
``A e_j (x) e_j A -> A`` (j the other vertex), so Phi_i(X) = Cone(X e_j (x) e_j A ->
X)[-1] and its inverse is Cone(X -> Hom_k(A e_j, X e_j)).  Both are strict
functors on complexes.  The spherical twist needs the degree 2 and 3 classes of
RHom(S_i, -), which are not chain maps of contraction-algebra complexes, so it is
built from a truncated NCCR resolution and its output lives over the NCCR.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

from .fdrep import (FDAlgebra, Rep, _col_space, hom_space, is_isomorphic, label_module,
                    lambda_con, split_summands, standard_modules)
from .linalg import QQ, Field, Matrix, kernel_basis, rank, solve
from .nccr import NCCRContext, lambda_n, simple_resolution, standard_maps

CON_LABELS = {"e": "a", "f": "b"}


# ambient algebras -------------------------------------------------------------

class NCCRModules:
    """Finite-dimensional modules over the n = 1 NCCR (vertices 0, 1, 2).

    Provides the attributes ``Rep`` needs; relations are those of the algebra,
    nilpotency is the caller's business.
    """

    kind = "nccr"

    def __init__(self, field: Field = QQ, max_degree: int = 24):
        self.h = lambda_n(1, field, max_degree=max_degree)
        self.max_degree = max_degree
        self.quiver = self.h.quiver
        self.relations = self.h.relations
        self.field = field
        self.name = "lambda_1"

    @property
    def vertices(self):
        return self.quiver.vertices

    def __repr__(self):
        return f"NCCRModules({self.field})"


_CACHE: Dict = {}


def contraction_algebra(field: Field = QQ) -> FDAlgebra:
    key = ("con", field)
    if key not in _CACHE:
        _CACHE[key] = lambda_con(1, field)
    return _CACHE[key]


def nccr_modules(field: Field = QQ) -> NCCRModules:
    key = ("nccr", field)
    if key not in _CACHE:
        _CACHE[key] = NCCRModules(field)
    return _CACHE[key]


def _is_nccr(alg) -> bool:
    return getattr(alg, "kind", None) == "nccr"


def vdim(rep: Rep, v) -> int:
    return rep.dims.get(v, 0)


def path_matrix(rep: Rep, path) -> Matrix:
    """Matrix of an NCCR path acting on rep (either kind): rep_src -> rep_tgt."""
    src, tgt, labels = path
    F = rep.field
    if _is_nccr(rep.alg):
        return rep.action(path)
    if src == 0 or tgt == 0 or any(l not in CON_LABELS for l in labels):
        return Matrix.zeros(F, vdim(rep, tgt), vdim(rep, src))
    return rep.action((src, tgt, tuple(CON_LABELS[l] for l in labels)))


def elem_matrix(rep: Rep, x) -> Matrix:
    """Matrix of a homogeneous NCCR element x (from x.i to x.j) acting on rep."""
    F = rep.field
    out = Matrix.zeros(F, vdim(rep, x.j), vdim(rep, x.i))
    if x.is_zero():
        return out
    basis = x.h.component(x.d, x.i, x.j).basis
    for c, p in zip(x.coeffs, basis):
        if c:
            out = out + path_matrix(rep, p).scale(c)
    return out


# complexes ----------------------------------------------------------------------

def _zero_map(src: Rep, tgt: Rep) -> Dict:
    F = src.field
    return {v: Matrix.zeros(F, tgt.dims[v], src.dims[v]) for v in src.alg.vertices}


class CObject:
    """Bounded cochain complex of representations; ``diffs[p]: terms[p] -> terms[p+1]``.

    Terms are Reps of one algebra (the contraction algebra, or NCCRModules for
    twist outputs).  Zero terms are dropped.  Immutable by convention.
    """

    def __init__(self, alg, terms: Dict[int, Rep], diffs: Optional[Dict[int, Dict]] = None,
                 name: str = "", check: bool = True):
        self.alg = alg
        self.field = alg.field
        self.terms = {p: r for p, r in sorted(terms.items()) if r.dim}
        self.diffs = {}
        for p, X in self.terms.items():
            Y = self.terms.get(p + 1)
            if Y is None:
                continue
            m = (diffs or {}).get(p)
            self.diffs[p] = {v: m[v] for v in alg.vertices} if m is not None else _zero_map(X, Y)
        self.name = name
        self._coh = None
        if check:
            bad = self.violations()
            if bad:
                raise ValueError(f"not a complex of representations: {bad}")

    # structure --------------------------------------------------------------
    @property
    def degrees(self) -> List[int]:
        return sorted(self.terms)

    def term(self, p) -> Rep:
        t = self.terms.get(p)
        if t is None:
            return Rep(self.alg, {}, None, check=False)
        return t

    def d(self, p) -> Dict:
        m = self.diffs.get(p)
        if m is None:
            return _zero_map(self.term(p), self.term(p + 1))
        return m

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def size(self) -> int:
        return sum(r.dim for r in self.terms.values())

    def violations(self) -> List[str]:
        bad = []
        for p, m in self.diffs.items():
            X, Y = self.terms[p], self.terms[p + 1]
            for a in self.alg.quiver.arrows:
                s, t = a.source, a.target
                if m[t] @ X.mats[a.label] != Y.mats[a.label] @ m[s]:
                    bad.append(f"d^{p} does not commute with {a.label}")
            nxt = self.diffs.get(p + 1)
            if nxt is not None and any(not (nxt[v] @ m[v]).is_zero() for v in self.alg.vertices):
                bad.append(f"d^{p + 1} d^{p} != 0")
        return bad

    def __repr__(self):
        body = ", ".join(f"{p}: {r.dim_vector}" for p, r in self.terms.items())
        return f"CObject({self.name or '?'}; {body})"

    # constructions ------------------------------------------------------------
    @classmethod
    def module(cls, M: Rep, degree: int = 0, name: str = "") -> "CObject":
        return cls(M.alg, {degree: M}, {}, name=name or M.name)

    @classmethod
    def zero(cls, alg) -> "CObject":
        return cls(alg, {}, {})

    def shift(self, n: int) -> "CObject":
        """X[n]: degree p holds X^{p+n}; differentials change sign for odd n."""
        sign = -1 if n % 2 else 1
        terms = {p - n: r for p, r in self.terms.items()}
        diffs = {p - n: {v: m[v].scale(sign) for v in m} for p, m in self.diffs.items()}
        name = self.name and (f"{self.name}[{n}]" if n else self.name)
        return CObject(self.alg, terms, diffs, name=name, check=False)

    def direct_sum(self, other: "CObject") -> "CObject":
        from .linalg import block_matrix
        F = self.field
        terms, diffs = {}, {}
        for p in sorted(set(self.terms) | set(other.terms)):
            terms[p] = self.term(p).direct_sum(other.term(p))
        for p in terms:
            if p + 1 not in terms:
                continue
            a, b = self.d(p), other.d(p)
            diffs[p] = {}
            for v in self.alg.vertices:
                diffs[p][v] = block_matrix(F, [[a[v], None], [None, b[v]]],
                                           [a[v].rows, b[v].rows], [a[v].cols, b[v].cols])
        return CObject(self.alg, terms, diffs, name=f"{self.name}+{other.name}", check=False)


# cohomology ----------------------------------------------------------------------

def _kernel(m: Matrix) -> Matrix:
    if m.rows == 0:
        return Matrix.identity(m.field, m.cols)
    return kernel_basis(m)


def _coords(basis: Matrix, vecs: Matrix) -> Matrix:
    """Coordinates of the columns of vecs in the (independent) columns of basis."""
    if vecs.cols == 0:
        return Matrix.zeros(basis.field, basis.cols, 0)
    if basis.cols == 0:
        if not vecs.is_zero():
            raise ValueError("vectors outside the span")
        return Matrix.zeros(basis.field, 0, vecs.cols)
    x = solve(basis, vecs)
    if x is None:
        raise ValueError("vectors outside the span")
    return x


def _span(m: Matrix) -> Matrix:
    return _col_space(m) if m.cols else m


def to_contraction(M: Rep) -> Rep:
    """An NCCR module with zero vertex-0 part as a contraction-algebra rep."""
    if not _is_nccr(M.alg):
        return M
    if M.dims[0]:
        raise ValueError("module has a nonzero vertex-0 part")
    A = contraction_algebra(M.field)
    return Rep(A, {1: M.dims[1], 2: M.dims[2]}, {"a": M.mats["e"], "b": M.mats["f"]},
               name=M.name)


def to_nccr(M: Rep) -> Rep:
    if _is_nccr(M.alg):
        return M
    N = nccr_modules(M.field)
    return Rep(N, {0: 0, 1: M.dims[1], 2: M.dims[2]}, {"e": M.mats["a"], "f": M.mats["b"]},
               name=M.name)


def cohomology_at(x: CObject, p: int) -> Rep:
    return to_contraction(_raw_cohomology(x, p))


def _raw_cohomology(x: CObject, p: int) -> Rep:
    X = x.term(p)
    vs = x.alg.vertices
    out_d, in_d = x.d(p), x.d(p - 1)
    Z = {v: _kernel(out_d[v]) for v in vs}
    Zrep = X.subrep(Z)
    B = {v: _span(_coords(Z[v], in_d[v])) for v in vs}
    H, _ = Zrep.quotient(B)
    return H


def cohomology(x: CObject) -> Dict[int, Rep]:
    """Nonzero cohomology modules by degree (contraction-algebra reps)."""
    if x._coh is None:
        out = {}
        for p in x.degrees:
            H = cohomology_at(x, p)
            if H.dim:
                out[p] = H
        x._coh = out
    return x._coh


def homological_length(x: CObject) -> int:
    H = cohomology(x)
    if not H:
        raise ValueError("homological length of the zero object")
    return max(H) - min(H)


def is_acyclic(x: CObject) -> bool:
    return not cohomology(x)


# mutation ------------------------------------------------------------------------

def _paths_between(A: FDAlgebra, i, j) -> List:
    return [p for p in A.basis if p[0] == i and p[1] == j]


def _copies(M: Rep, n: int) -> Rep:
    out = Rep(M.alg, {}, None, check=False)
    for _ in range(n):
        out = out.direct_sum(M)
    return out


def _dual_projective(A: FDAlgebra, j) -> Rep:
    """D(A e_j) as a right module: (phi.c)(u) = phi(c u)."""
    F = A.field
    at = {v: _paths_between(A, v, j) for v in A.vertices}
    mats = {}
    for a in A.quiver.arrows:
        s, t = a.source, a.target
        rows = []
        for u2 in at[t]:
            prod = A.product((s, t, (a.label,)), u2)
            rows.append([prod[A.index[u]] for u in at[s]])
        mats[a.label] = Matrix(F, len(at[t]), len(at[s]), rows)
    return Rep(A, {v: len(at[v]) for v in A.vertices}, mats, name=f"I{j}")


def _kron_identity(D: Matrix, n: int) -> Matrix:
    """D (x) id_n with index (b, q) -> b * n + q."""
    F = D.field
    rows = []
    for r in range(D.rows):
        for q in range(n):
            row = [F.zero()] * (D.cols * n)
            for c in range(D.cols):
                if D[r, c]:
                    row[c * n + q] = D[r, c]
            rows.append(row)
    return Matrix(F, D.rows * n, D.cols * n, rows)


def _stack_cols(F, cols, nrows) -> Matrix:
    return Matrix.from_columns(F, cols, nrows) if cols else Matrix.zeros(F, nrows, 0)


def _require_k1(x: CObject):
    if _is_nccr(x.alg) or getattr(x.alg, "k", None) != 1:
        raise ValueError("chain-level functors need a complex of lambda_con(1) representations")


def _empty(alg) -> Rep:
    return Rep(alg, {}, None, check=False)


def _cone(alg, S: Dict[int, Rep], dS: Dict[int, Dict], T: Dict[int, Rep], dT: Dict[int, Dict],
          g: Dict[int, Dict], name: str = "") -> CObject:
    """Cone(g: S -> T): degree m holds S^{m+1} + T^m, d(s, t) = (-d s, g s + d t).

    Complexes are given as (terms, diffs) dictionaries; missing pieces are zero.
    """
    from .linalg import block_matrix
    F = alg.field
    e = _empty(alg)
    degs = sorted({m - 1 for m in S} | set(T))
    terms, diffs = {}, {}
    for m in degs:
        terms[m] = S.get(m + 1, e).direct_sum(T.get(m, e))
    for m in degs:
        if m + 1 not in terms:
            continue
        d = {}
        for v in alg.vertices:
            s0, s1 = vdim(S.get(m + 1, e), v), vdim(S.get(m + 2, e), v)
            t0, t1 = vdim(T.get(m, e), v), vdim(T.get(m + 1, e), v)
            ds = dS.get(m + 1, {}).get(v) if s0 and s1 else None
            gm = g.get(m + 1, {}).get(v) if s0 and t1 else None
            dt = dT.get(m, {}).get(v) if t0 and t1 else None
            d[v] = block_matrix(F, [[ds.scale(-1) if ds is not None else None, None],
                                    [gm, dt]], [s1, t1], [s0, t0])
        diffs[m] = d
    return CObject(alg, terms, diffs, name=name, check=False)


def _eval_data(x: CObject, j):
    """U = X e_j (x) e_j A with its differential and the evaluation U -> X."""
    A = x.alg
    F = A.field
    P = A.projective(j)
    at = {v: _paths_between(A, j, v) for v in A.vertices}
    U, dU, ev = {}, {}, {}
    for m, X in x.terms.items():
        n = X.dims[j]
        if not n:
            continue
        U[m] = _copies(P, n)
        ev[m] = {}
        for v in A.vertices:
            cols = []
            for b in range(n):
                for q in at[v]:
                    cols.append(X.action(q).column(b))
            ev[m][v] = _stack_cols(F, cols, X.dims[v])
    for m in U:
        if m + 1 in U:
            D = x.d(m)[j]
            dU[m] = {v: _kron_identity(D, len(at[v])) for v in A.vertices}
    return U, dU, ev


def _coev_data(y: CObject, j):
    """W = Hom_k(A e_j, Y e_j) with its differential and the coevaluation Y -> W."""
    A = y.alg
    F = A.field
    I = _dual_projective(A, j)
    at = {v: _paths_between(A, v, j) for v in A.vertices}
    W, dW, coev = {}, {}, {}
    for m, Y in y.terms.items():
        n = Y.dims[j]
        if not n:
            continue
        W[m] = _copies(I, n)
        coev[m] = {}
        for v in A.vertices:
            rows = []
            acts = [Y.action(u) for u in at[v]]
            for b in range(n):
                for act in acts:
                    rows.append(list(act.data[b]))
            coev[m][v] = Matrix(F, n * len(at[v]), Y.dims[v], rows)
    for m in W:
        if m + 1 in W:
            D = y.d(m)[j]
            dW[m] = {v: _kron_identity(D, len(at[v])) for v in A.vertices}
    return W, dW, coev


def mutation(i: int, x: CObject, direction: int = 1, check: bool = False) -> CObject:
    """Phi_i (direction +1) or its inverse (-1) on a complex of lambda_con(1) reps.

    Phi_i(X) = Cone(X e_j (x) e_j A -> X)[-1] and Phi_i^{-1}(Y) = Cone(Y -> Hom_k(A e_j, Y e_j)),
    j the other vertex; the output is minimalized.
    """
    _require_k1(x)
    if i not in (1, 2) or direction not in (1, -1):
        raise ValueError("mutation(i, x, direction) needs i in {1, 2} and direction +-1")
    j = 3 - i
    A = x.alg
    if direction == 1:
        U, dU, ev = _eval_data(x, j)
        out = _cone(A, U, dU, x.terms, x.diffs, ev).shift(-1)
    else:
        W, dW, coev = _coev_data(x, j)
        out = _cone(A, x.terms, x.diffs, W, dW, coev)
    if check:
        bad = out.violations()
        if bad:
            raise AssertionError(f"mutation produced an invalid complex: {bad}")
    return minimalize(out)


# minimal models ------------------------------------------------------------------

def _right_inverse(m: Matrix) -> Matrix:
    return solve(m, Matrix.identity(m.field, m.rows))


def _trim_once(x: CObject) -> Optional[CObject]:
    """Drop an end term whose outer differential is injective (bottom) or surjective (top)."""
    if len(x.degrees) < 2:
        return None
    vs = x.alg.vertices
    terms, diffs = dict(x.terms), {p: dict(m) for p, m in x.diffs.items()}
    b, t = x.degrees[0], x.degrees[-1]
    db = x.d(b)
    if b + 1 in x.terms and all(rank(db[v]) == x.terms[b].dims[v] for v in vs):
        img = {v: _span(db[v]) for v in vs}
        Q, proj = x.terms[b + 1].quotient(img)
        del terms[b]
        diffs.pop(b, None)
        terms[b + 1] = Q
        if b + 1 in diffs:
            nxt = diffs[b + 1]
            diffs[b + 1] = {v: nxt[v] @ _right_inverse(proj[v]) if proj[v].rows else
                            Matrix.zeros(x.field, nxt[v].rows, 0) for v in vs}
        return CObject(x.alg, terms, diffs, name=x.name, check=False)
    dt = x.d(t - 1)
    if t - 1 in x.terms and all(rank(dt[v]) == x.terms[t].dims[v] for v in vs):
        Z = {v: _kernel(dt[v]) for v in vs}
        K = x.terms[t - 1].subrep(Z)
        del terms[t]
        diffs.pop(t - 1, None)
        terms[t - 1] = K
        if t - 2 in diffs:
            prv = diffs[t - 2]
            diffs[t - 2] = {v: _coords(Z[v], prv[v]) for v in vs}
        return CObject(x.alg, terms, diffs, name=x.name, check=False)
    return None


def trim(x: CObject) -> CObject:
    while True:
        y = _trim_once(x)
        if y is None:
            return x
        x = y


def _offsets(Ys: List[Rep], v) -> List[Tuple[int, int]]:
    out, o = [], 0
    for Y in Ys:
        out.append((o, o + Y.dims[v]))
        o += Y.dims[v]
    return out


def _select(m: Matrix, rows: List[int], cols: List[int]) -> Matrix:
    return Matrix(m.field, len(rows), len(cols), [[m.data[r][c] for c in cols] for r in rows])


def _sum_reps(alg, Ys: List[Rep]) -> Rep:
    out = _empty(alg)
    for Y in Ys:
        out = out.direct_sum(Y)
    return out


def _decomposed(x: CObject):
    """Summand lists and differentials in coordinates adapted to a decomposition of each term."""
    vs = x.alg.vertices
    Ys, basis = {}, {}
    for p, X in x.terms.items():
        parts = split_summands(X)
        Ys[p] = [r for r, _ in parts]
        basis[p] = {}
        for v in vs:
            cols = [c for _, inc in parts for c in inc[v].columns()]
            basis[p][v] = _stack_cols(x.field, cols, X.dims[v])
    D = {}
    for p, m in x.diffs.items():
        D[p] = {v: _coords(basis[p + 1][v], m[v] @ basis[p][v]) for v in vs}
    return Ys, D


def _find_iso_block(x_alg, Ys, D):
    vs = x_alg.vertices
    for p in sorted(D):
        src, tgt = Ys[p], Ys[p + 1]
        for k, Y in enumerate(src):
            for l, Y2 in enumerate(tgt):
                if Y.dim_vector != Y2.dim_vector:
                    continue
                ok = True
                for v in vs:
                    (c0, c1), (r0, r1) = _offsets(src, v)[k], _offsets(tgt, v)[l]
                    if c1 > c0 and rank(D[p][v].block(r0, r1, c0, c1)) != c1 - c0:
                        ok = False
                        break
                if ok:
                    return p, k, l
    return None


def _eliminate(alg, Ys, D, p, k, l):
    """Gaussian elimination of an isomorphic component Y^p_k -> Y^{p+1}_l."""
    vs = alg.vertices
    F = alg.field
    newD = dict(D)
    src, tgt = Ys[p], Ys[p + 1]
    nd = {}
    for v in vs:
        co, ro = _offsets(src, v), _offsets(tgt, v)
        kc = list(range(*co[k]))
        lr = list(range(*ro[l]))
        oc = [c for c in range(D[p][v].cols) if c not in kc]
        orr = [r for r in range(D[p][v].rows) if r not in lr]
        m = D[p][v]
        delta = _select(m, orr, oc)
        if kc:
            phi_inv = solve(_select(m, lr, kc), Matrix.identity(F, len(kc)))
            delta = delta - _select(m, orr, kc) @ phi_inv @ _select(m, lr, oc)
        nd[v] = delta
    newD[p] = nd
    if p - 1 in D:
        newD[p - 1] = {}
        for v in vs:
            kc = set(range(*_offsets(src, v)[k]))
            m = D[p - 1][v]
            newD[p - 1][v] = _select(m, [r for r in range(m.rows) if r not in kc], list(range(m.cols)))
    if p + 1 in D:
        newD[p + 1] = {}
        for v in vs:
            lr = set(range(*_offsets(tgt, v)[l]))
            m = D[p + 1][v]
            newD[p + 1][v] = _select(m, list(range(m.rows)), [c for c in range(m.cols) if c not in lr])
    newY = dict(Ys)
    newY[p] = src[:k] + src[k + 1:]
    newY[p + 1] = tgt[:l] + tgt[l + 1:]
    return newY, newD


def eliminate(x: CObject) -> CObject:
    """Remove contractible summands by Gaussian elimination (a homotopy equivalence)."""
    if len(x.degrees) < 2:
        return x
    Ys, D = _decomposed(x)
    changed = False
    while True:
        hit = _find_iso_block(x.alg, Ys, D)
        if hit is None:
            break
        Ys, D = _eliminate(x.alg, Ys, D, *hit)
        changed = True
    terms = {p: _sum_reps(x.alg, Y) for p, Y in Ys.items()}
    out = CObject(x.alg, terms, {p: m for p, m in D.items() if terms[p].dim and terms.get(p + 1) is not None and terms[p + 1].dim},
                  name=x.name, check=False)
    return out


def _proj_map(A: FDAlgebra, v, M: Rep, vec) -> Dict:
    """The module map P_v -> M sending e_v to vec."""
    F = A.field
    out = {}
    for u in A.vertices:
        cols = [M.action(q) @ Matrix.from_columns(F, [vec], M.dims[v]) for q in _paths_between(A, v, u)]
        out[u] = _stack_cols(F, [c.column(0) for c in cols], M.dims[u])
    return out


def _hcat(F, mats: List[Matrix], rows: int) -> Matrix:
    out = Matrix.zeros(F, rows, 0)
    for m in mats:
        out = out.hstack(m)
    return out


def projective_model(x: CObject) -> CObject:
    """Quasi-isomorphic complex [Q^b -> P^{b+1} -> ... -> P^t] with projective P's.

    Built from the top by minimal projective covers of the cycles of the mapping
    cone modulo boundaries; the bottom term is the module of cone cycles, so the
    result is bounded by the cohomological range of x.
    """
    from .linalg import block_matrix
    x = trim(x)
    if len(x.degrees) < 2:
        return x
    A, F, vs = x.alg, x.field, x.alg.vertices
    b, t = x.degrees[0], x.degrees[-1]
    proj = {v: A.projective(v) for v in vs}
    P: Dict[int, Rep] = {}
    gens: Dict[int, List] = {}
    dP: Dict[int, Dict] = {}
    f: Dict[int, Dict] = {}
    e = _empty(A)
    for p in range(t, b - 1, -1):
        # Cone^p = P^{p+1} + X^p  ->  Cone^{p+1} = P^{p+2} + X^{p+1}
        P1, P2 = P.get(p + 1, e), P.get(p + 2, e)
        X0, X1 = x.term(p), x.term(p + 1)
        C0 = P1.direct_sum(X0)
        dC = {}
        for v in vs:
            mdp = dP.get(p + 1, {}).get(v)
            mf = f.get(p + 1, {}).get(v)
            mdx = x.d(p)[v]
            dC[v] = block_matrix(F, [[mdp.scale(-1) if mdp is not None and mdp.rows and mdp.cols else None, None],
                                     [mf if mf is not None and mf.rows and mf.cols else None,
                                      mdx if mdx.rows and mdx.cols else None]],
                                 [P2.dims[v], X1.dims[v]], [P1.dims[v], X0.dims[v]])
        Z = {v: _kernel(dC[v]) for v in vs}
        if p == b:
            Q = C0.subrep(Z)
            P[p] = Q
            dP[p] = {v: Z[v].block(0, P1.dims[v], 0, Z[v].cols).scale(-1) for v in vs}
            break
        # boundaries from X^{p-1} and radical of the cycles, as subspaces of C0
        dprev = x.d(p - 1)
        R = {}
        for v in vs:
            pieces = [Matrix.zeros(F, P1.dims[v], dprev[v].cols).vstack(dprev[v])] if dprev[v].cols else []
            for a in A.quiver.arrows:
                if a.target == v and Z[a.source].cols:
                    pieces.append(C0.mats[a.label] @ Z[a.source])
            R[v] = _span(_hcat(F, pieces, C0.dims[v])) if pieces else Matrix.zeros(F, C0.dims[v], 0)
        new = []
        for v in vs:
            cur = R[v]
            for c in Z[v].columns():
                test = cur.hstack(Matrix.from_columns(F, [c], C0.dims[v]))
                if rank(test) > cur.cols:
                    new.append((v, c))
                    cur = _span(test)
        Pp = _sum_reps(A, [proj[v] for v, _ in new])
        P[p] = Pp
        maps = [_proj_map(A, v, C0, c) for v, c in new]
        g = {v: _hcat(F, [m[v] for m in maps], C0.dims[v]) for v in vs}
        dP[p] = {v: g[v].block(0, P1.dims[v], 0, g[v].cols).scale(-1) for v in vs}
        f[p] = {v: g[v].block(P1.dims[v], C0.dims[v], 0, g[v].cols) for v in vs}
    diffs = {p: dP[p] for p in dP if p + 1 in P}
    return CObject(A, P, diffs, name=x.name, check=False)


def minimalize(x: CObject) -> CObject:
    """A smaller quasi-isomorphic complex: end trimming plus Gaussian elimination, to a fixed point."""
    if _is_nccr(x.alg):
        return trim(x)
    x = projective_model(x)
    while True:
        n = (x.size, len(x.degrees))
        x = eliminate(trim(x))
        if (x.size, len(x.degrees)) == n:
            return x


# RHom against spherical objects ---------------------------------------------------

@dataclass
class ProjComplex:
    """Ungraded bounded complex of NCCR projectives.

    ``terms[p]`` lists vertices; ``diffs[p][r][c]`` is the element giving the map
    from summand c of degree p to summand r of degree p + 1 (left multiplication
    on generators, so it acts on Hom(P_r, Y) = Y_r by y -> y.x).
    """

    h: object
    terms: Dict[int, List[int]]
    diffs: Dict[int, List[List[object]]]
    name: str = ""
    gens: Dict[int, List[int]] = dc_field(default_factory=dict)   # Adams degree of each generator

    @property
    def degrees(self):
        return sorted(p for p in self.terms if self.terms[p])

    @classmethod
    def from_pcomplex(cls, P, name=""):
        return cls(P.h, {p: [g.vertex for g in P.term(p)] for p in P.degrees},
                   {p: P.d(p).entries for p in P.degrees if p + 1 in P.terms}, name or P.name,
                   {p: [-g.shift for g in P.term(p)] for p in P.degrees})

    @classmethod
    def cone(cls, f, name=""):
        """Cone of a degree-one cycle f: A -> B[1], i.e. of A[-1] -> B."""
        A, B = f.A, f.B
        terms, diffs = {}, {}
        h = A.h
        degs = sorted(set(A.degrees) | set(B.degrees))
        gens = {}
        for p in degs:
            terms[p] = [g.vertex for g in A.term(p)] + [g.vertex for g in B.term(p)]
            gens[p] = [-g.shift - f.grade for g in A.term(p)] + [-g.shift for g in B.term(p)]
        for p in degs:
            if p + 1 not in terms:
                continue
            a0, a1 = len(A.term(p)), len(A.term(p + 1))
            b0, b1 = len(B.term(p)), len(B.term(p + 1))
            rows = []
            dA = A.d(p).entries if a0 and a1 else None
            dB = B.d(p).entries if b0 and b1 else None
            fp = f.comp(p).entries if a0 and b1 else None
            for r in range(a1 + b1):
                row = []
                for c in range(a0 + b0):
                    if r < a1 and c < a0:
                        x = dA[r][c]
                    elif r >= a1 and c < a0:
                        x = fp[r - a1][c] if fp else None
                    elif r >= a1 and c >= a0:
                        x = dB[r - a1][c - a0] if dB else None
                    else:
                        x = None
                    row.append(x)
                rows.append(row)
            diffs[p] = rows
        return cls(h, terms, diffs, name, gens)


def spherical_resolution(name: str, field: Field = QQ) -> ProjComplex:
    """NCCR projective resolution of S1, S2, M1 or M2 (n = 1).

    M1 = Cone(S1[-1] -> S2) and M2 = Cone(S2[-1] -> S1) along the degree-one
    classes xi.
    """
    key = ("res", name, field)
    if key in _CACHE:
        return _CACHE[key]
    ctx = _CACHE.get(("ctx", field))
    if ctx is None:
        ctx = _CACHE[("ctx", field)] = NCCRContext(1, field, max_degree=12)
    if name in ("S1", "S2"):
        out = ProjComplex.from_pcomplex(ctx.P[int(name[1])], name)
    elif name == "M1":
        out = ProjComplex.cone(ctx.maps()["xi12"], name)
    elif name == "M2":
        out = ProjComplex.cone(ctx.maps()["xi21"], name)
    else:
        raise ValueError(f"no resolution for {name!r}")
    _CACHE[key] = out
    return out


@dataclass
class HomComplex:
    """Hom(R, x) as a complex of vector spaces, with its cohomology."""

    res: ProjComplex
    x: CObject
    layout: Dict[int, List[Tuple[int, int, int, int]]]   # n -> [(p, k, vertex, offset)]
    dims: Dict[int, int]
    d: Dict[int, Matrix]

    def cohomology_dims(self) -> Dict[int, int]:
        out = {}
        for n, N in self.dims.items():
            dn = self.d.get(n)
            kern = N - (rank(dn) if dn is not None and dn.rows and N else 0)
            dp = self.d.get(n - 1)
            im = rank(dp) if dp is not None and dp.rows and dp.cols else 0
            if kern - im:
                out[n] = kern - im
        return out

    def representatives(self, n: int) -> Matrix:
        """Columns: cycles of degree n projecting to a basis of H^n."""
        F = self.x.field
        N = self.dims.get(n, 0)
        dn = self.d.get(n)
        Z = _kernel(dn) if dn is not None and dn.rows else Matrix.identity(F, N)
        dp = self.d.get(n - 1)
        B = _span(dp) if dp is not None and dp.cols and dp.rows else Matrix.zeros(F, N, 0)
        cur, reps = B, []
        for c in Z.columns():
            test = cur.hstack(Matrix.from_columns(F, [c], N))
            if rank(test) > cur.cols:
                reps.append(c)
                cur = _span(test)
        return Matrix.from_columns(F, reps, N)


def hom_complex(res: ProjComplex, x: CObject) -> HomComplex:
    F = x.field
    layout, dims = {}, {}
    if not res.degrees or x.is_zero():
        return HomComplex(res, x, {}, {}, {})
    lo = x.degrees[0] - res.degrees[-1]
    hi = x.degrees[-1] - res.degrees[0]
    for n in range(lo - 1, hi + 2):
        off, lay = 0, []
        for p in res.degrees:
            X = x.term(p + n)
            for k, v in enumerate(res.terms[p]):
                lay.append((p, k, v, off))
                off += vdim(X, v)
        layout[n], dims[n] = lay, off
    diffs = {}
    for n in range(lo - 1, hi + 1):
        sign = -1 if n % 2 == 0 else 1      # -(-1)^n
        rows = []
        D = [[None] * len(layout[n]) for _ in layout[n + 1]]
        pos_src = {(p, k): idx for idx, (p, k, _, _) in enumerate(layout[n])}
        out = Matrix.zeros(F, dims[n + 1], dims[n])
        blocks = {}
        for ti, (p, k, v, _) in enumerate(layout[n + 1]):
            # d_X applied to the (p, k) component
            dx = x.d(p + n).get(v) if (p + n) in x.terms and (p + n + 1) in x.terms else None
            if dx is not None and dx.rows and dx.cols:
                blocks[(ti, pos_src[(p, k)])] = dx
            # precomposition with the resolution differential R^p -> R^{p+1}
            if p + 1 in res.terms and p in res.diffs:
                X1 = x.term(p + n + 1)
                for kk, vv in enumerate(res.terms[p + 1]):
                    r = res.diffs[p][kk][k]
                    if r is None or r.is_zero():
                        continue
                    m = elem_matrix(X1, r)
                    if m.rows and m.cols:
                        si = pos_src[(p + 1, kk)]
                        prev = blocks.get((ti, si))
                        m = m.scale(sign)
                        blocks[(ti, si)] = m if prev is None else prev + m
        rows = [[F.zero()] * dims[n] for _ in range(dims[n + 1])]
        for (ti, si), m in blocks.items():
            r0, c0 = layout[n + 1][ti][3], layout[n][si][3]
            for a in range(m.rows):
                for b in range(m.cols):
                    if m.data[a][b]:
                        rows[r0 + a][c0 + b] = F.add(rows[r0 + a][c0 + b], m.data[a][b])
        diffs[n] = Matrix._raw(F, dims[n + 1], dims[n], rows)
    return HomComplex(res, x, layout, dims, diffs)


def rhom_simple(i: int, x: CObject) -> HomComplex:
    """Hom(P(S_i), x); ``.cohomology_dims()`` gives dim Hom(S_i, x[n]) by n."""
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    return hom_complex(spherical_resolution(f"S{i}", x.field), x)


def rhom_dims(name: str, x: CObject) -> Dict[int, int]:
    return hom_complex(spherical_resolution(name, x.field), x).cohomology_dims()


# spherical twists ------------------------------------------------------------------

def _loewy_length(x: CObject) -> int:
    """Smallest L with rad^L of every term zero (paths of length L act as zero)."""
    L = 0
    F = x.field
    for X in x.terms.values():
        cur = {v: Matrix.identity(F, vdim(X, v)) for v in X.alg.vertices}
        k = 0
        while any(m.cols for m in cur.values()):
            nxt = {v: [] for v in X.alg.vertices}
            for a in X.alg.quiver.arrows:
                m = cur[a.source]
                if m.cols and vdim(X, a.target):
                    nxt[a.target].append(X.mats[a.label] @ m)
            cur = {}
            for v, ms in nxt.items():
                tot = Matrix.zeros(F, vdim(X, v), 0)
                for m in ms:
                    tot = tot.hstack(m)
                cur[v] = _span(tot) if tot.cols else tot
            k += 1
        L = max(L, k)
    return L


def _trunc_projective(field: Field, v, bound: int):
    """P_v modulo paths of Adams degree > bound, with its path basis per vertex."""
    key = ("trunc", field, v, bound)
    if key in _CACHE:
        return _CACHE[key]
    alg = nccr_modules(field)
    h = alg.h
    if bound > alg.max_degree:
        raise ValueError(f"truncation degree {bound} exceeds {alg.max_degree}")
    basis = {u: [] for u in alg.vertices}
    for d in range(0, bound + 1):
        for u in alg.vertices:
            basis[u].extend(h.component(d, v, u).basis)
    index = {u: {q: k for k, q in enumerate(basis[u])} for u in alg.vertices}
    mats = {}
    for a in alg.quiver.arrows:
        s, t = a.source, a.target
        w = h.grading.weights[a.label]
        rows = [[field.zero()] * len(basis[s]) for _ in basis[t]]
        for c, q in enumerate(basis[s]):
            d = h.degree(q)
            if d + w > bound:
                continue
            coords = h.nf((v, t, q[2] + (a.label,)))
            for k, z in enumerate(coords):
                if z:
                    p = h.component(d + w, v, t).basis[k]
                    rows[index[t][p]][c] = z
        mats[a.label] = Matrix(field, len(basis[t]), len(basis[s]), rows)
    rep = Rep(alg, {u: len(basis[u]) for u in alg.vertices}, mats, name=f"P{v}<={bound}",
              check=False)
    _CACHE[key] = (rep, basis, index)
    return _CACHE[key]


def _elem_on_truncated(r, src, tgt, field) -> Dict:
    """Left multiplication by r: truncated P_s -> truncated P_t, per vertex."""
    (Ps, bs, _), (Pt, bt, it) = src, tgt
    h = nccr_modules(field).h
    out = {}
    basis_r = r.h.component(r.d, r.i, r.j).basis
    for u in Ps.alg.vertices:
        rows = [[field.zero()] * len(bs[u]) for _ in bt[u]]
        for c, q in enumerate(bs[u]):
            for coef, b in zip(r.coeffs, basis_r):
                if not coef:
                    continue
                path = (b[0], q[1], b[2] + q[2])
                d = h.degree(path)
                coords = h.nf(path)
                comp = h.component(d, b[0], q[1]).basis
                for k, z in enumerate(coords):
                    if z:
                        tgt_path = comp[k]
                        if tgt_path in it[u]:
                            i = it[u][tgt_path]
                            rows[i][c] = field.add(rows[i][c], field.mul(coef, z))
        out[u] = Matrix(field, len(bt[u]), len(bs[u]), rows)
    return out


def _truncated_resolution(res: ProjComplex, N: int, field: Field):
    """Terms, differentials and summand data of res modulo Adams degrees > N."""
    alg = nccr_modules(field)
    pieces, terms, diffs = {}, {}, {}
    for p in res.degrees:
        pieces[p] = [_trunc_projective(field, v, N - g) for v, g in zip(res.terms[p], res.gens[p])]
        terms[p] = _sum_reps(alg, [t[0] for t in pieces[p]])
    for p in res.degrees:
        if p + 1 not in pieces:
            continue
        blocks = {v: [] for v in alg.vertices}
        rows_out = []
        for r, tgt in enumerate(pieces[p + 1]):
            row = []
            for c, src in enumerate(pieces[p]):
                x = res.diffs[p][r][c]
                if x is None or x.is_zero():
                    row.append({v: Matrix.zeros(field, tgt[0].dims[v], src[0].dims[v]) for v in alg.vertices})
                else:
                    row.append(_elem_on_truncated(x, src, tgt, field))
            rows_out.append(row)
        from .linalg import block_matrix
        diffs[p] = {v: block_matrix(field, [[m[v] for m in row] for row in rows_out],
                                    [t[0].dims[v] for t in pieces[p + 1]],
                                    [s[0].dims[v] for s in pieces[p]]) for v in alg.vertices}
    return pieces, terms, diffs


def _to_nccr_complex(x: CObject) -> CObject:
    if _is_nccr(x.alg):
        return x
    alg = nccr_modules(x.field)
    terms = {p: to_nccr(X) for p, X in x.terms.items()}
    diffs = {}
    for p, d in x.diffs.items():
        dd = dict(d)
        dd[0] = Matrix.zeros(x.field, 0, 0)
        diffs[p] = dd
    return CObject(alg, terms, diffs, name=x.name, check=False)


def _twist_plus(name: str, x: CObject) -> CObject:
    F = x.field
    res = spherical_resolution(name, F)
    H = hom_complex(res, x)
    gmax = max(g for p in res.degrees for g in res.gens[p])
    N = gmax + max(_loewy_length(x), 1) + 1
    pieces, P, dP = _truncated_resolution(res, N, F)
    alg = nccr_modules(F)
    X = _to_nccr_complex(x)
    E, dE, ev = {}, {}, {}
    copies = []          # (n, z) with z a cycle column
    for n in sorted(H.dims):
        R = H.representatives(n) if H.dims[n] else None
        if R is None:
            continue
        for z in R.columns():
            copies.append((n, z))
    e = _empty(alg)
    for m in range(min((p + n for n, _ in copies for p in res.degrees), default=0),
                   max((p + n for n, _ in copies for p in res.degrees), default=-1) + 1):
        reps, evs = [], []
        for n, z in copies:
            p = m - n
            if p not in P:
                continue
            reps.append(P[p])
            Xm = x.term(m)
            cols = {u: [] for u in alg.vertices}
            for k, (v, g) in enumerate(zip(res.terms[p], res.gens[p])):
                off = next(o for (pp, kk, _, o) in H.layout[n] if pp == p and kk == k)
                zk = Matrix.from_columns(F, [z[off:off + vdim(Xm, v)]], vdim(Xm, v))
                _, basis, _ = pieces[p][k]
                for u in alg.vertices:
                    for q in basis[u]:
                        cols[u].append(path_matrix(Xm, q) @ zk if vdim(Xm, v) else
                                       Matrix.zeros(F, vdim(Xm, u), 1))
            evs.append({u: _hcat(F, cols[u], vdim(Xm, u)) for u in alg.vertices})
        if reps:
            E[m] = _sum_reps(alg, reps)
            ev[m] = {u: _hcat(F, [g[u] for g in evs], vdim(x.term(m), u)) for u in alg.vertices}
    for m in E:
        if m + 1 not in E:
            continue
        # block diagonal over copies present in both degrees, sign (-1)^n
        from .linalg import block_matrix
        src = [c for c, (n, _) in enumerate(copies) if m - n in P]
        tgt = [c for c, (n, _) in enumerate(copies) if m + 1 - n in P]
        d = {}
        for u in alg.vertices:
            blocks = []
            for c2 in tgt:
                row = []
                for c1 in src:
                    n1 = copies[c1][0]
                    if c1 == c2 and m - n1 in dP:
                        row.append(dP[m - n1][u].scale(-1 if n1 % 2 else 1))
                    else:
                        row.append(None)
                blocks.append(row)
            d[u] = block_matrix(F, blocks, [P[m + 1 - copies[c][0]].dims[u] for c in tgt],
                                [P[m - copies[c][0]].dims[u] for c in src])
        dE[m] = d
    out = _cone(alg, E, dE, X.terms, X.diffs, ev, name=f"T_{name}({x.name})")
    return out


def dual(x: CObject) -> CObject:
    """Vector-space dual, twisted by the anti-automorphism swapping e/f, a_i/c_i.

    On contraction-algebra complexes this sends M1 to M2 and fixes the simples.
    """
    F = x.field
    alg = x.alg
    if _is_nccr(alg):
        swap = {"e": "f", "f": "e", "a1": "c1", "c1": "a1", "a2": "c2", "c2": "a2", "l": "l"}
    else:
        swap = {"a": "b", "b": "a"}
    terms, diffs = {}, {}
    for p, X in x.terms.items():
        terms[-p] = Rep(alg, X.dims, {a: X.mats[swap[a]].transpose() for a in X.mats},
                        check=False)
    for p, d in x.diffs.items():
        diffs[-p - 1] = {v: m.transpose() for v, m in d.items()}
    return CObject(alg, terms, diffs, name=f"D({x.name})", check=False)


_DUAL_NAME = {"S1": "S1", "S2": "S2", "M1": "M2", "M2": "M1"}


def twist(obj, x: CObject, direction: int = 1) -> CObject:
    """Spherical twist T_S(x) = Cone(RHom(S, x) (x) S -> x) for S in {S1, S2, M1, M2}.

    ``obj`` is 1, 2 or a name.  The output is a complex of NCCR modules built on
    the projective resolution of S truncated above the Adams degree where it
    still meets x; its cohomology is a contraction-algebra module.  The inverse
    twist is D T_{DS} D for the duality D above.
    """
    name = f"S{obj}" if obj in (1, 2) else str(obj)
    if name not in _DUAL_NAME:
        raise ValueError(f"cannot twist by {obj!r}")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not _is_nccr(x.alg) and getattr(x.alg, "k", None) != 1:
        raise ValueError("chain-level twists need k = 1")
    if direction == 1:
        out = _twist_plus(name, x)
    else:
        out = dual(_twist_plus(_DUAL_NAME[name], dual(x)))
    return minimalize(out)


# fingerprints --------------------------------------------------------------------

FINGERPRINT_PROBES = ("S1", "S2", "M1", "M2")


def con_label(r: Rep) -> str:
    """Name of an indecomposable lambda_con(1)-module (the six are told apart by
    dimension vector and top)."""
    dv = r.dim_vector
    if dv == (2, 1):
        return "Q1"
    if dv == (1, 2):
        return "Q2"
    return label_module(r)


def cohomology_labels(x: CObject) -> Dict[int, Tuple[str, ...]]:
    """Sorted indecomposable labels of each cohomology module."""
    return {p: tuple(sorted(con_label(r) for r, _ in split_summands(H)))
            for p, H in cohomology(x).items()}


@dataclass(frozen=True)
class Fingerprint:
    cohomology: Tuple
    rhom: Tuple

    def as_dict(self):
        return {"cohomology": {p: list(ls) for p, ls in self.cohomology},
                "rhom": {name: dict(d) for name, d in self.rhom}}


def fingerprint(x: CObject, window: Optional[Tuple[int, int]] = None) -> Fingerprint:
    """Cohomology decomposition plus dim Hom(S, x[n]) for the spherical probes.

    A heuristic quasi-isomorphism invariant; ``window`` restricts both parts to
    degrees lo..hi.
    """
    keep = (lambda n: True) if window is None else (lambda n: window[0] <= n <= window[1])
    coh = tuple((p, ls) for p, ls in sorted(cohomology_labels(x).items()) if keep(p))
    rh = tuple((name, tuple((n, d) for n, d in sorted(rhom_dims(name, x).items()) if keep(n)))
               for name in FINGERPRINT_PROBES)
    return Fingerprint(coh, rh)


def quasi_iso_equal(x: CObject, y: CObject, window: Optional[Tuple[int, int]] = None) -> bool:
    return fingerprint(x, window) == fingerprint(y, window)


# groupoid words ------------------------------------------------------------------

LETTERS = ("P1", "P1^-1", "P2", "P2^-1", "[1]", "[-1]")
_INV = {"P1": "P1^-1", "P1^-1": "P1", "P2": "P2^-1", "P2^-1": "P2", "[1]": "[-1]", "[-1]": "[1]"}
_PHI = {"P1": "Φ1", "P1^-1": "Φ1⁻¹", "P2": "Φ2", "P2^-1": "Φ2⁻¹", "[1]": "[1]", "[-1]": "[-1]"}


def _step_chamber(c: int, i: int) -> int:
    """Neighbour of chamber c across its i-edge on the hexagon (edges alternate 1, 2)."""
    up = (i == 1) == (c % 2 == 0)
    return (c + 1) % 6 if up else (c - 1) % 6


@dataclass(frozen=True)
class GroupoidWord:
    """Letters from Φ1^{±1}, Φ2^{±1} and shifts, read left to right.

    ``start`` is the chamber the word leaves from (0 is the base chamber Λ).
    """

    letters: Tuple[str, ...] = ()
    start: int = 0

    def __post_init__(self):
        bad = [l for l in self.letters if l not in LETTERS]
        if bad:
            raise ValueError(f"unknown letters {bad}; use {', '.join(LETTERS)}")

    @classmethod
    def parse(cls, text: str, start: int = 0) -> "GroupoidWord":
        toks = text.replace(",", " ").split()
        alias = {"P1^-1": "P1^-1", "P1-": "P1^-1", "P1^(-1)": "P1^-1",
                 "P2^-1": "P2^-1", "P2-": "P2^-1", "P2^(-1)": "P2^-1"}
        return cls(tuple(alias.get(t, t) for t in toks), start)

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "GroupoidWord") -> "GroupoidWord":
        if other.start != self.end:
            raise ValueError("words do not compose: chambers differ")
        return GroupoidWord(self.letters + other.letters, self.start)

    def append(self, *letters) -> "GroupoidWord":
        return GroupoidWord(self.letters + tuple(letters), self.start)

    def chambers(self) -> List[int]:
        out = [self.start]
        for l in self.letters:
            if l.startswith("P"):
                out.append(_step_chamber(out[-1], int(l[1])))
            else:
                out.append(out[-1])
        return out

    @property
    def end(self) -> int:
        return self.chambers()[-1]

    def closes(self) -> bool:
        return self.start == 0 and self.end == 0

    def inverse(self) -> "GroupoidWord":
        return GroupoidWord(tuple(_INV[l] for l in reversed(self.letters)), self.end)

    def shift_total(self) -> int:
        return sum(1 if l == "[1]" else -1 if l == "[-1]" else 0 for l in self.letters)

    def __str__(self):
        return " ".join(self.letters)

    def phi_string(self) -> str:
        return " ".join(_PHI[l] for l in self.letters) or "id"

    def braid_string(self) -> Optional[str]:
        """Pure-braid spelling (a = Φ1, b = Φ2, runs as powers) when the word closes."""
        if not self.closes():
            return None
        runs: List[List] = []
        for l in self.letters:
            if not l.startswith("P"):
                continue
            g, e = ("a" if l[1] == "1" else "b"), (-1 if l.endswith("-1") else 1)
            if runs and runs[-1][0] == g:
                runs[-1][1] += e
            else:
                runs.append([g, e])
        parts = [g if e == 1 else f"{g}^{e}" for g, e in runs if e]
        return " ".join(parts) or "id"

    def to_dict(self):
        return {"letters": list(self.letters), "phi": self.phi_string(), "start": self.start,
                "end": self.end, "closes": self.closes(), "pure_braid": self.braid_string()}


def act(w: GroupoidWord, x: CObject) -> CObject:
    """Apply the letters of w to x in reading order."""
    for l in w.letters:
        if l == "[1]":
            x = x.shift(1)
        elif l == "[-1]":
            x = x.shift(-1)
        else:
            x = mutation(int(l[1]), x, -1 if l.endswith("-1") else 1)
    return x


def random_word(rng: random.Random, length: int, start: int = 0) -> GroupoidWord:
    return GroupoidWord(tuple(rng.choice(LETTERS[:4]) for _ in range(length)), start)


# reduction and classification ------------------------------------------------------

class ReductionError(RuntimeError):
    """Raised when an input violates the hypotheses of the length-dropping step."""


@dataclass
class ReductionStep:
    end: str                 # "bottom", "top" or "shift"
    simple: Optional[int]
    letters: Tuple[str, ...]
    dims_bottom: Tuple[int, ...]
    dims_top: Tuple[int, ...]
    ell_before: int
    ell_after: int

    def to_dict(self):
        return {"end": self.end, "simple": self.simple, "letters": list(self.letters),
                "dims_bottom": list(self.dims_bottom), "dims_top": list(self.dims_top),
                "ell_before": self.ell_before, "ell_after": self.ell_after}


@dataclass
class ReductionTrace:
    steps: List[ReductionStep] = dc_field(default_factory=list)

    def ells(self) -> List[int]:
        return [s.ell_before for s in self.steps] + ([self.steps[-1].ell_after] if self.steps else [])

    def strictly_decreasing(self) -> bool:
        return all(s.ell_after < s.ell_before for s in self.steps if s.end in ("top", "bottom"))

    def to_dict(self):
        return {"steps": [s.to_dict() for s in self.steps]}


def _pure_simple(H: Rep) -> Optional[int]:
    support = [v for v in H.alg.vertices if H.dims[v]]
    if len(support) == 1:
        # a module supported at one vertex of lambda_con(1) is semisimple
        return support[0]
    return None


def _bounds(x: CObject) -> Tuple[int, int]:
    degs = sorted(cohomology(x))
    return degs[0], degs[-1]


_AROUND = ("P1", "P2", "P1")


def reduce(x: CObject, normalize_shift: bool = True, to_simple: bool = True,
           max_steps: int = 200):
    """Drop the homological length to zero with mutation functors.

    Returns (word, terminal complex, trace) with act(word, x) quasi-isomorphic
    to the terminal one-term complex.  With ``to_simple`` a terminal M2 or M1 is
    moved on to S2 or S1 (by Φ1 or Φ2); with ``normalize_shift`` the terminal
    module sits in degree 0.
    """
    _require_k1(x)
    x = minimalize(x)
    if not cohomology(x):
        raise ReductionError("zero object")
    word = GroupoidWord()
    trace = ReductionTrace()
    for _ in range(max_steps):
        b, t = _bounds(x)
        ell = t - b
        if ell == 0:
            break
        H = cohomology(x)
        Hb, Ht = H[b], H[t]
        if hom_space(Ht, Hb)[0]:
            raise ReductionError(f"Hom(H^{t}, H^{b}) != 0: the object has negative self-extensions "
                                 f"(dims {Ht.dim_vector} -> {Hb.dim_vector})")
        i = _pure_simple(Hb)
        if i is not None:
            end, letter = "bottom", f"P{i}"
        else:
            i = _pure_simple(Ht)
            if i is None:
                raise ReductionError(f"neither end is a single-simple module: H^{b} = {Hb.dim_vector}, "
                                     f"H^{t} = {Ht.dim_vector}")
            end, letter = "top", f"P{i}^-1"
        y = act(GroupoidWord((letter,), word.end), x)
        b2, t2 = _bounds(y)
        if t2 - b2 >= ell:
            raise AssertionError(f"length did not drop ({ell} -> {t2 - b2}) applying {letter} to {x!r}")
        trace.steps.append(ReductionStep(end, i, (letter,), Hb.dim_vector, Ht.dim_vector, ell, t2 - b2))
        word = word.append(letter)
        x = y
    else:
        raise ReductionError("step limit reached")
    if to_simple:
        b, _ = _bounds(x)
        H = cohomology(x)[b]
        if con_label(H) in ("M1", "M2"):
            letter = "P1" if con_label(H) == "M2" else "P2"
            x = act(GroupoidWord((letter,), word.end), x)
            trace.steps.append(ReductionStep("brick", None, (letter,), H.dim_vector, H.dim_vector, 0, 0))
            word = word.append(letter)
    if normalize_shift:
        b, _ = _bounds(x)
        while b != 0:
            letters = _AROUND if b < 0 else tuple(_INV[l] for l in reversed(_AROUND))
            y = act(GroupoidWord(letters), x)
            nb, _ = _bounds(y)
            if abs(nb) >= abs(b):
                raise AssertionError("shift normalization did not move towards degree 0")
            trace.steps.append(ReductionStep("shift", None, letters, cohomology(x)[b].dim_vector,
                                             cohomology(x)[b].dim_vector, 0, 0))
            for l in letters:
                word = word.append(l)
            x, b = y, nb
    return word, x, trace


@dataclass
class Classification:
    simple: str            # S1 or S2
    normal_form: str       # S1, S2 or M1
    shift: int
    word: GroupoidWord     # act(word, x) = terminal brick in degree -shift
    terminal: str
    to_simple: GroupoidWord
    trace: ReductionTrace

    def to_dict(self):
        return {"simple": self.simple, "normal_form": self.normal_form, "shift": self.shift,
                "terminal": self.terminal, "word": self.word.to_dict(),
                "to_simple": self.to_simple.to_dict(), "trace": self.trace.to_dict()}


class NotABrick(ValueError):
    pass


def classify_spherical(x: CObject) -> Classification:
    """Reduce x to a shifted brick and name it.

    Bricks M2 and M1 are sent on to S2 by Φ1 and to S1 by Φ2; the normal form
    among S1, S2, M1 replaces M2 by S2.
    """
    word, y, trace = reduce(x, normalize_shift=False, to_simple=False)
    (b, H), = cohomology(y).items()
    if hom_space(H, H)[0] != 1:
        raise NotABrick(f"not a brick object: End has dimension {hom_space(H, H)[0]}")
    name = con_label(H)
    step = {"M2": ("P1",), "M1": ("P2",)}.get(name, ())
    to_simple = GroupoidWord(step, word.end)
    if step:
        z = act(to_simple, y)
        (zb, Z), = cohomology(z).items()
        simple = con_label(Z)
    else:
        simple = name
    normal = "S2" if name == "M2" else name
    return Classification(simple, normal, -b, word, name, to_simple, trace)


# combinatorial shadow for k > 1 ----------------------------------------------------

def chamber_type(c: int) -> str:
    """Contraction algebra of chamber c: two-cycle, or loop at vertex 2 / vertex 1."""
    return {0: "lambda", 3: "lambda", 1: "gamma@2", 2: "gamma@2", 4: "gamma@1", 5: "gamma@1"}[c % 6]


@dataclass(frozen=True)
class ShadowModule:
    """A cohomology piece: dimension vector, optional brick label, optional arrow ranks.

    ``ranks`` is (rank of the arrow 1 -> 2, rank of the arrow 2 -> 1) or None if unknown.
    """

    dims: Tuple[int, int]
    label: Optional[str] = None
    ranks: Optional[Tuple[int, int]] = None

    @classmethod
    def named(cls, label: str) -> "ShadowModule":
        table = {"S1": ((1, 0), (0, 0)), "S2": ((0, 1), (0, 0)),
                 "M1": ((1, 1), (1, 0)), "M2": ((1, 1), (0, 1))}
        if label not in table:
            raise ValueError(f"unknown shadow label {label!r}")
        d, r = table[label]
        return cls(d, label, r)

    @classmethod
    def from_rep(cls, M: Rep) -> "ShadowModule":
        ra = rank(M.mats["a"]) if M.dims[1] and M.dims[2] else 0
        rb = rank(M.mats["b"]) if M.dims[1] and M.dims[2] else 0
        lab = None
        if M.dim_vector in ((1, 0), (0, 1)):
            lab = "S1" if M.dims[1] else "S2"
        elif M.dim_vector == (1, 1) and (ra, rb) in ((1, 0), (0, 1)):
            lab = "M1" if ra else "M2"
        return cls(M.dim_vector, lab, (ra, rb))

    def __post_init__(self):
        if self.ranks is None and (self.dims[0] == 0 or self.dims[1] == 0):
            object.__setattr__(self, "ranks", (0, 0))

    def __str__(self):
        return self.label or f"U[{self.dims[0]},{self.dims[1]}]"


def _dims_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


@dataclass
class ShadowDegree:
    pieces: Tuple[ShadowModule, ...]
    extension: bool = False     # pieces come from two E2 terms: extension not determined

    @property
    def dims(self):
        d = (0, 0)
        for p in self.pieces:
            d = _dims_add(d, p.dims)
        return d

    def __str__(self):
        s = " + ".join(map(str, self.pieces))
        return f"ext({s})" if self.extension else s


@dataclass
class ShadowObject:
    k: int
    degrees: Dict[int, ShadowDegree]
    chamber: int = 0

    @classmethod
    def from_labels(cls, k: int, data: Dict[int, List], chamber: int = 0) -> "ShadowObject":
        degs = {}
        for p, items in data.items():
            pieces = tuple(i if isinstance(i, ShadowModule) else ShadowModule.named(i) for i in items)
            if pieces:
                degs[int(p)] = ShadowDegree(pieces)
        return cls(k, degs, chamber)

    def support(self) -> List[int]:
        return sorted(p for p, d in self.degrees.items() if d.dims != (0, 0))

    def ell(self) -> int:
        s = self.support()
        if not s:
            raise ValueError("zero shadow")
        return s[-1] - s[0]

    def to_dict(self):
        return {"k": self.k, "chamber": self.chamber,
                "degrees": {p: {"pieces": [str(x) for x in d.pieces], "dims": list(d.dims),
                                "extension": d.extension} for p, d in sorted(self.degrees.items())}}


class Ambiguous(Exception):
    def __init__(self, msg, bounds):
        super().__init__(msg)
        self.bounds = bounds


_PHI_RULES = {
    # (i, direction, label) -> {degree: label} from the module rules valid for every k
    (1, 1, "S1"): {1: "S1"}, (1, 1, "S2"): {0: "M1"}, (1, 1, "M2"): {0: "S2"},
    (2, 1, "S2"): {1: "S2"}, (2, 1, "S1"): {0: "M2"}, (2, 1, "M1"): {0: "S1"},
    (1, -1, "S1"): {-1: "S1"}, (1, -1, "M1"): {0: "S2"}, (1, -1, "S2"): {0: "M2"},
    (2, -1, "S2"): {-1: "S2"}, (2, -1, "M2"): {0: "S1"}, (2, -1, "S1"): {0: "M1"},
}


def shadow_phi(i: int, direction: int, m: ShadowModule) -> Dict[int, ShadowModule]:
    """Cohomology of Phi_i^{direction}(m) for a module m, by degree.

    The exchanged summand is [P_i -> P_j] through the single arrow j -> i in every
    chamber, so dimensions follow from the rank of that arrow (the arrow i -> j for
    the inverse).  Brick labels come from the module rules.
    """
    j = 3 - i
    if m.label and (i, direction, m.label) in _PHI_RULES:
        return {p: ShadowModule.named(l) for p, l in _PHI_RULES[(i, direction, m.label)].items()}
    mi, mj = m.dims[i - 1], m.dims[j - 1]
    # ranks[0] is the arrow 1 -> 2, ranks[1] the arrow 2 -> 1
    idx = (1 if i == 1 else 0) if direction == 1 else (0 if i == 1 else 1)
    if m.ranks is None:
        lo = min(mi, mj)
        raise Ambiguous(f"rank of the exchange arrow on {m} is not determined",
                        {"rank_range": [0, lo]})
    rho = m.ranks[idx]

    def vec(at_i, at_j):
        return (at_i, at_j) if i == 1 else (at_j, at_i)
    out = {}
    if direction == 1:
        h0, h1 = vec(mj - rho, mj), vec(mi - rho, 0)
        if h0 != (0, 0):
            out[0] = ShadowModule(h0)
        if h1 != (0, 0):
            out[1] = ShadowModule(h1)
    else:
        hm, h0 = vec(mi - rho, 0), vec(mj - rho, mj)
        if hm != (0, 0):
            out[-1] = ShadowModule(hm)
        if h0 != (0, 0):
            out[0] = ShadowModule(h0)
    for p, x in out.items():
        if x.dims in ((1, 0), (0, 1)):
            out[p] = ShadowModule.named("S1" if x.dims[0] else "S2")
    return out


def shadow_apply(i: int, direction: int, x: ShadowObject) -> ShadowObject:
    """Apply Phi_i^{direction}; the spectral sequence degenerates at E2, so each
    degree is the (possibly non-split) union of two E2 pieces."""
    new: Dict[int, List[ShadowModule]] = {}
    sources: Dict[int, set] = {}
    for q, deg in x.degrees.items():
        if deg.extension:
            raise Ambiguous(f"degree {q} is an undetermined extension of {deg}; the image of a "
                            f"non-split extension is not the union of the images of its pieces",
                            {"degree": q, "dims": list(deg.dims),
                             "pieces": [str(pc) for pc in deg.pieces]})
        for piece in deg.pieces:
            for p, h in shadow_phi(i, direction, piece).items():
                new.setdefault(p + q, []).append(h)
                sources.setdefault(p + q, set()).add(p)
    degs = {n: ShadowDegree(tuple(ps), extension=len(sources[n]) > 1) for n, ps in new.items()}
    return ShadowObject(x.k, degs, _step_chamber(x.chamber, i))


@dataclass
class ShadowStep:
    letter: str
    end: str
    ell_before: int
    ell_after: Optional[int]
    flag: str = ""
    bounds: Optional[dict] = None
    result: Optional[dict] = None

    def to_dict(self):
        return {"letter": self.letter, "end": self.end, "ell_before": self.ell_before,
                "ell_after": self.ell_after, "flag": self.flag, "bounds": self.bounds,
                "result": self.result}


def _shadow_hom_zero(top: ShadowDegree, bottom: ShadowDegree) -> Optional[bool]:
    """Hom(H^t, H^b) = 0 for labelled pieces; None when it cannot be decided."""
    hom = {("S1", "S1"): 1, ("S2", "S2"): 1, ("M1", "M1"): 1, ("M2", "M2"): 1,
           ("M1", "S1"): 1, ("M2", "S2"): 1, ("S1", "M2"): 1, ("S2", "M1"): 1,
           ("M1", "M2"): 1, ("M2", "M1"): 1}
    if top.extension or bottom.extension:
        return None
    if any(p.label is None for p in top.pieces + bottom.pieces):
        return None
    return not any(hom.get((a.label, b.label), 0) for a in top.pieces for b in bottom.pieces)


def shadow_reduce(k: int, x: ShadowObject, max_steps: int = 100):
    """Run the length-dropping loop on cohomology data only.

    Returns (word, terminal ShadowObject, steps).  A step whose outcome depends
    on undetermined data is recorded with flag AMBIGUOUS and stops the run.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    word = GroupoidWord((), x.chamber)
    steps: List[ShadowStep] = []
    for _ in range(max_steps):
        sup = x.support()
        if not sup:
            raise ValueError("zero shadow")
        b, t = sup[0], sup[-1]
        ell = t - b
        if ell == 0:
            break
        Hb, Ht = x.degrees[b], x.degrees[t]
        hz = _shadow_hom_zero(Ht, Hb)
        if hz is False:
            raise ReductionError("Hom(H^t, H^b) != 0 in the shadow")
        bsup = [v for v in (1, 2) if Hb.dims[v - 1]]
        tsup = [v for v in (1, 2) if Ht.dims[v - 1]]
        if len(bsup) == 1:
            i, d, end = bsup[0], 1, "bottom"
        elif len(tsup) == 1:
            i, d, end = tsup[0], -1, "top"
        else:
            raise ReductionError("neither end is filtered by a single simple")
        letter = f"P{i}" if d == 1 else f"P{i}^-1"
        try:
            y = shadow_apply(i, d, x)
        except Ambiguous as e:
            steps.append(ShadowStep(letter, end, ell, None, "AMBIGUOUS", e.bounds))
            return word, x, steps
        ell2 = y.ell()
        if ell2 >= ell:
            raise AssertionError(f"shadow length did not drop ({ell} -> {ell2})")
        flag = "AMBIGUOUS" if any(dd.extension for dd in y.degrees.values()) else ""
        bounds = None
        if flag:
            bounds = {n: {"split": [str(p) for p in dd.pieces], "dims": list(dd.dims)}
                      for n, dd in y.degrees.items() if dd.extension}
        steps.append(ShadowStep(letter, end, ell, ell2, flag, bounds, y.to_dict()))
        word = word.append(letter)
        x = y
    else:
        raise ReductionError("step limit reached")
    sup = x.support()
    deg = x.degrees[sup[0]]
    if not deg.extension and len(deg.pieces) == 1 and deg.pieces[0].label in ("M1", "M2"):
        i = 1 if deg.pieces[0].label == "M2" else 2
        letter = f"P{i}"
        y = shadow_apply(i, 1, x)
        steps.append(ShadowStep(letter, "brick", 0, y.ell(), "", None, y.to_dict()))
        word = word.append(letter)
        x = y
    return word, x, steps
