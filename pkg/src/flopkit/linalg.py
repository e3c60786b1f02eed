"""Exact dense linear algebra over Q and prime fields F_p.

Elements of Q are ``fractions.Fraction``; elements of F_p are ints in
``range(p)``.  Matrices are immutable row-major tuples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """The rationals (``Field()``) or the prime field ``Field(p)``."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p and not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @classmethod
    def parse(cls, spec: str) -> "Field":
        """Parse ``q`` or ``p:7`` (also ``7`` or ``F7``)."""
        s = spec.strip().lower()
        if s in ("q", "qq", "0"):
            return cls()
        for prefix in ("p:", "f", "gf"):
            if s.startswith(prefix):
                s = s[len(prefix):]
                break
        try:
            p = int(s)
        except ValueError:
            raise ValueError(f"bad field spec {spec!r}") from None
        return cls(p)

    @property
    def kind(self) -> str:
        return "prime-field" if self.p else "rationals"

    @property
    def characteristic(self) -> int:
        return self.p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.p})" if self.p else "Field(Q)"

    def __str__(self):
        return f"F_{self.p}" if self.p else "Q"

    @property
    def spec(self) -> str:
        return f"p:{self.p}" if self.p else "q"

    # element arithmetic
    def __call__(self, x):
        if self.p:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def zero(self):
        return 0 if self.p else Fraction(0)

    def one(self):
        return 1 if self.p else Fraction(1)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def elements(self):
        """All elements of a prime field (for exhaustive searches)."""
        if not self.p:
            raise ValueError("Q is infinite")
        return range(self.p)


QQ = Field()


class Matrix:
    """Immutable dense matrix over a :class:`Field`."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: int, cols: int, data: Iterable[Sequence] = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if data is None:
            z = field.zero()
            self.data = tuple((z,) * cols for _ in range(rows))
        else:
            self.data = tuple(tuple(field(x) for x in r) for r in data)
            if len(self.data) != rows or any(len(r) != cols for r in self.data):
                raise ValueError("entry count inconsistent with dimensions")

    @classmethod
    def _raw(cls, field: Field, rows: int, cols: int, data):
        """Trusted constructor: entries are already field elements."""
        m = cls.__new__(cls)
        m.field, m.rows, m.cols = field, rows, cols
        m.data = tuple(tuple(r) for r in data)
        return m

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int = None):
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, rows)

    @classmethod
    def identity(cls, field: Field, n: int):
        return cls(field, n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int):
        return cls(field, rows, cols)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int):
        return cls(field, rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, self.data))

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols}, {[list(r) for r in self.data]})"

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("mixed-field matrices")

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return Matrix._raw(self.field, self.cols, self.rows, list(zip(*self.data)) if self.rows else [() for _ in range(self.cols)])

    def __add__(self, other):
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        F = self.field
        return Matrix._raw(F, self.rows, self.cols,
                      [[F.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __neg__(self):
        F = self.field
        return Matrix._raw(F, self.rows, self.cols, [[F.neg(a) for a in r] for r in self.data])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        F = self.field
        c = F(c)
        return Matrix._raw(F, self.rows, self.cols, [[F.mul(c, a) for a in r] for r in self.data])

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        F = self.field
        ot = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for r in self.data:
            row = []
            for c in ot:
                s = sum(a * b for a, b in zip(r, c) if a and b)
                row.append(s % F.p if F.p else Fraction(s))
            out.append(row)
        return Matrix._raw(F, self.rows, other.cols, out)

    def hstack(self, other):
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("dimension mismatch")
        return Matrix._raw(self.field, self.rows, self.cols + other.cols,
                      [r + s for r, s in zip(self.data, other.data)])

    def vstack(self, other):
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("dimension mismatch")
        return Matrix._raw(self.field, self.rows + other.rows, self.cols, self.data + other.data)

    def block(self, r0, r1, c0, c1):
        return Matrix._raw(self.field, r1 - r0, c1 - c0, [r[c0:c1] for r in self.data[r0:r1]])


def block_matrix(field: Field, blocks, row_sizes, col_sizes) -> Matrix:
    """Assemble a matrix from a grid of blocks; ``None`` means zero."""
    out = []
    for bi, rs in enumerate(row_sizes):
        for i in range(rs):
            row = []
            for bj, cs in enumerate(col_sizes):
                b = blocks[bi][bj]
                row.extend(b.data[i] if b is not None else [0] * cs)
            out.append(row)
    return Matrix(field, sum(row_sizes), sum(col_sizes), out)


def rref(m: Matrix):
    """Reduced row echelon form.

    Pivots are chosen as the first nonzero entry in row-major order of the
    remaining rows, which makes every downstream result deterministic.
    Returns (rows as lists, pivot columns).
    """
    F = m.field
    p = F.p
    rows = [list(r) for r in m.data]
    pivots = []
    r = 0
    nrows, ncols = m.rows, m.cols
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        if p:
            rows[r] = [(x * inv) % p for x in rows[r]]
        else:
            rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri = rows[i]
                if p:
                    rows[i] = [(x - f * y) % p for x, y in zip(ri, pr)]
                else:
                    rows[i] = [x - f * y for x, y in zip(ri, pr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the right null space of ``m``."""
    F = m.field
    red, pivots = rref(m)
    pset = set(pivots)
    free = [c for c in range(m.cols) if c not in pset]
    cols = []
    for fc in free:
        v = [F.zero()] * m.cols
        v[fc] = F.one()
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[fc])
        cols.append(v)
    return Matrix.from_columns(F, cols, m.cols)


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """One solution x of a @ x = b (free variables zero), or None."""
    if a.field != b.field:
        raise ValueError("mixed-field matrices")
    if a.rows != b.rows:
        raise ValueError("dimension mismatch")
    F = a.field
    aug = a.hstack(b)
    red, pivots = rref(aug)
    if any(pc >= a.cols for pc in pivots):
        return None
    x = [[F.zero()] * b.cols for _ in range(a.cols)]
    for row, pc in zip(red, pivots):
        x[pc] = row[a.cols:]
    return Matrix(F, a.cols, b.cols, x)


def row_space_basis(vectors, field: Field, ncols: int):
    """Echelon basis rows and pivots of the span of ``vectors``."""
    m = Matrix(field, len(vectors), ncols, vectors)
    return rref(m)


def reduce_vector(v, red, pivots, field: Field):
    """Reduce ``v`` against an RREF basis; the result is zero iff v is in the span."""
    p = field.p
    v = list(v)
    for row, pc in zip(red, pivots):
        c = v[pc]
        if c:
            if p:
                v = [(x - c * y) % p for x, y in zip(v, row)]
            else:
                v = [x - c * y for x, y in zip(v, row)]
    return v
