"""Immutable square matrices over a :class:`~tdscale.field.FieldContext`."""
from __future__ import annotations

from flint import fmpq_mat

from .errors import ContextMismatchError, ParseError, SingularMatrixError
from .field import INF, FieldContext, FieldElement, PadicNumber, format_element, random_element


class Matrix:
    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: FieldContext, rows):
        self.ctx = ctx
        self.rows = tuple(tuple(ctx(x) for x in row) for row in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")

    @classmethod
    def _wrap(cls, ctx, rows):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.rows = rows
        return obj

    @classmethod
    def identity(cls, ctx: FieldContext, n: int) -> "Matrix":
        z, o = ctx.zero, ctx.one
        return cls._wrap(ctx, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, ctx: FieldContext, n: int) -> "Matrix":
        return cls._wrap(ctx, tuple((ctx.zero,) * n for _ in range(n)))

    @classmethod
    def diag(cls, ctx: FieldContext, entries) -> "Matrix":
        entries = [ctx(e) for e in entries]
        n = len(entries)
        return cls._wrap(ctx, tuple(tuple(entries[i] if i == j else ctx.zero for j in range(n))
                                    for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ctx == other.ctx and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Matrix({self.ctx}, {format_matrix(self)!r})"

    def __str__(self):
        return format_matrix(self)

    def _check(self, other):
        if other.ctx != self.ctx:
            raise ContextMismatchError(f"matrices over {self.ctx} and {other.ctx}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        return Matrix._wrap(self.ctx, tuple(tuple(a + b for a, b in zip(r, s))
                                            for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        return Matrix._wrap(self.ctx, tuple(tuple(a - b for a, b in zip(r, s))
                                            for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return Matrix._wrap(self.ctx, tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> "Matrix":
        c = self.ctx(c)
        return Matrix._wrap(self.ctx, tuple(tuple(c * a for a in r) for r in self.rows))

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        if self.ctx.kind == "padic":
            return _from_flint(self.ctx, _to_flint(self) * _to_flint(other))
        cols = list(zip(*other.rows))
        zero = self.ctx.zero
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = zero
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc._add(a._mul(b))
                row.append(acc)
            out.append(tuple(row))
        return Matrix._wrap(self.ctx, tuple(out))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        return self.scale(other)

    __rmul__ = scale

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = Matrix.identity(self.ctx, self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.ctx, tuple(zip(*self.rows)))

    def trace(self) -> FieldElement:
        acc = self.ctx.zero
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def _eliminate(self, augment=None):
        """Gauss-Jordan on copies. Returns (det, reduced augment or None)."""
        n = self.n
        a = [list(r) for r in self.rows]
        b = [list(r) for r in augment.rows] if augment is not None else None
        det = self.ctx.one
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                return self.ctx.zero, None
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                if b is not None:
                    b[col], b[piv] = b[piv], b[col]
                det = -det
            pv = a[col][col]
            det = det * pv
            inv = pv.inverse()
            a[col] = [x * inv for x in a[col]]
            if b is not None:
                b[col] = [x * inv for x in b[col]]
            for r in range(n):
                if r == col:
                    continue
                f = a[r][col]
                if not f:
                    continue
                a[r] = [x - f * y if y else x for x, y in zip(a[r], a[col])]
                if b is not None:
                    b[r] = [x - f * y if y else x for x, y in zip(b[r], b[col])]
        return det, b

    def det(self) -> FieldElement:
        if self.ctx.kind == "padic" and self.n:
            return PadicNumber(self.ctx, _to_flint(self).det())
        if 1 <= self.n <= 3:
            return _small_det(self.rows)
        return self._eliminate()[0]

    def is_invertible(self) -> bool:
        return bool(self.det())

    def inverse(self) -> "Matrix":
        if self.ctx.kind == "padic" and self.n:
            fm = _to_flint(self)
            if fm.det() == 0:
                raise SingularMatrixError("matrix is singular")
            return _from_flint(self.ctx, fm.inv())
        if 1 <= self.n <= 3:
            return self._adjugate_inverse()
        det, b = self._eliminate(Matrix.identity(self.ctx, self.n))
        if b is None:
            raise SingularMatrixError("matrix is singular")
        return Matrix._wrap(self.ctx, tuple(tuple(r) for r in b))

    def _adjugate_inverse(self) -> "Matrix":
        a = self.rows
        n = self.n
        det = _small_det(a)
        if not det:
            raise SingularMatrixError("matrix is singular")
        inv = det.inverse()
        if n == 1:
            return Matrix._wrap(self.ctx, ((inv,),))
        if n == 2:
            return Matrix._wrap(self.ctx, ((a[1][1] * inv, -a[0][1] * inv),
                                           (-a[1][0] * inv, a[0][0] * inv)))
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                # (j, i) cofactor
                r0, r1 = [r for r in range(3) if r != j]
                c0, c1 = [c for c in range(3) if c != i]
                minor = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
                row.append(minor * inv if (i + j) % 2 == 0 else -(minor * inv))
            out.append(tuple(row))
        return Matrix._wrap(self.ctx, tuple(out))

    def min_valuation(self):
        return min((x.valuation for r in self.rows for x in r), default=INF)

    def is_upper_triangular(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.n) for j in range(i))

    def is_skew(self) -> bool:
        return self.T == -self

    def entries(self):
        return [x for r in self.rows for x in r]


def _to_flint(m: Matrix):
    return fmpq_mat(m.n, m.n, [x._q for r in m.rows for x in r])


def _from_flint(ctx, fm) -> Matrix:
    n = fm.nrows()
    e = fm.entries()
    return Matrix._wrap(ctx, tuple(tuple(PadicNumber(ctx, e[i * n + j]) for j in range(n))
                                   for i in range(n)))


def _small_det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def parse_matrix(ctx: FieldContext, text: str) -> Matrix:
    """Parse ``[[a,b],[c,d]]`` with grammar-conformant entries."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix must be written as [[...],...]", text, 0)
    offset = text.index("[") + 1
    inner = s[1:-1]
    rows = []
    depth = 0
    start = None
    for i, ch in enumerate(inner):
        if ch == "[":
            if depth == 0:
                start = i + 1
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                rows.append((offset + start, inner[start:i]))
            if depth < 0:
                raise ParseError("unbalanced ']'", text, offset + i)
        elif depth == 0 and not (ch.isspace() or ch == ","):
            raise ParseError(f"unexpected {ch!r} outside a row", text, offset + i)
    if depth != 0:
        raise ParseError("unbalanced '['", text, len(text))
    parsed = []
    for pos, row in rows:
        entries = []
        level = 0
        last = 0
        for i, ch in enumerate(row + ","):
            if ch == "(":
                level += 1
            elif ch == ")":
                level -= 1
            elif ch == "," and level == 0:
                piece = row[last:i]
                try:
                    entries.append(ctx.parse(piece))
                except ParseError as exc:
                    inner_pos = exc.position or 0
                    raise ParseError(f"bad matrix entry {piece.strip()!r}", text,
                                     pos + last + inner_pos) from None
                last = i + 1
        parsed.append(entries)
    if not parsed or any(len(r) != len(parsed) for r in parsed):
        raise ParseError("matrix must be square and non-empty", text, 0)
    return Matrix(ctx, parsed)


def format_matrix(m: Matrix) -> str:
    return "[" + ",".join("[" + ",".join(format_element(x) for x in r) + "]" for r in m.rows) + "]"


def random_matrix(ctx: FieldContext, n: int, rng, vmin=-2, vmax=2, width=2,
                  invertible=True) -> Matrix:
    while True:
        m = Matrix(ctx, [[random_element(ctx, rng, vmin, vmax, width) for _ in range(n)]
                         for _ in range(n)])
        if not invertible or m.is_invertible():
            return m
