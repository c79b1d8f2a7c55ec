"""Compact open subgroups of (K^m, +) and the index metric between them.

Two representations are provided:

* :class:`BasisLattice` -- an O-lattice ``B @ O^m`` given by an invertible
  basis matrix. Indices come from a Smith normal form over the valuation ring.
* :class:`MonomialLattice` -- per coordinate, the closed F-span of the
  monomials ``X^k`` for ``k`` in an :class:`ExponentSet`. These need not be
  O-modules (e.g. ``F X^-3 + F X^-1 + O``).

Indices are returned as exponents ``e`` with ``[V : V n W] = q**e``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ContextMismatchError, ParseError, SingularMatrixError, UnsupportedSubgroupError
from .field import FieldContext
from .matrix import Matrix, format_matrix


# ---------------------------------------------------------------------------
# Smith normal form over the valuation ring

class SmithForm(NamedTuple):
    U: Matrix
    d: tuple
    V: Matrix


def smith_normal_form(M: Matrix) -> SmithForm:
    """``M = U @ diag(pi**d) @ V`` with ``U, V`` in GL_m(O) and ``d`` ascending.

    Pivot rule: entry of minimal valuation in the remaining block, ties broken
    by lowest (row, column).
    """
    ctx = M.ctx
    n = M.n
    a = [list(r) for r in M.rows]
    U = [list(r) for r in Matrix.identity(ctx, n).rows]
    V = [list(r) for r in Matrix.identity(ctx, n).rows]
    pi = ctx.uniformizer
    d = []
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                v = a[i][j].valuation
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None or a[best[1]][best[2]].is_zero():
            raise SingularMatrixError("matrix is singular")
        v, i, j = best
        if i != t:
            a[t], a[i] = a[i], a[t]
            for row in U:  # column swap in U
                row[t], row[i] = row[i], row[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
            V[t], V[j] = V[j], V[t]
        piv = a[t][t]
        inv = piv.inverse()
        # rows below: row_r -= f * row_t  ->  U col_t += f * U col_r
        for r in range(t + 1, n):
            f = a[r][t] * inv
            if f:
                a[r] = [x - f * y if y else x for x, y in zip(a[r], a[t])]
                for row in U:
                    if row[r]:
                        row[t] = row[t] + f * row[r]
        # columns right: col_c -= f * col_t  ->  V row_t += f * V row_c
        for c in range(t + 1, n):
            f = a[t][c] * inv
            if f:
                for row in a:
                    if row[t]:
                        row[c] = row[c] - f * row[t]
                V[t] = [x + f * y if y else x for x, y in zip(V[t], V[c])]
        # normalise pivot to pi**v: row_t *= 1/u  ->  U col_t *= u
        u = piv * pi ** (-v)
        if u != ctx.one:
            a[t][t] = pi ** v
            for row in U:
                if row[t]:
                    row[t] = row[t] * u
        d.append(v)
    return SmithForm(Matrix._wrap(ctx, tuple(map(tuple, U))), tuple(d),
                     Matrix._wrap(ctx, tuple(map(tuple, V))))


def smith_diagonal(ctx: FieldContext, d) -> Matrix:
    pi = ctx.uniformizer
    return Matrix.diag(ctx, [pi ** k for k in d])


# ---------------------------------------------------------------------------
# basis lattices

class BasisLattice:
    """The O-lattice spanned by the columns of an invertible matrix."""

    __slots__ = ("basis",)

    def __init__(self, basis: Matrix):
        if not basis.is_invertible():
            raise SingularMatrixError("lattice basis must be invertible")
        self.basis = basis

    @classmethod
    def standard(cls, ctx: FieldContext, m: int) -> "BasisLattice":
        return cls(Matrix.identity(ctx, m))

    @property
    def ctx(self):
        return self.basis.ctx

    @property
    def rank(self):
        return self.basis.n

    def _relative_smith(self, other: "BasisLattice") -> SmithForm:
        if not isinstance(other, BasisLattice):
            raise UnsupportedSubgroupError(
                f"cannot compare a BasisLattice with {type(other).__name__}")
        if other.ctx != self.ctx or other.rank != self.rank:
            raise ContextMismatchError("lattices over different spaces")
        return smith_normal_form(self.basis.inverse() @ other.basis)

    def index_exponent(self, other: "BasisLattice") -> int:
        # in coordinates where self = O^m, other = U diag(pi^d) O^m
        d = self._relative_smith(other).d
        return sum(max(k, 0) for k in d)

    def intersect(self, other: "BasisLattice") -> "BasisLattice":
        U, d, _ = self._relative_smith(other)
        return BasisLattice(self.basis @ U @ smith_diagonal(self.ctx, [max(k, 0) for k in d]))

    def transform(self, M: Matrix) -> "BasisLattice":
        return BasisLattice(M @ self.basis)

    def __eq__(self, other):
        if not isinstance(other, BasisLattice):
            return NotImplemented
        return (other.ctx == self.ctx and other.rank == self.rank
                and all(k == 0 for k in self._relative_smith(other).d))

    def __hash__(self):
        raise TypeError("BasisLattice is unhashable; compare with ==")

    def __le__(self, other):
        return self.index_exponent(other) == 0

    def __repr__(self):
        return f"BasisLattice({format_matrix(self.basis)})"


# ---------------------------------------------------------------------------
# monomial lattices

@dataclass(frozen=True)
class ExponentSet:
    """``plus ∪ [tail, oo)`` with every element of ``plus`` below ``tail - 1``.

    ``tail`` is minimal: ``tail - 1`` is never a member.
    """

    tail: int
    plus: frozenset = frozenset()

    def __post_init__(self):
        if any(k >= self.tail for k in self.plus):
            raise ValueError("exceptions must lie strictly below the tail")
        if self.tail - 1 in self.plus:
            raise ValueError("non-canonical: tail is not minimal")

    @classmethod
    def make(cls, tail: int, plus=(), minus=()) -> "ExponentSet":
        """Canonicalise ``plus ∪ ([tail, oo) minus minus)``."""
        members = {k for k in plus if k < tail}
        minus = set(minus)
        top = max([k for k in minus if k >= tail], default=tail - 1)
        members |= {k for k in range(tail, top + 1) if k not in minus}
        return cls.from_members(members, top + 1)

    @classmethod
    def from_members(cls, members, tail: int) -> "ExponentSet":
        """All of ``[tail, oo)`` plus the finite ``members``."""
        members = set(members)
        while tail - 1 in members:
            tail -= 1
        return cls(tail, frozenset(k for k in members if k < tail))

    @classmethod
    def interval(cls, tail: int) -> "ExponentSet":
        return cls(tail)

    def __contains__(self, k: int) -> bool:
        return k >= self.tail or k in self.plus

    @property
    def lowest(self) -> int:
        return min(self.plus, default=self.tail)

    def is_interval(self) -> bool:
        return not self.plus

    def count_missing_from(self, other: "ExponentSet") -> int:
        """``|self minus other|``."""
        n = sum(1 for k in self.plus if k not in other)
        n += sum(1 for k in range(self.tail, other.tail) if k not in other)
        return n

    def __and__(self, other: "ExponentSet") -> "ExponentSet":
        tail = max(self.tail, other.tail)
        lo = min(self.lowest, other.lowest)
        return ExponentSet.from_members(
            (k for k in range(lo, tail) if k in self and k in other), tail)

    def shifted(self, c: int) -> "ExponentSet":
        return ExponentSet(self.tail + c, frozenset(k + c for k in self.plus))

    def members_below(self, bound: int):
        return sorted(k for k in range(self.lowest, bound) if k in self)

    def __str__(self):
        s = f"tail={self.tail}"
        if self.plus:
            s += "; plus={" + ",".join(str(k) for k in sorted(self.plus)) + "}"
        return s


class MonomialLattice:
    """Closed F-span of monomials, one :class:`ExponentSet` per coordinate."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx: FieldContext, coords):
        if ctx.kind != "laurent":
            raise ContextMismatchError("monomial lattices live over a laurent field")
        self.ctx = ctx
        self.coords = tuple(coords)

    @classmethod
    def from_tails(cls, ctx: FieldContext, *tails: int) -> "MonomialLattice":
        return cls(ctx, [ExponentSet(t) for t in tails])

    @classmethod
    def standard(cls, ctx: FieldContext, m: int) -> "MonomialLattice":
        return cls.from_tails(ctx, *([0] * m))

    @property
    def rank(self):
        return len(self.coords)

    def _check(self, other):
        if not isinstance(other, MonomialLattice):
            raise UnsupportedSubgroupError(
                f"cannot compare a MonomialLattice with {type(other).__name__}")
        if other.ctx != self.ctx or other.rank != self.rank:
            raise ContextMismatchError("lattices over different spaces")

    def index_exponent(self, other: "MonomialLattice") -> int:
        self._check(other)
        return sum(a.count_missing_from(b) for a, b in zip(self.coords, other.coords))

    def intersect(self, other: "MonomialLattice") -> "MonomialLattice":
        self._check(other)
        return MonomialLattice(self.ctx, [a & b for a, b in zip(self.coords, other.coords)])

    def to_basis_lattice(self) -> BasisLattice:
        """Exact only when every coordinate is an interval tail ``X^t O``."""
        if not all(c.is_interval() for c in self.coords):
            raise UnsupportedSubgroupError(
                "only interval-tail monomial lattices are O-lattices")
        return BasisLattice(Matrix.diag(self.ctx, [self.ctx.monomial(1, c.tail) for c in self.coords]))

    def __eq__(self, other):
        if not isinstance(other, MonomialLattice):
            return NotImplemented
        return self.ctx == other.ctx and self.coords == other.coords

    def __hash__(self):
        return hash((self.ctx, self.coords))

    def __le__(self, other):
        return self.index_exponent(other) == 0

    def __repr__(self):
        return f"MonomialLattice({format_monomial_lattice(self)!r})"

    def __str__(self):
        return format_monomial_lattice(self)


# ---------------------------------------------------------------------------
# generic entry points

def index_exponent(V, W) -> int:
    """Exponent ``e`` with ``[V : V n W] = q**e``."""
    if type(V) is not type(W):
        raise UnsupportedSubgroupError(
            f"index between {type(V).__name__} and {type(W).__name__} is unsupported")
    return V.index_exponent(W)


class Distance(NamedTuple):
    dplus_vw: int
    dplus_wv: int
    d: int


def dplus_d(V, W) -> Distance:
    a = index_exponent(V, W)
    b = index_exponent(W, V)
    return Distance(a, b, a + b)


def intersect(V, W):
    if type(V) is not type(W):
        raise UnsupportedSubgroupError(
            f"intersection of {type(V).__name__} and {type(W).__name__} is unsupported")
    return V.intersect(W)


# ---------------------------------------------------------------------------
# text formats

_CLAUSE_RE = re.compile(r"\s*(tail|plus|minus)\s*=\s*(\{[^}]*\}|-?\d+)\s*")


def _int_set(text, source, pos):
    body = text.strip()[1:-1].strip()
    if not body:
        return set()
    try:
        return {int(x) for x in body.split(",")}
    except ValueError:
        raise ParseError("bad integer set", source, pos) from None


def parse_exponent_set(text: str, source=None, offset=0) -> ExponentSet:
    """``tail=t; plus={...}; minus={...}`` (``plus``/``minus`` optional)."""
    source = text if source is None else source
    fields = {}
    pos = 0
    for part in text.split(";"):
        m = _CLAUSE_RE.fullmatch(part)
        if m is None:
            raise ParseError(f"bad clause {part.strip()!r}", source, offset + pos)
        key, val = m.group(1), m.group(2)
        if key in fields:
            raise ParseError(f"duplicate clause {key!r}", source, offset + pos)
        if key == "tail":
            if val.startswith("{"):
                raise ParseError("tail must be an integer", source, offset + pos)
            fields[key] = int(val)
        else:
            if not val.startswith("{"):
                raise ParseError(f"{key} must be a set", source, offset + pos)
            fields[key] = _int_set(val, source, offset + pos)
        pos += len(part) + 1
    if "tail" not in fields:
        raise ParseError("missing tail clause", source, offset)
    return ExponentSet.make(fields["tail"], fields.get("plus", ()), fields.get("minus", ()))


def parse_monomial_lattice(ctx: FieldContext, text: str) -> MonomialLattice:
    """Coordinates separated by ``|``."""
    coords = []
    pos = 0
    for part in text.split("|"):
        coords.append(parse_exponent_set(part, text, pos))
        pos += len(part) + 1
    return MonomialLattice(ctx, coords)


def format_monomial_lattice(L: MonomialLattice) -> str:
    return " | ".join(str(c) for c in L.coords)
