"""Scale and module of linear automorphisms of K^m.

For a linear automorphism the scale is the product of ``|lambda|`` over the
eigenvalues (in an algebraic closure, with multiplicity) of absolute value
greater than 1. All results are exponents in units of ``log q``.
"""
from __future__ import annotations

from .errors import SingularMatrixError
from .matrix import Matrix


def char_poly(M: Matrix) -> list:
    """Coefficients ``[c_0, ..., c_m]`` (``c_m = 1``) of ``det(t - M)``.

    Berkowitz recursion over leading principal submatrices; it never divides,
    so it is valid in characteristic p.
    """
    ctx = M.ctx
    n = M.n
    a = M.rows
    coeffs = [ctx.one]  # highest degree first
    for r in range(1, n + 1):
        row = a[r - 1][:r - 1]
        col_vec = [a[i][r - 1] for i in range(r - 1)]
        toeplitz = [ctx.one, -a[r - 1][r - 1]]
        v = col_vec
        for _ in range(r - 1):
            acc = ctx.zero
            for x, y in zip(row, v):
                if x and y:
                    acc = acc + x * y
            toeplitz.append(-acc)
            v = [_dot(a[i][:r - 1], v, ctx) for i in range(r - 1)]
        new = []
        for i in range(r + 1):
            acc = ctx.zero
            for j in range(min(i, r - 1) + 1):
                t = toeplitz[i - j]
                if t and coeffs[j]:
                    acc = acc + t * coeffs[j]
            new.append(acc)
        coeffs = new
    return coeffs[::-1]


def _dot(xs, ys, ctx):
    acc = ctx.zero
    for x, y in zip(xs, ys):
        if x and y:
            acc = acc + x * y
    return acc


def _require_invertible(M: Matrix):
    if not M.is_invertible():
        raise SingularMatrixError("matrix is singular")


def scale_exponent(M: Matrix) -> int:
    """``S`` with ``s(M) = q**S``.

    For a monic polynomial over an ultrametric field, the product of the root
    absolute values exceeding 1 equals ``max_i |c_i|``: the elementary
    symmetric function of degree k* = #{|lambda| > 1} has a unique dominant
    term (the product of all large roots) and no other coefficient can exceed
    it. So no splitting field is needed.
    """
    _require_invertible(M)
    return max(0, max(-c.valuation for c in char_poly(M) if c))


def module_exponent(M: Matrix) -> int:
    """``-v(det M)``, the exponent of ``|det M|``."""
    det = M.det()
    if not det:
        raise SingularMatrixError("matrix is singular")
    return -det.valuation


def moves_to_infinity(M: Matrix) -> bool:
    return scale_exponent(M) > 0


def ad_matrix(g: Matrix) -> Matrix:
    """Matrix of ``x -> g x g^-1`` on M_m(K), basis ``E_ij`` in row-major order."""
    ctx = g.ctx
    m = g.n
    ginv = g.inverse()
    cols = []
    for i in range(m):
        for j in range(m):
            # g E_ij g^-1 has entries g[r][i] * ginv[j][s]
            cols.append([g[r, i] * ginv[j, s] for r in range(m) for s in range(m)])
    return Matrix._wrap(ctx, tuple(zip(*[tuple(c) for c in cols])))


def inner_scale_exponent(g: Matrix) -> int:
    """Scale exponent of the adjoint action ``Ad_g``."""
    _require_invertible(g)
    return scale_exponent(ad_matrix(g))
