"""Independent reference computations used to check the library.

None of these use Smith normal forms, characteristic polynomials or residue
cycle analysis; they work by brute-force enumeration or by construction.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from tdscale.field import INF, FieldContext, LaurentFunction, PadicNumber
from tdscale.matrix import Matrix


def _series_digits(x, s):
    """Digits ``d_0..d_{s-1}`` of an integral element modulo ``pi^s``."""
    ctx = x.ctx
    p = ctx.p
    if not x:
        return [0] * s
    if isinstance(x, PadicNumber):
        v = x.value
        mod = p ** s
        r = (v.numerator * pow(v.denominator, -1, mod)) % mod
        out = []
        for _ in range(s):
            r, d = divmod(r, p)
            out.append(d)
        return out
    assert isinstance(x, LaurentFunction)
    num = [int(c) for c in x.num.coeffs()]
    den = [int(c) for c in x.den.coeffs()]
    assert den[0] == 1
    series = []
    for k in range(s):
        acc = num[k] if k < len(num) else 0
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * series[k - i]
        series.append(acc % p)
    out = [0] * s
    for k in range(s):
        if k + x.shift < s:
            out[k + x.shift] = series[k]
    return out


def _reduce(x, s):
    """``x mod pi^s`` as a list of ``s`` digits (laurent) or one residue (p-adic)."""
    digits = _series_digits(x, s)
    if isinstance(x, PadicNumber):
        return [sum(d * x.ctx.p ** j for j, d in enumerate(digits))]
    return digits


def index_by_cosets(BV: Matrix, BW: Matrix) -> int:
    """``log_q [B_V O^m : B_V O^m n B_W O^m]`` by enumerating a finite quotient.

    With ``N = B_W^-1 B_V`` the index equals the size of the image of
    ``N O^m`` in ``(N O^m + O^m) / O^m``. Scaling by ``pi^s`` makes ``N``
    integral, so the image is enumerated inside ``(O / pi^s)^m`` as all
    digit combinations ``sum d_ij pi^j col_i``.
    """
    ctx = BV.ctx
    N = BW.inverse() @ BV
    minv = N.min_valuation()
    s = max(0, -minv) if minv != INF else 0
    if s == 0:
        return 0
    p, m = ctx.p, N.n
    padic = ctx.kind == "padic"
    modulus = p ** s if padic else p
    Np = N.scale(ctx.uniformizer ** s)
    gens = []
    for i in range(m):
        col = [Np[r, i] for r in range(m)]
        for j in range(s):
            shifted = [c * ctx.uniformizer ** j for c in col]
            gens.append(np.array([d for c in shifted for d in _reduce(c, s)], dtype=np.int64))
    width = len(gens[0])
    packed = modulus ** width < 2 ** 63
    weights = np.array([modulus ** k for k in range(width)], dtype=np.int64) if packed else None
    current = np.zeros((1, width), dtype=np.int64)
    for g in gens:
        stack = [current]
        acc = current
        for _ in range(p - 1):
            acc = (acc + g) % modulus
            stack.append(acc)
        both = np.concatenate(stack)
        if packed:
            _, keep = np.unique(both @ weights, return_index=True)
            current = both[keep]
        else:
            current = np.unique(both, axis=0)
    size = len(current)
    e = 0
    while size > 1:
        assert size % p == 0
        size //= p
        e += 1
    return e


def polynomial_from_roots(ctx: FieldContext, roots):
    """Coefficients ``[c_0, ..., c_m]`` of ``prod (t - r)``."""
    coeffs = [ctx.one]
    for r in roots:
        nxt = [ctx.zero] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - r * c
        coeffs = nxt
    return coeffs


def companion(ctx: FieldContext, coeffs) -> Matrix:
    m = len(coeffs) - 1
    rows = [[ctx.zero] * m for _ in range(m)]
    for i in range(1, m):
        rows[i][i - 1] = ctx.one
    for i in range(m):
        rows[i][m - 1] = -coeffs[i]
    return Matrix(ctx, rows)


def scale_from_roots(roots) -> int:
    return sum(max(0, -r.valuation) for r in roots)


def bfs_orbit(fn, inv, j: int, cap: int):
    """``(finite, elements)`` by breadth-first search under ``fn`` and ``inv``."""
    seen = {j}
    queue = deque([j])
    while queue:
        x = queue.popleft()
        for y in (fn(x), inv(x)):
            if y not in seen:
                seen.add(y)
                queue.append(y)
                if len(seen) > cap:
                    return False, seen
    return True, seen


def _in_zp(z, p) -> bool:
    return z.denominator % p != 0


def ray_point(p, gen, power, x):
    """``gen^power(x, 0)`` written out from the defining formulas, as ``(first, second)``."""
    from fractions import Fraction
    first = Fraction(x) / Fraction(p) ** power
    if gen == "alpha" or power <= 0:
        return first, Fraction(0)
    return first, sum(Fraction(x, p ** i) for i in range(1, power + 1))


def ray_member(p, gen, power, point) -> bool:
    """Is ``point`` in ``gen^power(Z_p x 0)``? Solve for the preimage and compare."""
    from fractions import Fraction
    X, Y = point
    z = X * Fraction(p) ** power
    if not _in_zp(z, p):
        return False
    _, second = ray_point(p, gen, power, z)
    return _in_zp(Y - second, p)


def ray_index_by_enumeration(p, A, B) -> int:
    """``log_p [A : A n B]`` for ray subgroups ``A = (gen, power)`` by counting ``x mod p^M``."""
    M = abs(A[1]) + abs(B[1]) + 2
    hits = sum(ray_member(p, *B, ray_point(p, *A, x)) for x in range(p ** M))
    ratio = p ** M // hits
    assert ratio * hits == p ** M
    e = 0
    while ratio > 1:
        ratio //= p
        e += 1
    return e
