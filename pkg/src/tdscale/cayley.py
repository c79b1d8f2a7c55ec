"""Equivariant maps ``kappa: G -> Lie(G)`` and the Cayley transform.

``theta(x) = (1 - x)(1 + x)^-1`` is an involution of
``Omega = {x : 1 + x invertible}`` and exchanges orthogonal with
skew-symmetric matrices there. Everything is checked by exact evaluation.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import PreconditionError, SingularMatrixError
from .field import FieldContext, random_element
from .matrix import Matrix, random_matrix

VARIANTS = ("gl", "sl", "orth", "ut")


@dataclass(frozen=True)
class KappaVariant:
    tag: str
    n: int
    ctx: FieldContext

    def __post_init__(self):
        if self.tag not in VARIANTS:
            raise ValueError(f"unknown variant {self.tag!r}; expected one of {VARIANTS}")
        if self.n < 1:
            raise ValueError("dimension must be positive")
        char = self.ctx.characteristic
        if self.tag == "sl" and char and self.n % char == 0:
            raise PreconditionError(f"sl_{self.n} needs a characteristic not dividing {self.n}")
        if self.tag == "orth" and char == 2:
            raise PreconditionError("orthogonal variant needs characteristic != 2")


def _refuse_char2(ctx: FieldContext):
    if ctx.characteristic == 2:
        raise PreconditionError("the Cayley transform needs characteristic != 2")


def theta(x: Matrix) -> Matrix:
    _refuse_char2(x.ctx)
    one = Matrix.identity(x.ctx, x.n)
    try:
        inv = (one + x).inverse()
    except SingularMatrixError:
        raise SingularMatrixError("1 + x is singular; x is outside the Cayley domain") from None
    return (one - x) @ inv


def in_domain(x: Matrix) -> bool:
    return (Matrix.identity(x.ctx, x.n) + x).is_invertible()


def membership(variant: KappaVariant, g: Matrix) -> bool:
    if g.n != variant.n:
        raise ValueError(f"expected a {variant.n}x{variant.n} matrix, got {g.n}x{g.n}")
    if variant.tag == "orth":
        return g.T @ g == Matrix.identity(g.ctx, g.n)
    if variant.tag == "ut":
        return g.is_upper_triangular() and all(g[i, i] for i in range(g.n))
    det = g.det()
    if not det:
        return False
    if variant.tag == "gl":
        return True
    return det == g.ctx.one


def in_lie_algebra(variant: KappaVariant, x: Matrix) -> bool:
    if variant.tag == "gl":
        return True
    if variant.tag == "sl":
        return not x.trace()
    if variant.tag == "orth":
        return x.is_skew()
    return x.is_upper_triangular()


def kappa(variant: KappaVariant, g: Matrix) -> Matrix:
    if not membership(variant, g):
        raise PreconditionError(f"matrix is not in the {variant.tag}_{variant.n} group")
    return _kappa(variant, g)


def _kappa(variant, g):
    one = Matrix.identity(g.ctx, g.n)
    if variant.tag in ("gl", "ut"):
        return g - one
    if variant.tag == "sl":
        return g - one.scale(g.trace() * g.ctx(variant.n).inverse())
    return theta(g)


def equivariance_check(variant: KappaVariant, g: Matrix, y: Matrix) -> bool:
    """``kappa(g y g^-1) == g kappa(y) g^-1``."""
    if not membership(variant, g):
        raise PreconditionError("g is not in the group")
    if not membership(variant, y):
        raise PreconditionError("y is not in the group")
    if variant.tag == "orth" and not in_domain(y):
        raise PreconditionError("y is outside the Cayley domain")
    return _equivariant(variant, g, y)


def _equivariant(variant, g, y):
    ginv = g.inverse()
    return _kappa(variant, g @ y @ ginv) == g @ _kappa(variant, y) @ ginv


def sl_derivative_check(variant: KappaVariant, h: Matrix) -> bool:
    """First-order check ``kappa(1 + h) = h`` for trace-free ``h``.

    The sl map is affine, so the expansion is exact; membership of ``1 + h``
    is not required here.
    """
    one = Matrix.identity(h.ctx, h.n)
    g = one + h
    return g - one.scale(g.trace() * h.ctx(variant.n).inverse()) == h


# ---------------------------------------------------------------------------
# samplers

# entries: valuation in [-1, 1], Laurent support of two terms
_V, _W = (-1, 1), 1


def _elem(ctx, rng):
    return random_element(ctx, rng, *_V, _W)


def _mat(ctx, n, rng, invertible=True):
    return random_matrix(ctx, n, rng, *_V, _W, invertible=invertible)


def random_skew(ctx: FieldContext, n: int, rng) -> Matrix:
    rows = [[ctx.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = _elem(ctx, rng)
            rows[i][j] = v
            rows[j][i] = -v
    return Matrix(ctx, rows)


def random_signed_permutation(ctx: FieldContext, n: int, rng) -> Matrix:
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[ctx.zero] * n for _ in range(n)]
    for i, j in enumerate(perm):
        rows[i][j] = ctx.one if rng.random() < 0.5 else -ctx.one
    return Matrix(ctx, rows)


def random_in_domain(ctx: FieldContext, n: int, rng) -> Matrix:
    while True:
        x = _mat(ctx, n, rng, invertible=False)
        if in_domain(x):
            return x


def random_skew_in_domain(ctx, n, rng) -> Matrix:
    while True:
        x = random_skew(ctx, n, rng)
        if in_domain(x):
            return x


def random_group_element(variant: KappaVariant, rng, orth_factor=None) -> Matrix:
    """Random member of the variant's group.

    Orthogonal samples are ``theta(x)`` for skew ``x`` times a signed
    permutation; callers verify ``g^T g = 1`` independently.
    """
    ctx, n = variant.ctx, variant.n
    if variant.tag == "gl":
        return _mat(ctx, n, rng)
    if variant.tag == "sl":
        g = _mat(ctx, n, rng)
        inv_det = g.det().inverse()
        rows = [list(r) for r in g.rows]
        rows[0] = [x * inv_det for x in rows[0]]
        return Matrix(ctx, rows)
    if variant.tag == "ut":
        rows = [[ctx.zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = random_element(ctx, rng, *_V, _W, allow_zero=False)
            for j in range(i + 1, n):
                rows[i][j] = _elem(ctx, rng)
        return Matrix(ctx, rows)
    if orth_factor is None:
        orth_factor = theta(random_skew_in_domain(ctx, n, rng))
    return orth_factor @ random_signed_permutation(ctx, n, rng)


def random_orth_in_domain(variant, rng) -> Matrix:
    while True:
        g = random_group_element(variant, rng)
        if in_domain(g):
            return g


# ---------------------------------------------------------------------------
# suite

@dataclass
class IdentityTally:
    passed: int = 0
    failed: int = 0
    first_failure: object = None

    def record(self, ok: bool, witness=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = witness


@dataclass
class SuiteReport:
    field: str
    n: int
    samples: int
    seed: int
    tallies: dict = field(default_factory=dict)

    def tally(self, name) -> IdentityTally:
        return self.tallies.setdefault(name, IdentityTally())

    @property
    def failures(self) -> int:
        return sum(t.failed for t in self.tallies.values())

    def records(self) -> list:
        return [{"identity": k, "passed": t.passed, "failed": t.failed,
                 "first_failure": None if t.first_failure is None else str(t.first_failure)}
                for k, t in sorted(self.tallies.items())]


def cayley_suite(ctx: FieldContext, n: int, samples: int, seed: int,
                 variants=VARIANTS) -> SuiteReport:
    """Check the Cayley identities and kappa equivariance on seeded samples.

    Each sample ``i`` draws from its own generator seeded with ``"{seed}:{i}"``.
    """
    _refuse_char2(ctx)
    report = SuiteReport(str(ctx), n, samples, seed)
    kinds = []
    for tag in variants:
        try:
            kinds.append(KappaVariant(tag, n, ctx))
        except PreconditionError:
            report.tally(f"{tag}: skipped (characteristic)")
    one = Matrix.identity(ctx, n)
    two = one.scale(ctx(2))
    for i in range(samples):
        rng = random.Random(f"{seed}:{i}")
        x = random_in_domain(ctx, n, rng)
        tx = theta(x)
        report.tally("involution").record(in_domain(tx) and theta(tx) == x, x)
        report.tally("inverse").record((one + tx) @ (one + x) == two, x)
        s = random_skew_in_domain(ctx, n, rng)
        ts = theta(s)
        report.tally("skew to orthogonal").record(ts.T @ ts == one and in_domain(ts), s)
        for v in kinds:
            g = random_group_element(v, rng, orth_factor=ts)
            y = random_orth_in_domain(v, rng) if v.tag == "orth" else random_group_element(v, rng)
            report.tally(f"{v.tag}: sample membership").record(membership(v, g) and membership(v, y), g)
            report.tally(f"{v.tag}: equivariance").record(_equivariant(v, g, y), (g, y))
            ky = _kappa(v, y)
            report.tally(f"{v.tag}: kappa lands in Lie algebra").record(in_lie_algebra(v, ky), y)
            if v.tag == "orth":
                report.tally("orthogonal to skew").record(theta(ky) == y and ky.is_skew(), y)
            if v.tag == "gl":
                report.tally("gl: inverse x -> x + 1").record(ky + one == y, y)
            if v.tag == "sl":
                h = _mat(ctx, n, rng, invertible=False)
                h = h - one.scale(h.trace() * ctx(n).inverse())
                report.tally("sl: derivative at 1").record(sl_derivative_check(v, h), h)
    return report
