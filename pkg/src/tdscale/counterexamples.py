"""Exact constructions of three automorphism pairs with distinct directions
despite equal (or equivalent) linearizations, plus reproduction drivers.

* ``ex22``: G = F_q((X))^2, alpha = X^-1 on both coordinates, beta a monomial
  shift with L(beta) = diag(1, X^-2).
* ``ex23``: G = F_q((X)), alpha = X^-1, beta a monomial shift that also pushes
  odd negative exponents down by 2.
* ``ex24``: G = Q_p x Q_p/Z_p with alpha(x, y) = (x/p, y) and
  beta(x, y) = (x/p, y + q(x/p)).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .automorphisms import AutomorphismHandle, LinearAutomorphism, MonomialAutomorphism, ShiftRule
from .directions import asymptotic_verdict, delta_n, delta_plus, shortcut_applies, shortcut_value
from .errors import PreconditionError, UnsupportedSubgroupError
from .field import FieldContext, is_prime, int_valuation
from .lattices import ExponentSet, MonomialLattice, dplus_d, index_exponent
from .matrix import Matrix

EXAMPLE_IDS = ("ex22", "ex23", "ex24")


# ---------------------------------------------------------------------------
# Q_p x Q_p/Z_p

def padic_fractional_part(z: Fraction, p: int) -> Fraction:
    """Representative in ``Z[1/p] n [0, 1)`` of ``z`` modulo ``Z_p``."""
    z = Fraction(z)
    if z == 0:
        return Fraction(0)
    v = int_valuation(z.numerator, p) - int_valuation(z.denominator, p)
    if v >= 0:
        return Fraction(0)
    pk = p ** (-v)
    den = z.denominator // pk
    u = (z.numerator * pow(den, -1, pk)) % pk
    return Fraction(u, pk)


def _check_zp(x: Fraction, p: int):
    x = Fraction(x)
    if int_valuation(x.denominator, p) > 0:
        raise PreconditionError(f"{x} is not in Z_{p}")
    return x


@dataclass(frozen=True)
class PadicPairElement:
    """``(x, y + Z_p)`` with ``y`` kept in ``[0, 1)``."""

    p: int
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", padic_fractional_part(Fraction(self.y), self.p))

    def __add__(self, other):
        return PadicPairElement(self.p, self.x + other.x, self.y + other.y)

    def __neg__(self):
        return PadicPairElement(self.p, -self.x, -self.y)

    def __str__(self):
        return f"({self.x}, {self.y} mod 1)"


@dataclass(frozen=True)
class PadicRaySubgroup:
    """``gen^power(V)`` for ``V = Z_p x {0}``.

    Powers ``<= 0`` of beta agree with those of alpha on V, so they are stored
    as alpha. ``alpha^n(V) = p^-n Z_p x {0}`` and
    ``beta^k(V) = {(p^-k x, c_k x) : x in Z_p}`` where ``c_k = sum_{i=1..k} p^-i``.
    """

    p: int
    gen: str
    power: int

    def __post_init__(self):
        if self.gen not in ("alpha", "beta"):
            raise ValueError("gen must be 'alpha' or 'beta'")
        if self.gen == "beta" and self.power <= 0:
            object.__setattr__(self, "gen", "alpha")

    def _check(self, other):
        if not isinstance(other, PadicRaySubgroup) or other.p != self.p:
            raise UnsupportedSubgroupError("index needs two subgroups of the same ray family")

    def index_exponent(self, other: "PadicRaySubgroup") -> int:
        """``log_p [self : self n other]``."""
        self._check(other)
        n, k = self.power, other.power
        if self.gen == other.gen:
            return max(n - k, 0)
        if self.gen == "alpha":
            return n - k + _beta_alpha_codim(self.p, k, n)
        return _beta_alpha_codim(self.p, n, k)

    def contains(self, el: PadicPairElement) -> bool:
        if el.p != self.p:
            return False
        scaled = el.x * Fraction(self.p) ** self.power
        if int_valuation(scaled.denominator, self.p) > 0:
            return False
        if self.gen == "alpha":
            return el.y == 0
        return el.y == padic_fractional_part(scaled * beta_slope(self.p, self.power), self.p)

    def __str__(self):
        return f"{self.gen}^{self.power}(Z_{self.p} x 0)"


def beta_slope(p: int, k: int) -> Fraction:
    """``c_k`` with ``beta^k(x, 0) = (p^-k x, c_k x + Z_p)`` for ``x`` in Z_p."""
    return sum((Fraction(1, p ** i) for i in range(1, k + 1)), Fraction(0))


def _beta_alpha_codim(p: int, k: int, n: int) -> int:
    """``log_p [Z_p : X]`` for ``X = {x in p^r Z_p : c_k x in Z_p}``, ``r = max(k - n, 0)``.

    That is the index of ``alpha^n(V) n beta^k(V)`` in ``beta^k(V)``; the
    kernel of ``x -> c_k x mod Z_p`` is ``p^(-v(c_k)) Z_p``.
    """
    r = max(k - n, 0)
    c = beta_slope(p, k)
    kernel = 0 if c == 0 else max(0, -(int_valuation(c.numerator, p) - int_valuation(c.denominator, p)))
    return max(r, kernel)


class PadicPairAutomorphism(AutomorphismHandle):
    def __init__(self, kind: str, p: int, sign: int = 1):
        if kind not in ("alpha", "beta"):
            raise ValueError("kind must be 'alpha' or 'beta'")
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        self.kind, self.p, self.sign = kind, p, sign
        self.name = kind if sign == 1 else f"{kind}^-1"
        self._scale = None

    def linearization(self) -> LinearAutomorphism:
        ctx = FieldContext("padic", self.p)
        c = Fraction(1, self.p) if self.sign == 1 else Fraction(self.p)
        return LinearAutomorphism(Matrix(ctx, [[c]]), name=f"L({self.name})")

    def scale_exponent(self) -> int:
        # both maps agree with L near 0 and the scale is inherited from L
        if self._scale is None:
            self._scale = self.linearization().scale_exponent()
        return self._scale

    def inverse(self) -> "PadicPairAutomorphism":
        return PadicPairAutomorphism(self.kind, self.p, -self.sign)

    def apply_element(self, el: PadicPairElement) -> PadicPairElement:
        p = self.p
        if self.sign == 1:
            x = el.x / p
            y = el.y + (padic_fractional_part(x, p) if self.kind == "beta" else 0)
        else:
            x = el.x * p
            y = el.y - (padic_fractional_part(el.x, p) if self.kind == "beta" else 0)
        return PadicPairElement(p, x, y)

    def apply(self, subgroup):
        if not isinstance(subgroup, PadicRaySubgroup) or subgroup.p != self.p:
            raise UnsupportedSubgroupError(f"{self.name} acts only on the Z_{self.p} x 0 ray family")
        S = subgroup
        if self.kind == "alpha":
            if S.gen == "beta":
                raise UnsupportedSubgroupError("alpha image of a beta-ray subgroup leaves the family")
            return PadicRaySubgroup(self.p, "alpha", S.power + self.sign)
        if S.gen == "alpha" and S.power > 0:
            raise UnsupportedSubgroupError("beta image of p^-n Z_p x 0 (n > 0) leaves the family")
        return PadicRaySubgroup(self.p, "beta", S.power + self.sign)


def ex24_closed_form(x, n: int, p: int) -> PadicPairElement:
    """``beta^n(x, 0)`` from the digit expansion of ``x``."""
    x = _check_zp(x, p)
    digits = padic_digits(x, p, n)
    second = Fraction(0)
    for k in range(1, n + 1):
        second += Fraction(sum(digits[: n - k + 1]), p ** k)
    return PadicPairElement(p, x / p ** n, second)


def padic_digits(x: Fraction, p: int, count: int) -> list:
    x = _check_zp(x, p)
    pk = p ** count
    r = (x.numerator * pow(x.denominator, -1, pk)) % pk if count else 0
    out = []
    for _ in range(count):
        r, d = divmod(r, p)
        out.append(d)
    return out


def ex24_beta_power(x, n: int, p: int):
    """``(closed form, n-fold iteration)`` of ``beta^n(x, 0)``; they must agree."""
    x = _check_zp(x, p)
    beta = PadicPairAutomorphism("beta", p)
    el = PadicPairElement(p, x, 0)
    for _ in range(n):
        el = beta.apply_element(el)
    return ex24_closed_form(x, n, p), el


def ex24_second_component(digits, p: int) -> Fraction:
    """Second coordinate of ``beta^n(x, 0)`` for a digit prefix of length ``n``."""
    n = len(digits)
    total = sum(Fraction(sum(digits[: n - k + 1]), p ** k) for k in range(1, n + 1))
    return padic_fractional_part(total, p)


@functools.lru_cache(maxsize=None)
def _prefix_table(p: int, n: int):
    """All digit prefixes of length ``n`` and ``p^n *`` their second coordinate mod ``p^n``."""
    idx = np.arange(p ** n, dtype=np.int64)
    digits = np.empty((p ** n, n), dtype=np.int64)
    rest = idx.copy()
    for j in range(n):
        digits[:, j] = rest % p
        rest //= p
    partial = np.cumsum(digits, axis=1)
    # p^n * sum_{k=1..n} S_{n-k} p^-k = sum_{m=0..n-1} S_m p^m
    weights = np.array([p ** m for m in range(n)], dtype=np.int64)
    scaled = (partial * weights).sum(axis=1) % (p ** n)
    return digits, scaled


@dataclass
class IntersectionCheck:
    p: int
    n: int
    holds: bool
    enumerated: int
    counterexample: Optional[tuple] = None


def verify_ex24_intersection(p: int, n: int) -> IntersectionCheck:
    """Check ``alpha^n(V) n beta^n(V) = V`` at level ``n`` by enumerating prefixes.

    An element of beta^n(V) lies in alpha^n(V) iff its second coordinate is 0,
    and lies in V iff the first ``n`` digits vanish.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    digits, scaled = _prefix_table(p, n)
    zero_second = scaled == 0
    zero_prefix = ~digits.any(axis=1)
    bad = np.nonzero(zero_second != zero_prefix)[0]
    cex = tuple(int(d) for d in digits[bad[0]]) if len(bad) else None
    return IntersectionCheck(p, n, len(bad) == 0, len(scaled), cex)


# ---------------------------------------------------------------------------
# bundles

@dataclass
class ExampleBundle:
    id: str
    alpha: AutomorphismHandle
    beta: AutomorphismHandle
    L_alpha: AutomorphismHandle
    L_beta: AutomorphismHandle
    V: object
    ctx: Optional[FieldContext] = None
    p: Optional[int] = None


def ex22_beta_rules():
    # coordinate 0 carries v, coordinate 1 carries w
    return [
        ShiftRule(0, 0, 0, lo=1),
        ShiftRule(0, 0, -1, hi=0),
        ShiftRule(1, 0, 0, lo=0, hi=0),
        ShiftRule(1, 1, -2, lo=1),
        ShiftRule(1, 1, -1, hi=-1),
    ]


def ex23_beta_rules():
    return [
        ShiftRule(0, 0, -1, lo=0),
        ShiftRule(0, 0, -2, hi=-1, modulus=2, residue=1),
        ShiftRule(0, 0, 0, hi=-2, modulus=2, residue=0),
    ]


def build_example(example_id: str, p: int = 2) -> ExampleBundle:
    if example_id not in EXAMPLE_IDS:
        raise ValueError(f"unknown example {example_id!r}; expected one of {EXAMPLE_IDS}")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if example_id == "ex24":
        a = PadicPairAutomorphism("alpha", p)
        b = PadicPairAutomorphism("beta", p)
        return ExampleBundle("ex24", a, b, a.linearization(), b.linearization(),
                             PadicRaySubgroup(p, "alpha", 0), p=p)
    ctx = FieldContext("laurent", p)
    Xinv = ctx.monomial(1, -1)
    if example_id == "ex22":
        alpha = LinearAutomorphism(Matrix.diag(ctx, [Xinv, Xinv]), name="alpha")
        beta = MonomialAutomorphism(ctx, 2, ex22_beta_rules(), name="beta")
        L_beta = LinearAutomorphism(Matrix.diag(ctx, [ctx.one, ctx.monomial(1, -2)]), name="L(beta)")
        return ExampleBundle("ex22", alpha, beta,
                             LinearAutomorphism(alpha.matrix, name="L(alpha)"), L_beta,
                             MonomialLattice.standard(ctx, 2), ctx=ctx, p=p)
    alpha = LinearAutomorphism(Matrix(ctx, [[Xinv]]), name="alpha")
    beta = MonomialAutomorphism(ctx, 1, ex23_beta_rules(), name="beta")
    return ExampleBundle("ex23", alpha, beta,
                         LinearAutomorphism(alpha.matrix, name="L(alpha)"),
                         LinearAutomorphism(Matrix(ctx, [[Xinv]]), name="L(beta)"),
                         MonomialLattice.standard(ctx, 1), ctx=ctx, p=p)


def ex23_beta_power_closed_form(ctx: FieldContext, n: int) -> MonomialLattice:
    """``sum_{k<n} F X^-(2k+1) + O``."""
    return MonomialLattice(ctx, [ExponentSet.make(0, plus=[-(2 * k + 1) for k in range(n)])])


def ex23_delta_target(n: int) -> Fraction:
    """Closed form of delta_n for the ex23 pair: ``l/(2l+1)`` at ``n = 2l+1``, ``1/2`` at even n."""
    if n % 2:
        return Fraction((n - 1) // 2, n)
    return Fraction(1, 2)


# ---------------------------------------------------------------------------
# reproduction

def _rec(item, computed, target, n=None):
    def enc(v):
        if isinstance(v, Fraction):
            return str(v)
        return v
    out = {"item": item, "computed": enc(computed), "target": enc(target),
           "match": computed == target}
    if n is not None:
        out["n"] = n
    return out


def reproduce(example_id: str, horizon: int, p: int = 2) -> list:
    """Computed quantities next to their closed-form targets, one record each."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    ex = build_example(example_id, p)
    return {"ex22": _reproduce_ex22, "ex23": _reproduce_ex23, "ex24": _reproduce_ex24}[example_id](ex, horizon)


def _shortcut_records(ex, a, b, V, report):
    out = []
    if not shortcut_applies(a, b, V):
        return [_rec("shortcut hypotheses", False, True)]
    for t in report.terms:
        out.append(_rec("delta_n minimiser k", t.k, t.n, n=t.n))
        out.append(_rec("delta_n vs shortcut", t.value, shortcut_value(a, b, V, V, t.n), n=t.n))
    return out


def _reproduce_ex22(ex, N):
    recs = [_rec("scale L(alpha)", ex.L_alpha.scale_exponent(), 2),
            _rec("scale L(beta)", ex.L_beta.scale_exponent(), 2)]
    rep = delta_plus(ex.L_alpha, ex.L_beta, ex.V, ex.V, N)
    x, y = ex.V, ex.V
    gx, gy = ex.V, ex.V
    for n in range(1, N + 1):
        x, y = ex.L_alpha.apply(x), ex.L_beta.apply(y)
        gx, gy = ex.alpha.apply(gx), ex.beta.apply(gy)
        recs.append(_rec("d+ L(alpha)^n O^2, L(beta)^n O^2", index_exponent(x, y), n, n=n))
        recs.append(_rec("delta_n(L(alpha), L(beta))", rep.term(n).value, Fraction(1, 2), n=n))
        recs.append(_rec("d alpha^n O^2, beta^n O^2", dplus_d(gx, gy).d, 0, n=n))
    recs.append(_rec("delta_+(L(alpha), L(beta)) estimate", rep.estimate(), Fraction(1, 2)))
    verdict = asymptotic_verdict(ex.alpha, ex.beta, ex.V, ex.V, N)
    recs.append(_rec("asymptotic alpha ~ beta on G", [verdict.bounded, verdict.bound], [True, 0]))
    recs.extend(_shortcut_records(ex, ex.L_alpha, ex.L_beta, ex.V, rep))
    return recs


def _reproduce_ex23(ex, N):
    recs = [_rec("scale alpha", ex.alpha.scale_exponent(), 1),
            _rec("scale beta", ex.beta.scale_exponent(), 1)]
    y = ex.V
    for n in range(1, N + 1):
        y = ex.beta.apply(y)
        recs.append(_rec("beta^n(O)", str(y), str(ex23_beta_power_closed_form(ex.ctx, n)), n=n))
    rep = delta_plus(ex.alpha, ex.beta, ex.V, ex.V, N)
    for t in rep.terms:
        recs.append(_rec("delta_n(alpha, beta)", t.value, ex23_delta_target(t.n), n=t.n))
    odd_top = N if N % 2 else N - 1
    recs.append(_rec("delta_+ estimate along odd n", rep.estimate(lambda n: n % 2 == 1),
                     ex23_delta_target(odd_top)))
    recs.append(_rec("delta_+ limit", rep.estimate(), Fraction(1, 2)))
    verdict = asymptotic_verdict(ex.alpha, ex.beta, ex.V, ex.V, N)
    recs.append(_rec("asymptotic alpha ~ beta", verdict.bounded, False))
    recs.extend(_shortcut_records(ex, ex.alpha, ex.beta, ex.V, rep))
    return recs


def _reproduce_ex24(ex, N):
    p = ex.p
    recs = [_rec("scale alpha", ex.alpha.scale_exponent(), 1),
            _rec("scale beta", ex.beta.scale_exponent(), 1)]
    for n in range(1, N + 1):
        chk = verify_ex24_intersection(p, n)
        recs.append(_rec("alpha^n(V) n beta^n(V) = V", chk.holds, True, n=n))
    sample = [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, p + 1), Fraction(p ** 3 + 2)]
    for x in sample:
        for n in range(1, min(N, 6) + 1):
            closed, iterated = ex24_beta_power(x, n, p)
            recs.append(_rec(f"beta^n({x}, 0) closed form", str(closed), str(iterated), n=n))
    fwd = delta_plus(ex.alpha, ex.beta, ex.V, ex.V, N)
    bwd = delta_plus(ex.beta, ex.alpha, ex.V, ex.V, N)
    for t in fwd.terms:
        recs.append(_rec("delta_n(alpha, beta)", t.value, Fraction(1), n=t.n))
    for t in bwd.terms:
        recs.append(_rec("delta_n(beta, alpha)", t.value, Fraction(1), n=t.n))
    recs.append(_rec("delta(alpha, beta)", fwd.estimate() + bwd.estimate(), Fraction(2)))
    recs.extend(_shortcut_records(ex, ex.alpha, ex.beta, ex.V, fwd))
    return recs


def all_match(records) -> bool:
    return all(r["match"] for r in records)
