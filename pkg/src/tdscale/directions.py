"""Rays, the quantities delta_n / delta_+ / delta, and asymptoticity evidence.

All logarithms are in units of ``log q``; delta values are exact fractions
because ``log q`` cancels.

``delta_plus`` is a limsup; at a finite horizon ``N`` it is estimated as the
supremum of delta_n over ``n`` in ``[ceil(N/2), N]``, and the whole trace is
returned so callers can judge convergence themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import EmptyRangeError, ZeroScaleError
from .lattices import dplus_d, index_exponent


def ray(a, V, n: int) -> list:
    """``[V, a(V), ..., a^n(V)]``."""
    if n < 0:
        raise ValueError("ray length must be non-negative")
    out = [V]
    for _ in range(n):
        out.append(a.apply(out[-1]))
    return out


@dataclass(frozen=True)
class DeltaTerm:
    n: int
    k: int
    dplus: int
    value: Fraction

    def record(self) -> dict:
        return {"n": self.n, "k": self.k, "dplus": self.dplus,
                "num": self.value.numerator, "den": self.value.denominator}


@dataclass
class DeltaReport:
    """Per-n table of delta_n with the minimising ``k``.

    ``estimate()`` is the finite-horizon limsup estimate; pass ``only`` to
    restrict it to a subsequence (e.g. odd ``n``).
    """

    terms: list
    horizon: int
    scale_a: int
    scale_b: int
    finite_horizon: bool = field(default=True, init=False)

    @property
    def window(self):
        return math.ceil(self.horizon / 2), self.horizon

    def estimate(self, only: Optional[Callable[[int], bool]] = None) -> Fraction:
        lo, hi = self.window
        vals = [t.value for t in self.terms if lo <= t.n <= hi and (only is None or only(t.n))]
        if not vals:
            raise ValueError("no terms in the estimation window")
        return max(vals)

    def term(self, n: int) -> DeltaTerm:
        for t in self.terms:
            if t.n == n:
                return t
        raise KeyError(f"delta_{n} is not in this report")

    def records(self) -> list:
        return [t.record() for t in self.terms]


def _positive_scales(a, b):
    sa = a.scale_exponent()
    sb = b.scale_exponent()
    if sa <= 0:
        raise ZeroScaleError(f"{a!r} does not move to infinity (scale exponent 0)")
    if sb <= 0:
        raise ZeroScaleError(f"{b!r} does not move to infinity (scale exponent 0)")
    return sa, sb


def _k_max(n, sa, sb):
    kmax = (n * sa) // sb
    if kmax < 1:
        raise EmptyRangeError(
            f"no k >= 1 with k*{sb} <= {n}*{sa}; delta_{n} is undefined")
    return kmax


def _minimise(n, a_img, b_ray, sa, kmax) -> DeltaTerm:
    # largest k wins ties: with b(W) >= W the index is non-increasing in k
    best = None
    for k in range(1, kmax + 1):
        e = index_exponent(a_img, b_ray[k])
        if best is None or e <= best[1]:
            best = (k, e)
    k, e = best
    return DeltaTerm(n, k, e, Fraction(e, n * sa))


def delta_n(a, b, V, W, n: int) -> DeltaTerm:
    """min over admissible k of ``d_+(a^n V, b^k W) / (n log s(a))``."""
    if n < 1:
        raise ValueError("n must be positive")
    sa, sb = _positive_scales(a, b)
    kmax = _k_max(n, sa, sb)
    return _minimise(n, a.power_apply(V, n), ray(b, W, kmax), sa, kmax)


def delta_plus(a, b, V, W, horizon: int) -> DeltaReport:
    """delta_n for ``n = n0..horizon`` and the limsup estimate over the upper half.

    ``n0 = ceil(S_b / S_a)`` is the first ``n`` with a non-empty k-range; the
    undefined early terms are left out of the trace rather than filled in.
    """
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    sa, sb = _positive_scales(a, b)
    first = -(-sb // sa)
    if first > math.ceil(horizon / 2):
        raise EmptyRangeError(
            f"delta_n is undefined below n = {first}; horizon {horizon} leaves no estimation window")
    a_ray = ray(a, V, horizon)
    b_ray = ray(b, W, (horizon * sa) // sb)
    terms = []
    for n in range(first, horizon + 1):
        terms.append(_minimise(n, a_ray[n], b_ray, sa, _k_max(n, sa, sb)))
    return DeltaReport(terms, horizon, sa, sb)


def delta(a, b, V, W, horizon: int) -> Fraction:
    """``delta_+(a, b) + delta_+(b, a)`` at the given horizon."""
    return (delta_plus(a, b, V, W, horizon).estimate()
            + delta_plus(b, a, W, V, horizon).estimate())


def shortcut_applies(a, b, W) -> bool:
    """Equal scales and ``b(W) >= W``: then delta_n is attained at ``k = n``."""
    return a.scale_exponent() == b.scale_exponent() and index_exponent(W, b.apply(W)) == 0


def shortcut_value(a, b, V, W, n: int) -> Fraction:
    """``d_+(a^n V, b^n W) / (n log s(a))``."""
    sa = a.scale_exponent()
    return Fraction(index_exponent(a.power_apply(V, n), b.power_apply(W, n)), n * sa)


@dataclass
class AsymptoticVerdict:
    bounded: bool
    bound: Optional[int]
    trace: list
    k: int
    l: int
    note: str = "finite-horizon evidence, not a proof"

    def record(self) -> dict:
        return {"verdict": "bounded" if self.bounded else "growing", "bound": self.bound,
                "k": self.k, "l": self.l, "trace": list(self.trace), "note": self.note}


def asymptotic_verdict(a, b, V, W, horizon: int) -> AsymptoticVerdict:
    """Evaluate ``d(a^{nk} V, b^{nl} W)`` for ``n = 1..horizon``.

    ``k = S_b / g`` and ``l = S_a / g`` with ``g = gcd(S_a, S_b)`` so both
    rays grow at the same rate. Verdict "bounded" when the last quarter of the
    trace never exceeds the maximum reached before it.
    """
    sa, sb = _positive_scales(a, b)
    g = math.gcd(sa, sb)
    k, l = sb // g, sa // g
    trace = []
    x, y = V, W
    for _ in range(horizon):
        x = a.power_apply(x, k)
        y = b.power_apply(y, l)
        trace.append(dplus_d(x, y).d)
    cut = horizon - max(1, horizon // 4)
    head = trace[:cut] or [trace[0]]
    bounded = max(trace[cut:]) <= max(head)
    return AsymptoticVerdict(bounded, max(trace) if bounded else None, trace, k, l)


def moves_to_infinity_witness(a, V, W, cap: int) -> Optional[int]:
    """Smallest ``n <= cap`` with ``a^n(V)`` not inside ``W``; None if none found."""
    if index_exponent(V, W) != 0:
        raise ValueError("requires V to be contained in W")
    x = V
    for n in range(1, cap + 1):
        x = a.apply(x)
        if index_exponent(x, W) > 0:
            return n
    return None
