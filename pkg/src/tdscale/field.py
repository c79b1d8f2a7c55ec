"""Exact arithmetic in the two ground fields: Q with a p-adic valuation and
F_p(X) with the X-adic valuation.

Elements are exact rationals / rational functions; the full completions
Q_p and F_p((X)) are never materialised. Every element produced by the
rest of the package lies in these subfields.

Absolute values are never stored as floats: ``|x| = q**(-valuation(x))``
and only the exponent is kept.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from flint import fmpq, nmod_poly

from .errors import ContextMismatchError, ParseError

INF = math.inf

KINDS = ("padic", "laurent")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def int_valuation(n: int, p: int) -> int:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class FieldContext:
    """Ground field descriptor.

    ``kind`` is ``"padic"`` (Q inside Q_p) or ``"laurent"`` (F_p(X) inside
    F_p((X))). The residue field has ``q = p`` elements in both cases.
    """

    kind: str
    p: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}; expected one of {KINDS}")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")

    @classmethod
    def from_spec(cls, spec: str) -> "FieldContext":
        """Parse ``"laurent:2"`` or ``"padic:3"``."""
        m = re.fullmatch(r"\s*(padic|laurent)\s*:\s*(\d+)\s*", spec)
        if m is None:
            raise ParseError(f"bad field spec {spec!r}; expected 'padic:<p>' or 'laurent:<p>'", spec)
        try:
            return cls(m.group(1), int(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc), spec) from None

    def __str__(self):
        return f"{self.kind}:{self.p}"

    @property
    def q(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == "padic" else self.p

    @cached_property
    def zero(self) -> "FieldElement":
        return self(0)

    @cached_property
    def one(self) -> "FieldElement":
        return self(1)

    @cached_property
    def uniformizer(self) -> "FieldElement":
        if self.kind == "padic":
            return PadicNumber(self, Fraction(self.p))
        return self.monomial(1, 1)

    def monomial(self, coeff: int, exponent: int) -> "FieldElement":
        """``coeff * pi**exponent`` where pi is the uniformizer."""
        if self.kind == "padic":
            return PadicNumber(self, coeff * Fraction(self.p) ** exponent)
        c = coeff % self.p
        if c == 0:
            return self.zero
        return LaurentFunction._raw(self, exponent, nmod_poly([c], self.p), nmod_poly([1], self.p))

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.ctx != self:
                raise ContextMismatchError(f"element of {value.ctx} used in {self}")
            return value
        if isinstance(value, str):
            return parse_element(self, value)
        if self.kind == "padic":
            if isinstance(value, (int, Fraction)):
                return PadicNumber(self, Fraction(value))
        else:
            if isinstance(value, int):
                c = value % self.p
                if c == 0:
                    return LaurentFunction._zero(self)
                return LaurentFunction._raw(self, 0, nmod_poly([c], self.p), nmod_poly([1], self.p))
            if isinstance(value, Fraction):
                num = value.numerator % self.p
                den = value.denominator % self.p
                if den == 0:
                    raise ZeroDivisionError(f"{value} has no image in F_{self.p}")
                return self(num * pow(den, -1, self.p))
        raise TypeError(f"cannot convert {type(value).__name__} into {self}")

    def laurent(self, terms: dict) -> "FieldElement":
        """Laurent polynomial from ``{exponent: coefficient}``."""
        if self.kind != "laurent":
            raise ContextMismatchError("laurent() needs a laurent context")
        items = {k: c % self.p for k, c in terms.items() if c % self.p}
        if not items:
            return self.zero
        lo = min(items)
        hi = max(items)
        coeffs = [0] * (hi - lo + 1)
        for k, c in items.items():
            coeffs[k - lo] = c
        return LaurentFunction._raw(self, lo, nmod_poly(coeffs, self.p), nmod_poly([1], self.p))

    def parse(self, text: str) -> "FieldElement":
        return parse_element(self, text)


class FieldElement:
    """Common operator plumbing; subclasses implement the ``_op`` hooks."""

    __slots__ = ("ctx",)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatchError(f"cannot combine elements of {self.ctx} and {other.ctx}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._add(o)

    def __radd__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o._add(self)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._add(o._neg())

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o._add(self._neg())

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._mul(o)

    def __rmul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o._mul(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self._mul(o.inverse())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o._mul(self.inverse())

    def __neg__(self):
        return self._neg()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"{type(self).__name__}({self.ctx}, {format_element(self)!r})"

    def __str__(self):
        return format_element(self)

    @property
    def valuation(self):
        """Valuation; ``INF`` for zero."""
        return self._valuation()

    def is_integral(self) -> bool:
        return self.valuation >= 0

    def is_unit(self) -> bool:
        return self.valuation == 0


class PadicNumber(FieldElement):
    """A rational number viewed inside Q_p (stored as a flint ``fmpq``)."""

    __slots__ = ("_q",)

    def __init__(self, ctx: FieldContext, value):
        self.ctx = ctx
        if type(value) is fmpq:
            self._q = value
        else:
            value = Fraction(value)
            self._q = fmpq(value.numerator, value.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(int(self._q.p), int(self._q.q))

    def is_zero(self):
        return self._q == 0

    def _add(self, o):
        return PadicNumber(self.ctx, self._q + o._q)

    def _mul(self, o):
        return PadicNumber(self.ctx, self._q * o._q)

    def _neg(self):
        return PadicNumber(self.ctx, -self._q)

    def inverse(self):
        if self._q == 0:
            raise ZeroDivisionError("division by zero")
        return PadicNumber(self.ctx, 1 / self._q)

    def _valuation(self):
        if self._q == 0:
            return INF
        p = self.ctx.p
        return int_valuation(int(self._q.p), p) - int_valuation(int(self._q.q), p)

    def __eq__(self, other):
        if isinstance(other, PadicNumber):
            return self.ctx == other.ctx and self._q == other._q
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(("padic", self.ctx.p, self._q))


def _low_zeros(poly) -> int:
    k = 0
    while int(poly[k]) == 0:
        k += 1
    return k


class LaurentFunction(FieldElement):
    """``X**shift * num / den`` with ``num(0) != 0``, ``den(0) == 1`` and
    ``gcd(num, den) == 1``; zero is ``shift=0, num=0, den=1``."""

    __slots__ = ("shift", "num", "den")

    @classmethod
    def _raw(cls, ctx, shift, num, den):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.shift = shift
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def _zero(cls, ctx):
        return cls._raw(ctx, 0, nmod_poly([], ctx.p), nmod_poly([1], ctx.p))

    @classmethod
    def _normalized(cls, ctx, shift, num, den, reduce=True):
        if num.is_zero():
            return cls._zero(ctx)
        k = _low_zeros(num)
        if k:
            num = num.right_shift(k)
            shift += k
        k = _low_zeros(den)
        if k:
            den = den.right_shift(k)
            shift -= k
        if reduce and den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num // g
                den = den // g
        c = int(den[0])
        if c != 1:
            inv = pow(c, -1, ctx.p)
            num = num * inv
            den = den * inv
        return cls._raw(ctx, shift, num, den)

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        """True for Laurent polynomials (finite support)."""
        return self.den.degree() == 0

    def terms(self) -> dict:
        """``{exponent: coefficient}`` of a Laurent polynomial."""
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return {self.shift + i: int(c) for i, c in enumerate(self.num.coeffs()) if int(c)}

    def _add(self, o):
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        e = min(self.shift, o.shift)
        a = self.num.left_shift(self.shift - e) if self.shift > e else self.num
        b = o.num.left_shift(o.shift - e) if o.shift > e else o.num
        if self.den.degree() == 0 and o.den.degree() == 0:
            return LaurentFunction._normalized(self.ctx, e, a + b, self.den, reduce=False)
        if self.den == o.den:
            return LaurentFunction._normalized(self.ctx, e, a + b, self.den)
        return LaurentFunction._normalized(self.ctx, e, a * o.den + b * self.den, self.den * o.den)

    def _mul(self, o):
        if self.is_zero() or o.is_zero():
            return LaurentFunction._zero(self.ctx)
        shift = self.shift + o.shift
        if self.den.degree() == 0 and o.den.degree() == 0:
            return LaurentFunction._raw(self.ctx, shift, self.num * o.num, self.den)
        # cross-cancel before multiplying to keep degrees small
        n1, d2 = self.num, o.den
        if d2.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1, d2 = n1 // g, d2 // g
        n2, d1 = o.num, self.den
        if d1.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2, d1 = n2 // g, d1 // g
        return LaurentFunction._normalized(self.ctx, shift, n1 * n2, d1 * d2, reduce=False)

    def _neg(self):
        return LaurentFunction._raw(self.ctx, self.shift, -self.num, self.den)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero")
        return LaurentFunction._normalized(self.ctx, -self.shift, self.den, self.num, reduce=False)

    def _valuation(self):
        return INF if self.is_zero() else self.shift

    def __eq__(self, other):
        if isinstance(other, LaurentFunction):
            return (self.ctx == other.ctx and self.shift == other.shift
                    and self.num == other.num and self.den == other.den)
        if isinstance(other, int):
            return self == self.ctx(other)
        return NotImplemented

    def __hash__(self):
        return hash(("laurent", self.ctx.p, self.shift,
                     tuple(int(c) for c in self.num.coeffs()),
                     tuple(int(c) for c in self.den.coeffs())))


def valuation(x: FieldElement):
    return x.valuation


def arith(op: str, x: FieldElement, y: FieldElement) -> FieldElement:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def component(z: FieldElement, j: int) -> FieldElement:
    """The six coefficient projections of a Laurent polynomial.

    1: positive part, 2: negative part, 3: constant term,
    4: non-negative part, 5: odd negative exponents, 6: even negative exponents.
    """
    if z.ctx.kind != "laurent":
        raise ContextMismatchError("component projections need a laurent context")
    if not z.is_polynomial():
        raise ValueError(f"{z} is not a Laurent polynomial")
    keep = {
        1: lambda k: k >= 1,
        2: lambda k: k <= -1,
        3: lambda k: k == 0,
        4: lambda k: k >= 0,
        5: lambda k: k <= -1 and k % 2 == 1,
        6: lambda k: k <= -2 and k % 2 == 0,
    }
    if j not in keep:
        raise ValueError(f"component index must be 1..6, got {j}")
    return z.ctx.laurent({k: c for k, c in z.terms().items() if keep[j](k)})


# ---------------------------------------------------------------------------
# text grammar

_PADIC_RE = re.compile(r"\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?")


class _LaurentParser:
    def __init__(self, ctx, text):
        self.ctx = ctx
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def integer(self, signed=False):
        self.ws()
        start = self.pos
        if signed and self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start:self.pos]
        if digits in ("", "-", "+"):
            self.pos = start
            self.error("expected integer")
        return int(digits)

    def power(self):
        # at 'X'
        self.pos += 1
        if self.peek() == "^":
            self.pos += 1
            return self.integer(signed=True)
        return 1

    def term(self):
        c = self.peek()
        if c.isdigit():
            coeff = self.integer()
            c = self.peek()
            if c == "*":
                self.pos += 1
                if self.peek() != "X":
                    self.error("expected 'X' after '*'")
                return coeff, self.power()
            if c == "X":
                return coeff, self.power()
            return coeff, 0
        if c == "X":
            return 1, self.power()
        self.error("expected coefficient or 'X'")

    def polynomial(self, stop=""):
        terms = {}
        sign = 1
        if self.peek() == "-":
            sign = -1
            self.pos += 1
        while True:
            coeff, exp = self.term()
            terms[exp] = terms.get(exp, 0) + sign * coeff
            c = self.peek()
            if c in ("+", "-"):
                sign = 1 if c == "+" else -1
                self.pos += 1
                continue
            if c == stop:
                break
            self.error(f"unexpected character {c!r}" if c else "unexpected end of input")
        return self.ctx.laurent(terms)

    def element(self):
        if self.peek() == "(":
            self.pos += 1
            num = self.polynomial(stop=")")
            self.pos += 1
            if self.peek() != "/":
                self.error("expected '/' after parenthesised numerator")
            self.pos += 1
            if self.peek() != "(":
                self.error("expected '(' before denominator")
            self.pos += 1
            den = self.polynomial(stop=")")
            self.pos += 1
            if self.peek():
                self.error("trailing characters")
            if den.is_zero():
                self.error("zero denominator")
            return num / den
        return self.polynomial()


def parse_element(ctx: FieldContext, text: str) -> FieldElement:
    """Parse the element grammar.

    laurent: ``term (("+"|"-") term)*`` with ``term := coeff ("*")? "X^" int | coeff | "X^" int``;
    a non-polynomial value is written ``(num)/(den)``.
    padic: ``int ("/" pos-int)?``.
    """
    if ctx.kind == "padic":
        m = _PADIC_RE.fullmatch(text)
        if m is None:
            bad = _PADIC_RE.match(text)
            raise ParseError("malformed rational", text, bad.end() if bad else 0)
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ParseError("zero denominator", text, m.start(2))
        return PadicNumber(ctx, Fraction(num, den))
    return _LaurentParser(ctx, text).element()


def _format_terms(terms: dict) -> str:
    if not terms:
        return "0"
    out = []
    for k in sorted(terms):
        c = terms[k]
        if k == 0:
            out.append(str(c))
        elif c == 1:
            out.append(f"X^{k}")
        else:
            out.append(f"{c}*X^{k}")
    return " + ".join(out)


def format_element(x: FieldElement) -> str:
    """Canonical text: increasing exponents, no zero coefficients."""
    if isinstance(x, PadicNumber):
        return str(x.value)
    if x.is_polynomial():
        return _format_terms(x.terms())
    num = x.ctx.laurent({x.shift + i: int(c) for i, c in enumerate(x.num.coeffs())})
    den = x.ctx.laurent({i: int(c) for i, c in enumerate(x.den.coeffs())})
    return f"({_format_terms(num.terms())})/({_format_terms(den.terms())})"


# ---------------------------------------------------------------------------
# sampling

def random_element(ctx: FieldContext, rng, vmin: int = -2, vmax: int = 2,
                   width: int = 2, allow_zero: bool = True) -> FieldElement:
    """Random element with valuation in ``[vmin, vmax]`` (or zero).

    Laurent kind: a Laurent polynomial supported on ``[v, v + width]``.
    p-adic kind: ``p**v * a / b`` with small units ``a``, ``b``.
    """
    if allow_zero and rng.random() < 0.15:
        return ctx.zero
    v = rng.randint(vmin, vmax)
    p = ctx.p
    if ctx.kind == "laurent":
        terms = {v: rng.randint(1, p - 1)}
        for k in range(v + 1, v + width + 1):
            terms[k] = rng.randint(0, p - 1)
        return ctx.laurent(terms)
    while True:
        a = rng.randint(-p * p, p * p)
        if a % p:
            break
    b = 1
    if rng.random() < 0.3:
        while True:
            b = rng.randint(1, p + 1)
            if b % p:
                break
    if v >= 0:
        return PadicNumber(ctx, fmpq(a * p ** v, b))
    return PadicNumber(ctx, fmpq(a, b * p ** -v))
