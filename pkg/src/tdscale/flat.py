"""Permutations of Z acting on G = F^Z by permuting coordinates.

A :class:`ShiftPermutation` translates each residue class mod ``m`` by a fixed
amount, except on a finite table of overrides. The induced automorphism has
scale 1, and the pattern subgroup ``U_A = {x : x_j = 1 for j in A}`` is
tidy for it exactly when ``sigma(A) = A``.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class ShiftPermutation:
    """``j -> exceptions.get(j, j + shifts[j % modulus])``.

    Construct through :meth:`make`, which validates bijectivity and
    normalizes to minimal modulus and minimal exception table.
    """

    modulus: int
    shifts: tuple
    exceptions: tuple = ()  # sorted (key, value) pairs

    @classmethod
    def make(cls, modulus: int, shifts, exceptions=None) -> "ShiftPermutation":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        shifts = tuple(int(c) for c in shifts)
        if len(shifts) != modulus:
            raise ValueError(f"need {modulus} shifts, got {len(shifts)}")
        targets = sorted((r + c) % modulus for r, c in enumerate(shifts))
        if targets != list(range(modulus)):
            raise ValueError("residue classes are not permuted; the rule is not a bijection")
        exc = dict(exceptions or {})
        if len(set(exc.values())) != len(exc):
            raise ValueError("exception table is not injective")
        rule_images = {k + shifts[k % modulus] for k in exc}
        if rule_images != set(exc.values()):
            raise ValueError("exception values must be a rearrangement of the rule images of their keys")
        return cls._normalized(modulus, shifts, exc)

    @classmethod
    def _normalized(cls, modulus, shifts, exc):
        for d in sorted(d for d in range(1, modulus + 1) if modulus % d == 0):
            if all(shifts[r] == shifts[r % d] for r in range(modulus)):
                modulus, shifts = d, shifts[:d]
                break
        exc = tuple(sorted((k, v) for k, v in exc.items() if v != k + shifts[k % modulus]))
        return cls(modulus, shifts, exc)

    @classmethod
    def identity(cls) -> "ShiftPermutation":
        return cls(1, (0,), ())

    @classmethod
    def finite(cls, mapping) -> "ShiftPermutation":
        """Permutation moving only finitely many points."""
        return cls.make(1, (0,), mapping)

    @classmethod
    def transposition(cls, i: int, j: int) -> "ShiftPermutation":
        return cls.finite({i: j, j: i})

    def rule(self, j: int) -> int:
        return j + self.shifts[j % self.modulus]

    def __call__(self, j: int) -> int:
        for k, v in self.exceptions:
            if k == j:
                return v
        return self.rule(j)

    def inverse(self) -> "ShiftPermutation":
        m = self.modulus
        inv = [0] * m
        for r, c in enumerate(self.shifts):
            inv[(r + c) % m] = -c
        return ShiftPermutation._normalized(m, tuple(inv), {v: k for k, v in self.exceptions})

    def compose(self, other: "ShiftPermutation") -> "ShiftPermutation":
        """``self o other`` (apply ``other`` first)."""
        L = math.lcm(self.modulus, other.modulus)
        shifts = []
        for r in range(L):
            mid = other.rule(r)
            shifts.append(self.rule(mid) - r)
        shifts = tuple(shifts)
        other_inv = other.inverse()
        touched = {k for k, _ in other.exceptions} | {other_inv(k) for k, _ in self.exceptions}
        exc = {j: self(other(j)) for j in touched}
        return ShiftPermutation._normalized(L, shifts, exc)

    def __matmul__(self, other):
        return self.compose(other)

    def __str__(self):
        return format_permutation(self)


# ---------------------------------------------------------------------------
# text format

_RULE_RE = re.compile(r"\s*(-?\d+)\s*->\s*([+-]?\d+)\s*(?:@\s*(-?\d+))?\s*$")
_EXC_RE = re.compile(r"\s*(-?\d+)\s*->\s*(-?\d+)\s*$")


def parse_permutation(text: str) -> ShiftPermutation:
    """``"mod 2: 0 -> +1 @1, 1 -> -1 @0; except 5 -> 7, 7 -> 5"``.

    The ``@target`` residue is optional and checked when present. The
    exception part may also follow on a new line.
    """
    parts = re.split(r"[;\n]", text)
    head = parts[0].strip()
    m = re.match(r"mod\s+(\d+)\s*:(.*)$", head)
    if not m:
        raise ParseError("expected 'mod m: r -> +c @t, ...'", text, 0)
    modulus = int(m.group(1))
    if modulus < 1:
        raise ParseError("modulus must be positive", text, m.start(1))
    shifts = {}
    base = m.start(2)
    for piece in m.group(2).split(","):
        rm = _RULE_RE.match(piece)
        if not rm:
            raise ParseError(f"bad rule {piece.strip()!r}", text, base)
        r, c = int(rm.group(1)), int(rm.group(2))
        if not 0 <= r < modulus or r in shifts:
            raise ParseError(f"residue {r} out of range or repeated", text, base)
        if rm.group(3) is not None and (r + c) % modulus != int(rm.group(3)) % modulus:
            raise ParseError(f"{r} {c:+d} does not land in residue {rm.group(3)}", text, base)
        shifts[r] = c
        base += len(piece) + 1
    if set(shifts) != set(range(modulus)):
        raise ParseError(f"rules must cover every residue mod {modulus}", text, len(head))
    exc = {}
    offset = len(parts[0]) + 1
    for part in parts[1:]:
        body = part.strip()
        if not body:
            offset += len(part) + 1
            continue
        em = re.match(r"except\s*(.*)$", body)
        if not em:
            raise ParseError("expected 'except j -> k, ...'", text, offset)
        for piece in em.group(1).split(","):
            xm = _EXC_RE.match(piece)
            if not xm:
                raise ParseError(f"bad exception {piece.strip()!r}", text, offset)
            k, v = int(xm.group(1)), int(xm.group(2))
            if k in exc:
                raise ParseError(f"exception for {k} repeated", text, offset)
            exc[k] = v
        offset += len(part) + 1
    try:
        return ShiftPermutation.make(modulus, [shifts[r] for r in range(modulus)], exc)
    except ValueError as e:
        raise ParseError(str(e), text, 0) from None


def format_permutation(s: ShiftPermutation) -> str:
    m = s.modulus
    rules = ", ".join(f"{r} -> {c:+d} @{(r + c) % m}" for r, c in enumerate(s.shifts))
    out = f"mod {m}: {rules}"
    if s.exceptions:
        out += "; except " + ", ".join(f"{k} -> {v}" for k, v in s.exceptions)
    return out


# ---------------------------------------------------------------------------
# orbits

@dataclass(frozen=True)
class Orbit:
    finite: bool
    elements: tuple  # sorted; partial when not finite

    def record(self) -> dict:
        return {"finite": self.finite, "size": len(self.elements), "elements": list(self.elements)}


def orbit(sigma: ShiftPermutation, j: int, cap: int) -> Orbit:
    """Closure of ``j`` under ``sigma`` and its inverse, stopping after ``cap`` points."""
    if cap < 1:
        raise ValueError("cap must be positive")
    seen = {j}
    x = sigma(j)
    while x != j:
        if len(seen) >= cap:
            return Orbit(False, _with_backward(sigma, j, seen, cap))
        seen.add(x)
        x = sigma(x)
    return Orbit(True, tuple(sorted(seen)))


def _with_backward(sigma, j, seen, cap):
    inv = sigma.inverse()
    x = inv(j)
    budget = cap
    while x not in seen and budget:
        seen.add(x)
        x = inv(x)
        budget -= 1
    return tuple(sorted(seen))


@dataclass(frozen=True)
class FinitenessVerdict:
    all_finite: bool
    witness_residue: Optional[int]
    modulus: int
    cycles: tuple  # ((residues...), total shift)

    def record(self) -> dict:
        return {"verdict": "all-finite" if self.all_finite else "infinite",
                "witness_residue": self.witness_residue, "modulus": self.modulus,
                "cycles": [{"residues": list(r), "shift": c} for r, c in self.cycles]}


def orbit_finiteness(sigma: ShiftPermutation) -> FinitenessVerdict:
    """Decide whether every orbit is finite from the residue cycles.

    A residue cycle with total shift 0 closes every rule orbit through it; a
    nonzero total gives infinitely many infinite rule orbits. Exceptions alter
    finitely many orbits only, and a perturbed orbit that leaves the exception
    set follows a closed rule orbit back, so they never change the verdict.
    """
    m = sigma.modulus
    seen = set()
    cycles = []
    witness = None
    for r in range(m):
        if r in seen:
            continue
        cyc, total, x = [], 0, r
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            total += sigma.shifts[x]
            x = (x + sigma.shifts[x]) % m
        cycles.append((tuple(cyc), total))
        if total and witness is None:
            witness = min(cyc)
    return FinitenessVerdict(witness is None, witness, m, tuple(cycles))


@dataclass(frozen=True)
class PatternSubgroup:
    """``U_A = {x in F^Z : x_j = 1 for j in A}`` for finite ``A``."""

    A: frozenset

    def __init__(self, A=()):
        object.__setattr__(self, "A", frozenset(int(a) for a in A))

    def image(self, sigma: ShiftPermutation) -> "PatternSubgroup":
        return PatternSubgroup(sigma(a) for a in self.A)

    def __str__(self):
        return "{" + ", ".join(str(a) for a in sorted(self.A)) + "}"


def pattern_tidy(sigma: ShiftPermutation, U: PatternSubgroup) -> bool:
    """``U_A`` is tidy for ``pi(sigma)`` iff ``sigma(A) = A``."""
    if not isinstance(U, PatternSubgroup):
        U = PatternSubgroup(U)
    return U.image(sigma) == U


def joint_finite_orbits(generators, window, cap: int) -> list:
    """Partition of the window points into orbits of the generated group.

    Each orbit is explored breadth-first under all generators and their
    inverses and flagged infinite once it exceeds ``cap`` points.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    moves = gens + [g.inverse() for g in gens]
    lo, hi = window
    covered = set()
    out = []
    for j in range(lo, hi + 1):
        if j in covered:
            continue
        seen = {j}
        queue = deque([j])
        finite = True
        while queue:
            x = queue.popleft()
            for g in moves:
                y = g(x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
            if len(seen) > cap:
                finite = False
                break
        covered |= seen
        out.append(Orbit(finite, tuple(sorted(seen))))
    return out


def covering_invariant_pattern(sigma: ShiftPermutation, window, cap: int) -> Optional[PatternSubgroup]:
    """Union of the sigma-orbits meeting the window, or None if one is infinite.

    Larger windows give smaller tidy subgroups ``U_A``.
    """
    lo, hi = window
    A = set()
    for j in range(lo, hi + 1):
        if j in A:
            continue
        o = orbit(sigma, j, cap)
        if not o.finite:
            return None
        A.update(o.elements)
    return PatternSubgroup(A)


def invariant_subsets(sigma: ShiftPermutation, window) -> list:
    """Every ``A`` inside the window with ``sigma(A) = A``, by exhaustive check.

    All ``2**w`` subsets are tested: the image of a bitmask is the OR of the
    images of its low and high halves, each tabulated with numpy. A sentinel
    bit records points mapped outside the window.
    """
    lo, hi = window
    w = hi - lo + 1
    if not 0 < w <= 40:
        raise ValueError("window width must be between 1 and 40")
    escape = np.uint64(1) << np.uint64(w)
    bit_image = []
    for b in range(w):
        t = sigma(lo + b) - lo
        bit_image.append(np.uint64(1) << np.uint64(t) if 0 <= t < w else escape)
    h = w // 2
    low_tab = _or_table(bit_image[:h])
    high_tab = _or_table(bit_image[h:])
    low_ids = np.arange(1 << h, dtype=np.uint64)
    found = []
    shift = np.uint64(h)
    for hi_mask in range(1 << (w - h)):
        want = low_ids | (np.uint64(hi_mask) << shift)
        hits = np.nonzero((low_tab | high_tab[hi_mask]) == want)[0]
        for lo_mask in hits:
            mask = int(want[lo_mask])
            found.append(frozenset(lo + b for b in range(w) if mask >> b & 1))
    return found


def _or_table(images) -> np.ndarray:
    tab = np.zeros(1 << len(images), dtype=np.uint64)
    for b, img in enumerate(images):
        size = 1 << b
        tab[size:2 * size] = tab[:size] | img
    return tab


EXAMPLE_SIGMA = "mod 2: 0 -> +1 @1, 1 -> -1 @0"
EXAMPLE_TAU = "mod 2: 0 -> -1 @1, 1 -> +1 @0"


def flat_example():
    """The pair ``sigma`` (swap 2k, 2k+1) and ``tau`` (swap 2k-1, 2k)."""
    return parse_permutation(EXAMPLE_SIGMA), parse_permutation(EXAMPLE_TAU)
