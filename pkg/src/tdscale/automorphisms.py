"""Automorphism handles acting on compact open subgroups.

Every handle exposes ``scale_exponent()``, ``inverse()`` and ``apply(subgroup)``.
Concrete handles: :class:`LinearAutomorphism` (a matrix) and
:class:`MonomialAutomorphism` (a piecewise monomial shift of K^m). The p-adic
pair automorphisms live in :mod:`tdscale.counterexamples`.
"""
from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Optional

from .errors import UnsupportedSubgroupError
from .field import FieldContext
from .lattices import BasisLattice, ExponentSet, MonomialLattice, index_exponent
from .matrix import Matrix
from . import scale


class AutomorphismHandle(abc.ABC):
    name: str = ""

    @abc.abstractmethod
    def scale_exponent(self) -> int:
        ...

    @abc.abstractmethod
    def inverse(self) -> "AutomorphismHandle":
        ...

    @abc.abstractmethod
    def apply(self, subgroup):
        ...

    def module_exponent(self) -> int:
        return self.scale_exponent() - self.inverse().scale_exponent()

    def power_apply(self, subgroup, n: int):
        op = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            subgroup = op.apply(subgroup)
        return subgroup

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class LinearAutomorphism(AutomorphismHandle):
    def __init__(self, matrix: Matrix, name: str = ""):
        self.matrix = matrix
        self.name = name or str(matrix)
        self._scale = None

    @property
    def ctx(self):
        return self.matrix.ctx

    def scale_exponent(self) -> int:
        if self._scale is None:
            self._scale = scale.scale_exponent(self.matrix)
        return self._scale

    def module_exponent(self) -> int:
        return scale.module_exponent(self.matrix)

    def inverse(self) -> "LinearAutomorphism":
        return LinearAutomorphism(self.matrix.inverse(), name=f"({self.name})^-1")

    def apply(self, subgroup):
        if isinstance(subgroup, BasisLattice):
            return subgroup.transform(self.matrix)
        if isinstance(subgroup, MonomialLattice):
            return self._apply_monomial(subgroup)
        raise UnsupportedSubgroupError(
            f"linear map cannot act on {type(subgroup).__name__}")

    def _apply_monomial(self, L: MonomialLattice) -> MonomialLattice:
        M = self.matrix
        out = [None] * M.n
        for j in range(M.n):
            nz = [i for i in range(M.n) if M[i, j]]
            if len(nz) != 1:
                raise UnsupportedSubgroupError("only monomial matrices act on monomial lattices")
            i = nz[0]
            entry = M[i, j]
            if not entry.is_polynomial() or len(entry.terms()) != 1:
                raise UnsupportedSubgroupError("matrix entries must be monomials c*X^e")
            if out[i] is not None:
                raise UnsupportedSubgroupError("matrix is not monomial")
            out[i] = L.coords[j].shifted(entry.valuation)
        return MonomialLattice(L.ctx, out)

    def apply_vector(self, vec):
        ctx = self.ctx
        return tuple(sum((self.matrix[i, j] * vec[j] for j in range(len(vec))), ctx.zero)
                     for i in range(self.matrix.n))


@dataclass(frozen=True)
class ShiftRule:
    """``X^k e_in -> X^(k+shift) e_out`` for ``k`` in the guard.

    Guard: ``lo <= k <= hi`` (either side optional) and ``k = residue mod modulus``.
    """

    coord_in: int
    coord_out: int
    shift: int
    lo: Optional[int] = None
    hi: Optional[int] = None
    modulus: int = 1
    residue: int = 0

    def matches(self, coord: int, k: int) -> bool:
        return (coord == self.coord_in
                and (self.lo is None or k >= self.lo)
                and (self.hi is None or k <= self.hi)
                and k % self.modulus == self.residue % self.modulus)

    def inverse(self) -> "ShiftRule":
        c = self.shift
        return ShiftRule(self.coord_out, self.coord_in, -c,
                         None if self.lo is None else self.lo + c,
                         None if self.hi is None else self.hi + c,
                         self.modulus, (self.residue + c) % self.modulus)


class MonomialAutomorphism(AutomorphismHandle):
    """Additive automorphism of K^m permuting the monomials ``X^k e_i``.

    Acts on closed F-spans of monomials (:class:`MonomialLattice`) exactly.
    """

    def __init__(self, ctx: FieldContext, m: int, rules, name: str = "", check_window: int = 64):
        self.ctx = ctx
        self.m = m
        self.rules = tuple(rules)
        self.name = name
        self._scale = None
        bounds = self._bounds()
        w = max(check_window, max((abs(b) for b in bounds), default=0) + 8)
        ok, problem = self.bijectivity_report(-w, w)
        if not ok:
            raise ValueError(f"rules do not define a bijection: {problem}")

    def _bounds(self):
        return [b for r in self.rules for b in (r.lo, r.hi) if b is not None]

    def index_map(self, coord: int, k: int):
        hits = [r for r in self.rules if r.matches(coord, k)]
        if len(hits) != 1:
            raise ValueError(f"{len(hits)} rules match X^{k} in coordinate {coord}")
        r = hits[0]
        return r.coord_out, k + r.shift

    def bijectivity_report(self, lo: int, hi: int, margin: Optional[int] = None):
        """Injective on ``coords x [lo, hi]`` and image covering the interior."""
        if margin is None:
            margin = max((abs(r.shift) for r in self.rules), default=0)
        seen = {}
        for i in range(self.m):
            for k in range(lo, hi + 1):
                try:
                    img = self.index_map(i, k)
                except ValueError as exc:
                    return False, str(exc)
                if img in seen:
                    return False, f"({i},{k}) and {seen[img]} both map to {img}"
                seen[img] = (i, k)
        for i in range(self.m):
            for k in range(lo + margin, hi - margin + 1):
                if (i, k) not in seen:
                    return False, f"({i},{k}) is not hit"
        return True, None

    def inverse(self) -> "MonomialAutomorphism":
        return MonomialAutomorphism(self.ctx, self.m, [r.inverse() for r in self.rules],
                                    name=f"({self.name})^-1")

    def apply_vector(self, vec):
        """Image of a tuple of Laurent polynomials."""
        out = [dict() for _ in range(self.m)]
        for i, z in enumerate(vec):
            for k, c in z.terms().items():
                j, k2 = self.index_map(i, k)
                out[j][k2] = (out[j].get(k2, 0) + c) % self.ctx.p
        return tuple(self.ctx.laurent(t) for t in out)

    def apply(self, subgroup):
        if not isinstance(subgroup, MonomialLattice):
            raise UnsupportedSubgroupError(
                f"monomial automorphism cannot act on {type(subgroup).__name__}")
        if subgroup.rank != self.m or subgroup.ctx != self.ctx:
            raise UnsupportedSubgroupError("lattice does not live in this space")
        B = max(self._bounds() + [c.tail for c in subgroup.coords]) + 1
        members = [set() for _ in range(self.m)]
        progressions = [[] for _ in range(self.m)]
        for i, S in enumerate(subgroup.coords):
            for k in S.members_below(B):
                j, k2 = self.index_map(i, k)
                members[j].add(k2)
            for r in self.rules:
                if r.coord_in != i or r.hi is not None:
                    continue
                first = B + (r.residue - B) % r.modulus
                progressions[r.coord_out].append(
                    (first + r.shift, r.modulus, (r.residue + r.shift) % r.modulus))
        coords = []
        for j in range(self.m):
            progs = progressions[j]
            if not progs:
                raise UnsupportedSubgroupError(f"image in coordinate {j} is not open")
            lcm = math.lcm(*(mod for _, mod, _ in progs))
            top = max(start for start, _, _ in progs)
            for x in range(top, top + lcm):
                if not any(x % mod == res for _, mod, res in progs):
                    raise UnsupportedSubgroupError(
                        f"image in coordinate {j} has no tail")
            extra = set(members[j])
            for start, mod, _ in progs:
                extra.update(range(start, top, mod))
            coords.append(ExponentSet.from_members(extra, top))
        return MonomialLattice(self.ctx, coords)

    # -- scale via orbit structure -------------------------------------------------

    def _class_maps(self):
        bounds = self._bounds()
        top = max(bounds, default=0)
        bot = min(bounds, default=0)
        lcm = math.lcm(*(r.modulus for r in self.rules))
        high, low = {}, {}
        for i in range(self.m):
            for res in range(lcm):
                kh = top + 1 + ((res - top - 1) % lcm)
                kl = bot - 1 - ((bot - 1 - res) % lcm)
                j, k2 = self.index_map(i, kh)
                high[(i, res)] = ((j, k2 % lcm), k2 - kh)
                j, k2 = self.index_map(i, kl)
                low[(i, res)] = ((j, k2 % lcm), k2 - kl)
        return lcm, top, bot, high, low

    @staticmethod
    def _cycles(class_map):
        """``{class: total shift of its cycle}`` plus one representative cycle list."""
        total = {}
        cycles = []
        for start in class_map:
            if start in total:
                continue
            cyc = [start]
            shift = class_map[start][1]
            nxt = class_map[start][0]
            while nxt != start:
                cyc.append(nxt)
                shift += class_map[nxt][1]
                nxt = class_map[nxt][0]
            for c in cyc:
                total[c] = shift
            cycles.append((cyc, shift))
        return total, cycles

    def scale_exponent(self) -> int:
        """Number of orbits of the monomial index map that run from +oo to -oo.

        An orbit descending from high exponents contributes exactly one new
        coordinate direction per step; orbits that turn back, are periodic or
        ascend contribute nothing to the minimal displacement index.
        """
        if self._scale is None:
            self._scale = self._count_expanding_orbits()
        return self._scale

    def _count_expanding_orbits(self, max_steps: int = 10**6) -> int:
        lcm, top, bot, high, low = self._class_maps()
        high_total, high_cycles = self._cycles(high)
        low_total, _ = self._cycles(low)
        span = self.m * lcm * max((abs(r.shift) for r in self.rules), default=0)
        H = top + 1 + span
        Lo = bot - 1 - span
        count = 0
        for cyc, C in high_cycles:
            if C >= 0:
                continue
            i, res = cyc[0]
            start = H + ((res - H) % lcm)
            for k0 in range(start, start - C, lcm):
                i_cur, k = i, k0
                for _ in range(max_steps):
                    i_cur, k = self.index_map(i_cur, k)
                    cls = (i_cur, k % lcm)
                    if k <= Lo and low_total[cls] < 0:
                        count += 1
                        break
                    if k >= H and high_total[cls] > 0:
                        break
                else:
                    raise RuntimeError("orbit trace did not settle")
        return count

    def module_exponent(self) -> int:
        O = MonomialLattice.standard(self.ctx, self.m)
        image = self.apply(O)
        return index_exponent(image, O) - index_exponent(O, image)
