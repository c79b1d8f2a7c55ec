"""Acceptance gate: nine exact checks, one PASS/FAIL line each."""
import random
import time
from fractions import Fraction

import pytest

from conftest import criterion
from oracles import companion, index_by_cosets, polynomial_from_roots, scale_from_roots
from tdscale.cayley import cayley_suite
from tdscale.counterexamples import (PadicPairElement, build_example, ex23_beta_power_closed_form,
                                     ex24_beta_power, ex24_closed_form, verify_ex24_intersection)
from tdscale.directions import (asymptotic_verdict, delta_plus, shortcut_applies, shortcut_value)
from tdscale.field import FieldContext, random_element
from tdscale.flat import (covering_invariant_pattern, flat_example, invariant_subsets, joint_finite_orbits,
                          orbit, orbit_finiteness, pattern_tidy)
from tdscale.lattices import BasisLattice, dplus_d, index_exponent
from tdscale.matrix import Matrix, random_matrix
from tdscale.scale import module_exponent, scale_exponent

FIELDS = ["laurent:2", "laurent:3", "padic:2", "padic:5"]


def test_criterion_1_linearized_pair_ex22():
    with criterion(1, "ex22 linearized pair: d+ = n, delta_n = 1/2, delta_+ = 1/2 (q = 2, 3, 5)"):
        for q in (2, 3, 5):
            t0 = time.perf_counter()
            ex = build_example("ex22", q)
            x = y = ex.V
            for n in range(1, 101):
                x, y = ex.L_alpha.apply(x), ex.L_beta.apply(y)
                assert index_exponent(x, y) == n
            rep = delta_plus(ex.L_alpha, ex.L_beta, ex.V, ex.V, 100)
            assert all(t.value == Fraction(1, 2) for t in rep.terms)
            assert rep.estimate() == Fraction(1, 2)
            assert time.perf_counter() - t0 < 1.0


def test_criterion_2_group_pair_ex22():
    with criterion(2, "ex22 pair on G: d(alpha^n O^2, beta^n O^2) = 0 and bounded(0)"):
        t0 = time.perf_counter()
        ex = build_example("ex22", 2)
        x = y = ex.V
        for _ in range(100):
            x, y = ex.alpha.apply(x), ex.beta.apply(y)
            assert dplus_d(x, y).d == 0
        verdict = asymptotic_verdict(ex.alpha, ex.beta, ex.V, ex.V, 100)
        assert verdict.bounded and verdict.bound == 0
        assert time.perf_counter() - t0 < 1.0


def test_criterion_3_ex23():
    with criterion(3, "ex23: delta_n = l/(2l+1) at odd n, odd estimate 50/101, beta^n(O) closed form"):
        for q in (2, 3, 5):
            t0 = time.perf_counter()
            ex = build_example("ex23", q)
            y = ex.V
            for n in range(1, 102):
                y = ex.beta.apply(y)
                assert y == ex23_beta_power_closed_form(ex.ctx, n)
            rep = delta_plus(ex.alpha, ex.beta, ex.V, ex.V, 101)
            odd = [t for t in rep.terms if t.n % 2 == 1]
            for t in odd:
                ell = (t.n - 1) // 2
                assert t.value == Fraction(ell, 2 * ell + 1)
            assert all(a.value <= b.value for a, b in zip(odd, odd[1:]))
            assert all(t.value < Fraction(1, 2) for t in odd)
            assert rep.estimate(lambda n: n % 2 == 1) == Fraction(50, 101)
            # even n sit exactly at the limit, so the full window supremum is 1/2
            assert rep.estimate() == Fraction(1, 2)
            assert time.perf_counter() - t0 < 1.0


def test_criterion_4_ex24():
    with criterion(4, "ex24: intersection claim n <= 8, closed form = iteration, delta_n = 1"):
        for p in (2, 3, 5):
            t0 = time.perf_counter()
            for n in range(1, 9):
                chk = verify_ex24_intersection(p, n)
                assert chk.holds, chk.counterexample
                assert chk.enumerated == p ** n
            beta = build_example("ex24", p).beta
            for x in range(p ** 6):
                el = PadicPairElement(p, x, 0)
                for n in range(1, 7):
                    el = beta.apply_element(el)
                    assert ex24_closed_form(x, n, p) == el
            assert ex24_beta_power(Fraction(-1, p + 1), 6, p)[0] == ex24_beta_power(Fraction(-1, p + 1), 6, p)[1]
            ex = build_example("ex24", p)
            rep = delta_plus(ex.alpha, ex.beta, ex.V, ex.V, 8)
            assert all(t.value == 1 for t in rep.terms)
            assert time.perf_counter() - t0 < 10.0


def test_criterion_5_scale_formula():
    with criterion(5, "scale: power law, S(M) - S(M^-1) = -v(det M), root-valuation oracle"):
        for i in range(1000):
            rng = random.Random(f"scale:{i}")
            ctx = FieldContext.from_spec(FIELDS[i % 4])
            M = random_matrix(ctx, 2 + i % 3, rng, -2, 2, 1)
            S = scale_exponent(M)
            P = M
            for n in range(2, 5):
                P = P @ M
                assert scale_exponent(P) == n * S
            assert S - scale_exponent(M.inverse()) == module_exponent(M)
        for i in range(200):
            rng = random.Random(f"roots:{i}")
            ctx = FieldContext.from_spec(FIELDS[i % 4])
            m = 2 + i % 3
            roots = [random_element(ctx, rng, -3, 3, 1, allow_zero=False) for _ in range(m)]
            if i % 2:
                M = Matrix.diag(ctx, roots)
            else:
                M = companion(ctx, polynomial_from_roots(ctx, roots))
            assert scale_exponent(M) == scale_from_roots(roots)


def test_criterion_6_index_oracle():
    with criterion(6, "index exponent = coset enumeration on 500 2x2 and 100 3x3 pairs"):
        t0 = time.perf_counter()
        for i in range(600):
            rng = random.Random(f"index:{i}")
            ctx = FieldContext.from_spec(["laurent:2", "laurent:3", "padic:2", "padic:3"][i % 4])
            m = 2 if i < 500 else 3
            A = random_matrix(ctx, m, rng, -3, 3, 1)
            B = random_matrix(ctx, m, rng, -3, 3, 1)
            assert index_exponent(BasisLattice(A), BasisLattice(B)) == index_by_cosets(A, B)
        assert time.perf_counter() - t0 < 30.0


def test_criterion_7_cayley_suite():
    with criterion(7, "Cayley identities and kappa equivariance, 1000 samples, n = 2 and 3"):
        t0 = time.perf_counter()
        for spec, n in (("padic:3", 2), ("padic:5", 3)):
            report = cayley_suite(FieldContext.from_spec(spec), n, 1000, seed=2024)
            assert report.failures == 0, report.records()
            for name in ("involution", "inverse", "skew to orthogonal", "orthogonal to skew",
                         "gl: equivariance", "sl: equivariance", "orth: equivariance",
                         "ut: equivariance"):
                assert report.tallies[name].passed == 1000
        assert time.perf_counter() - t0 < 10.0


def test_criterion_8_flat_counterexample():
    with criterion(8, "flat: sigma, tau finite 2-orbits; sigma o tau orbits 2Z, 2Z+1; no invariant A"):
        t0 = time.perf_counter()
        sigma, tau = flat_example()
        st = sigma @ tau
        for g in (sigma, tau):
            assert orbit_finiteness(g).all_finite
            for j in range(-50, 51):
                o = orbit(g, j, 10)
                assert o.finite and len(o.elements) == 2
        v = orbit_finiteness(st)
        assert not v.all_finite and v.witness_residue == 0
        parts = joint_finite_orbits([st], (-12, 12), 500)
        assert len(parts) == 2 and not any(o.finite for o in parts)
        window = set(range(-12, 13))
        assert {frozenset(set(o.elements) & window) for o in parts} == {
            frozenset(j for j in window if j % 2 == 0), frozenset(j for j in window if j % 2 == 1)}
        assert invariant_subsets(st, (-12, 12)) == [frozenset()]
        for g in (sigma, tau):
            found = invariant_subsets(g, (-12, 12))
            assert len(found) == 2 ** 12
            assert all(pattern_tidy(g, A) for A in found)
            for N in (1, 5, 20, 100):
                A = covering_invariant_pattern(g, (-N, N), 10)
                assert A is not None and pattern_tidy(g, A) and len(A.A) <= 2 * N + 3
        assert time.perf_counter() - t0 < 5.0


def _shortcut_pairs():
    ex22 = build_example("ex22", 3)
    ex23 = build_example("ex23", 3)
    ex24 = build_example("ex24", 3)
    return [
        ("ex22", ex22.L_alpha, ex22.L_beta, ex22.V, 60),
        ("ex22 reversed", ex22.L_beta, ex22.L_alpha, ex22.V, 60),
        ("ex23", ex23.alpha, ex23.beta, ex23.V, 61),
        ("ex23 reversed", ex23.beta, ex23.alpha, ex23.V, 61),
        ("ex24", ex24.alpha, ex24.beta, ex24.V, 8),
        ("ex24 reversed", ex24.beta, ex24.alpha, ex24.V, 8),
    ]


def test_criterion_9_shortcut_consistency():
    with criterion(9, "equal scales and b(W) >= W: minimiser k = n and value matches closed form"):
        for label, a, b, V, N in _shortcut_pairs():
            assert shortcut_applies(a, b, V), label
            rep = delta_plus(a, b, V, V, N)
            for t in rep.terms:
                assert t.k == t.n, (label, t)
                assert t.value == shortcut_value(a, b, V, V, t.n), (label, t)
