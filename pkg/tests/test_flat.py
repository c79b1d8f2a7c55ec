import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bfs_orbit
from tdscale.errors import ParseError
from tdscale.flat import (PatternSubgroup, ShiftPermutation, flat_example, format_permutation,
                          invariant_subsets, joint_finite_orbits, orbit, orbit_finiteness,
                          parse_permutation, pattern_tidy)


def random_shift_permutation(rng):
    m = rng.randint(1, 6)
    targets = list(range(m))
    rng.shuffle(targets)
    shifts = [targets[r] - r + m * rng.randint(-2, 2) for r in range(m)]
    keys = rng.sample(range(-8, 9), rng.randint(0, 4))
    images = [k + shifts[k % m] for k in keys]
    rng.shuffle(images)
    return ShiftPermutation.make(m, shifts, dict(zip(keys, images)))


permutations = st.integers(0, 2 ** 32).map(lambda s: random_shift_permutation(random.Random(s)))


def test_orbit_examples():
    sigma, tau = flat_example()
    assert orbit(sigma, 0, 10).elements == (0, 1)
    assert orbit(ShiftPermutation.identity(), 17, 5).elements == (17,)
    o = orbit(sigma @ tau, 0, 100)
    assert not o.finite and all(j % 2 == 0 for j in o.elements)
    with pytest.raises(ValueError):
        orbit(sigma, 0, 0)


def test_finiteness_examples():
    sigma, tau = flat_example()
    v = orbit_finiteness(sigma)
    assert v.all_finite and v.cycles == (((0, 1), 0),)
    st_ = sigma @ tau
    assert format_permutation(st_) == "mod 2: 0 -> -2 @0, 1 -> +2 @1"
    w = orbit_finiteness(st_)
    assert not w.all_finite and w.witness_residue == 0
    assert orbit_finiteness(ShiftPermutation.identity()).all_finite


def test_pattern_tidy_examples():
    sigma, tau = flat_example()
    assert pattern_tidy(sigma, PatternSubgroup({0, 1}))
    assert pattern_tidy(sigma @ tau, PatternSubgroup())
    assert not pattern_tidy(sigma @ tau, PatternSubgroup({0}))
    assert PatternSubgroup({0}).image(sigma @ tau) == PatternSubgroup({-2})


def test_joint_orbit_examples():
    sigma, tau = flat_example()
    parts = joint_finite_orbits([sigma, tau], (-20, 20), 1000)
    assert parts and not any(o.finite for o in parts)
    single = joint_finite_orbits([ShiftPermutation.identity()], (-3, 3), 10)
    assert [o.elements for o in single] == [(j,) for j in range(-3, 4)]
    swaps = [ShiftPermutation.transposition(i, i + 1) for i in range(-20, 21)]
    parts = joint_finite_orbits(swaps, (-20, 20), 10 ** 3)
    assert len(parts) == 1 and parts[0].finite
    assert set(range(-20, 22)) == set(parts[0].elements)
    with pytest.raises(ValueError):
        joint_finite_orbits([], (0, 1), 5)


def test_parse_and_validation():
    sigma = parse_permutation("mod 2: 0 -> +1 @1, 1 -> -1 @0")
    assert sigma(4) == 5 and sigma(5) == 4
    swap = parse_permutation("mod 1: 0 -> +0; except 5 -> 7, 7 -> 5")
    assert swap(5) == 7 and swap(7) == 5 and swap(6) == 6
    assert parse_permutation("mod 1: 0 -> +0\nexcept 5 -> 7, 7 -> 5") == swap
    bad = [
        "mod 2: 0 -> +1 @0, 1 -> -1 @0",
        "mod 2: 0 -> +0, 1 -> +1",
        "mod 2: 0 -> +1",
        "mod 0: 0 -> +0",
        "2: 0 -> +1, 1 -> -1",
        "mod 2: 0 -> +1 @1, 1 -> -1 @0; except 5 -> 7, 7 -> 5",
        "mod 1: 0 -> +0; except 1 -> 2",
        "mod 1: 0 -> +0; excpt 1 -> 1",
    ]
    for text in bad:
        with pytest.raises(ParseError):
            parse_permutation(text)


def test_invariant_subset_search():
    sigma, tau = flat_example()
    assert invariant_subsets(sigma @ tau, (-12, 12)) == [frozenset()]
    found = invariant_subsets(sigma, (0, 5))
    assert len(found) == 8 and frozenset({0, 1, 4, 5}) in found
    assert len(invariant_subsets(ShiftPermutation.identity(), (0, 4))) == 32
    with pytest.raises(ValueError):
        invariant_subsets(sigma, (0, 40))


@given(permutations)
def test_finiteness_agrees_with_bfs(sigma):
    inv = sigma.inverse()
    all_finite = all(bfs_orbit(sigma, inv, j, 10 ** 4)[0] for j in range(-60, 61))
    verdict = orbit_finiteness(sigma)
    assert verdict.all_finite == all_finite
    if not verdict.all_finite:
        far = 1000 * sigma.modulus + verdict.witness_residue
        assert not bfs_orbit(sigma, inv, far, 10 ** 4)[0]


def test_finiteness_agrees_with_bfs_on_200_seeded_permutations():
    for seed in range(200):
        sigma = random_shift_permutation(random.Random(f"flat:{seed}"))
        inv = sigma.inverse()
        finite = all(bfs_orbit(sigma, inv, j, 10 ** 4)[0] for j in range(-60, 61))
        assert orbit_finiteness(sigma).all_finite == finite, format_permutation(sigma)


@given(permutations, st.frozensets(st.integers(-15, 15), max_size=6))
def test_tidy_for_sigma_iff_for_inverse(sigma, A):
    U = PatternSubgroup(A)
    assert pattern_tidy(sigma, U) == pattern_tidy(sigma.inverse(), U)


@given(permutations, permutations)
def test_composition_and_inverse_pointwise(a, b):
    ab = a @ b
    ainv = a.inverse()
    for j in range(-40, 41):
        assert ab(j) == a(b(j))
        assert ainv(a(j)) == j
    inv = ab.inverse()
    assert all(inv(ab(j)) == j for j in range(-40, 41))


@given(permutations)
def test_format_parse_roundtrip(sigma):
    assert parse_permutation(format_permutation(sigma)) == sigma
